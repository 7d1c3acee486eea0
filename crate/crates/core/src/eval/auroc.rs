use crate::dataset::Label;
use crate::error::{Error, Result};

/// Area under the ROC curve as a Mann–Whitney count: the fraction of
/// (anomalous, normal) pairs where the anomaly scores higher, ties counting half.
pub fn auroc(scores: &[f64], labels: &[Label]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            found: scores.len(),
        });
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::invalid("scores contain NaN"));
    }
    let n_anom = labels.iter().filter(|l| l.is_anomalous()).count() as u64;
    let n_norm = labels.len() as u64 - n_anom;
    if n_anom == 0 || n_norm == 0 {
        return Err(Error::SingleClass);
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // Walk tie groups in ascending score order.
    let (mut wins, mut ties, mut normals_below) = (0u64, 0u64, 0u64);
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        let mut j = i;
        let (mut a, mut n) = (0u64, 0u64);
        while j < order.len() && scores[order[j]] == s {
            if labels[order[j]].is_anomalous() {
                a += 1;
            } else {
                n += 1;
            }
            j += 1;
        }
        wins += a * normals_below;
        ties += a * n;
        normals_below += n;
        i = j;
    }
    Ok((wins as f64 + 0.5 * ties as f64) / (n_anom * n_norm) as f64)
}
