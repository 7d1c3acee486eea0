//! Paired one-sided Wilcoxon signed-rank test and Holm–Bonferroni adjustment.

use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Minimum number of non-zero paired differences.
pub const MIN_PAIRS: usize = 5;

/// Largest sample for which the exact null distribution is enumerated.
pub const EXACT_MAX_N: usize = 25;

/// Differences within this relative distance count as equal (zero or tied).
/// Inputs such as AUROCs rounded to three decimals produce differences that
/// are only equal up to floating-point error.
const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WilcoxonMethod {
    Exact,
    Normal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WilcoxonResult {
    /// Sum of ranks of the positive differences.
    pub statistic: f64,
    /// Number of non-zero differences.
    pub n: usize,
    pub zeros: usize,
    pub tied: bool,
    pub method: WilcoxonMethod,
    pub p_value: f64,
}

/// Tests H1: the median of `x - y` is positive.
///
/// Zero differences are dropped and tied absolute differences share their
/// average rank. The exact null distribution is used when at most
/// [`EXACT_MAX_N`] differences remain and there were neither zeros nor ties;
/// otherwise a normal approximation with tie and continuity correction.
pub fn wilcoxon_one_sided(x: &[f64], y: &[f64]) -> Result<WilcoxonResult> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::invalid("samples must be finite"));
    }
    let mut diffs = Vec::with_capacity(x.len());
    let mut zeros = 0;
    for (a, b) in x.iter().zip(y) {
        let d = a - b;
        if d.abs() <= TIE_TOLERANCE * a.abs().max(b.abs()).max(1.0) {
            zeros += 1;
        } else {
            diffs.push(d);
        }
    }
    let n = diffs.len();
    if n < MIN_PAIRS {
        return Err(Error::InsufficientData(format!(
            "{n} non-zero differences, need at least {MIN_PAIRS}"
        )));
    }

    diffs.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    let mut statistic = 0.0;
    let mut tie_term = 0.0;
    let mut tied = false;
    let mut i = 0;
    while i < n {
        let base = diffs[i].abs();
        let mut j = i + 1;
        while j < n && diffs[j].abs() - base <= TIE_TOLERANCE * base.max(1.0) {
            j += 1;
        }
        let t = (j - i) as f64;
        // Ranks i+1 ..= j share their mean.
        let rank = (i + 1 + j) as f64 / 2.0;
        statistic += rank * diffs[i..j].iter().filter(|d| **d > 0.0).count() as f64;
        if j - i > 1 {
            tied = true;
            tie_term += t * t * t - t;
        }
        i = j;
    }

    let (method, p_value) = if n <= EXACT_MAX_N && zeros == 0 && !tied {
        (WilcoxonMethod::Exact, exact_upper_tail(n, statistic.round() as usize))
    } else {
        let nf = n as f64;
        let mean = nf * (nf + 1.0) / 4.0;
        let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
        let z = (statistic - mean - 0.5) / var.sqrt();
        (WilcoxonMethod::Normal, 0.5 * erfc(z / std::f64::consts::SQRT_2))
    };
    Ok(WilcoxonResult {
        statistic,
        n,
        zeros,
        tied,
        method,
        p_value: p_value.clamp(f64::MIN_POSITIVE, 1.0),
    })
}

/// `P(W+ ≥ w)` under the null for `n` untied ranks.
fn exact_upper_tail(n: usize, w: usize) -> f64 {
    let max = n * (n + 1) / 2;
    // counts[s] = number of sign assignments with rank sum s
    let mut counts = vec![0f64; max + 1];
    counts[0] = 1.0;
    for r in 1..=n {
        for s in (r..=max).rev() {
            counts[s] += counts[s - r];
        }
    }
    let tail: f64 = counts[w.min(max + 1)..].iter().sum();
    tail / 2f64.powi(n as i32)
}

/// Holm's step-down adjustment; output is in input order.
pub fn holm_bonferroni(pvals: &[f64]) -> Result<Vec<f64>> {
    if pvals.is_empty() {
        return Err(Error::invalid("no p-values to adjust"));
    }
    if let Some(p) = pvals.iter().find(|p| !(**p > 0.0 && **p <= 1.0)) {
        return Err(Error::invalid(format!("p-value {p} outside (0, 1]")));
    }
    let m = pvals.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| pvals[a].total_cmp(&pvals[b]));
    let mut out = vec![0.0; m];
    let mut running = 0.0f64;
    for (rank, &i) in order.iter().enumerate() {
        running = running.max((m - rank) as f64 * pvals[i]).min(1.0);
        out[i] = running;
    }
    Ok(out)
}
