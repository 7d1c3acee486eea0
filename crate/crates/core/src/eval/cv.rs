//! Cross-validation on normal records, holdout evaluation and synthetic sweeps.
//!
//! Each fold trains on four fifths of the normal records (by default) and
//! tests on the remaining normals plus every anomalous record. Orientation
//! is record-local; the scaler and detector only ever see fold-train normals.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dataset::{apply_scaler, fit_scaler, orient, Dataset, Label, ScalingParams};
use crate::error::{Error, Result};
use crate::eval::auroc::auroc;
use crate::matrix::Matrix;
use crate::pipeline::{DetectorConfig, Model};
use crate::synthgen::{generate, Family, SynthSpec};

/// Anything that can be fitted on normal records and then score queries.
pub trait Detector: Sync {
    type Model: Send;

    fn fit(&self, train: &Dataset) -> Result<Self::Model>;

    /// Higher means more anomalous.
    fn score(&self, model: &Self::Model, queries: &Matrix) -> Result<Vec<f64>>;

    /// `(detector, variant)` labels for result rows.
    fn describe(&self) -> (String, String) {
        ("custom".into(), "-".into())
    }
}

impl Detector for DetectorConfig {
    type Model = Model;

    fn fit(&self, train: &Dataset) -> Result<Model> {
        Model::fit(train, self)
    }

    fn score(&self, model: &Model, queries: &Matrix) -> Result<Vec<f64>> {
        model.anomaly_scores(queries)
    }

    fn describe(&self) -> (String, String) {
        (self.name().to_string(), self.variant().to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    /// Positions into the dataset's normal records, ascending.
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    pub folds: Vec<Fold>,
    pub seed: u64,
}

pub const DEFAULT_FOLDS: usize = 5;

/// Shuffles `0..n_normal` with `seed` and cuts it into `folds` contiguous
/// chunks; the first `n_normal % folds` chunks get one extra record.
pub fn make_folds(n_normal: usize, folds: usize, seed: u64) -> Result<FoldPlan> {
    if folds < 2 {
        return Err(Error::invalid("at least 2 folds are required"));
    }
    if n_normal < folds {
        return Err(Error::InsufficientData(format!(
            "{n_normal} normal records cannot be split into {folds} folds"
        )));
    }
    let mut idx: Vec<usize> = (0..n_normal).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let (base, extra) = (n_normal / folds, n_normal % folds);
    let mut chunks = Vec::with_capacity(folds);
    let mut start = 0;
    for f in 0..folds {
        let len = base + usize::from(f < extra);
        let mut chunk = idx[start..start + len].to_vec();
        chunk.sort_unstable();
        chunks.push(chunk);
        start += len;
    }
    let folds = (0..folds)
        .map(|f| {
            let mut train: Vec<usize> = chunks
                .iter()
                .enumerate()
                .filter(|&(g, _)| g != f)
                .flat_map(|(_, c)| c.iter().copied())
                .collect();
            train.sort_unstable();
            Fold {
                train,
                test: chunks[f].clone(),
            }
        })
        .collect();
    Ok(FoldPlan { folds, seed })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CvOptions {
    /// Fit midhinge/semi-IQR scaling on each fold's training normals.
    pub scale: bool,
}

impl Default for CvOptions {
    fn default() -> Self {
        Self { scale: true }
    }
}

/// Everything fitted for one fold, plus the prepared test set.
#[derive(Debug)]
pub struct FoldFit<M> {
    pub scaler: Option<ScalingParams>,
    pub model: M,
    pub test: Matrix,
    pub test_labels: Vec<Label>,
}

/// Fits the scaler and detector of one fold and prepares its test records.
///
/// `dataset` is raw (unoriented); `fold` indexes its normal records.
pub fn fit_fold<D: Detector>(dataset: &Dataset, fold: &Fold, detector: &D, opts: CvOptions) -> Result<FoldFit<D::Model>> {
    let oriented = orient(dataset);
    let normals = oriented.normal_indices();
    let anomalies = oriented.anomalous_indices();
    let pick = |pos: &[usize]| -> Result<Vec<usize>> {
        pos.iter()
            .map(|&p| {
                normals
                    .get(p)
                    .copied()
                    .ok_or_else(|| Error::invalid(format!("fold index {p} exceeds {} normal records", normals.len())))
            })
            .collect()
    };
    let train_rows = pick(&fold.train)?;
    let mut test_rows = pick(&fold.test)?;
    test_rows.extend_from_slice(&anomalies);

    let train = oriented.subset(&train_rows).without_labels();
    let test = oriented.subset(&test_rows);
    let (scaler, train, test) = if opts.scale {
        let p = fit_scaler(&train)?;
        let (tr, te) = (apply_scaler(&train, &p)?, apply_scaler(&test, &p)?);
        (Some(p), tr, te)
    } else {
        (None, train, test)
    };
    let model = detector.fit(&train)?;
    let test_labels = test.labels().map(<[Label]>::to_vec).unwrap_or_default();
    Ok(FoldFit {
        scaler,
        model,
        test: test.records().clone(),
        test_labels,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub dataset: String,
    pub detector: String,
    pub variant: String,
    pub fold_aurocs: Vec<f64>,
    pub mean_auroc: f64,
}

impl ExperimentResult {
    pub fn new(dataset: &str, (detector, variant): (String, String), fold_aurocs: Vec<f64>) -> Self {
        let mean_auroc = fold_aurocs.iter().sum::<f64>() / fold_aurocs.len() as f64;
        Self {
            dataset: dataset.to_string(),
            detector,
            variant,
            fold_aurocs,
            mean_auroc,
        }
    }
}

/// Runs the cross-validation protocol for one detector on a labelled dataset.
pub fn run_cv<D: Detector>(
    dataset_id: &str,
    dataset: &Dataset,
    detector: &D,
    plan: &FoldPlan,
    opts: CvOptions,
) -> Result<ExperimentResult> {
    if dataset.labels().is_none() || dataset.anomalous_indices().is_empty() || dataset.normal_indices().is_empty() {
        return Err(Error::SingleClass);
    }
    let aurocs = plan
        .folds
        .par_iter()
        .enumerate()
        .map(|(f, fold)| {
            let wrap = |e: Error| Error::Fold {
                fold: f + 1,
                source: Box::new(e),
            };
            let fit = fit_fold(dataset, fold, detector, opts).map_err(wrap)?;
            let scores = detector.score(&fit.model, &fit.test).map_err(wrap)?;
            auroc(&scores, &fit.test_labels).map_err(wrap)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ExperimentResult::new(dataset_id, detector.describe(), aurocs))
}

/// Fits on `train` (unlabelled normals) and returns the AUROC on labelled `test`.
pub fn evaluate_holdout<D: Detector>(train: &Dataset, test: &Dataset, detector: &D, opts: CvOptions) -> Result<f64> {
    let labels = test.labels().ok_or(Error::SingleClass)?;
    let train = orient(train);
    let test = orient(test);
    let (train, test) = if opts.scale {
        let p = fit_scaler(&train)?;
        (apply_scaler(&train, &p)?, apply_scaler(&test, &p)?)
    } else {
        (train, test)
    };
    let model = detector.fit(&train)?;
    let scores = detector.score(&model, test.records())?;
    auroc(&scores, labels)
}

/// Per-replicate AUROCs for one grid point and one detector.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub family: Family,
    pub shift: f64,
    pub detector: String,
    pub k: String,
    pub variant: String,
    pub aurocs: Vec<f64>,
}

impl SweepCell {
    pub fn mean_auroc(&self) -> f64 {
        self.aurocs.iter().sum::<f64>() / self.aurocs.len() as f64
    }
}

/// Generates every spec once and evaluates all detectors on it.
///
/// `specs` must be grouped by shift (as produced by `synthgen::grid`); one
/// cell is returned per (shift, detector) in first-appearance order.
pub fn run_sweep(specs: &[SynthSpec], detectors: &[DetectorConfig], opts: CvOptions) -> Result<Vec<SweepCell>> {
    for d in detectors {
        d.validate()?;
    }
    let per_spec: Vec<Vec<f64>> = specs
        .par_iter()
        .map(|spec| {
            let (train, test) = generate(spec)?;
            detectors
                .iter()
                .map(|d| evaluate_holdout(&train, &test, d, opts))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;

    let mut cells: Vec<SweepCell> = Vec::new();
    for (spec, aurocs) in specs.iter().zip(per_spec) {
        for (d, a) in detectors.iter().zip(aurocs) {
            let (detector, variant) = d.describe();
            let k = d.k_label();
            let existing = cells.iter_mut().find(|c| {
                c.family == spec.family
                    && c.shift.to_bits() == spec.shift.to_bits()
                    && c.detector == detector
                    && c.k == k
                    && c.variant == variant
            });
            match existing {
                Some(c) => c.aurocs.push(a),
                None => cells.push(SweepCell {
                    family: spec.family,
                    shift: spec.shift,
                    detector,
                    k,
                    variant,
                    aurocs: vec![a],
                }),
            }
        }
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{AttributeSpec, Direction};

    #[test]
    fn even_split() {
        let plan = make_folds(10, 5, 1).unwrap();
        assert!(plan.folds.iter().all(|f| f.test.len() == 2 && f.train.len() == 8));
    }

    #[test]
    fn remainder_goes_to_leading_folds() {
        let plan = make_folds(11, 5, 1).unwrap();
        let sizes: Vec<usize> = plan.folds.iter().map(|f| f.test.len()).collect();
        assert_eq!(sizes, vec![3, 2, 2, 2, 2]);
    }

    #[test]
    fn folds_partition_and_are_seeded() {
        let plan = make_folds(23, 5, 42).unwrap();
        let mut all: Vec<usize> = plan.folds.iter().flat_map(|f| f.test.clone()).collect();
        all.sort_unstable();
        assert_eq!(all, (0..23).collect::<Vec<_>>());
        for f in &plan.folds {
            assert!(f.test.iter().all(|i| !f.train.contains(i)));
            assert_eq!(f.train.len() + f.test.len(), 23);
        }
        assert_eq!(plan, make_folds(23, 5, 42).unwrap());
        assert_ne!(plan, make_folds(23, 5, 43).unwrap());
        assert!(make_folds(4, 5, 0).is_err());
    }

    struct Constant;
    impl Detector for Constant {
        type Model = ();
        fn fit(&self, _: &Dataset) -> Result<()> {
            Ok(())
        }
        fn score(&self, _: &(), q: &Matrix) -> Result<Vec<f64>> {
            Ok(vec![0.3; q.rows()])
        }
    }

    /// Scores by the first attribute, which encodes the class.
    struct ReadsLabel;
    impl Detector for ReadsLabel {
        type Model = ();
        fn fit(&self, _: &Dataset) -> Result<()> {
            Ok(())
        }
        fn score(&self, _: &(), q: &Matrix) -> Result<Vec<f64>> {
            Ok(q.column(0))
        }
    }

    fn labelled() -> Dataset {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..20 {
            rows.push(vec![0.0, i as f64]);
            labels.push(Label::Normal);
        }
        for i in 0..6 {
            rows.push(vec![1.0, i as f64]);
            labels.push(Label::Anomalous);
        }
        let schema = vec![
            AttributeSpec::new("flag", Direction::High),
            AttributeSpec::new("noise", Direction::None),
        ];
        Dataset::new(schema, Matrix::from_rows(&rows).unwrap(), Some(labels)).unwrap()
    }

    #[test]
    fn constant_and_perfect_detectors() {
        let ds = labelled();
        let plan = make_folds(20, 5, 0).unwrap();
        let opts = CvOptions { scale: false };
        let c = run_cv("toy", &ds, &Constant, &plan, opts).unwrap();
        assert_eq!(c.mean_auroc, 0.5);
        assert_eq!(c.fold_aurocs.len(), 5);
        let p = run_cv("toy", &ds, &ReadsLabel, &plan, opts).unwrap();
        assert_eq!(p.mean_auroc, 1.0);
    }

    #[test]
    fn fold_errors_carry_context() {
        let ds = labelled();
        let plan = make_folds(20, 5, 0).unwrap();
        let cfg = DetectorConfig::Nnd(crate::nnd::NndConfig::new(50, crate::distance::DistanceVariant::Ramp));
        let err = run_cv("toy", &ds, &cfg, &plan, CvOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Fold { .. }), "{err}");
        assert!(run_cv("toy", &ds.without_labels(), &Constant, &plan, CvOptions::default()).is_err());
    }
}
