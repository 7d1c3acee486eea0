//! Weighted nearest neighbour distance (NND) detector.
//!
//! The raw score of a query is `Σ_i w_i · d_i(y)` over its `k` nearest
//! training distances with linearly descending weights. With the signed
//! variant every training record's signed distance to `y` is `S_y - S_x`
//! (attribute sums over directional attributes), so the nearest neighbours
//! are simply the training records with the largest sums and no neighbour
//! search is needed. Adirectional attributes are then scored separately
//! with an absolute-distance NND and added on top.

use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::distance::{DistanceSpec, DistanceVariant};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::neighbours::knn_unchecked;

pub const DEFAULT_K: usize = 8;

/// `w_i = 2(k+1-i) / (k(k+1))` for `i = 1..=k`.
pub fn linear_weights(k: usize) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    let denom = (k * (k + 1)) as f64;
    Ok((1..=k).map(|i| 2.0 * (k + 1 - i) as f64 / denom).collect())
}

/// Maps a raw score onto `(0, 1)` with `a ↦ a / (2(|a| + 1)) + 1/2`.
///
/// Strictly increasing, so rankings (and AUROC) are unchanged.
#[inline]
pub fn contract(a: f64) -> f64 {
    0.5 * a / (a.abs() + 1.0) + 0.5
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NndConfig {
    pub k: usize,
    /// Variant applied to directional attributes; adirectional ones always use absolute.
    pub variant: DistanceVariant,
    pub exponent: f64,
}

impl Default for NndConfig {
    fn default() -> Self {
        Self {
            k: DEFAULT_K,
            variant: DistanceVariant::Absolute,
            exponent: 1.0,
        }
    }
}

impl NndConfig {
    pub fn new(k: usize, variant: DistanceVariant) -> Self {
        Self {
            k,
            variant,
            exponent: 1.0,
        }
    }
}

/// Signed-variant state: descending directional sums plus the adirectional
/// sub-problem, if any.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct SignedParts {
    pub(crate) directional_cols: Vec<usize>,
    pub(crate) sorted_sums: Vec<f64>,
    pub(crate) adirectional_cols: Vec<usize>,
    pub(crate) adirectional_train: Option<Matrix>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NndModel {
    pub(crate) train: Matrix,
    pub(crate) weights: Vec<f64>,
    pub(crate) spec: DistanceSpec,
    pub(crate) variant: DistanceVariant,
    pub(crate) signed: Option<SignedParts>,
}

pub(crate) fn weighted_knn_score(train: &Matrix, y: &[f64], weights: &[f64], spec: &DistanceSpec) -> f64 {
    let nn = knn_unchecked(train, y, weights.len(), spec);
    weights.iter().zip(&nn.distances).map(|(w, d)| w * d).sum()
}

fn directional_sum(y: &[f64], cols: &[usize]) -> f64 {
    cols.iter().map(|&j| y[j]).sum()
}

impl NndModel {
    /// Fits on an already oriented and scaled training set.
    pub fn fit(train: &Dataset, cfg: &NndConfig) -> Result<Self> {
        let n = train.n_records();
        if n == 0 {
            return Err(Error::InsufficientData("empty training set".into()));
        }
        if cfg.k > n {
            return Err(Error::invalid(format!("k = {} exceeds training size {n}", cfg.k)));
        }
        let weights = linear_weights(cfg.k)?;
        let mask = train.directional_mask();
        let spec = DistanceSpec::directional_with_exponent(&mask, cfg.variant, cfg.exponent)?;
        let records = train.records().clone();

        let signed = (cfg.variant == DistanceVariant::Signed).then(|| {
            let directional_cols: Vec<usize> = (0..mask.len()).filter(|&j| mask[j]).collect();
            let adirectional_cols: Vec<usize> = (0..mask.len()).filter(|&j| !mask[j]).collect();
            let mut sorted_sums: Vec<f64> = records
                .iter_rows()
                .map(|x| directional_sum(x, &directional_cols))
                .collect();
            sorted_sums.sort_by(|a, b| b.total_cmp(a));
            let adirectional_train = (!adirectional_cols.is_empty()).then(|| records.select_cols(&adirectional_cols));
            SignedParts {
                directional_cols,
                sorted_sums,
                adirectional_cols,
                adirectional_train,
            }
        });

        Ok(Self {
            train: records,
            weights,
            spec,
            variant: cfg.variant,
            signed,
        })
    }

    pub fn k(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn train(&self) -> &Matrix {
        &self.train
    }

    pub fn spec(&self) -> &DistanceSpec {
        &self.spec
    }

    pub fn variant(&self) -> DistanceVariant {
        self.variant
    }

    pub fn n_attributes(&self) -> usize {
        self.train.cols()
    }

    /// Descending training sums over directional attributes (signed variant only).
    pub fn sorted_sums(&self) -> Option<&[f64]> {
        self.signed.as_ref().map(|s| s.sorted_sums.as_slice())
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.n_attributes() {
            return Err(Error::DimensionMismatch {
                expected: self.n_attributes(),
                found: len,
            });
        }
        Ok(())
    }

    /// Weighted signed distance to the `k` training records with the largest
    /// directional sums: `Σ_i w_i (S_y - S_(i))`.
    pub fn signed_risk(&self, y: &[f64]) -> Result<f64> {
        self.check_dim(y.len())?;
        let parts = self
            .signed
            .as_ref()
            .ok_or_else(|| Error::invalid("signed_risk requires the signed variant"))?;
        Ok(self.signed_risk_unchecked(parts, y))
    }

    fn signed_risk_unchecked(&self, parts: &SignedParts, y: &[f64]) -> f64 {
        let s_y = directional_sum(y, &parts.directional_cols);
        self.weights
            .iter()
            .zip(&parts.sorted_sums)
            .map(|(w, s)| w * (s_y - s))
            .sum()
    }

    pub fn raw_score(&self, y: &[f64]) -> Result<f64> {
        self.check_dim(y.len())?;
        Ok(self.raw_score_unchecked(y))
    }

    fn raw_score_unchecked(&self, y: &[f64]) -> f64 {
        match &self.signed {
            None => weighted_knn_score(&self.train, y, &self.weights, &self.spec),
            Some(parts) => {
                let adirectional = parts.adirectional_train.as_ref().map(|t| {
                    let sub: Vec<f64> = parts.adirectional_cols.iter().map(|&j| y[j]).collect();
                    let spec = DistanceSpec::uniform(sub.len(), DistanceVariant::Absolute);
                    weighted_knn_score(t, &sub, &self.weights, &spec)
                });
                match (parts.directional_cols.is_empty(), adirectional) {
                    (true, Some(a)) => a,
                    (false, Some(a)) => self.signed_risk_unchecked(parts, y) + a,
                    (_, None) => self.signed_risk_unchecked(parts, y),
                }
            }
        }
    }

    pub fn anomaly_score(&self, y: &[f64]) -> Result<f64> {
        self.raw_score(y).map(contract)
    }

    pub fn raw_scores(&self, queries: &Matrix) -> Result<Vec<f64>> {
        self.check_dim(queries.cols())?;
        Ok((0..queries.rows())
            .into_par_iter()
            .map(|i| self.raw_score_unchecked(queries.row(i)))
            .collect())
    }

    pub fn anomaly_scores(&self, queries: &Matrix) -> Result<Vec<f64>> {
        Ok(self.raw_scores(queries)?.into_iter().map(contract).collect())
    }
}
