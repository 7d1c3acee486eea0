//! Average localised proximity (ALP) detector.
//!
//! For a query `y` with `i`-th nearest neighbour distance `d_i(y)`, the
//! locally expected `i`-th distance is `D_i(y) = Σ_{j≤l} w'_j · d_i(NN_j(y))`,
//! a weighted average over the `l` nearest training records of their own
//! (self-excluded) `i`-th neighbour distances. The localised proximity
//! `lp_i = D_i / (D_i + d_i)` lies in `[0, 1]`, and the normality score is
//! the weighted maximum of `lp_1..lp_k`.
//!
//! Only absolute and ramp distances are supported.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::distance::{DistanceSpec, DistanceVariant};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::neighbours::{knn_unchecked, self_knn};
use crate::nnd::linear_weights;

/// `round(5.5 · ln n)`, at least 1.
pub fn default_k(n: usize) -> usize {
    log_default(5.5, n)
}

/// `round(6 · ln n)`, at least 1.
pub fn default_l(n: usize) -> usize {
    log_default(6.0, n)
}

fn log_default(factor: f64, n: usize) -> usize {
    let v = (factor * (n.max(1) as f64).ln()).round();
    (v as usize).max(1)
}

/// Weighted ordered average: `Σ_i w_i · X^(i)` with `X^(i)` the `i`-th largest value.
pub fn wmax(values: &[f64], weights: &[f64]) -> Result<f64> {
    if values.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: weights.len(),
            found: values.len(),
        });
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    Ok(weights.iter().zip(&sorted).map(|(w, x)| w * x).sum())
}

/// A neighbourhood size that is either given or derived from the training size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NeighbourCount {
    #[default]
    Auto,
    Fixed(usize),
}

impl fmt::Display for NeighbourCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Auto => f.write_str("auto"),
            Self::Fixed(k) => write!(f, "{k}"),
        }
    }
}

impl FromStr for NeighbourCount {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Self::Auto);
        }
        match s.parse::<usize>() {
            Ok(k) if k >= 1 => Ok(Self::Fixed(k)),
            _ => Err(Error::invalid(format!("expected a positive integer or `auto`, got \"{s}\""))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlpConfig {
    pub k: NeighbourCount,
    pub l: NeighbourCount,
    pub variant: DistanceVariant,
    pub exponent: f64,
}

impl Default for AlpConfig {
    fn default() -> Self {
        Self {
            k: NeighbourCount::Auto,
            l: NeighbourCount::Auto,
            variant: DistanceVariant::Absolute,
            exponent: 1.0,
        }
    }
}

impl AlpConfig {
    pub fn with_variant(variant: DistanceVariant) -> Self {
        Self {
            variant,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.variant == DistanceVariant::Signed {
            return Err(Error::invalid("ALP does not support the signed variant"));
        }
        Ok(())
    }

    /// Resolved `(k, l)` for `n` training records. Automatic values are
    /// clamped to `k ≤ n-1` and `l ≤ n`; explicit values must already fit.
    pub fn resolve(&self, n: usize) -> Result<(usize, usize)> {
        if n < 2 {
            return Err(Error::InsufficientData(format!("ALP needs at least 2 training records, got {n}")));
        }
        let k = match self.k {
            NeighbourCount::Auto => default_k(n).min(n - 1),
            NeighbourCount::Fixed(k) if (1..n).contains(&k) => k,
            NeighbourCount::Fixed(k) => {
                return Err(Error::invalid(format!("ALP k = {k} must be in 1..={}", n - 1)))
            }
        };
        let l = match self.l {
            NeighbourCount::Auto => default_l(n).min(n),
            NeighbourCount::Fixed(l) if (1..=n).contains(&l) => l,
            NeighbourCount::Fixed(l) => return Err(Error::invalid(format!("ALP l = {l} must be in 1..={n}"))),
        };
        Ok((k, l))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlpModel {
    pub(crate) train: Matrix,
    pub(crate) spec: DistanceSpec,
    pub(crate) variant: DistanceVariant,
    pub(crate) k_weights: Vec<f64>,
    pub(crate) l_weights: Vec<f64>,
    /// Row `t` holds the ascending self-excluded neighbour distances of training record `t`.
    pub(crate) train_nn_dists: Matrix,
}

impl AlpModel {
    /// Fits on an already oriented and scaled training set.
    pub fn fit(train: &Dataset, cfg: &AlpConfig) -> Result<Self> {
        cfg.validate()?;
        let (k, l) = cfg.resolve(train.n_records())?;
        let spec = DistanceSpec::directional_with_exponent(&train.directional_mask(), cfg.variant, cfg.exponent)?;
        let records = train.records().clone();
        let nn = self_knn(&records, k, &spec)?;
        let mut dists = Vec::with_capacity(records.rows() * k);
        for r in &nn {
            dists.extend_from_slice(&r.distances);
        }
        Ok(Self {
            train_nn_dists: Matrix::new(records.rows(), k, dists)?,
            train: records,
            spec,
            variant: cfg.variant,
            k_weights: linear_weights(k)?,
            l_weights: linear_weights(l)?,
        })
    }

    pub fn k(&self) -> usize {
        self.k_weights.len()
    }

    pub fn l(&self) -> usize {
        self.l_weights.len()
    }

    pub fn variant(&self) -> DistanceVariant {
        self.variant
    }

    pub fn spec(&self) -> &DistanceSpec {
        &self.spec
    }

    pub fn train(&self) -> &Matrix {
        &self.train
    }

    pub fn train_nn_dists(&self) -> &Matrix {
        &self.train_nn_dists
    }

    pub fn n_attributes(&self) -> usize {
        self.train.cols()
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

    /// `lp_1(y) ..= lp_k(y)`.
    pub fn localised_proximities(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(y.len())?;
        Ok(self.proximities_unchecked(y))
    }

    /// `lp_i(y)` for `1 ≤ i ≤ k`.
    pub fn localised_proximity(&self, y: &[f64], i: usize) -> Result<f64> {
        if i == 0 || i > self.k() {
            return Err(Error::invalid(format!("proximity index must be in 1..={}, got {i}", self.k())));
        }
        Ok(self.localised_proximities(y)?[i - 1])
    }

    fn proximities_unchecked(&self, y: &[f64]) -> Vec<f64> {
        let (k, l) = (self.k(), self.l());
        let nn = knn_unchecked(&self.train, y, k.max(l), &self.spec);
        (0..k)
            .map(|i| {
                let local: f64 = self
                    .l_weights
                    .iter()
                    .zip(&nn.indices[..l])
                    .map(|(w, &t)| w * self.train_nn_dists.get(t, i))
                    .sum();
                proximity(local, nn.distances[i])
            })
            .collect()
    }

    pub fn normality_score(&self, y: &[f64]) -> Result<f64> {
        self.check_dim(y.len())?;
        Ok(self.normality_unchecked(y))
    }

    fn normality_unchecked(&self, y: &[f64]) -> f64 {
        let lp = self.proximities_unchecked(y);
        // Weights sum to 1 only up to rounding.
        wmax(&lp, &self.k_weights)
            .expect("k proximities for k weights")
            .clamp(0.0, 1.0)
    }

    /// `1 - normality_score`, so higher means more anomalous.
    pub fn anomaly_score(&self, y: &[f64]) -> Result<f64> {
        self.normality_score(y).map(|s| 1.0 - s)
    }

    pub fn anomaly_scores(&self, queries: &Matrix) -> Result<Vec<f64>> {
        self.check_dim(queries.cols())?;
        Ok((0..queries.rows())
            .into_par_iter()
            .map(|i| 1.0 - self.normality_unchecked(queries.row(i)))
            .collect())
    }
}

/// `D / (D + d)`, with `0 / 0` taken as 1.
#[inline]
pub fn proximity(local: f64, own: f64) -> f64 {
    let denom = local + own;
    if denom == 0.0 {
        1.0
    } else {
        local / denom
    }
}
