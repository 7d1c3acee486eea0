//! Seeded synthetic benchmark datasets.
//!
//! Every attribute is directional (`high`). Normal values are drawn from
//! `N(0, 1)` (gaussian) or `Bernoulli(0.5 - 0.5b)` (bernoulli, encoded 0/1);
//! anomalous values from `N(a, 1)` or `Bernoulli(0.5 + 0.5b)`.
//!
//! Streams come from `ChaCha8Rng::seed_from_u64(seed)`. Values are drawn
//! row-major in the order training records, normal test records, anomalous
//! test records. Gaussian values use the ziggurat sampler of
//! `rand_distr::StandardNormal` plus the shift; Bernoulli values compare one
//! uniform `f64` against the success probability. Changing any of this
//! changes every generated dataset.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dataset::{AttributeSpec, Dataset, Direction, Label};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Gaussian,
    Bernoulli,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Gaussian => "gaussian",
            Self::Bernoulli => "bernoulli",
        }
    }

    /// Largest admissible shift.
    pub fn max_shift(self) -> f64 {
        match self {
            Self::Gaussian => 1.0,
            Self::Bernoulli => 0.5,
        }
    }

    /// The standard sweep: `a = 0, 0.1, …, 1` or `b = 0, 0.05, …, 0.5`.
    pub fn standard_shifts(self) -> Vec<f64> {
        let steps = match self {
            Self::Gaussian => 10.0,
            Self::Bernoulli => 20.0,
        };
        (0..=10).map(|i| i as f64 / steps).collect()
    }

    fn tag(self) -> u64 {
        match self {
            Self::Gaussian => 1,
            Self::Bernoulli => 2,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gaussian" => Ok(Self::Gaussian),
            "bernoulli" => Ok(Self::Bernoulli),
            other => Err(Error::invalid(format!("unknown family \"{other}\""))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub family: Family,
    /// `a` for gaussian, `b` for bernoulli.
    pub shift: f64,
    pub n_train: usize,
    pub n_test_normal: usize,
    pub n_test_anomalous: usize,
    pub m: usize,
    pub seed: u64,
}

impl SynthSpec {
    pub fn new(family: Family, shift: f64, seed: u64) -> Self {
        Self {
            family,
            shift,
            n_train: 1000,
            n_test_normal: 100,
            n_test_anomalous: 100,
            m: 10,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=self.family.max_shift()).contains(&self.shift) {
            return Err(Error::invalid(format!(
                "{} shift must be in [0, {}], got {}",
                self.family,
                self.family.max_shift(),
                self.shift
            )));
        }
        if self.n_train == 0 || self.n_test_normal == 0 || self.n_test_anomalous == 0 || self.m == 0 {
            return Err(Error::invalid("record and attribute counts must be positive"));
        }
        Ok(())
    }
}

pub fn synthetic_schema(m: usize) -> Vec<AttributeSpec> {
    (1..=m).map(|j| AttributeSpec::new(format!("x{j}"), Direction::High)).collect()
}

fn draw(rng: &mut ChaCha8Rng, family: Family, shift: f64, anomalous: bool, count: usize, out: &mut Vec<f64>) {
    match family {
        Family::Gaussian => {
            let centre = if anomalous { shift } else { 0.0 };
            out.extend((0..count).map(|_| centre + rng.sample::<f64, _>(StandardNormal)));
        }
        Family::Bernoulli => {
            let p = if anomalous { 0.5 + 0.5 * shift } else { 0.5 - 0.5 * shift };
            out.extend((0..count).map(|_| if rng.random::<f64>() < p { 1.0 } else { 0.0 }));
        }
    }
}

/// Returns `(train, test)`; test holds the normal records first, then the anomalous ones.
pub fn generate(spec: &SynthSpec) -> Result<(Dataset, Dataset)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let m = spec.m;

    let mut train = Vec::with_capacity(spec.n_train * m);
    draw(&mut rng, spec.family, spec.shift, false, spec.n_train * m, &mut train);

    let n_test = spec.n_test_normal + spec.n_test_anomalous;
    let mut test = Vec::with_capacity(n_test * m);
    draw(&mut rng, spec.family, spec.shift, false, spec.n_test_normal * m, &mut test);
    draw(&mut rng, spec.family, spec.shift, true, spec.n_test_anomalous * m, &mut test);

    let labels = std::iter::repeat_n(Label::Normal, spec.n_test_normal)
        .chain(std::iter::repeat_n(Label::Anomalous, spec.n_test_anomalous))
        .collect();
    let schema = synthetic_schema(m);
    Ok((
        Dataset::new(schema.clone(), Matrix::new(spec.n_train, m, train)?, None)?,
        Dataset::new(schema, Matrix::new(n_test, m, test)?, Some(labels))?,
    ))
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Stable seed for one replicate of one grid point.
pub fn replicate_seed(base_seed: u64, family: Family, shift: f64, replicate: usize) -> u64 {
    [family.tag(), shift.to_bits(), replicate as u64]
        .into_iter()
        .fold(splitmix64(base_seed), |h, v| splitmix64(h ^ v))
}

/// Specs for every `(shift, replicate)` pair, shift-major, with default sizes.
pub fn grid(family: Family, shifts: &[f64], replicates: usize, base_seed: u64) -> Result<Vec<SynthSpec>> {
    if replicates == 0 {
        return Err(Error::invalid("replicates must be at least 1"));
    }
    let mut specs = Vec::with_capacity(shifts.len() * replicates);
    for &shift in shifts {
        for r in 0..replicates {
            let spec = SynthSpec::new(family, shift, replicate_seed(base_seed, family, shift, r));
            spec.validate()?;
            specs.push(spec);
        }
    }
    Ok(specs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(family: Family, shift: f64, seed: u64) -> SynthSpec {
        SynthSpec {
            n_train: 50,
            n_test_normal: 10,
            n_test_anomalous: 10,
            m: 3,
            ..SynthSpec::new(family, shift, seed)
        }
    }

    #[test]
    fn shapes_and_labels() {
        let (train, test) = generate(&small(Family::Gaussian, 0.5, 1)).unwrap();
        assert_eq!((train.n_records(), train.n_attributes()), (50, 3));
        assert_eq!(test.n_records(), 20);
        assert!(train.labels().is_none());
        assert_eq!(test.anomalous_indices(), (10..20).collect::<Vec<_>>());
        assert!(train.schema().iter().all(|a| a.direction == Direction::High));
    }

    #[test]
    fn deterministic_per_seed() {
        let a = generate(&small(Family::Gaussian, 0.3, 7)).unwrap();
        let b = generate(&small(Family::Gaussian, 0.3, 7)).unwrap();
        let c = generate(&small(Family::Gaussian, 0.3, 8)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.0, c.0);
    }

    #[test]
    fn shift_range_is_checked() {
        assert!(generate(&small(Family::Gaussian, 1.5, 0)).is_err());
        assert!(generate(&small(Family::Gaussian, -0.1, 0)).is_err());
        assert!(generate(&small(Family::Bernoulli, 0.6, 0)).is_err());
        assert!(generate(&small(Family::Bernoulli, 0.5, 0)).is_ok());
    }

    #[test]
    fn bernoulli_is_binary_with_expected_rates() {
        let spec = SynthSpec {
            n_train: 4000,
            n_test_normal: 2000,
            n_test_anomalous: 2000,
            m: 5,
            ..SynthSpec::new(Family::Bernoulli, 0.5, 3)
        };
        let (train, test) = generate(&spec).unwrap();
        assert!(train.records().as_slice().iter().all(|&v| v == 0.0 || v == 1.0));
        let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
        // p = 0.25 and 0.75; 10 000 draws each, sd ≈ 0.0043.
        let normal = mean(test.records().select_rows(&test.normal_indices()).as_slice());
        let anomalous = mean(test.records().select_rows(&test.anomalous_indices()).as_slice());
        assert!((normal - 0.25).abs() < 0.02, "{normal}");
        assert!((anomalous - 0.75).abs() < 0.02, "{anomalous}");
    }

    #[test]
    fn gaussian_training_mean_converges() {
        let spec = SynthSpec {
            n_train: 10_000,
            ..SynthSpec::new(Family::Gaussian, 0.0, 11)
        };
        let (train, _) = generate(&spec).unwrap();
        let bound = 3.0 * (1.0 / 10_000f64.sqrt()) * 4.0;
        for j in 0..spec.m {
            let col = train.records().column(j);
            let mean = col.iter().sum::<f64>() / col.len() as f64;
            assert!(mean.abs() < bound, "attribute {j}: {mean}");
        }
    }

    #[test]
    fn grid_shape_and_seeds() {
        let g = grid(Family::Gaussian, &Family::Gaussian.standard_shifts(), 100, 0).unwrap();
        assert_eq!(g.len(), 1100);
        let b = Family::Bernoulli.standard_shifts();
        assert_eq!(b.len(), 11);
        assert_eq!(b[0], 0.0);
        assert_eq!(b[10], 0.5);
        let one = grid(Family::Bernoulli, &b, 1, 0).unwrap();
        assert_eq!(one.len(), 11);

        let seeds: std::collections::HashSet<u64> = g.iter().map(|s| s.seed).collect();
        assert_eq!(seeds.len(), g.len());
        assert_eq!(grid(Family::Gaussian, &[0.5], 3, 9).unwrap(), grid(Family::Gaussian, &[0.5], 3, 9).unwrap());
        assert!(grid(Family::Gaussian, &[0.5], 0, 9).is_err());
    }
}
