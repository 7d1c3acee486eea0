//! Per-attribute distance variants and record-level aggregation.
//!
//! For a query `y` and reference `x` each attribute contributes
//! `f(y_j - x_j)` where `f` depends on the attribute's variant:
//!
//! | variant  | contribution          |
//! |----------|-----------------------|
//! | absolute | `|y_j - x_j|`         |
//! | ramp     | `max(0, y_j - x_j)`   |
//! | signed   | `y_j - x_j`           |
//!
//! With exponent `p = 1` the record distance is the plain sum of the
//! contributions. Absolute and ramp also support a Minkowski exponent
//! `p > 1`; signed contributions can be negative and only support `p = 1`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DistanceVariant {
    Absolute,
    Ramp,
    Signed,
}

impl DistanceVariant {
    pub const ALL: [DistanceVariant; 3] = [Self::Absolute, Self::Ramp, Self::Signed];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Absolute => "absolute",
            Self::Ramp => "ramp",
            Self::Signed => "signed",
        }
    }
}

impl fmt::Display for DistanceVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for DistanceVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "absolute" | "abs" => Ok(Self::Absolute),
            "ramp" => Ok(Self::Ramp),
            "signed" => Ok(Self::Signed),
            other => Err(Error::invalid(format!("unknown distance variant \"{other}\""))),
        }
    }
}

#[inline]
pub fn per_attribute(diff: f64, variant: DistanceVariant) -> f64 {
    match variant {
        DistanceVariant::Absolute => diff.abs(),
        DistanceVariant::Ramp => diff.max(0.0),
        DistanceVariant::Signed => diff,
    }
}

/// Variant per attribute plus Minkowski exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceSpec {
    variants: Vec<DistanceVariant>,
    exponent: f64,
}

impl DistanceSpec {
    pub fn new(variants: Vec<DistanceVariant>, exponent: f64) -> Result<Self> {
        if !exponent.is_finite() || exponent < 1.0 {
            return Err(Error::invalid(format!("exponent must be finite and >= 1, got {exponent}")));
        }
        if exponent != 1.0 && variants.contains(&DistanceVariant::Signed) {
            return Err(Error::invalid("signed distance is only defined for exponent 1"));
        }
        Ok(Self { variants, exponent })
    }

    /// `variant` on directional attributes, absolute on the rest, exponent 1.
    pub fn directional(mask: &[bool], variant: DistanceVariant) -> Self {
        Self::directional_with_exponent(mask, variant, 1.0).expect("exponent 1 is always valid")
    }

    pub fn directional_with_exponent(mask: &[bool], variant: DistanceVariant, exponent: f64) -> Result<Self> {
        let variants = mask
            .iter()
            .map(|&d| if d { variant } else { DistanceVariant::Absolute })
            .collect();
        Self::new(variants, exponent)
    }

    pub fn uniform(m: usize, variant: DistanceVariant) -> Self {
        Self::directional(&vec![true; m], variant)
    }

    pub fn variants(&self) -> &[DistanceVariant] {
        &self.variants
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn dim(&self) -> usize {
        self.variants.len()
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: len,
            });
        }
        Ok(())
    }

    /// Distance without dimension checks; all batch kernels go through here.
    #[inline]
    pub(crate) fn eval(&self, y: &[f64], x: &[f64]) -> f64 {
        let terms = y.iter().zip(x).zip(&self.variants).map(|((a, b), &v)| per_attribute(a - b, v));
        if self.exponent == 1.0 {
            terms.sum()
        } else {
            let p = self.exponent;
            terms.map(|t| t.powf(p)).sum::<f64>().powf(p.recip())
        }
    }
}

pub fn record_distance(y: &[f64], x: &[f64], spec: &DistanceSpec) -> Result<f64> {
    spec.check_dim(y.len())?;
    spec.check_dim(x.len())?;
    Ok(spec.eval(y, x))
}

/// All query-to-training distances; entry `(i, j)` is `d(queries[i], train[j])`.
pub fn distance_matrix(queries: &Matrix, train: &Matrix, spec: &DistanceSpec) -> Result<Matrix> {
    spec.check_dim(queries.cols())?;
    spec.check_dim(train.cols())?;
    let n = train.rows();
    let mut out = vec![0.0; queries.rows() * n];
    if n > 0 {
        out.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            let y = queries.row(i);
            for (j, slot) in row.iter_mut().enumerate() {
                *slot = spec.eval(y, train.row(j));
            }
        });
    }
    Matrix::new(queries.rows(), n, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use DistanceVariant::*;

    #[test]
    fn per_attribute_table() {
        assert_eq!(per_attribute(-3.0, Ramp), 0.0);
        assert_eq!(per_attribute(-3.0, Signed), -3.0);
        assert_eq!(per_attribute(-3.0, Absolute), 3.0);
        for v in DistanceVariant::ALL {
            assert_eq!(per_attribute(2.0, v), 2.0);
        }
    }

    #[test]
    fn mixed_distance_paradox() {
        // One directional axis (signed) and one adirectional axis (absolute).
        let spec = DistanceSpec::new(vec![Signed, Absolute], 1.0).unwrap();
        let y = [5.0, 0.0];
        let x = [3.0, 0.0];
        // x' is far above y on the directional axis and 4 away on the other.
        let x_prime = [11.0, 4.0];
        assert_eq!(record_distance(&y, &x, &spec).unwrap(), 2.0);
        assert_eq!(record_distance(&y, &x_prime, &spec).unwrap(), -2.0);
    }

    #[test]
    fn boscovich_sum() {
        let spec = DistanceSpec::uniform(2, Absolute);
        assert_eq!(record_distance(&[1.0, 1.0], &[0.0, 3.0], &spec).unwrap(), 3.0);
    }

    #[test]
    fn identical_points_have_zero_distance() {
        let y = [0.3, -1.2, 4.0];
        for p in [1.0, 2.0, 3.5] {
            for v in [Absolute, Ramp] {
                let spec = DistanceSpec::new(vec![v; 3], p).unwrap();
                assert_eq!(record_distance(&y, &y, &spec).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn euclidean_ramp() {
        let spec = DistanceSpec::new(vec![Ramp, Ramp], 2.0).unwrap();
        assert_eq!(record_distance(&[3.0, 4.0], &[0.0, 0.0], &spec).unwrap(), 5.0);
        assert_eq!(record_distance(&[3.0, -4.0], &[0.0, 0.0], &spec).unwrap(), 3.0);
    }

    #[test]
    fn spec_validation() {
        assert!(DistanceSpec::new(vec![Signed], 2.0).is_err());
        assert!(DistanceSpec::new(vec![Absolute], 0.5).is_err());
        assert!(DistanceSpec::new(vec![Absolute], f64::INFINITY).is_err());
        let spec = DistanceSpec::uniform(2, Absolute);
        assert!(matches!(
            record_distance(&[1.0], &[1.0, 2.0], &spec),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn directional_spec_uses_absolute_for_adirectional() {
        let spec = DistanceSpec::directional(&[true, false], Ramp);
        assert_eq!(spec.variants(), &[Ramp, Absolute]);
    }

    #[test]
    fn small_distance_matrix() {
        let spec = DistanceSpec::uniform(1, Absolute);
        let q = Matrix::from_rows(&[[0.0], [1.0]]).unwrap();
        let t = Matrix::from_rows(&[[0.0], [2.0]]).unwrap();
        let d = distance_matrix(&q, &t, &spec).unwrap();
        assert_eq!(d.to_rows(), vec![vec![0.0, 2.0], vec![1.0, 1.0]]);

        let one = distance_matrix(&q.select_rows(&[1]), &t.select_rows(&[1]), &spec).unwrap();
        assert_eq!(one.get(0, 0), record_distance(&[1.0], &[2.0], &spec).unwrap());
    }

    fn vec_of(m: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-10.0f64..10.0, m)
    }

    fn variants_of(m: usize) -> impl Strategy<Value = Vec<DistanceVariant>> {
        prop::collection::vec(prop::sample::select(DistanceVariant::ALL.to_vec()), m)
    }

    proptest! {
        #[test]
        fn matrix_matches_scalar_loop(
            (q, t, variants) in (1usize..5).prop_flat_map(|m| (
                prop::collection::vec(vec_of(m), 1..6),
                prop::collection::vec(vec_of(m), 1..6),
                variants_of(m),
            ))
        ) {
            let spec = DistanceSpec::new(variants, 1.0).unwrap();
            let qm = Matrix::from_rows(&q).unwrap();
            let tm = Matrix::from_rows(&t).unwrap();
            let d = distance_matrix(&qm, &tm, &spec).unwrap();
            for (i, y) in q.iter().enumerate() {
                for (j, x) in t.iter().enumerate() {
                    prop_assert_eq!(d.get(i, j).to_bits(), record_distance(y, x, &spec).unwrap().to_bits());
                }
            }
        }

        #[test]
        fn ramp_directed_triangle_inequality(
            (x, y, z) in (1usize..6).prop_flat_map(|m| (vec_of(m), vec_of(m), vec_of(m)))
        ) {
            let spec = DistanceSpec::uniform(x.len(), Ramp);
            let d = |a: &[f64], b: &[f64]| record_distance(a, b, &spec).unwrap();
            prop_assert!(d(&y, &z) <= d(&y, &x) + d(&x, &z) + 1e-9);
            prop_assert!(d(&y, &x) >= 0.0);
            prop_assert_eq!(d(&x, &x), 0.0);
        }

        #[test]
        fn absolute_is_sum_of_both_ramps((x, y) in (1usize..6).prop_flat_map(|m| (vec_of(m), vec_of(m)))) {
            let m = x.len();
            let abs = record_distance(&y, &x, &DistanceSpec::uniform(m, Absolute)).unwrap();
            let ramp = DistanceSpec::uniform(m, Ramp);
            let both = record_distance(&y, &x, &ramp).unwrap() + record_distance(&x, &y, &ramp).unwrap();
            prop_assert!((abs - both).abs() <= 1e-12 * (1.0 + abs));
        }

        #[test]
        fn signed_is_additive(
            (x, y, y2) in (1usize..6).prop_flat_map(|m| (vec_of(m), vec_of(m), vec_of(m)))
        ) {
            let spec = DistanceSpec::uniform(x.len(), Signed);
            let lhs = record_distance(&y, &x, &spec).unwrap() - record_distance(&y2, &x, &spec).unwrap();
            let rhs: f64 = y.iter().zip(&y2).map(|(a, b)| a - b).sum();
            prop_assert!((lhs - rhs).abs() <= 1e-9);
        }
    }

    #[test]
    fn ramp_is_asymmetric() {
        let spec = DistanceSpec::uniform(1, Ramp);
        let a = record_distance(&[2.0], &[0.0], &spec).unwrap();
        let b = record_distance(&[0.0], &[2.0], &spec).unwrap();
        assert_ne!(a, b);
    }
}
