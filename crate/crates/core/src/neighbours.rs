//! Exact brute-force k-nearest-neighbour queries.
//!
//! Ties between equidistant training rows are broken by ascending row index,
//! so results are deterministic. Training-internal queries exclude the query
//! row itself.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::distance::DistanceSpec;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq)]
pub struct NeighbourResult {
    /// Ascending.
    pub distances: Vec<f64>,
    pub indices: Vec<usize>,
}

impl NeighbourResult {
    pub fn len(&self) -> usize {
        self.distances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distances.is_empty()
    }
}

#[inline]
fn by_distance_then_index(a: &(f64, usize), b: &(f64, usize)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

/// Keeps the `k` smallest `(distance, index)` pairs, sorted.
fn smallest_k(mut cands: Vec<(f64, usize)>, k: usize) -> NeighbourResult {
    if k < cands.len() {
        cands.select_nth_unstable_by(k, by_distance_then_index);
        cands.truncate(k);
    }
    cands.sort_unstable_by(by_distance_then_index);
    let (distances, indices) = cands.into_iter().unzip();
    NeighbourResult { distances, indices }
}

fn check_query(train: &Matrix, len: usize, spec: &DistanceSpec) -> Result<()> {
    if train.cols() != spec.dim() || len != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            found: if len != spec.dim() { len } else { train.cols() },
        });
    }
    Ok(())
}

pub(crate) fn knn_unchecked(train: &Matrix, query: &[f64], k: usize, spec: &DistanceSpec) -> NeighbourResult {
    let cands = train
        .iter_rows()
        .enumerate()
        .map(|(j, x)| (spec.eval(query, x), j))
        .collect();
    smallest_k(cands, k)
}

/// The `k` nearest training rows to `query`.
pub fn knn(train: &Matrix, query: &[f64], k: usize, spec: &DistanceSpec) -> Result<NeighbourResult> {
    check_query(train, query.len(), spec)?;
    if k == 0 || k > train.rows() {
        return Err(Error::invalid(format!(
            "k must be in 1..={}, got {k}",
            train.rows()
        )));
    }
    Ok(knn_unchecked(train, query, k, spec))
}

/// [`knn`] for every row of `queries`, in parallel.
pub fn knn_batch(train: &Matrix, queries: &Matrix, k: usize, spec: &DistanceSpec) -> Result<Vec<NeighbourResult>> {
    check_query(train, queries.cols(), spec)?;
    if k == 0 || k > train.rows() {
        return Err(Error::invalid(format!("k must be in 1..={}, got {k}", train.rows())));
    }
    Ok((0..queries.rows())
        .into_par_iter()
        .map(|i| knn_unchecked(train, queries.row(i), k, spec))
        .collect())
}

/// For each training row, its `k` nearest other training rows.
pub fn self_knn(train: &Matrix, k: usize, spec: &DistanceSpec) -> Result<Vec<NeighbourResult>> {
    check_query(train, train.cols(), spec)?;
    let n = train.rows();
    if k == 0 || k >= n {
        return Err(Error::invalid(format!(
            "self-excluded k must be in 1..{n}, got {k}"
        )));
    }
    Ok((0..n)
        .into_par_iter()
        .map(|t| {
            let y = train.row(t);
            let cands = train
                .iter_rows()
                .enumerate()
                .filter(|&(j, _)| j != t)
                .map(|(j, x)| (spec.eval(y, x), j))
                .collect();
            smallest_k(cands, k)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::{record_distance, DistanceVariant};
    use proptest::prelude::*;

    fn column(values: &[f64]) -> Matrix {
        let rows: Vec<[f64; 1]> = values.iter().map(|&v| [v]).collect();
        Matrix::from_rows(&rows).unwrap()
    }

    fn abs1() -> DistanceSpec {
        DistanceSpec::uniform(1, DistanceVariant::Absolute)
    }

    #[test]
    fn nearer_of_two() {
        let r = knn(&column(&[0.0, 10.0]), &[1.0], 1, &abs1()).unwrap();
        assert_eq!(r.distances, vec![1.0]);
        assert_eq!(r.indices, vec![0]);
    }

    #[test]
    fn k_equal_n_sorts_everything() {
        let r = knn(&column(&[5.0, -1.0, 2.0]), &[0.0], 3, &abs1()).unwrap();
        assert_eq!(r.distances, vec![1.0, 2.0, 5.0]);
        assert_eq!(r.indices, vec![1, 2, 0]);
    }

    #[test]
    fn ties_break_by_index() {
        let r = knn(&column(&[1.0, -1.0, 1.0, -1.0]), &[0.0], 3, &abs1()).unwrap();
        assert_eq!(r.indices, vec![0, 1, 2]);
    }

    #[test]
    fn k_out_of_range() {
        assert!(knn(&column(&[0.0]), &[0.0], 2, &abs1()).is_err());
        assert!(knn(&column(&[0.0]), &[0.0], 0, &abs1()).is_err());
        assert!(matches!(
            knn(&column(&[0.0]), &[0.0, 1.0], 1, &abs1()),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(self_knn(&column(&[0.0, 1.0]), 2, &abs1()).is_err());
    }

    #[test]
    fn self_knn_duplicates() {
        let r = self_knn(&column(&[4.0, 4.0]), 1, &abs1()).unwrap();
        assert_eq!(r[0].distances, vec![0.0]);
        assert_eq!(r[0].indices, vec![1]);
        assert_eq!(r[1].indices, vec![0]);
    }

    #[test]
    fn self_knn_line() {
        let r = self_knn(&column(&[0.0, 1.0, 3.0]), 1, &abs1()).unwrap();
        let d: Vec<f64> = r.iter().map(|n| n.distances[0]).collect();
        assert_eq!(d, vec![1.0, 1.0, 2.0]);
    }

    fn instance(n: std::ops::Range<usize>, m: usize) -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<f64>, DistanceVariant)> {
        (
            prop::collection::vec(prop::collection::vec(-3i32..3, m), n),
            prop::collection::vec(-3i32..3, m),
            prop::sample::select(DistanceVariant::ALL.to_vec()),
        )
            .prop_map(|(rows, q, v)| {
                // Small integers make exact ties common.
                let rows = rows.into_iter().map(|r| r.into_iter().map(f64::from).collect()).collect();
                (rows, q.into_iter().map(f64::from).collect(), v)
            })
    }

    proptest! {
        #[test]
        fn knn_is_prefix_of_full_sort((rows, q, v) in instance(20..21, 3), k in 1usize..=20) {
            let train = Matrix::from_rows(&rows).unwrap();
            let spec = DistanceSpec::uniform(3, v);
            let mut full: Vec<(f64, usize)> = rows.iter().enumerate()
                .map(|(j, x)| (record_distance(&q, x, &spec).unwrap(), j)).collect();
            full.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
            let r = knn(&train, &q, k, &spec).unwrap();
            let expect: Vec<(f64, usize)> = full[..k].to_vec();
            let got: Vec<(f64, usize)> = r.distances.iter().copied().zip(r.indices.iter().copied()).collect();
            prop_assert_eq!(got, expect);

            if k < 20 {
                let longer = knn(&train, &q, k + 1, &spec).unwrap();
                prop_assert_eq!(&longer.indices[..k], &r.indices[..]);
            }
            prop_assert_eq!(knn(&train, &q, k, &spec).unwrap(), r);
        }

        #[test]
        fn self_knn_matches_per_row_oracle((rows, _q, v) in instance(15..16, 2), k in 1usize..14) {
            let train = Matrix::from_rows(&rows).unwrap();
            let spec = DistanceSpec::uniform(2, v);
            let res = self_knn(&train, k, &spec).unwrap();
            for (t, r) in res.iter().enumerate() {
                let others: Vec<usize> = (0..rows.len()).filter(|&j| j != t).collect();
                let sub = train.select_rows(&others);
                let o = knn(&sub, &rows[t], k, &spec).unwrap();
                let mapped: Vec<usize> = o.indices.iter().map(|&i| others[i]).collect();
                prop_assert_eq!(&r.distances, &o.distances);
                prop_assert_eq!(&r.indices, &mapped);
            }
        }
    }
}
