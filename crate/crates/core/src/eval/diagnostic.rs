use crate::dataset::{orient, Dataset};
use crate::error::{Error, Result};

/// Class means of one attribute, after orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributeDiagnostic {
    pub name: String,
    pub directional: bool,
    pub normal_mean: f64,
    pub anomalous_mean: f64,
    pub difference: f64,
    /// Directional, but anomalies are not clearly higher than normals.
    pub flagged: bool,
}

/// Compares per-attribute class means.
///
/// A directional attribute is flagged when its anomalous mean does not
/// exceed the normal mean by more than `tolerance`. The schema is never
/// modified; flagged attributes are candidates for direction `none`.
pub fn directionality_diagnostic(dataset: &Dataset, tolerance: f64) -> Result<Vec<AttributeDiagnostic>> {
    let ds = orient(dataset);
    let normals = ds.normal_indices();
    let anomalies = ds.anomalous_indices();
    if ds.labels().is_none() || normals.is_empty() || anomalies.is_empty() {
        return Err(Error::SingleClass);
    }
    let mean = |rows: &[usize], j: usize| rows.iter().map(|&i| ds.records().get(i, j)).sum::<f64>() / rows.len() as f64;
    Ok(ds
        .schema()
        .iter()
        .enumerate()
        .map(|(j, a)| {
            let normal_mean = mean(&normals, j);
            let anomalous_mean = mean(&anomalies, j);
            let directional = a.direction.is_directional();
            AttributeDiagnostic {
                name: a.name.clone(),
                directional,
                normal_mean,
                anomalous_mean,
                difference: anomalous_mean - normal_mean,
                flagged: directional && anomalous_mean <= normal_mean + tolerance,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{AttributeSpec, Direction, Label};
    use crate::matrix::Matrix;

    fn ds(rows: &[[f64; 3]], labels: Vec<Label>) -> Dataset {
        let schema = vec![
            AttributeSpec::new("clear", Direction::High),
            AttributeSpec::new("flat", Direction::High),
            AttributeSpec::new("inverted", Direction::Low),
        ];
        Dataset::new(schema, Matrix::from_rows(rows).unwrap(), Some(labels)).unwrap()
    }

    #[test]
    fn flags_flat_attribute_only() {
        use Label::*;
        let d = ds(
            &[[0.0, 1.0, 5.0], [0.2, 1.0, 5.0], [0.9, 1.0, 1.0], [0.9, 1.0, 1.0]],
            vec![Normal, Normal, Anomalous, Anomalous],
        );
        let r = directionality_diagnostic(&d, 0.0).unwrap();
        assert!((r[0].anomalous_mean - 0.9).abs() < 1e-12 && (r[0].normal_mean - 0.1).abs() < 1e-12);
        assert!(!r[0].flagged);
        assert!(r[1].flagged);
        // Low direction: anomalies have lower raw values, so it is fine.
        assert!(!r[2].flagged);
        assert_eq!(r[2].difference, 4.0);

        assert!(directionality_diagnostic(&d, 1.0).unwrap()[0].flagged);
    }

    #[test]
    fn needs_both_classes() {
        let d = ds(&[[0.0, 0.0, 0.0]], vec![Label::Normal]);
        assert!(matches!(directionality_diagnostic(&d, 0.0), Err(Error::SingleClass)));
        assert!(directionality_diagnostic(&d.without_labels(), 0.0).is_err());
    }
}
