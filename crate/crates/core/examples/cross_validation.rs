//! Five-fold cross-validation on normal records with a mixed schema.
//!
//! The dataset has two risk factors, one protective attribute (`low`) and one
//! attribute without direction.
//!
//! ```bash
//! cargo run --release --example cross_validation
//! ```

use dirad::alp::AlpConfig;
use dirad::dataset::{AttributeSpec, Dataset, Direction, Label};
use dirad::distance::DistanceVariant;
use dirad::eval::results::SummaryTable;
use dirad::eval::{make_folds, run_cv, CvOptions, DEFAULT_FOLDS};
use dirad::matrix::Matrix;
use dirad::nnd::NndConfig;
use dirad::pipeline::DetectorConfig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn toy(seed: u64) -> dirad::Result<Dataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = || rng.sample::<f64, _>(StandardNormal);
    let (mut data, mut labels) = (Vec::new(), Vec::new());
    for i in 0..300 {
        let anomalous = i >= 250;
        let s = if anomalous { 1.0 } else { 0.0 };
        data.extend([g() + s, g() + s, g() - s, 3.0 * g()]);
        labels.push(if anomalous { Label::Anomalous } else { Label::Normal });
    }
    let schema = vec![
        AttributeSpec::new("pressure", Direction::High),
        AttributeSpec::new("age", Direction::High),
        AttributeSpec::new("fitness", Direction::Low),
        AttributeSpec::new("site", Direction::None),
    ];
    Dataset::new(schema, Matrix::new(300, 4, data)?, Some(labels))
}

fn main() -> dirad::Result<()> {
    let ds = toy(11)?;
    let plan = make_folds(ds.normal_indices().len(), DEFAULT_FOLDS, 0)?;
    let mut detectors: Vec<DetectorConfig> =
        DistanceVariant::ALL.iter().map(|v| DetectorConfig::Nnd(NndConfig::new(8, *v))).collect();
    detectors.push(DetectorConfig::Alp(AlpConfig::with_variant(DistanceVariant::Absolute)));
    detectors.push(DetectorConfig::Alp(AlpConfig::with_variant(DistanceVariant::Ramp)));

    let mut results = Vec::new();
    for d in &detectors {
        let r = run_cv("toy", &ds, d, &plan, CvOptions::default())?;
        println!("{d:<14} folds {:.3?}", r.fold_aurocs);
        results.push(r);
    }
    println!();
    print!("{}", SummaryTable::from_results(&results).render());
    Ok(())
}
