//! Weighted nearest-neighbour distance on synthetic Gaussian data.
//!
//! ```bash
//! cargo run --release --example nnd_detector
//! ```

use dirad::dataset::{apply_scaler, fit_scaler};
use dirad::distance::DistanceVariant;
use dirad::eval::auroc;
use dirad::nnd::{contract, linear_weights, NndConfig, NndModel};
use dirad::synthgen::{generate, Family, SynthSpec};

fn main() -> dirad::Result<()> {
    let (train, test) = generate(&SynthSpec::new(Family::Gaussian, 0.5, 7))?;
    let scaler = fit_scaler(&train)?;
    let train = apply_scaler(&train, &scaler)?;
    let test = apply_scaler(&test, &scaler)?;
    let labels = test.labels().expect("synthetic test sets are labelled");

    let w = linear_weights(8)?;
    println!("k=8 weights: {:?}", w.iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>());

    for variant in DistanceVariant::ALL {
        let model = NndModel::fit(&train, &NndConfig::new(8, variant))?;
        let raw = model.raw_scores(test.records())?;
        let scores = model.anomaly_scores(test.records())?;
        println!(
            "{variant:<8}  AUROC {:.3}   first query: raw {:+.3} -> {:.3}",
            auroc(&scores, labels)?,
            raw[0],
            scores[0]
        );
    }
    println!("contract(0) = {}", contract(0.0));
    Ok(())
}
