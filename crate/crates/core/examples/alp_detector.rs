//! Average localised proximity, default neighbourhood sizes.
//!
//! ```bash
//! cargo run --release --example alp_detector
//! ```

use dirad::alp::{default_k, default_l, AlpConfig, AlpModel};
use dirad::dataset::{apply_scaler, fit_scaler};
use dirad::distance::DistanceVariant;
use dirad::eval::auroc;
use dirad::synthgen::{generate, Family, SynthSpec};

fn main() -> dirad::Result<()> {
    let (train, test) = generate(&SynthSpec::new(Family::Gaussian, 0.5, 3))?;
    let scaler = fit_scaler(&train)?;
    let train = apply_scaler(&train, &scaler)?;
    let test = apply_scaler(&test, &scaler)?;
    let labels = test.labels().expect("labelled");
    println!("n=1000: k={} l={}", default_k(1000), default_l(1000));

    for variant in [DistanceVariant::Absolute, DistanceVariant::Ramp] {
        let model = AlpModel::fit(&train, &AlpConfig::with_variant(variant))?;
        let scores = model.anomaly_scores(test.records())?;
        let last = test.records().row(test.n_records() - 1);
        let lp = model.localised_proximities(last)?;
        println!(
            "{variant:<8}  AUROC {:.3}   anomaly lp_1..3 = {:.3?}  normality {:.3}",
            auroc(&scores, labels)?,
            &lp[..3],
            model.normality_score(last)?
        );
    }

    // Signed distance has no ALP counterpart.
    assert!(AlpConfig::with_variant(DistanceVariant::Signed).validate().is_err());
    Ok(())
}
