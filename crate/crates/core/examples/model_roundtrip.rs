//! Fit a pipeline, save it to disk, load it back and score new records.
//!
//! ```bash
//! cargo run --example model_roundtrip
//! ```

use dirad::distance::DistanceVariant;
use dirad::model_io;
use dirad::nnd::NndConfig;
use dirad::pipeline::{DetectorConfig, FittedPipeline};
use dirad::synthgen::{generate, Family, SynthSpec};

fn main() -> dirad::Result<()> {
    let mut spec = SynthSpec::new(Family::Bernoulli, 0.3, 5);
    spec.n_train = 200;
    let (train, test) = generate(&spec)?;

    let cfg = DetectorConfig::Nnd(NndConfig::new(8, DistanceVariant::Ramp));
    let fitted = FittedPipeline::fit(&train, &cfg, true)?;

    let path = std::env::temp_dir().join("dirad-example-model.txt");
    model_io::save(&fitted, &path)?;
    let loaded = model_io::load(&path)?;
    assert_eq!(loaded, fitted);

    let before = fitted.score(test.records())?;
    let after = loaded.score(test.records())?;
    assert!(before.iter().zip(&after).all(|(a, b)| a.to_bits() == b.to_bits()));
    println!("{} bytes at {}", std::fs::metadata(&path).map(|m| m.len()).unwrap_or(0), path.display());
    println!("first scores: {:.3?}", &after[..5]);
    std::fs::remove_file(&path).ok();
    Ok(())
}
