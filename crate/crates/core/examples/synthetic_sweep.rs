//! Mean AUROC over a grid of anomaly shifts, as tidy CSV on stdout.
//!
//! ```bash
//! cargo run --release --example synthetic_sweep > sweep.csv
//! ```

use dirad::distance::DistanceVariant;
use dirad::eval::results::sweep_csv;
use dirad::eval::{run_sweep, CvOptions};
use dirad::nnd::NndConfig;
use dirad::pipeline::DetectorConfig;
use dirad::synthgen::{grid, Family};

fn main() -> dirad::Result<()> {
    let mut detectors = Vec::new();
    for k in [1, 8] {
        for v in DistanceVariant::ALL {
            detectors.push(DetectorConfig::Nnd(NndConfig::new(k, v)));
        }
    }
    let mut cells = Vec::new();
    for family in [Family::Gaussian, Family::Bernoulli] {
        let specs = grid(family, &family.standard_shifts(), 5, 0)?;
        cells.extend(run_sweep(&specs, &detectors, CvOptions::default())?);
    }
    print!("{}", sweep_csv(&cells));
    Ok(())
}
