//! Absolute, ramp and signed distance on a two-attribute example.
//!
//! `x1` is a risk factor (higher is worse), `x2` carries no direction.
//!
//! ```bash
//! cargo run --example distance_variants
//! ```

use dirad::distance::{per_attribute, record_distance, DistanceSpec, DistanceVariant};

fn main() -> dirad::Result<()> {
    let mask = [true, false];
    let y = [5.0, 0.0];
    let near = [3.0, 0.0];
    let far = [11.0, 4.0];

    println!("per-attribute contribution of d = y - x:");
    for d in [-2.0, 0.0, 2.0] {
        let row: Vec<String> = DistanceVariant::ALL
            .iter()
            .map(|v| format!("{v}={:+}", per_attribute(d, *v)))
            .collect();
        println!("  d={d:+}  {}", row.join("  "));
    }

    println!("\ndistances from y={y:?}:");
    for v in DistanceVariant::ALL {
        let spec = DistanceSpec::directional(&mask, v);
        println!(
            "  {v:<8}  to {near:?}: {:+}   to {far:?}: {:+}",
            record_distance(&y, &near, &spec)?,
            record_distance(&y, &far, &spec)?,
        );
    }

    let euclidean = DistanceSpec::directional_with_exponent(&mask, DistanceVariant::Ramp, 2.0)?;
    println!("\nramp with p=2 to {far:?}: {}", record_distance(&y, &far, &euclidean)?);
    Ok(())
}
