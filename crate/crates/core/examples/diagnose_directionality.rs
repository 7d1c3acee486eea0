//! Flags declared risk factors whose anomalous mean is not above the normal mean.
//!
//! ```bash
//! cargo run --example diagnose_directionality
//! ```

use dirad::dataset::{parse_csv, Schema};
use dirad::eval::directionality_diagnostic;

const SCHEMA: &str = "\
polyuria,high
weakness,high
obesity,high
label,class,Positive,Negative
";

const DATA: &str = "\
polyuria,weakness,obesity,class
0,1,1,Negative
0,0,1,Negative
1,1,0,Negative
0,1,0,Negative
1,1,0,Positive
1,0,0,Positive
1,1,1,Positive
1,0,0,Positive
";

fn main() -> dirad::Result<()> {
    let schema = Schema::parse(SCHEMA)?;
    let ds = parse_csv(DATA.as_bytes(), &schema.attributes, schema.label.as_ref())?;
    for d in directionality_diagnostic(&ds, 0.05)? {
        println!(
            "{:<9} normal {:.2}  anomalous {:.2}  {}",
            d.name,
            d.normal_mean,
            d.anomalous_mean,
            if d.flagged { "-> consider `none`" } else { "ok" }
        );
    }
    Ok(())
}
