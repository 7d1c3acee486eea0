//! One-sided Wilcoxon signed-rank tests on published mean AUROCs.
//!
//! ```bash
//! cargo run --example significance
//! ```

use dirad::eval::results::{read_results, SummaryTable};
use dirad::eval::{holm_bonferroni, wilcoxon_one_sided};

const PUBLISHED: &str = include_str!("data/published_means.csv");

fn main() -> dirad::Result<()> {
    let table = SummaryTable::from_rows(&read_results(PUBLISHED.as_bytes())?);
    print!("{}", table.render());
    println!();

    let family = [("nnd:ramp", "nnd:absolute"), ("nnd:ramp", "nnd:signed")];
    let mut p = Vec::new();
    for (a, b) in family.iter().chain(&[("alp:ramp", "alp:absolute")]) {
        let (x, y) = table.paired(a, b)?;
        let r = wilcoxon_one_sided(&x, &y)?;
        println!(
            "{a} > {b}: W+={} n={} zeros={} {:?}  p={:.4}",
            r.statistic, r.n, r.zeros, r.method, r.p_value
        );
        p.push(r.p_value);
    }
    let adj = holm_bonferroni(&p[..2])?;
    println!("Holm over the NND pair: {:.4} {:.4}", adj[0], adj[1]);
    Ok(())
}
