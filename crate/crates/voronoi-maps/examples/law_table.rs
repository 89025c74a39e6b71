//! Exact distribution of a Voronoï cell's area at a fixed total size.
//!
//! Builds the two-face-map series exactly, extracts the area-N stratum,
//! and prints the normalized law together with its distance from the
//! flat profile 1/(2N+1).
//!
//! Usage: `cargo run --release --example law_table [N]` (default 8).

use voronoi_maps::law::{f_series, law_table, uniformity_report, Variant};
use voronoi_maps::{Coeff, Rational};

fn main() {
    let n: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(8);
    let f = f_series::<Rational>(2 * n, Variant::All).expect("series build");
    let law = law_table(&f, n).expect("law extraction");
    let report = uniformity_report(&law);

    println!("total area N = {n}, normalization [g^N]F(g,g) = {}", law.normalization());
    println!("{:>4} {:>6} {:>28} {:>12} {:>10}", "p", "area", "weight", "P(p)", "(2N+1)P-1");
    for (p, (w, prob)) in law.weights().iter().zip(law.probabilities()).enumerate() {
        println!(
            "{:>4} {:>6} {:>28} {:>12.6} {:>+10.4}",
            p,
            format!("{}/2", p),
            w.to_string(),
            prob.to_f64(),
            report.deviations[p]
        );
    }
    println!(
        "interior window p in {:?}: max |dev| = {:.4}, mean |dev| = {:.4}",
        report.window, report.max_dev_interior, report.mean_dev_interior
    );
}
