//! Convergence of the fixed-size moment generating function to the
//! uniform-law limit `(e^μ - 1)/μ`.
//!
//! The headline result in action: as the total area grows, the exact
//! finite-size expectation `E_N[e^{μ n/N}]` of the second cell's area
//! fraction approaches the moments of the uniform distribution on [0,1].
//!
//! Usage: `cargo run --release --example mgf_convergence [N_max]`
//! (default 16; sizes double up to the bound).

use voronoi_maps::law::{f_series, law_table, mgf, mgf_limit, Variant};
use voronoi_maps::Rational;

fn main() {
    let n_max: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(16);
    let mus = [0.5, 1.0, 2.0];
    let f = f_series::<Rational>(2 * n_max, Variant::All).expect("series build");

    print!("{:>5}", "N");
    for mu in mus {
        print!("  {:>12}", format!("gap(mu={mu})"));
    }
    println!();
    let mut n = 2;
    while n <= n_max {
        let law = law_table(&f, n).unwrap();
        print!("{n:>5}");
        for mu in mus {
            let gap = (mgf(&law, mu) - mgf_limit(mu)).abs() / mgf_limit(mu);
            print!("  {gap:>12.3e}");
        }
        println!();
        n *= 2;
    }
    println!("limits: {:?}", mus.map(mgf_limit));
}
