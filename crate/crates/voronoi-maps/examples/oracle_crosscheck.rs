//! Brute force against generating functions.
//!
//! Every rooted two-face map with up to E edges is built explicitly and
//! its monomial weight `u^i v^j / L` accumulated; the result must equal
//! the series assembled from the chain recursion, coefficient by
//! coefficient — including the fractional weights produced by symmetric
//! loops. This is the strongest end-to-end check in the crate.
//!
//! Usage: `cargo run --release --example oracle_crosscheck [E]` (default 4).

use voronoi_maps::enumerate::{oracle_f, oracle_parity_split, rooted_iltfm};
use voronoi_maps::law::{f_all_even_odd, Variant};
use voronoi_maps::Rational;

fn main() {
    let e_max: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(4)
        .clamp(1, 6);

    for edges in 1..=e_max {
        println!("{} rooted two-face maps with {edges} edge(s)", rooted_iltfm(edges).len());
    }

    let oracle = oracle_f(e_max);
    let (all, even, odd) = f_all_even_odd::<Rational>(2 * e_max).unwrap();
    assert_eq!(&oracle, all.series(), "full series differs from enumeration");
    let (oracle_even, oracle_odd) = oracle_parity_split(e_max);
    assert_eq!(&oracle_even, even.series(), "even sector differs");
    assert_eq!(&oracle_odd, odd.series(), "odd sector differs");
    println!("series == enumeration for all strata up to area {e_max}, all parity sectors");

    println!("area-2 stratum ({:?} variant):", Variant::All.name());
    for (i, j) in [(3, 1), (2, 2), (1, 3)] {
        println!("  [u^{i} v^{j}] F = {}", oracle.coeff(i, j).unwrap());
    }
}
