//! The recursion solvers against their closed forms.
//!
//! The tree series solves `R_s = 1 + g R_s (R_{s-1} + R_s + R_{s+1})`
//! order by order; the closed form is a rational expression in the
//! parametrization `g = x(1+x+x²)/(1+4x+x²)²`. The two must agree
//! coefficient by coefficient, as must the chain series restricted to
//! equal weights. Everything here is exact rational arithmetic.

use voronoi_maps::recursions::{closed_r, closed_x_diag, solve_r, solve_x, x_of_g};
use voronoi_maps::Rational;

fn main() {
    let order = 12;
    println!("reversion: x(g) starts as {:?}", series_prefix(&x_of_g(6), 4));

    let table = solve_r::<Rational>(order + 1, order).unwrap();
    for s in 1..=6 {
        let agree = &closed_r(s, order) == table.entry(s);
        println!("R_{s}: recursion == closed form to order {order}: {agree}");
        assert!(agree);
    }

    let xt = solve_x::<Rational>(order / 2 + 1, order).unwrap();
    for (s, t) in [(1, 1), (1, 2), (3, 2), (4, 4)] {
        let diag = xt.entry(s, t).diagonal_in_g().unwrap();
        let agree = diag == closed_x_diag(s, t, order / 2);
        println!("X_({s},{t}) at equal weights: solver == closed form: {agree}");
        assert!(agree);
    }
    println!("all closed-form identities hold exactly");
}

fn series_prefix(f: &voronoi_maps::UniSeries<Rational>, k: usize) -> Vec<String> {
    (0..=k).map(|n| f.coeff(n).unwrap().to_string()).collect()
}
