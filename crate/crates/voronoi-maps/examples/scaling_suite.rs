//! The continuum side: scaling functions and their pinned identities.
//!
//! Prints the residual of the scaling PDE over a grid of weight pairs,
//! checks the primitive of the diagonal mixed derivative by quadrature
//! and by finite differences, evaluates the contour integral behind the
//! uniform-law moment formula, and bridges the discrete tree series to
//! its continuum limit.

use voronoi_maps::scaling::{
    contour_value, first_integral_check, k_fn, local_limit_bridge, singularity_coefficient,
    KPrimitive, ScalingFn,
};

fn main() {
    let mut worst: f64 = 0.0;
    for &a in &[0.7, 1.0, 1.3] {
        for &b in &[0.7, 1.0, 1.3] {
            if a == b {
                continue;
            }
            let f = ScalingFn::two_weight(a, b).unwrap();
            for &s in &[0.2, 0.5, 1.0, 2.0, 3.0] {
                for &t in &[0.2, 0.5, 1.0, 2.0, 3.0] {
                    worst = worst.max(f.pde_residual_at(s, t));
                }
            }
        }
    }
    println!("scaling PDE: worst relative residual on the grid = {worst:.3e}");

    let (a, b) = (1.0, 1.3);
    println!("K(0) = {}", k_fn(0.0, a, b).unwrap());
    println!(
        "first integral vs primitive at eps = 1e-3: relative difference {:.3e}",
        first_integral_check(1e-3, a, b).unwrap()
    );
    let kp = KPrimitive::new(a, b).unwrap();
    let f = ScalingFn::two_weight(a, b).unwrap();
    let sigma = 0.5;
    let d = 1e-5;
    let fd = (kp.eval(sigma + d) - kp.eval(sigma - d)) / (2.0 * d);
    let tau: f64 = sigma.powf(b / a);
    let analytic = b * tau / 3.0 * f.d2xi_dsigma_dtau(sigma, tau);
    println!(
        "primitive equation at sigma = {sigma}: finite differences {fd:.9} vs analytic {analytic:.9}"
    );
    println!(
        "singularity coefficient at (a,b) = ({a},{b}): {:.9}",
        singularity_coefficient(a, b)
    );

    for mu in [0.1, 1.0, 4.0] {
        let cv = contour_value(mu).unwrap();
        println!(
            "contour at mu = {mu}: pieces ({:+.6e}, {:+.6e}, {:+.6e}) total {:.9e} closed form {:.9e}",
            cv.cut_piece, cv.ray_gaussian_piece, cv.ray_cut_piece, cv.total, cv.closed_form
        );
    }

    for (big_s, eps) in [(1.0, 0.02), (1.0, 0.01), (2.0, 0.01)] {
        let rep = local_limit_bridge(big_s, eps, 1.0).unwrap();
        println!(
            "bridge S={big_s} eps={eps}: (R_{{{}}}(g)-2)/eps^2 = {:.4} vs r(S,a) = {:.4} (rel gap {:.4})",
            rep.s, rep.discrete, rep.scaling, rep.rel_gap
        );
    }
}
