//! Double-precision scaling functions and their consistency checks.
//!
//! Near the critical weight the tree and chain series develop scaling
//! limits: with `g = (1/12)(1 - a⁴ε⁴/36)`, `h = (1/12)(1 - b⁴ε⁴/36)` and
//! labels blown up as `s = S/ε`,
//!
//! ```text
//! R_{⌊S/ε⌋}(g) = 2 + r(S,a) ε² + O(ε³),
//! X_{⌊S/ε⌋,⌊T/ε⌋}(g,h) = 3 + x(S,T,a,b) ε + O(ε²).
//! ```
//!
//! `r` is elementary; `x` solves the partial differential equation
//!
//! ```text
//! 2 x² + 6 (∂_S x + ∂_T x) + 27 (r(S,a) + r(T,b)) = 0
//! ```
//!
//! and is given in the variables `σ = e^{-aS}`, `τ = e^{-bT}` by a ratio
//! of explicit polynomials whose coefficients are tabulated here
//! ([`xi_tables`]). A second tabulated family yields the primitive `𝔎` of
//! `(1/3) b σ^{b/a} ∂σ∂τ 𝔛` along `τ = σ^{b/a}`, which turns the singular
//! part of the two-face series into `-(1/18)(a⁶-b⁶)/(a⁴-b⁴) ε²` and, via
//! a contour integral, into the uniform-law moment generating function
//! `(e^μ - 1)/μ`.
//!
//! Numerics: the tabulated coefficients combine integers with
//! `√((a²+b²)/2)`, so every polynomial here is assembled exactly over
//! that quadratic extension with rational arithmetic, in two charts: the
//! raw `(σ, τ)` monomials (accurate at large labels) and the exact
//! re-expansion in `(1-σ, 1-τ)` (accurate near the critical corner,
//! where the raw monomial basis cancels catastrophically). Only the
//! final coefficients are rounded to `f64`, and evaluation picks the
//! stable chart. The tables themselves are pinned by residual identities
//! (the PDE, the primitive equation, the contour total), not re-derived.

use std::f64::consts::PI;

use crate::exact::{Coeff, Rational};

/// Below this separation of the two weights the general tables are
/// numerically wild (their entries carry `(a-b)^{-k}` poles); callers are
/// directed to the equal-weight closed form instead.
pub const DELTA_MIN: f64 = 1e-4;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ScalingError {
    #[error("argument must be positive (got {0})")]
    NonPositive(f64),
    #[error("weights too close (|a-b| = {0} < 1e-4); use the equal-weight form")]
    NearEqualWeights(f64),
}

/// Scaling limit of the tree series:
/// `r(S,a) = -a²(1 + 10 e^{-aS} + e^{-2aS}) / (3 (1 - e^{-aS})²)`.
pub fn r_fn(s: f64, a: f64) -> Result<f64, ScalingError> {
    if s <= 0.0 {
        return Err(ScalingError::NonPositive(s));
    }
    if a <= 0.0 {
        return Err(ScalingError::NonPositive(a));
    }
    Ok(r_sigma((-a * s).exp(), a))
}

/// The same function of `σ = e^{-aS}`.
fn r_sigma(sigma: f64, a: f64) -> f64 {
    -a * a * (1.0 + 10.0 * sigma + sigma * sigma) / (3.0 * (1.0 - sigma) * (1.0 - sigma))
}

/// The tabulated coefficients of the two-weight scaling function: the
/// numerator `𝔑 = Σ n_ij σ^i τ^j` (degree 3) and denominator
/// `𝔇 = Σ d_ij σ^i τ^j` (degree 2), each split as
/// `c_ij = c_ij^{(0)} + √((a²+b²)/2) · c_ij^{(1)}`.
#[derive(Clone, Debug)]
pub struct XiTables<C = f64> {
    pub n0: Vec<Vec<C>>,
    pub n1: Vec<Vec<C>>,
    pub d0: Vec<Vec<C>>,
    pub d1: Vec<Vec<C>>,
}

/// Transcription of the unique polynomial solution of the scaling PDE,
/// over any coefficient domain containing the weights.
pub fn xi_tables<C: Coeff>(a: &C, b: &C) -> XiTables<C> {
    let k = |n: i64| C::from_i64(n);
    let a = a.clone();
    let b = b.clone();
    let a2 = a.clone() * a.clone();
    let b2 = b.clone() * b.clone();
    let a3 = a2.clone() * a.clone();
    let b3 = b2.clone() * b.clone();
    let a4 = a2.clone() * a2.clone();
    let b4 = b2.clone() * b2.clone();
    let a5 = a4.clone() * a.clone();
    let b5 = b4.clone() * b.clone();
    let a6 = a4.clone() * a2.clone();
    let b6 = b4.clone() * b2.clone();
    let a7 = a6.clone() * a.clone();
    let b7 = b6.clone() * b.clone();
    let amb = a.clone() - b.clone();
    let apb = a.clone() + b.clone();
    let q1 = k(2) * a2.clone() + b2.clone();
    let q2 = a2.clone() + k(2) * b2.clone();
    let amb2 = amb.clone() * amb.clone();
    let q12 = q1.clone() * q2.clone();
    let den_pm = amb.clone() * apb.clone() * q12.clone();
    let den_ss = amb2.clone() * q12.clone();
    let ab = a.clone() * b.clone();

    let zeros = |r: usize, c: usize| vec![vec![C::zero(); c]; r];
    let mut n0 = zeros(4, 4);
    let mut n1 = zeros(4, 4);
    let mut d0 = zeros(3, 3);
    let mut d1 = zeros(3, 3);

    n0[0][1] = -(k(18) * b3.clone()) / q1.clone();
    n0[0][2] = k(18) * b3.clone() * (k(5) * a2.clone() + k(7) * b2.clone())
        / (amb.clone() * apb.clone() * q1.clone());
    n0[1][0] = -(k(18) * a3.clone()) / q2.clone();
    n0[2][0] = -(k(18) * a3.clone() * (k(7) * a2.clone() + k(5) * b2.clone()))
        / (amb.clone() * apb.clone() * q2.clone());
    n0[1][1] = k(54)
        * (k(2) * a7.clone()
            + k(17) * a5.clone() * b2.clone()
            + k(17) * a4.clone() * b3.clone()
            + k(17) * a3.clone() * b4.clone()
            + k(17) * a2.clone() * b5.clone()
            + k(2) * b7.clone())
        / den_ss.clone();
    n0[1][2] = -(k(54)
        * (k(2) * a7.clone()
            + k(8) * a6.clone() * b.clone()
            + k(27) * a5.clone() * b2.clone()
            + k(47) * a4.clone() * b3.clone()
            + k(47) * a3.clone() * b4.clone()
            + k(51) * a2.clone() * b5.clone()
            + k(20) * a.clone() * b6.clone()
            + k(14) * b7.clone()))
        / den_pm.clone();
    n0[1][3] = k(18)
        * a2.clone()
        * (k(2) * a5.clone()
            + k(12) * a4.clone() * b.clone()
            + k(17) * a3.clone() * b2.clone()
            + k(36) * a2.clone() * b3.clone()
            + k(17) * a.clone() * b4.clone()
            + k(24) * b5.clone())
        / den_pm.clone();
    n0[2][1] = k(54)
        * (k(14) * a7.clone()
            + k(20) * a6.clone() * b.clone()
            + k(51) * a5.clone() * b2.clone()
            + k(47) * a4.clone() * b3.clone()
            + k(47) * a3.clone() * b4.clone()
            + k(27) * a2.clone() * b5.clone()
            + k(8) * a.clone() * b6.clone()
            + k(2) * b7.clone())
        / den_pm.clone();
    n0[2][2] = -(k(54)
        * (k(14) * a7.clone()
            + k(12) * a6.clone() * b.clone()
            + k(41) * a5.clone() * b2.clone()
            + k(41) * a4.clone() * b3.clone()
            + k(41) * a3.clone() * b4.clone()
            + k(41) * a2.clone() * b5.clone()
            + k(12) * a.clone() * b6.clone()
            + k(14) * b7.clone()))
        / den_ss.clone();
    n0[2][3] = k(18)
        * a2.clone()
        * (k(14) * a5.clone()
            + k(32) * a4.clone() * b.clone()
            + k(51) * a3.clone() * b2.clone()
            + k(58) * a2.clone() * b3.clone()
            + k(37) * a.clone() * b4.clone()
            + k(24) * b5.clone())
        / den_ss.clone();
    n0[3][1] = -(k(18)
        * b2.clone()
        * (k(24) * a5.clone()
            + k(17) * a4.clone() * b.clone()
            + k(36) * a3.clone() * b2.clone()
            + k(17) * a2.clone() * b3.clone()
            + k(12) * a.clone() * b4.clone()
            + k(2) * b5.clone()))
        / den_pm.clone();
    n0[3][2] = k(18)
        * b2.clone()
        * (k(24) * a5.clone()
            + k(37) * a4.clone() * b.clone()
            + k(58) * a3.clone() * b2.clone()
            + k(51) * a2.clone() * b3.clone()
            + k(32) * a.clone() * b4.clone()
            + k(14) * b5.clone())
        / den_ss.clone();

    n1[0][1] = k(36) * b2.clone() / q1.clone();
    n1[0][2] = -(k(36) * b2.clone() * (a2.clone() + k(5) * b2.clone()))
        / (amb.clone() * apb.clone() * q1.clone());
    n1[1][0] = k(36) * a2.clone() / q2.clone();
    n1[2][0] = k(36) * a2.clone() * (k(5) * a2.clone() + b2.clone())
        / (amb.clone() * apb.clone() * q2.clone());
    n1[1][1] = -(k(216)
        * (a6.clone() - a5.clone() * b.clone()
            + k(8) * a4.clone() * b2.clone()
            + k(2) * a3.clone() * b3.clone()
            + k(8) * a2.clone() * b4.clone()
            - a.clone() * b5.clone()
            + b6.clone()))
        / den_ss.clone();
    n1[1][2] = k(216)
        * (a2.clone() + ab.clone() + b2.clone())
        * (a4.clone()
            + a3.clone() * b.clone()
            + k(9) * a2.clone() * b2.clone()
            + k(2) * a.clone() * b3.clone()
            + k(5) * b4.clone())
        / den_pm.clone();
    n1[1][3] = -(k(36)
        * a2.clone()
        * (k(2) * a4.clone()
            + k(6) * a3.clone() * b.clone()
            + k(17) * a2.clone() * b2.clone()
            + k(12) * a.clone() * b3.clone()
            + k(17) * b4.clone()))
        / den_pm.clone();
    n1[2][1] = -(k(216)
        * (a2.clone() + ab.clone() + b2.clone())
        * (k(5) * a4.clone()
            + k(2) * a3.clone() * b.clone()
            + k(9) * a2.clone() * b2.clone()
            + a.clone() * b3.clone()
            + b4.clone()))
        / den_pm.clone();
    n1[2][2] = k(216)
        * (k(5) * a6.clone()
            + k(4) * a5.clone() * b.clone()
            + k(13) * a4.clone() * b2.clone()
            + k(10) * a3.clone() * b3.clone()
            + k(13) * a2.clone() * b4.clone()
            + k(4) * a.clone() * b5.clone()
            + k(5) * b6.clone())
        / den_ss.clone();
    n1[2][3] = -(k(36)
        * a2.clone()
        * (k(10) * a4.clone()
            + k(22) * a3.clone() * b.clone()
            + k(33) * a2.clone() * b2.clone()
            + k(26) * a.clone() * b3.clone()
            + k(17) * b4.clone()))
        / den_ss.clone();
    n1[3][1] = k(36)
        * b2.clone()
        * (k(17) * a4.clone()
            + k(12) * a3.clone() * b.clone()
            + k(17) * a2.clone() * b2.clone()
            + k(6) * a.clone() * b3.clone()
            + k(2) * b4.clone())
        / den_pm.clone();
    n1[3][2] = -(k(36)
        * b2.clone()
        * (k(17) * a4.clone()
            + k(26) * a3.clone() * b.clone()
            + k(33) * a2.clone() * b2.clone()
            + k(22) * a.clone() * b3.clone()
            + k(10) * b4.clone()))
        / den_ss.clone();

    d0[0][0] = C::one();
    d0[0][1] = -(k(4) * q2.clone()) / q1.clone();
    d0[0][2] = (k(2) * a4.clone() + k(17) * a2.clone() * b2.clone() + k(17) * b4.clone())
        / (amb.clone() * apb.clone() * q1.clone());
    d0[1][0] = -(k(4) * q1.clone()) / q2.clone();
    d0[1][1] = k(8)
        * (k(4) * a2.clone() + ab.clone() + k(4) * b2.clone())
        * (a4.clone() + k(7) * a2.clone() * b2.clone() + b4.clone())
        / den_ss.clone();
    d0[1][2] = -(k(4)
        * (k(4) * a5.clone()
            + k(14) * a4.clone() * b.clone()
            + k(22) * a3.clone() * b2.clone()
            + k(32) * a2.clone() * b3.clone()
            + k(19) * a.clone() * b4.clone()
            + k(17) * b5.clone()))
        / (amb.clone() * q12.clone());
    d0[2][0] = -((k(17) * a4.clone() + k(17) * a2.clone() * b2.clone() + k(2) * b4.clone())
        / (amb.clone() * apb.clone() * q2.clone()));
    d0[2][1] = k(4)
        * (k(17) * a5.clone()
            + k(19) * a4.clone() * b.clone()
            + k(32) * a3.clone() * b2.clone()
            + k(22) * a2.clone() * b3.clone()
            + k(14) * a.clone() * b4.clone()
            + k(4) * b5.clone())
        / (amb.clone() * q12.clone());
    d0[2][2] = -((k(34) * a6.clone()
        + k(76) * a5.clone() * b.clone()
        + k(137) * a4.clone() * b2.clone()
        + k(154) * a3.clone() * b3.clone()
        + k(137) * a2.clone() * b4.clone()
        + k(76) * a.clone() * b5.clone()
        + k(34) * b6.clone())
        / den_ss.clone());

    d1[0][1] = k(12) * b.clone() / q1.clone();
    d1[0][2] = -(k(12) * b.clone() * q2.clone()) / (amb.clone() * apb.clone() * q1.clone());
    d1[1][0] = k(12) * a.clone() / q2.clone();
    d1[1][1] = -(k(48)
        * (a2.clone() + ab.clone() + b2.clone())
        * (a4.clone() + k(7) * a2.clone() * b2.clone() + b4.clone()))
        / (amb2.clone() * apb.clone() * q12.clone());
    d1[1][2] = k(12)
        * (k(2) * a4.clone()
            + k(6) * a3.clone() * b.clone()
            + k(11) * a2.clone() * b2.clone()
            + k(9) * a.clone() * b3.clone()
            + k(8) * b4.clone())
        / (amb.clone() * q12.clone());
    d1[2][0] = k(12) * a.clone() * q1.clone() / (amb.clone() * apb.clone() * q2.clone());
    d1[2][1] = -(k(12)
        * (k(8) * a4.clone()
            + k(9) * a3.clone() * b.clone()
            + k(11) * a2.clone() * b2.clone()
            + k(6) * a.clone() * b3.clone()
            + k(2) * b4.clone()))
        / (amb.clone() * q12.clone());
    d1[2][2] = k(12)
        * apb.clone()
        * (a2.clone() + ab.clone() + b2.clone())
        * (k(4) * a2.clone() + ab.clone() + k(4) * b2.clone())
        / den_ss.clone();

    XiTables { n0, n1, d0, d1 }
}

/// The primitive's numerator `𝔥 = Σ h_ij σ^i τ^j` (degree 2), split like
/// the other tables; entries with exactly one index equal to 1 vanish.
pub fn k_tables<C: Coeff>(a: &C, b: &C) -> (Vec<Vec<C>>, Vec<Vec<C>>) {
    let k = |n: i64| C::from_i64(n);
    let a = a.clone();
    let b = b.clone();
    let a2 = a.clone() * a.clone();
    let b2 = b.clone() * b.clone();
    let a3 = a2.clone() * a.clone();
    let b3 = b2.clone() * b.clone();
    let a4 = a2.clone() * a2.clone();
    let b4 = b2.clone() * b2.clone();
    let a5 = a4.clone() * a.clone();
    let b5 = b4.clone() * b.clone();
    let a6 = a4.clone() * a2.clone();
    let b6 = b4.clone() * b2.clone();
    let a7 = a6.clone() * a.clone();
    let b7 = b6.clone() * b.clone();
    let amb = a.clone() - b.clone();
    let apb = a.clone() + b.clone();
    let q1 = k(2) * a2.clone() + b2.clone();
    let q2 = a2.clone() + k(2) * b2.clone();
    let amb2 = amb.clone() * amb.clone();
    let amb3 = amb2.clone() * amb.clone();
    let amb4 = amb2.clone() * amb2.clone();
    let apb2 = apb.clone() * apb.clone();
    let ab2 = a2.clone() * b2.clone();

    let zeros = |r: usize, c: usize| vec![vec![C::zero(); c]; r];
    let mut h0 = zeros(3, 3);
    let mut h1 = zeros(3, 3);

    h0[0][0] = -(k(72)
        * ab2.clone()
        * (k(4) * a2.clone() + a.clone() * b.clone() + k(4) * b2.clone()))
        / (amb2.clone() * q1.clone() * q2.clone());
    h0[0][2] = k(72)
        * ab2.clone()
        * (k(8) * a7.clone()
            + k(46) * a6.clone() * b.clone()
            + k(114) * a5.clone() * b2.clone()
            + k(237) * a4.clone() * b3.clone()
            + k(261) * a3.clone() * b4.clone()
            + k(333) * a2.clone() * b5.clone()
            + k(157) * a.clone() * b6.clone()
            + k(140) * b7.clone())
        / (amb3.clone() * apb2.clone() * q1.clone() * q1.clone() * q2.clone());
    h0[2][0] = -(k(72)
        * ab2.clone()
        * (k(140) * a7.clone()
            + k(157) * a6.clone() * b.clone()
            + k(333) * a5.clone() * b2.clone()
            + k(261) * a4.clone() * b3.clone()
            + k(237) * a3.clone() * b4.clone()
            + k(114) * a2.clone() * b5.clone()
            + k(46) * a.clone() * b6.clone()
            + k(8) * b7.clone()))
        / (amb3.clone() * apb2.clone() * q1.clone() * q2.clone() * q2.clone());
    h0[2][2] = k(72)
        * ab2.clone()
        * (k(4) * a2.clone() + a.clone() * b.clone() + k(4) * b2.clone())
        * (k(70) * a6.clone()
            + k(148) * a5.clone() * b.clone()
            + k(281) * a4.clone() * b2.clone()
            + k(298) * a3.clone() * b3.clone()
            + k(281) * a2.clone() * b4.clone()
            + k(148) * a.clone() * b5.clone()
            + k(70) * b6.clone())
        / (amb4.clone() * q1.clone() * q1.clone() * q2.clone() * q2.clone());

    h1[0][0] = k(432) * ab2.clone() * (a2.clone() + a.clone() * b.clone() + b2.clone())
        / (amb2.clone() * apb.clone() * q1.clone() * q2.clone());
    h1[0][2] = -(k(432)
        * ab2.clone()
        * (k(2) * a6.clone()
            + k(10) * a5.clone() * b.clone()
            + k(29) * a4.clone() * b2.clone()
            + k(43) * a3.clone() * b3.clone()
            + k(62) * a2.clone() * b4.clone()
            + k(37) * a.clone() * b5.clone()
            + k(33) * b6.clone()))
        / (amb3.clone() * apb2.clone() * q1.clone() * q1.clone() * q2.clone());
    h1[2][0] = k(432)
        * ab2.clone()
        * (k(33) * a6.clone()
            + k(37) * a5.clone() * b.clone()
            + k(62) * a4.clone() * b2.clone()
            + k(43) * a3.clone() * b3.clone()
            + k(29) * a2.clone() * b4.clone()
            + k(10) * a.clone() * b5.clone()
            + k(2) * b6.clone())
        / (amb3.clone() * apb2.clone() * q1.clone() * q2.clone() * q2.clone());
    h1[2][2] = -(k(1296)
        * ab2.clone()
        * (a2.clone() + a.clone() * b.clone() + b2.clone())
        * (k(22) * a6.clone()
            + k(52) * a5.clone() * b.clone()
            + k(89) * a4.clone() * b2.clone()
            + k(106) * a3.clone() * b3.clone()
            + k(89) * a2.clone() * b4.clone()
            + k(52) * a.clone() * b5.clone()
            + k(22) * b6.clone()))
        / (amb4.clone() * apb.clone() * q1.clone() * q1.clone() * q2.clone() * q2.clone());
    (h0, h1)
}

// ---------------------------------------------------------------------
// Double-double scalars: the exact coefficients combine huge rational and
// radical parts that cancel down by many orders of magnitude, so a single
// f64 per coefficient is far too coarse. Two floats give ~32 digits,
// which together with the two-chart split keeps every evaluation stable.

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2` (Dekker/Bailey
/// double-double).
#[derive(Clone, Copy, Debug)]
struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    const SPLIT: f64 = 134_217_729.0; // 2^27 + 1
    let p = a * b;
    let t = SPLIT * a;
    let ah = t - (t - a);
    let al = a - ah;
    let t = SPLIT * b;
    let bh = t - (t - b);
    let bl = b - bh;
    let e = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
    (p, e)
}

impl Dd {
    const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    /// Round an exact rational to double-double (error ~1e-32 relative).
    fn from_rational(r: &Rational) -> Dd {
        let hi = r.to_f64();
        if !hi.is_finite() {
            return Dd { hi, lo: 0.0 };
        }
        let rest = r.clone() - Rational::from_float(hi).expect("finite");
        Dd { hi, lo: rest.to_f64() }
    }

    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (hi, lo) = quick_two_sum(s, e + self.lo + o.lo);
        Dd { hi, lo }
    }

    fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let (hi, lo) = quick_two_sum(p, e + self.hi * o.lo + self.lo * o.hi);
        Dd { hi, lo }
    }

    fn mul_f64(self, x: f64) -> Dd {
        let (p, e) = two_prod(self.hi, x);
        let (hi, lo) = quick_two_sum(p, e + self.lo * x);
        Dd { hi, lo }
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

/// `√c` to double-double precision, from the exact rational `c`: one
/// Newton correction of the f64 root, with the residual computed exactly.
fn dd_sqrt(c: &Rational) -> Dd {
    let hi = c.to_f64().sqrt();
    if hi == 0.0 {
        return Dd::ZERO;
    }
    let hi_sq = Rational::from_float(hi).expect("finite") * Rational::from_float(hi).unwrap();
    let lo = (c.clone() - hi_sq).to_f64() / (2.0 * hi);
    Dd { hi, lo }
}

// ---------------------------------------------------------------------
// Exact polynomial assembly over the quadratic extension Q(√c).

/// `x + y √c` with exact rational parts.
#[derive(Clone, Debug)]
struct Ext {
    x: Rational,
    y: Rational,
}

impl Ext {
    fn zero() -> Self {
        Ext {
            x: Coeff::zero(),
            y: Coeff::zero(),
        }
    }
    fn add(&self, o: &Ext) -> Ext {
        Ext {
            x: self.x.clone() + o.x.clone(),
            y: self.y.clone() + o.y.clone(),
        }
    }
    fn sub(&self, o: &Ext) -> Ext {
        Ext {
            x: self.x.clone() - o.x.clone(),
            y: self.y.clone() - o.y.clone(),
        }
    }
    fn mul(&self, o: &Ext, c: &Rational) -> Ext {
        Ext {
            x: self.x.clone() * o.x.clone() + c.clone() * self.y.clone() * o.y.clone(),
            y: self.x.clone() * o.y.clone() + self.y.clone() * o.x.clone(),
        }
    }
    fn scale_i64(&self, n: i64) -> Ext {
        let f = Rational::from_i64(n);
        Ext {
            x: self.x.clone() * f.clone(),
            y: self.y.clone() * f,
        }
    }
    fn is_zero(&self) -> bool {
        Coeff::is_zero(&self.x) && Coeff::is_zero(&self.y)
    }
    fn to_dd(&self, sqrt_c: Dd) -> Dd {
        Dd::from_rational(&self.x).add(Dd::from_rational(&self.y).mul(sqrt_c))
    }
}

/// Exact bivariate polynomial over the extension field.
#[derive(Clone, Debug)]
struct EPoly {
    c: Vec<Vec<Ext>>,
}

impl EPoly {
    fn from_parts(p0: &[Vec<Rational>], p1: &[Vec<Rational>]) -> Self {
        let c = p0
            .iter()
            .zip(p1)
            .map(|(r0, r1)| {
                r0.iter()
                    .zip(r1)
                    .map(|(x, y)| Ext {
                        x: x.clone(),
                        y: y.clone(),
                    })
                    .collect()
            })
            .collect();
        Self { c }
    }

    fn rational_grid(grid: &[Vec<i64>]) -> Self {
        let c = grid
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&n| Ext {
                        x: Rational::from_i64(n),
                        y: Coeff::zero(),
                    })
                    .collect()
            })
            .collect();
        Self { c }
    }

    fn mul(&self, other: &Self, field: &Rational) -> Self {
        let rows = self.c.len() + other.c.len() - 1;
        let cols = self.c[0].len() + other.c[0].len() - 1;
        let mut c = vec![vec![Ext::zero(); cols]; rows];
        for (i, row) in self.c.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if v.is_zero() {
                    continue;
                }
                for (k, orow) in other.c.iter().enumerate() {
                    for (l, w) in orow.iter().enumerate() {
                        if w.is_zero() {
                            continue;
                        }
                        c[i + k][j + l] = c[i + k][j + l].add(&v.mul(w, field));
                    }
                }
            }
        }
        Self { c }
    }

    fn sub(&self, other: &Self) -> Self {
        let rows = self.c.len().max(other.c.len());
        let cols = self.c[0].len().max(other.c[0].len());
        let mut c = vec![vec![Ext::zero(); cols]; rows];
        for (i, row) in self.c.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                c[i][j] = c[i][j].add(v);
            }
        }
        for (i, row) in other.c.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                c[i][j] = c[i][j].sub(v);
            }
        }
        Self { c }
    }

    fn scale_i64(&self, n: i64) -> Self {
        Self {
            c: self
                .c
                .iter()
                .map(|row| row.iter().map(|v| v.scale_i64(n)).collect())
                .collect(),
        }
    }

    fn d_first(&self) -> Self {
        if self.c.len() == 1 {
            return Self {
                c: vec![vec![Ext::zero(); self.c[0].len()]],
            };
        }
        let c = (1..self.c.len())
            .map(|i| self.c[i].iter().map(|v| v.scale_i64(i as i64)).collect())
            .collect();
        Self { c }
    }

    fn d_second(&self) -> Self {
        let cols = self.c[0].len();
        if cols == 1 {
            return Self {
                c: vec![vec![Ext::zero()]; self.c.len()],
            };
        }
        let c = self
            .c
            .iter()
            .map(|row| (1..cols).map(|j| row[j].scale_i64(j as i64)).collect())
            .collect();
        Self { c }
    }

    /// Substitute `u -> 1 - u`, `v -> 1 - v`: the exact re-expansion
    /// around the critical corner.
    fn shift_one_minus(&self) -> Self {
        let rows = self.c.len();
        let cols = self.c[0].len();
        let binom = |n: usize| -> Vec<i64> {
            let mut row = vec![1i64; n + 1];
            for k in 1..=n {
                row[k] = row[k - 1] * (n - k + 1) as i64 / k as i64;
            }
            row
        };
        let mut c = vec![vec![Ext::zero(); cols]; rows];
        for (i, row) in self.c.iter().enumerate() {
            let bi = binom(i);
            for (j, v) in row.iter().enumerate() {
                if v.is_zero() {
                    continue;
                }
                let bj = binom(j);
                for (k, &bik) in bi.iter().enumerate() {
                    for (l, &bjl) in bj.iter().enumerate() {
                        let sign = if (k + l) % 2 == 0 { 1 } else { -1 };
                        c[k][l] = c[k][l].add(&v.scale_i64(sign * bik * bjl));
                    }
                }
            }
        }
        Self { c }
    }

    fn to_poly(&self, sqrt_c: Dd) -> Poly2 {
        Poly2 {
            c: self
                .c
                .iter()
                .map(|row| row.iter().map(|v| v.to_dd(sqrt_c)).collect())
                .collect(),
        }
    }
}

/// Dense bivariate polynomial with double-double coefficients; Horner
/// evaluation carries the extended precision through to one final
/// rounding.
#[derive(Clone, Debug)]
struct Poly2 {
    c: Vec<Vec<Dd>>,
}

impl Poly2 {
    fn eval(&self, u: f64, v: f64) -> f64 {
        let mut acc = Dd::ZERO;
        for row in self.c.iter().rev() {
            let mut r = Dd::ZERO;
            for &val in row.iter().rev() {
                r = r.mul_f64(v).add(val);
            }
            acc = acc.mul_f64(u).add(r);
        }
        acc.to_f64()
    }
}

/// One chart of the scaling function: the polynomials needed to evaluate
/// `N/W` and its first and mixed derivatives, as `f64` in the chart's
/// variables (either `(σ, τ)` or `(1-σ, 1-τ)`).
#[derive(Clone, Debug)]
struct Chart {
    numer: Poly2,
    denom: Poly2,    // W = (1-σ)(1-τ)𝔇 in chart variables
    p_first: Poly2,  // numerator of ∂₁(N/W), over W²
    p_second: Poly2, // numerator of ∂₂(N/W), over W²
    mixed: Poly2,    // numerator of ∂₁∂₂(N/W), over W³
    /// Sign relating chart derivatives to (σ, τ) derivatives: +1 for the
    /// raw chart, -1 for the corner chart.
    flip: f64,
}

impl Chart {
    fn build(field: &Rational, sqrt_c: Dd, numer: &EPoly, w: &EPoly, flip: f64) -> Self {
        let p_first = numer
            .d_first()
            .mul(w, field)
            .sub(&numer.mul(&w.d_first(), field));
        let p_second = numer
            .d_second()
            .mul(w, field)
            .sub(&numer.mul(&w.d_second(), field));
        let mixed = p_first
            .d_second()
            .mul(w, field)
            .sub(&p_first.mul(&w.d_second(), field).scale_i64(2));
        Self {
            numer: numer.to_poly(sqrt_c),
            denom: w.to_poly(sqrt_c),
            p_first: p_first.to_poly(sqrt_c),
            p_second: p_second.to_poly(sqrt_c),
            mixed: mixed.to_poly(sqrt_c),
            flip,
        }
    }

    fn quotient(&self, u: f64, v: f64) -> f64 {
        self.numer.eval(u, v) / self.denom.eval(u, v)
    }

    fn d_sigma_quotient(&self, u: f64, v: f64) -> f64 {
        let w = self.denom.eval(u, v);
        self.flip * self.p_first.eval(u, v) / (w * w)
    }

    fn d_tau_quotient(&self, u: f64, v: f64) -> f64 {
        let w = self.denom.eval(u, v);
        self.flip * self.p_second.eval(u, v) / (w * w)
    }

    fn d_sigma_tau_quotient(&self, u: f64, v: f64) -> f64 {
        let w = self.denom.eval(u, v);
        self.mixed.eval(u, v) / (w * w * w)
    }
}

/// Beyond this value of `(1-σ) + (1-τ)` the raw monomial chart is
/// accurate; below it the corner chart is (they overlap comfortably).
const CHART_SWITCH: f64 = 0.5;

/// The scaling function `𝔛(σ, τ)` with analytic derivatives, either the
/// general two-weight solution or the equal-weight closed form.
#[derive(Clone, Debug)]
pub struct ScalingFn {
    a: f64,
    b: f64,
    shift: f64, // 3 sqrt((a²+b²)/2)
    raw: Chart,
    corner: Option<Chart>,
}

impl ScalingFn {
    /// General two-weight solution from the tabulated coefficients,
    /// assembled exactly and re-expanded around the critical corner.
    pub fn two_weight(a: f64, b: f64) -> Result<Self, ScalingError> {
        if a <= 0.0 || b <= 0.0 {
            return Err(ScalingError::NonPositive(a.min(b)));
        }
        if (a - b).abs() < DELTA_MIN {
            return Err(ScalingError::NearEqualWeights((a - b).abs()));
        }
        let ar = Rational::from_float(a).expect("finite weight");
        let br = Rational::from_float(b).expect("finite weight");
        let t: XiTables<Rational> = xi_tables(&ar, &br);
        let field =
            (ar.clone() * ar.clone() + br.clone() * br.clone()) / Rational::from_i64(2);
        let sqrt_c = dd_sqrt(&field);
        let numer = EPoly::from_parts(&t.n0, &t.n1);
        let d = EPoly::from_parts(&t.d0, &t.d1);
        Ok(Self::assemble(a, b, 3.0 * sqrt_c.to_f64(), field, sqrt_c, numer, d))
    }

    /// The equal-weight closed form
    /// `𝔛 = -3a - 6a(σ + τ - 3στ + σ²τ²)/((1-σ)(1-τ)(1-στ))`.
    pub fn equal_weight(a: f64) -> Self {
        let ar = Rational::from_float(a).expect("finite weight");
        let six_a = Rational::from_i64(6) * ar.clone();
        let z = Rational::from_i64(0);
        let numer0 = vec![
            vec![z.clone(), six_a.clone(), z.clone()],
            vec![
                six_a.clone(),
                Rational::from_i64(-18) * ar.clone(),
                z.clone(),
            ],
            vec![z.clone(), z.clone(), six_a.clone()],
        ];
        let zeros3 = vec![vec![z.clone(); 3]; 3];
        let numer = EPoly::from_parts(&numer0, &zeros3);
        let d = EPoly::rational_grid(&[vec![1, 0], vec![0, -1]]); // 1 - στ
        Self::assemble(a, a, 3.0 * a, Rational::from_i64(0), Dd::ZERO, numer, d)
    }

    /// Raw-chart-only construction from explicit `f64` tables, for
    /// coefficient sensitivity tests.
    pub fn from_tables(a: f64, b: f64, t: XiTables<f64>) -> Self {
        let sq = ((a * a + b * b) / 2.0).sqrt();
        let combine = |p0: &Vec<Vec<f64>>, p1: &Vec<Vec<f64>>| -> Vec<Vec<Rational>> {
            p0.iter()
                .zip(p1)
                .map(|(r0, r1)| {
                    r0.iter()
                        .zip(r1)
                        .map(|(x, y)| Rational::from_float(x + sq * y).expect("finite"))
                        .collect()
                })
                .collect()
        };
        let z = Rational::from_i64(0);
        let numer = EPoly::from_parts(&combine(&t.n0, &t.n1), &vec![vec![z.clone(); 4]; 4]);
        let d = EPoly::from_parts(&combine(&t.d0, &t.d1), &vec![vec![z; 3]; 3]);
        let mut f = Self::assemble(a, b, 3.0 * sq, Rational::from_i64(0), Dd::ZERO, numer, d);
        f.corner = None;
        f
    }

    fn assemble(
        a: f64,
        b: f64,
        shift: f64,
        field: Rational,
        sqrt_c: Dd,
        numer: EPoly,
        d: EPoly,
    ) -> Self {
        let one_minus_first = EPoly::rational_grid(&[vec![1], vec![-1]]);
        let one_minus_second = EPoly::rational_grid(&[vec![1, -1]]);
        let w = one_minus_first
            .mul(&one_minus_second, &field)
            .mul(&d, &field);
        let raw = Chart::build(&field, sqrt_c, &numer, &w, 1.0);
        // corner chart: substitute σ = 1-p, τ = 1-q, so W = p q 𝔇(1-p,1-q)
        let d_corner = d.shift_one_minus();
        let p_mono = EPoly::rational_grid(&[vec![0], vec![1]]);
        let q_mono = EPoly::rational_grid(&[vec![0, 1]]);
        let w_corner = p_mono.mul(&q_mono, &field).mul(&d_corner, &field);
        let numer_corner = numer.shift_one_minus();
        let corner = Chart::build(&field, sqrt_c, &numer_corner, &w_corner, -1.0);
        Self {
            a,
            b,
            shift,
            raw,
            corner: Some(corner),
        }
    }

    fn chart_at(&self, p: f64, q: f64) -> (&Chart, f64, f64) {
        match &self.corner {
            Some(corner) if p + q < CHART_SWITCH => (corner, p, q),
            _ => (&self.raw, 1.0 - p, 1.0 - q),
        }
    }

    /// `𝔛(σ, τ)`.
    pub fn xi(&self, sigma: f64, tau: f64) -> f64 {
        self.xi_from_complements(1.0 - sigma, 1.0 - tau)
    }

    /// `𝔛` parametrized by `p = 1-σ`, `q = 1-τ` (the accurate inputs near
    /// the critical corner).
    pub fn xi_from_complements(&self, p: f64, q: f64) -> f64 {
        let (chart, u, v) = self.chart_at(p, q);
        -self.shift - chart.quotient(u, v)
    }

    pub fn dxi_dsigma(&self, sigma: f64, tau: f64) -> f64 {
        let (chart, u, v) = self.chart_at(1.0 - sigma, 1.0 - tau);
        -chart.d_sigma_quotient(u, v)
    }

    pub fn dxi_dtau(&self, sigma: f64, tau: f64) -> f64 {
        let (chart, u, v) = self.chart_at(1.0 - sigma, 1.0 - tau);
        -chart.d_tau_quotient(u, v)
    }

    pub fn d2xi_dsigma_dtau(&self, sigma: f64, tau: f64) -> f64 {
        self.d2xi_from_complements(1.0 - sigma, 1.0 - tau)
    }

    fn d2xi_from_complements(&self, p: f64, q: f64) -> f64 {
        let (chart, u, v) = self.chart_at(p, q);
        -chart.d_sigma_tau_quotient(u, v)
    }

    /// `x(S, T)` via `σ = e^{-aS}`, `τ = e^{-bT}`.
    pub fn x(&self, s: f64, t: f64) -> f64 {
        self.xi_from_complements(-(-self.a * s).exp_m1(), -(-self.b * t).exp_m1())
    }

    /// `(1/3) ∂S ∂T x |_{T=S}`: by the chain rule
    /// `(1/3) a b σ τ ∂σ∂τ 𝔛` at `σ = e^{-aS}`, `τ = e^{-bS}`.
    pub fn dsdt_x_diag(&self, s: f64) -> f64 {
        let p = -(-self.a * s).exp_m1();
        let q = -(-self.b * s).exp_m1();
        self.a * self.b * (1.0 - p) * (1.0 - q) * self.d2xi_from_complements(p, q) / 3.0
    }

    /// Relative residual of the scaling PDE in `σ, τ` variables:
    /// `|2𝔛² - 6(aσ∂σ𝔛 + bτ∂τ𝔛) + 27(𝔯(σ,a) + 𝔯(τ,b))|` over
    /// `27|𝔯(σ,a) + 𝔯(τ,b)|`.
    pub fn pde_residual_at(&self, s: f64, t: f64) -> f64 {
        let sigma = (-self.a * s).exp();
        let tau = (-self.b * t).exp();
        let xi = self.xi(sigma, tau);
        let lhs = 2.0 * xi * xi
            - 6.0
                * (self.a * sigma * self.dxi_dsigma(sigma, tau)
                    + self.b * tau * self.dxi_dtau(sigma, tau))
            + 27.0 * (r_sigma(sigma, self.a) + r_sigma(tau, self.b));
        let scale = 27.0 * (r_sigma(sigma, self.a) + r_sigma(tau, self.b)).abs();
        lhs.abs() / scale
    }
}

/// The primitive `𝔎(σ) = a b σ τ 𝔥(σ,τ)/𝔇(σ,τ)²` at `τ = σ^{b/a}`, with
/// the same two-chart evaluation strategy as the scaling function.
#[derive(Clone, Debug)]
pub struct KPrimitive {
    a: f64,
    b: f64,
    h_raw: Poly2,
    h_corner: Poly2,
    d_raw: Poly2,
    d_corner: Poly2,
}

impl KPrimitive {
    pub fn new(a: f64, b: f64) -> Result<Self, ScalingError> {
        if a <= 0.0 || b <= 0.0 {
            return Err(ScalingError::NonPositive(a.min(b)));
        }
        if (a - b).abs() < DELTA_MIN {
            return Err(ScalingError::NearEqualWeights((a - b).abs()));
        }
        let ar = Rational::from_float(a).expect("finite weight");
        let br = Rational::from_float(b).expect("finite weight");
        let field =
            (ar.clone() * ar.clone() + br.clone() * br.clone()) / Rational::from_i64(2);
        let sqrt_c = dd_sqrt(&field);
        let (h0, h1) = k_tables(&ar, &br);
        let xt: XiTables<Rational> = xi_tables(&ar, &br);
        let h = EPoly::from_parts(&h0, &h1);
        let d = EPoly::from_parts(&xt.d0, &xt.d1);
        Ok(Self {
            a,
            b,
            h_raw: h.to_poly(sqrt_c),
            h_corner: h.shift_one_minus().to_poly(sqrt_c),
            d_raw: d.to_poly(sqrt_c),
            d_corner: d.shift_one_minus().to_poly(sqrt_c),
        })
    }

    /// `𝔎(σ)` for `0 <= σ < 1`.
    pub fn eval(&self, sigma: f64) -> f64 {
        self.eval_from_complement(1.0 - sigma)
    }

    /// `𝔎(1 - p)`, accurate for small `p` (the near-critical regime).
    pub fn eval_from_complement(&self, p: f64) -> f64 {
        // τ = σ^{b/a} = (1-p)^{b/a}; q = 1-τ without cancellation
        let q = -((self.b / self.a) * (-p).ln_1p()).exp_m1();
        if p + q < CHART_SWITCH {
            let d = self.d_corner.eval(p, q);
            self.a * self.b * (1.0 - p) * (1.0 - q) * self.h_corner.eval(p, q) / (d * d)
        } else {
            let (sigma, tau) = (1.0 - p, 1.0 - q);
            let d = self.d_raw.eval(sigma, tau);
            self.a * self.b * sigma * tau * self.h_raw.eval(sigma, tau) / (d * d)
        }
    }
}

/// The two-weight scaling function `x(S,T,a,b)`.
pub fn x_fn(s: f64, t: f64, a: f64, b: f64) -> Result<f64, ScalingError> {
    if s <= 0.0 || t <= 0.0 {
        return Err(ScalingError::NonPositive(s.min(t)));
    }
    Ok(ScalingFn::two_weight(a, b)?.x(s, t))
}

/// The equal-weight scaling function `x(S,T,a)`.
pub fn x_fn_equal(s: f64, t: f64, a: f64) -> Result<f64, ScalingError> {
    if s <= 0.0 || t <= 0.0 || a <= 0.0 {
        return Err(ScalingError::NonPositive(s.min(t).min(a)));
    }
    Ok(ScalingFn::equal_weight(a).x(s, t))
}

/// Relative PDE residual at one point; near-equal weights switch to the
/// equal-weight closed form.
pub fn pde_residual(s: f64, t: f64, a: f64, b: f64) -> Result<f64, ScalingError> {
    if s <= 0.0 || t <= 0.0 || a <= 0.0 || b <= 0.0 {
        return Err(ScalingError::NonPositive(s.min(t)));
    }
    let f = if (a - b).abs() < DELTA_MIN {
        ScalingFn::equal_weight(a)
    } else {
        ScalingFn::two_weight(a, b)?
    };
    Ok(f.pde_residual_at(s, t))
}

/// The standard verification grid: weights from {0.7, 1.0, 1.3} (distinct
/// pairs) and labels from {0.2, 0.5, 1.0, 2.0, 3.0}.
pub fn standard_grid() -> Vec<(f64, f64, f64, f64)> {
    let ws = [0.7, 1.0, 1.3];
    let ss = [0.2, 0.5, 1.0, 2.0, 3.0];
    let mut out = Vec::new();
    for &a in &ws {
        for &b in &ws {
            if a == b {
                continue;
            }
            for &s in &ss {
                for &t in &ss {
                    out.push((s, t, a, b));
                }
            }
        }
    }
    out
}

/// `𝔎(σ, a, b)`, the primitive of `(1/3) b σ^{b/a} ∂σ∂τ 𝔛|_{τ=σ^{b/a}}`
/// vanishing at 0.
pub fn k_fn(sigma: f64, a: f64, b: f64) -> Result<f64, ScalingError> {
    if !(0.0..1.0).contains(&sigma) {
        return Err(ScalingError::NonPositive(sigma));
    }
    Ok(KPrimitive::new(a, b)?.eval(sigma))
}

/// Coefficient of `ε²` in the singular expansion of the two-face series:
/// `-(1/18)(a⁶-b⁶)/(a⁴-b⁴)`, evaluated in the factored form
/// `-(a⁴+a²b²+b⁴)/(18(a²+b²))` which is continuous at `b = a` with value
/// `-a²/12`.
pub fn singularity_coefficient(a: f64, b: f64) -> f64 {
    let (a2, b2) = (a * a, b * b);
    -(a2 * a2 + a2 * b2 + b2 * b2) / (18.0 * (a2 + b2))
}

/// Adaptive Simpson quadrature with absolute tolerance (plus a relative
/// floor near machine precision).
pub fn integrate<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, abs_tol: f64) -> f64 {
    fn simpson(a: f64, fa: f64, b: f64, fb: f64, fm: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(a, fa, m, fm, flm);
        let right = simpson(m, fm, b, fb, frm);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1)
                + rec(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1)
        }
    }
    if lo == hi {
        return 0.0;
    }
    let flo = f(lo);
    let fhi = f(hi);
    let fm = f(0.5 * (lo + hi));
    let whole = simpson(lo, flo, hi, fhi, fm);
    let tol = abs_tol.max(whole.abs() * 1e-14);
    rec(f, lo, flo, hi, fhi, fm, whole, tol, 30)
}

/// Integrate over `[lo, hi]` with geometric panel splitting from the left
/// endpoint, for integrands steep near `lo`.
fn integrate_geometric<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, rel_tol: f64) -> f64 {
    let mut total = 0.0;
    let mut left = lo;
    let mut width = lo;
    while left < hi {
        let right = (left + width).min(hi);
        let scale = (f(left).abs() * (right - left)).max(1e-30);
        total += integrate(f, left, right, rel_tol * scale);
        left = right;
        width *= 2.0;
    }
    total
}

/// The three contour pieces of the moment-generating integral and their
/// total, which equals `(e^μ - 1)/(4√π μ)`.
#[derive(Clone, Copy, Debug)]
pub struct ContourValue {
    /// From the finite cut excursion: `(2/3π)(e^μ/μ) ∫₀^{√μ} t⁴ e^{-t²} dt`.
    pub cut_piece: f64,
    /// From the pole term on the diagonal rays: `-(2/3π)(1/μ) ∫₀^∞ t⁴ e^{-t²} dt`.
    pub ray_gaussian_piece: f64,
    /// From the cut term on the diagonal rays: `(2/3π)(e^μ/μ) ∫_{√μ}^∞ t⁴ e^{-t²} dt`.
    pub ray_cut_piece: f64,
    pub total: f64,
    pub closed_form: f64,
}

/// Evaluate the contour integral pieces for `μ > 0` by adaptive
/// quadrature; the total reproduces the closed form to quadrature
/// accuracy.
pub fn contour_value(mu: f64) -> Result<ContourValue, ScalingError> {
    if mu <= 0.0 {
        return Err(ScalingError::NonPositive(mu));
    }
    let integrand = |t: f64| t.powi(4) * (-t * t).exp();
    let tail_end = 12.0f64.max(mu.sqrt() + 1.0); // integrand < 1e-55 beyond
    let lower = integrate(&integrand, 0.0, mu.sqrt(), 1e-13);
    let full = integrate(&integrand, 0.0, tail_end, 1e-13);
    let upper = integrate(&integrand, mu.sqrt(), tail_end, 1e-13);
    let pref = 2.0 / (3.0 * PI);
    let cut_piece = pref * mu.exp() / mu * lower;
    let ray_gaussian_piece = -pref / mu * full;
    let ray_cut_piece = pref * mu.exp() / mu * upper;
    Ok(ContourValue {
        cut_piece,
        ray_gaussian_piece,
        ray_cut_piece,
        total: cut_piece + ray_gaussian_piece + ray_cut_piece,
        closed_form: mu.exp_m1() / (4.0 * PI.sqrt() * mu),
    })
}

/// Compare `∫_ε^∞ (1/3) ∂S∂T x|_{T=S} dS` (by quadrature) against the
/// primitive value `𝔎(e^{-aε})`; returns the relative difference.
pub fn first_integral_check(eps: f64, a: f64, b: f64) -> Result<f64, ScalingError> {
    if eps <= 0.0 {
        return Err(ScalingError::NonPositive(eps));
    }
    let f = ScalingFn::two_weight(a, b)?;
    let integrand = |s: f64| f.dsdt_x_diag(s);
    let s_max = 80.0 / a.min(b);
    let lhs = integrate_geometric(&integrand, eps, s_max, 1e-11);
    let rhs = KPrimitive::new(a, b)?.eval_from_complement(-(-a * eps).exp_m1());
    Ok((lhs - rhs).abs() / rhs.abs())
}

/// Equal-weight version of the first integral:
/// `∫_ε^∞ 2a³ e^{-2aS}(1+e^{-2aS})/(1-e^{-2aS})³ dS = a² e^{-2aε}/(1-e^{-2aε})²`.
pub fn first_integral_check_equal(eps: f64, a: f64) -> Result<f64, ScalingError> {
    if eps <= 0.0 || a <= 0.0 {
        return Err(ScalingError::NonPositive(eps.min(a)));
    }
    let f = ScalingFn::equal_weight(a);
    let integrand = |s: f64| f.dsdt_x_diag(s);
    let s_max = 80.0 / a;
    let lhs = integrate_geometric(&integrand, eps, s_max, 1e-11);
    let em = -(-2.0 * a * eps).exp_m1(); // 1 - e^{-2aε}
    let rhs = a * a * (1.0 - em) / (em * em);
    Ok((lhs - rhs).abs() / rhs.abs())
}

/// Report from the local-to-scaling bridge at one parameter point.
#[derive(Clone, Copy, Debug)]
pub struct BridgeReport {
    pub s: usize,
    /// `(R_s(g) - 2)/ε²` with `g` at the scaling point, from the closed form.
    pub discrete: f64,
    /// `r(S, a)`.
    pub scaling: f64,
    pub abs_gap: f64,
    pub rel_gap: f64,
}

/// Evaluate the tree series at the scaling point `g = (1/12)(1 - a⁴ε⁴/36)`
/// through its closed form and compare `(R_{⌊S/ε⌋}(g) - 2)/ε²` with
/// `r(S,a)`.
///
/// The closed form is used because a truncated series cannot resolve `g`
/// this close to the critical point; it is itself checked coefficient by
/// coefficient against the recursion solver elsewhere.
pub fn local_limit_bridge(big_s: f64, eps: f64, a: f64) -> Result<BridgeReport, ScalingError> {
    if big_s <= 0.0 || eps <= 0.0 || a <= 0.0 {
        return Err(ScalingError::NonPositive(big_s.min(eps).min(a)));
    }
    let s = (big_s / eps).floor() as usize;
    // 1 - 12g = (1-x)⁴/(1+4x+x²)² exactly; solve for x by fixed point in
    // y = 1 - x, avoiding any cancellation near the critical point.
    let delta = a.powi(4) * eps.powi(4) / 36.0;
    let root = delta.sqrt().sqrt();
    let mut y = root * 6.0f64.sqrt();
    for _ in 0..64 {
        let x = 1.0 - y;
        let next = root * (1.0 + 4.0 * x + x * x).sqrt();
        if (next - y).abs() <= 1e-17 * y {
            y = next;
            break;
        }
        y = next;
    }
    let x = 1.0 - y;
    let pow = |m: usize| x.powi(m as i32);
    let prefactor = (1.0 + 4.0 * x + x * x) / (1.0 + x + x * x);
    let r = prefactor * (1.0 - pow(s)) * (1.0 - pow(s + 3))
        / ((1.0 - pow(s + 1)) * (1.0 - pow(s + 2)));
    let discrete = (r - 2.0) / (eps * eps);
    let scaling = r_fn(big_s, a)?;
    Ok(BridgeReport {
        s,
        discrete,
        scaling,
        abs_gap: (discrete - scaling).abs(),
        rel_gap: (discrete - scaling).abs() / scaling.abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn r_fn_expansions_and_limits() {
        // small-S expansion r = -4/S² - a⁴S²/60 + a⁶S⁴/1512 + O(S⁶)
        for (s, a) in [(0.1f64, 1.0f64), (0.05, 1.3)] {
            let approx =
                -4.0 / (s * s) - a.powi(4) * s * s / 60.0 + a.powi(6) * s.powi(4) / 1512.0;
            let exact = r_fn(s, a).unwrap();
            assert!(
                ((exact - approx) / exact).abs() < 1e-8,
                "small-S mismatch at S={s}, a={a}: {exact} vs {approx}"
            );
        }
        // S -> infinity limit -a²/3
        let a = 1.7;
        assert!((r_fn(60.0, a).unwrap() + a * a / 3.0).abs() < 1e-12);
        // exact rescaling identity r(S,a) = a² r(aS, 1)
        for (s, a) in [(0.7, 1.9), (2.0, 0.4)] {
            let lhs = r_fn(s, a).unwrap();
            let rhs = a * a * r_fn(a * s, 1.0).unwrap();
            assert!((lhs - rhs).abs() < 1e-12 * lhs.abs());
        }
        assert!(r_fn(-1.0, 1.0).is_err());
    }

    #[test]
    fn equal_weight_symmetry_and_limits() {
        let a = 1.1;
        let x = |s, t| x_fn_equal(s, t, a).unwrap();
        assert!((x(0.8, 1.7) - x(1.7, 0.8)).abs() < 1e-12 * x(0.8, 1.7).abs());
        // small S,T: x ~ -6(S² + ST + T²)/(ST(S+T)), corrections O(S)
        let (s, t) = (1e-3, 2e-3);
        let approx = -6.0 * (s * s + s * t + t * t) / (s * t * (s + t));
        let val = x(s, t);
        assert!(
            ((val - approx) / val).abs() < 1e-5,
            "small-ST mismatch: {val} vs {approx}"
        );
    }

    #[test]
    fn equal_weight_diagonal_derivative_closed_form() {
        // (1/3) dS dT x |_{T=S} = 2a³ e^{-2aS}(1+e^{-2aS})/(1-e^{-2aS})³
        for &a in &[0.8, 1.0, 1.6] {
            let f = ScalingFn::equal_weight(a);
            for &s in &[0.01, 0.2, 0.7, 1.5, 3.0, 8.0] {
                let q = (-2.0 * a * s).exp();
                let closed = 2.0 * a.powi(3) * q * (1.0 + q) / (1.0 - q).powi(3);
                let got = f.dsdt_x_diag(s);
                assert!(
                    ((got - closed) / closed).abs() < 1e-9,
                    "a={a}, S={s}: {got} vs {closed}"
                );
            }
        }
    }

    #[test]
    fn xi_at_origin_and_small_st() {
        let (a, b) = (1.0, 1.3);
        let f = ScalingFn::two_weight(a, b).unwrap();
        let expect = -3.0 * ((a * a + b * b) / 2.0f64).sqrt();
        assert!((f.xi(0.0, 0.0) - expect).abs() < 1e-12);
        // the general small-S,T behaviour matches the universal pole
        let (s, t) = (1e-3, 1.5e-3);
        let approx = -6.0 * (s * s + s * t + t * t) / (s * t * (s + t));
        let val = f.x(s, t);
        assert!(((val - approx) / val).abs() < 1e-4, "{val} vs {approx}");
    }

    #[test]
    fn two_weight_degenerates_to_equal_weight() {
        // extrapolate b -> a: the symmetric average kills the O(b-a) term
        let a = 1.0;
        let d = 1e-3;
        for (s, t) in [(0.5, 0.9), (1.5, 2.2)] {
            let plus = x_fn(s, t, a, a + d).unwrap();
            let minus = x_fn(s, t, a, a - d).unwrap();
            let avg = 0.5 * (plus + minus);
            let eq = x_fn_equal(s, t, a).unwrap();
            assert!(
                ((avg - eq) / eq).abs() < 1e-5,
                "extrapolation at ({s},{t}): {avg} vs {eq}"
            );
        }
        assert!(matches!(
            x_fn(1.0, 1.0, 1.0, 1.0 + 1e-5),
            Err(ScalingError::NearEqualWeights(_))
        ));
    }

    #[test]
    fn pde_residual_on_grid() {
        let ws = [0.7, 1.0, 1.3];
        let ss = [0.2, 0.5, 1.0, 2.0, 3.0];
        for &a in &ws {
            for &b in &ws {
                if a == b {
                    continue;
                }
                let f = ScalingFn::two_weight(a, b).unwrap();
                for &s in &ss {
                    for &t in &ss {
                        let r = f.pde_residual_at(s, t);
                        assert!(r < 1e-8, "pde residual {r} at ({s},{t},{a},{b})");
                    }
                }
            }
        }
        // equal-weight path
        for &s in &[0.2, 1.0, 3.0] {
            for &t in &[0.4, 1.7] {
                let r = pde_residual(s, t, 1.0, 1.0).unwrap();
                assert!(r < 1e-8, "equal-weight residual {r}");
            }
        }
    }

    #[test]
    fn pde_residual_detects_perturbed_tables() {
        let (a, b) = (1.0, 1.3);
        let mut t: XiTables<f64> = xi_tables(&a, &b);
        t.n0[1][1] *= 1.01;
        let f = ScalingFn::from_tables(a, b, t);
        let mut worst: f64 = 0.0;
        for &(s, tt) in &[(0.5, 0.5), (1.0, 2.0), (0.2, 1.0)] {
            worst = worst.max(f.pde_residual_at(s, tt));
        }
        assert!(worst > 1e-3, "perturbation went unnoticed: {worst}");
        // unperturbed f64 tables do satisfy the PDE at moderate labels
        let clean = ScalingFn::from_tables(a, b, xi_tables(&a, &b));
        assert!(clean.pde_residual_at(1.0, 2.0) < 1e-8);
    }

    #[test]
    fn k_primitive_properties() {
        let (a, b) = (1.0, 1.3);
        assert_eq!(k_fn(0.0, a, b).unwrap(), 0.0);
        // epsilon expansion: K(e^{-aε}) = 1/(4ε²) - C + O(ε²) with
        // C = (a²-ab+b²)(a²+ab+b²)/(18(a²+b²))
        let c = (a * a - a * b + b * b) * (a * a + a * b + b * b) / (18.0 * (a * a + b * b));
        let kp = KPrimitive::new(a, b).unwrap();
        let kk =
            |eps: f64| kp.eval_from_complement(-(-a * eps).exp_m1()) - 0.25 / (eps * eps);
        // extrapolate away the O(ε²) correction; smaller ε would start
        // losing digits to the 1/(4ε²) subtraction itself
        let (e1, e2) = (2e-2, 1e-2);
        let extrapolated = (4.0 * kk(e2) - kk(e1)) / 3.0;
        assert!(
            (extrapolated + c).abs() < 1e-7,
            "constant term: {extrapolated} vs {}",
            -c
        );
        // derivative check by central differences
        let f = ScalingFn::two_weight(a, b).unwrap();
        for i in 1..=9 {
            let sigma = i as f64 / 10.0;
            let d = 1e-5;
            let fd = (kp.eval(sigma + d) - kp.eval(sigma - d)) / (2.0 * d);
            let tau = sigma.powf(b / a);
            let analytic = b * tau / 3.0 * f.d2xi_dsigma_dtau(sigma, tau);
            assert!(
                ((fd - analytic) / analytic).abs() < 1e-5,
                "primitive equation at sigma={sigma}: {fd} vs {analytic}"
            );
        }
    }

    #[test]
    fn singularity_coefficient_properties() {
        let a = 1.2;
        assert!((singularity_coefficient(a, a) + a * a / 12.0).abs() < 1e-14);
        let sym_l = singularity_coefficient(0.9, 1.4);
        let sym_r = singularity_coefficient(1.4, 0.9);
        assert!((sym_l - sym_r).abs() <= 1e-15 * sym_l.abs());
        // the factored form equals the raw ratio away from b = a ...
        for (a, b) in [(1.0f64, 1.3f64), (0.7, 2.0)] {
            let raw = -(a.powi(6) - b.powi(6)) / (18.0 * (a.powi(4) - b.powi(4)));
            let got = singularity_coefficient(a, b);
            assert!((raw - got).abs() < 1e-12 * raw.abs());
            // ... and matches the constant in the primitive's expansion
            let c =
                (a * a - a * b + b * b) * (a * a + a * b + b * b) / (18.0 * (a * a + b * b));
            assert!((got + c).abs() < 1e-12 * c.abs());
        }
    }

    #[test]
    fn contour_pieces_and_total() {
        // the Gaussian moment: ∫₀^∞ t⁴ e^{-t²} dt = 3√π/8
        let integrand = |t: f64| t.powi(4) * (-t * t).exp();
        let full = integrate(&integrand, 0.0, 12.0, 1e-13);
        assert!((full - 3.0 * PI.sqrt() / 8.0).abs() < 1e-12);
        for &mu in &[0.1, 1.0, 4.0] {
            let cv = contour_value(mu).unwrap();
            assert!(
                (cv.total - cv.closed_form).abs() < 1e-8 * cv.closed_form.abs(),
                "mu={mu}: {} vs {}",
                cv.total,
                cv.closed_form
            );
        }
        // μ -> 0⁺ limit: total -> 1/(4√π)
        let cv = contour_value(1e-9).unwrap();
        assert!((cv.total - 0.25 / PI.sqrt()).abs() < 1e-6);
        // MGF chain: total · 4√π = (e^μ - 1)/μ
        let cv = contour_value(1.0).unwrap();
        let lim = crate::law::mgf_limit(1.0);
        assert!((cv.total * 4.0 * PI.sqrt() - lim).abs() < 1e-8);
        assert!(contour_value(0.0).is_err());
    }

    #[test]
    fn first_integral_agreement() {
        let rel = first_integral_check(1e-3, 1.0, 1.3).unwrap();
        assert!(rel < 1e-6, "relative difference {rel}");
        let rel_eq = first_integral_check_equal(1e-3, 1.0).unwrap();
        assert!(rel_eq < 1e-6, "equal-weight relative difference {rel_eq}");
        // leading behaviour: ε² ∫_ε^∞ -> 1/4 as ε -> 0
        let a = 1.0f64;
        let eps = 1e-3;
        let k = k_fn((-a * eps).exp(), a, 1.3).unwrap();
        assert!((eps * eps * k - 0.25).abs() < 1e-3);
    }

    #[test]
    fn bridge_converges() {
        // the discrete-to-continuum gap shrinks linearly in ε
        let r1 = local_limit_bridge(1.0, 0.02, 1.0).unwrap();
        let r2 = local_limit_bridge(1.0, 0.01, 1.0).unwrap();
        assert!(r2.abs_gap < r1.abs_gap);
        assert!(r2.rel_gap < 0.05, "rel gap {}", r2.rel_gap);
        let r3 = local_limit_bridge(2.0, 0.01, 1.0).unwrap();
        assert!(r3.rel_gap < 0.05, "rel gap {}", r3.rel_gap);
    }
}

