//! The two-face-map series `F(g,h)` and the exact Voronoï-area laws.
//!
//! `F(g,h)` counts iso-labelled two-face maps with a weight `g` per edge
//! strictly in the first face, `h` per edge strictly in the second, and
//! `√(gh)` per loop edge, with a `1/k` factor for k-fold loop-rotation
//! symmetry. It is assembled from the chain series as
//!
//! ```text
//! F = Σ_{s>=1} Δ_s Δ_t log X_{s,t} |_{t=s}
//!   = Σ_{s>=1} log( X_{s,s} X_{s-1,s-1} / (X_{s-1,s} X_{s,s-1}) ).
//! ```
//!
//! The even part (maps whose two marked vertices sit at even distance in
//! the general-map picture) uses the no-0–0-spine-edge chains `N_{s,t}`
//! in place of `X_{s,t}`; the odd part uses `X/N`. The extraction
//! `[g^{N-p/2} h^{p/2}] F` then gives the exact weight of a second cell of
//! area `p/2` at total area `N`, and the finite-size law follows by
//! normalizing with `[g^N] F(g,g)`.

use crate::exact::{BiSeries, Coeff, Rational, SeriesError, UniSeries};
use crate::recursions::{
    n_from_x, solve_r, solve_x, x_of_g, RecursionError, RTable, XTable,
};

/// Which distance-parity sector of the two-face-map series.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    All,
    Even,
    Odd,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::All => "all",
            Variant::Even => "even",
            Variant::Odd => "odd",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "all" => Ok(Variant::All),
            "even" => Ok(Variant::Even),
            "odd" => Ok(Variant::Odd),
            other => Err(format!("unknown variant `{other}` (expected all|even|odd)")),
        }
    }
}

/// Errors from law-table construction.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LawError {
    #[error("law at total area {n} needs a series of total degree {required}, have {got}")]
    InsufficientTruncation { n: usize, required: usize, got: usize },
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Recursion(#[from] RecursionError),
}

/// A truncated expansion of `F(g,h)` for one parity variant.
#[derive(Clone, Debug)]
pub struct FSeries<C = Rational> {
    variant: Variant,
    series: BiSeries<C>,
    s_terms_used: usize,
}

impl<C: Coeff> FSeries<C> {
    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn series(&self) -> &BiSeries<C> {
        &self.series
    }

    /// Number of loop-depth terms that contributed before the sum vanished.
    pub fn s_terms_used(&self) -> usize {
        self.s_terms_used
    }

    pub fn order(&self) -> usize {
        self.series.truncation()
    }
}

/// Assemble all three parity variants at total degree `order` (in `u, v`),
/// sharing one chain table.
pub fn f_all_even_odd<C: Coeff>(
    order: usize,
) -> Result<(FSeries<C>, FSeries<C>, FSeries<C>), LawError> {
    let k = order / 2;
    let s_max = k + 1;
    let x: XTable<C> = solve_x(s_max, order)?;
    let r: RTable<C> = solve_r(s_max + 1, k)?;

    let all = assemble(order, Variant::All, |s, t| Ok(x.entry(s, t).clone()))?;
    let even = assemble(order, Variant::Even, |s, t| {
        Ok(n_from_x(x.entry(s, t), r.entry(s), r.entry(t))?)
    })?;
    let odd = assemble(order, Variant::Odd, |s, t| {
        let n = n_from_x(x.entry(s, t), r.entry(s), r.entry(t))?;
        Ok(x.entry(s, t).mul(&n.reciprocal()?))
    })?;
    Ok((all, even, odd))
}

/// Assemble one variant of `F` at total degree `order`.
pub fn f_series<C: Coeff>(order: usize, variant: Variant) -> Result<FSeries<C>, LawError> {
    let (all, even, odd) = f_all_even_odd(order)?;
    Ok(match variant {
        Variant::All => all,
        Variant::Even => even,
        Variant::Odd => odd,
    })
}

/// Sum `Σ_s log(Y_{s,s} Y_{s-1,s-1} / (Y_{s-1,s} Y_{s,s-1}))` with an
/// adaptive cutoff: the summand is identically zero once every chain floor
/// is inactive, guaranteed at the latest for `s = K + 2`. A summand still
/// nonzero past that depth would mean the truncation argument is broken,
/// which is an internal invariant violation.
fn assemble<C: Coeff>(
    order: usize,
    variant: Variant,
    entry: impl Fn(usize, usize) -> Result<BiSeries<C>, LawError>,
) -> Result<FSeries<C>, LawError> {
    let k = order / 2;
    let mut total = BiSeries::zero(order);
    let mut s_terms_used = 0;
    let mut s = 1;
    loop {
        let numer = entry(s, s)?.mul(&entry(s - 1, s - 1)?);
        let denom = entry(s - 1, s)?.mul(&entry(s, s - 1)?);
        let summand = numer.mul(&denom.reciprocal()?).log()?;
        if summand.is_zero() {
            break;
        }
        assert!(
            s <= k + 2,
            "two-face sum failed to terminate by loop depth {} at order {order}",
            k + 2
        );
        total = total.add(&summand);
        s_terms_used = s;
        s += 1;
    }
    Ok(FSeries {
        variant,
        series: total,
        s_terms_used,
    })
}

/// Exact closed form for the diagonal `F(g,g)`:
/// `log((1-x²)² / ((1-x)(1-x³)))` expanded at `x = x(g)`.
pub fn f_diagonal_closed_form(order: usize) -> UniSeries<Rational> {
    let xg = x_of_g(order);
    let one = UniSeries::one(order);
    let x2 = xg.mul(&xg);
    let x3 = x2.mul(&xg);
    let numer = one.sub(&x2).mul(&one.sub(&x2));
    let denom = one.sub(&xg).mul(&one.sub(&x3));
    numer
        .mul(&denom.reciprocal().expect("unit constant"))
        .log()
        .expect("unit constant")
}

/// Exact distribution of the second Voronoï cell's area at total area `n`:
/// weights `[g^{n-p/2} h^{p/2}] F` over `p = 0..=2n`, normalized by
/// `[g^n] F(g,g)`.
#[derive(Clone, Debug)]
pub struct LawTable<C = Rational> {
    n: usize,
    variant: Variant,
    weights: Vec<C>,
    normalization: C,
    probabilities: Vec<C>,
}

impl<C: Coeff> LawTable<C> {
    /// Total map area N.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// Exact weight of second-cell area `p/2`, for `p = 0..=2n`.
    pub fn weights(&self) -> &[C] {
        &self.weights
    }

    /// `[g^n] F(g,g)`, the total weight at area n.
    pub fn normalization(&self) -> &C {
        &self.normalization
    }

    pub fn probabilities(&self) -> &[C] {
        &self.probabilities
    }
}

/// Extract the exact area law at total area `n` from an assembled series.
pub fn law_table<C: Coeff>(f: &FSeries<C>, n: usize) -> Result<LawTable<C>, LawError> {
    if 2 * n > f.series.truncation() {
        return Err(LawError::InsufficientTruncation {
            n,
            required: 2 * n,
            got: f.series.truncation(),
        });
    }
    let weights: Vec<C> = (0..=2 * n)
        .map(|p| f.series.coeff(2 * n - p, p))
        .collect::<Result<_, _>>()?;
    let mut normalization = C::zero();
    for w in &weights {
        normalization += w.clone();
    }
    let probabilities = weights
        .iter()
        .map(|w| w.clone() / normalization.clone())
        .collect();
    Ok(LawTable {
        n,
        variant: f.variant,
        weights,
        normalization,
        probabilities,
    })
}

/// Fixed-size moment generating function `E_N[e^{μ n/N}] = Σ_p e^{μp/2N} P(p)`,
/// evaluated in floating point from the exact law.
pub fn mgf<C: Coeff>(law: &LawTable<C>, mu: f64) -> f64 {
    let two_n = (2 * law.n) as f64;
    law.probabilities
        .iter()
        .enumerate()
        .map(|(p, prob)| (mu * p as f64 / two_n).exp() * prob.to_f64())
        .sum()
}

/// Large-size limit of the moment generating function, `(e^μ - 1)/μ`.
pub fn mgf_limit(mu: f64) -> f64 {
    if mu == 0.0 {
        1.0
    } else {
        mu.exp_m1() / mu
    }
}

/// Ratio of the exact count `[g^N] F(g,g)` to its leading asymptotic form
/// `(1/4) 12^N / (√π N^{3/2})`; tends to 1 as N grows.
pub fn asym_ratio<C: Coeff>(law: &LawTable<C>) -> f64 {
    let n = law.n as f64;
    let asym = 0.25 * 12f64.powi(law.n as i32) / (std::f64::consts::PI.sqrt() * n.powf(1.5));
    law.normalization.to_f64() / asym
}

/// Pointwise flatness report for a finite-size law: deviations of
/// `(2N+1) P(p)` from 1.
///
/// The window keeps `p ∈ [window_lo_frac·2N, window_hi_frac·2N]`; the
/// endpoint strata (nearly empty or nearly full cells) converge slowest
/// and are reported separately.
#[derive(Clone, Debug)]
pub struct UniformityReport {
    pub n: usize,
    pub window: (usize, usize),
    pub max_dev_interior: f64,
    pub mean_dev_interior: f64,
    /// Deviations at the three strata nearest each endpoint.
    pub endpoint_devs: Vec<(usize, f64)>,
    /// Full deviation table, `p -> (2N+1) P(p) - 1`.
    pub deviations: Vec<f64>,
}

pub const UNIFORMITY_WINDOW: (f64, f64) = (0.2, 0.8);

pub fn uniformity_report<C: Coeff>(law: &LawTable<C>) -> UniformityReport {
    uniformity_report_windowed(law, UNIFORMITY_WINDOW.0, UNIFORMITY_WINDOW.1)
}

pub fn uniformity_report_windowed<C: Coeff>(
    law: &LawTable<C>,
    lo_frac: f64,
    hi_frac: f64,
) -> UniformityReport {
    let two_n = 2 * law.n;
    let scale = (two_n + 1) as f64;
    let deviations: Vec<f64> = law
        .probabilities
        .iter()
        .map(|p| scale * p.to_f64() - 1.0)
        .collect();
    let lo = (lo_frac * two_n as f64).ceil() as usize;
    let hi = (hi_frac * two_n as f64).floor() as usize;
    let interior = &deviations[lo..=hi.min(two_n)];
    let max_dev_interior = interior.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let mean_dev_interior =
        interior.iter().map(|d| d.abs()).sum::<f64>() / interior.len() as f64;
    let mut endpoint_devs = Vec::new();
    for p in 0..3.min(two_n + 1) {
        endpoint_devs.push((p, deviations[p]));
    }
    for p in (two_n.saturating_sub(2)..=two_n).rev() {
        if !endpoint_devs.iter().any(|&(q, _)| q == p) {
            endpoint_devs.push((p, deviations[p]));
        }
    }
    UniformityReport {
        n: law.n,
        window: (lo, hi),
        max_dev_interior,
        mean_dev_interior,
        endpoint_devs,
        deviations,
    }
}

/// The area-`n` stratum of the flat comparison series
/// `(1/6)(√h(1-12h)^{3/2} - √g(1-12g)^{3/2})/(√h - √g)`,
/// whose coefficients are constant across each stratum. Used only as a
/// cross-check of the computed law at large sizes, never to produce it.
pub fn identification_stratum(n: usize) -> Rational {
    // numerator = Σ_k c_k (v^{2k+1} - u^{2k+1}) with
    // c_k = binom(3/2, k) (-12)^k; dividing by (v - u) spreads c_n/6
    // uniformly over the whole total-degree-2n stratum.
    let mut binom = Rational::from_i64(1);
    let mut power = Rational::from_i64(1);
    for k in 1..=n {
        // binom(3/2, k) = binom(3/2, k-1) * (3/2 - k + 1)/k
        binom = binom * Rational::from_ratio(5 - 2 * k as i64, 2 * k as i64);
        power = power * Rational::from_i64(-12);
    }
    binom * power / Rational::from_i64(6)
}
