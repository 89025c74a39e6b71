//! Order-by-order solutions of the tree and chain recursions.
//!
//! `R_s(g)` counts rooted labelled trees whose labels stay `>= 1 - s`,
//! with a weight `g` per edge; it satisfies
//!
//! ```text
//! R_s = 1 + g R_s (R_{s-1} + R_s + R_{s+1}),    R_0 = 0,
//! ```
//!
//! solved here degree by degree. `X_{s,t}(g,h)` counts labelled chains with
//! label floors `1 - s` on the left and `1 - t` on the right of the spine,
//! spine edges weighted `√(gh) = uv`:
//!
//! ```text
//! X_{s,t} = 1 + uv R_s(g) R_t(h) X_{s,t} (1 + uv R_{s+1}(g) R_{t+1}(h) X_{s+1,t+1}).
//! ```
//!
//! The recursion preserves the offset `t - s`, so only the three diagonals
//! `t - s ∈ {-1, 0, +1}` are ever built. Both systems are closed at the top
//! index with the stabilized series: a tree or chain with at most K edges
//! has labels `>= -K`, so the floor is inactive for every index above K and
//! the entries no longer depend on it.

use crate::exact::{BiSeries, Coeff, Rational, SeriesError, UniSeries};

/// Configuration errors for the recursion solvers.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RecursionError {
    /// The stabilization closure is only valid when `s_max` exceeds the
    /// number of edges resolved by the truncation.
    #[error("s_max = {s_max} must exceed the edge order {order} for the boundary closure")]
    StabilizationOrder { s_max: usize, order: usize },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// The family `R_s(g)` for `s = 0..=s_max`, plus the `s → ∞` limit.
#[derive(Clone, Debug)]
pub struct RTable<C = Rational> {
    order: usize,
    s_max: usize,
    entries: Vec<UniSeries<C>>,
    stabilized: UniSeries<C>,
}

impl<C: Coeff> RTable<C> {
    /// Truncation order K in `g`.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn s_max(&self) -> usize {
        self.s_max
    }

    /// `R_s(g)`; indices above `s_max` resolve to the stabilized series.
    pub fn entry(&self, s: usize) -> &UniSeries<C> {
        if s <= self.s_max {
            &self.entries[s]
        } else {
            &self.stabilized
        }
    }

    /// The `s → ∞` limit, solving `R = 1 + 3 g R²`.
    pub fn stabilized(&self) -> &UniSeries<C> {
        &self.stabilized
    }
}

/// Solve the tree recursion for all `1 <= s <= s_max` at every order `<= order`.
///
/// `R_0 = 0` by convention; the boundary at `s_max` is closed with the
/// stabilized series, which requires `s_max > order`.
pub fn solve_r<C: Coeff>(s_max: usize, order: usize) -> Result<RTable<C>, RecursionError> {
    if s_max <= order || s_max < 1 {
        return Err(RecursionError::StabilizationOrder { s_max, order });
    }
    // Stabilized limit: r_n = 3 sum_{i+j=n-1} r_i r_j.
    let mut stab = vec![C::zero(); order + 1];
    stab[0] = C::one();
    for n in 1..=order {
        let mut acc = C::zero();
        for i in 0..n {
            acc += stab[i].clone() * stab[n - 1 - i].clone();
        }
        stab[n] = C::from_i64(3) * acc;
    }

    let mut entries: Vec<Vec<C>> = vec![vec![C::zero(); order + 1]; s_max + 1];
    for row in entries.iter_mut().skip(1) {
        row[0] = C::one();
    }
    for n in 1..=order {
        for s in 1..=s_max {
            // [g^n] R_s = sum_{i+j=n-1} [g^i] R_s * [g^j](R_{s-1}+R_s+R_{s+1})
            let mut acc = C::zero();
            for i in 0..n {
                let j = n - 1 - i;
                if entries[s][i].is_zero() {
                    continue;
                }
                let mut nb = entries[s - 1][j].clone() + entries[s][j].clone();
                nb += if s + 1 <= s_max {
                    entries[s + 1][j].clone()
                } else {
                    stab[j].clone()
                };
                acc += entries[s][i].clone() * nb;
            }
            entries[s][n] = acc;
        }
    }

    Ok(RTable {
        order,
        s_max,
        entries: entries
            .into_iter()
            .map(|c| UniSeries::from_coeffs(c, order))
            .collect(),
        stabilized: UniSeries::from_coeffs(stab, order),
    })
}

/// Series expansion of the edge-weight coordinate `g(x) = x(1+x+x²)/(1+4x+x²)²`.
pub fn g_of_x(order: usize) -> UniSeries<Rational> {
    let one = <Rational as Coeff>::one();
    let x = UniSeries::monomial(one, 1, order);
    let x2 = x.mul(&x);
    let numer = x.mul(&UniSeries::one(order).add(&x).add(&x2));
    let base = UniSeries::one(order)
        .add(&x.scale(&Rational::from_i64(4)))
        .add(&x2);
    numer.mul(&base.mul(&base).reciprocal().expect("unit constant"))
}

/// Compositional inverse of [`g_of_x`]: the series `x(g) = g + 7g² + 59g³ + …`.
pub fn x_of_g(order: usize) -> UniSeries<Rational> {
    g_of_x(order).revert().expect("g(x) has g'(0) = 1")
}

fn one_minus_pow(x_g: &UniSeries<Rational>, m: usize) -> UniSeries<Rational> {
    UniSeries::one(x_g.truncation()).sub(&x_g.pow(m))
}

/// Closed form for `R_s(g)` via the rational parametrization:
///
/// ```text
/// R_s = (1+4x+x²)/(1+x+x²) · (1-x^s)(1-x^{s+3}) / ((1-x^{s+1})(1-x^{s+2}))
/// ```
///
/// expanded as a series in `g` by substituting `x(g)`. Equals the output of
/// [`solve_r`] exactly, order by order.
pub fn closed_r(s: usize, order: usize) -> UniSeries<Rational> {
    assert!(s >= 1, "closed form defined for s >= 1");
    let xg = x_of_g(order);
    let prefactor = stabilized_closed_prefactor(&xg);
    let numer = one_minus_pow(&xg, s).mul(&one_minus_pow(&xg, s + 3));
    let denom = one_minus_pow(&xg, s + 1).mul(&one_minus_pow(&xg, s + 2));
    prefactor
        .mul(&numer)
        .mul(&denom.reciprocal().expect("unit constant"))
}

/// The `s → ∞` limit of the closed form, `(1+4x+x²)/(1+x+x²)` at `x = x(g)`.
pub fn closed_r_stabilized(order: usize) -> UniSeries<Rational> {
    stabilized_closed_prefactor(&x_of_g(order))
}

fn stabilized_closed_prefactor(xg: &UniSeries<Rational>) -> UniSeries<Rational> {
    let order = xg.truncation();
    let x2 = xg.mul(xg);
    let numer = UniSeries::one(order)
        .add(&xg.scale(&Rational::from_i64(4)))
        .add(&x2);
    let denom = UniSeries::one(order).add(xg).add(&x2);
    numer.mul(&denom.reciprocal().expect("unit constant"))
}

/// Closed form for the diagonal chain series
///
/// ```text
/// X_{s,t}(g,g) = (1-x³)(1-x^{s+1})(1-x^{t+1})(1-x^{s+t+3})
///              / ((1-x)(1-x^{s+3})(1-x^{t+3})(1-x^{s+t+1}))
/// ```
///
/// as a series in `g` of the given order.
pub fn closed_x_diag(s: usize, t: usize, order: usize) -> UniSeries<Rational> {
    let xg = x_of_g(order);
    let numer = one_minus_pow(&xg, 3)
        .mul(&one_minus_pow(&xg, s + 1))
        .mul(&one_minus_pow(&xg, t + 1))
        .mul(&one_minus_pow(&xg, s + t + 3));
    let denom = one_minus_pow(&xg, 1)
        .mul(&one_minus_pow(&xg, s + 3))
        .mul(&one_minus_pow(&xg, t + 3))
        .mul(&one_minus_pow(&xg, s + t + 1));
    numer.mul(&denom.reciprocal().expect("unit constant"))
}

/// The chain series `X_{s,t}(g,h)` on the three diagonals `t - s ∈ {-1,0,+1}`.
#[derive(Clone, Debug)]
pub struct XTable<C = Rational> {
    order: usize,
    s_max: usize,
    /// `(s, s)` for `s = 0..=s_max`.
    diag: Vec<BiSeries<C>>,
    /// `(s, s+1)` for `s = 0..=s_max-1`.
    upper: Vec<BiSeries<C>>,
    /// `(s+1, s)` for `s = 0..=s_max-1`.
    lower: Vec<BiSeries<C>>,
    /// The fully stabilized chain series (all label floors inactive).
    stabilized: BiSeries<C>,
}

impl<C: Coeff> XTable<C> {
    /// Truncation in total `(u, v)` degree (twice the edge order).
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn s_max(&self) -> usize {
        self.s_max
    }

    pub fn get(&self, s: usize, t: usize) -> Option<&BiSeries<C>> {
        if s.max(t) > self.s_max {
            return None;
        }
        match t as isize - s as isize {
            0 => Some(&self.diag[s]),
            1 => Some(&self.upper[s]),
            -1 => Some(&self.lower[t]),
            _ => None,
        }
    }

    /// Entry lookup extended by stabilization: indices beyond the table are
    /// valid once both exceed the edge order, where every chain floor is
    /// inactive and the entry equals the stabilized series.
    pub fn entry(&self, s: usize, t: usize) -> &BiSeries<C> {
        assert!(
            (t as isize - s as isize).abs() <= 1,
            "chain recursion only reaches offsets -1, 0, +1 (got s={s}, t={t})"
        );
        if let Some(x) = self.get(s, t) {
            x
        } else {
            assert!(
                s.min(t) > self.order / 2,
                "entry ({s},{t}) outside table and not stabilized"
            );
            &self.stabilized
        }
    }

    pub fn stabilized(&self) -> &BiSeries<C> {
        &self.stabilized
    }
}

/// Spine-edge factor `uv · R_s(g) · R_t(h)` as a bivariate series.
pub(crate) fn spine_factor<C: Coeff>(
    rs: &UniSeries<C>,
    rt: &UniSeries<C>,
    trunc: usize,
) -> BiSeries<C> {
    let mut out = BiSeries::zero(trunc);
    for p in 0..=rs.truncation() {
        if 1 + 2 * p > trunc {
            break;
        }
        if rs.coeff_ref(p).is_zero() {
            continue;
        }
        for q in 0..=rt.truncation() {
            let (i, j) = (1 + 2 * p, 1 + 2 * q);
            if i + j > trunc {
                break;
            }
            if rt.coeff_ref(q).is_zero() {
                continue;
            }
            out.set_coeff(i, j, rs.coeff_ref(p).clone() * rt.coeff_ref(q).clone());
        }
    }
    out
}

/// Solve the chain recursion on the three diagonals up to total degree
/// `order` (in `u, v`), for `0 <= s, t <= s_max`.
///
/// One sweep per total degree suffices: the degree-d level of `X_{s,t}`
/// only involves levels `<= d-2` of `X_{s,t}` and `<= d-4` of
/// `X_{s+1,t+1}`, because the spine prefactor `uv` carries degree 2.
/// Requires `s_max > order/2` so the boundary closes on the stabilized
/// series.
pub fn solve_x<C: Coeff>(s_max: usize, order: usize) -> Result<XTable<C>, RecursionError> {
    let k = order / 2;
    if s_max <= k || s_max < 1 {
        return Err(RecursionError::StabilizationOrder { s_max, order });
    }
    let r: RTable<C> = solve_r(s_max + 1, k)?;

    // Work list: every entry, keyed by (s, t), with its spine factors.
    // Entries are updated level by level; the boundary neighbour
    // X_{s+1,t+1} resolves to the stabilized slot (the last work item)
    // when it falls outside the table.
    struct Slot<C> {
        a_own: BiSeries<C>, // uv R_s(g) R_t(h)
        next: usize,        // work-list index of X_{s+1,t+1}
        x: BiSeries<C>,
        b: BiSeries<C>, // a_own * x, maintained level by level
    }

    let mut coords: Vec<(usize, usize)> = Vec::new();
    for s in 0..=s_max {
        coords.push((s, s));
    }
    for s in 0..s_max {
        coords.push((s, s + 1));
    }
    for s in 0..s_max {
        coords.push((s + 1, s));
    }
    let stab_idx = coords.len();
    let index_of = |s: usize, t: usize| -> usize {
        if s <= s_max && t <= s_max {
            match t as isize - s as isize {
                0 => s,
                1 => s_max + 1 + s,
                -1 => s_max + 1 + s_max + t,
                _ => unreachable!(),
            }
        } else {
            stab_idx
        }
    };

    let mut slots: Vec<Slot<C>> = Vec::with_capacity(coords.len() + 1);
    for &(s, t) in &coords {
        slots.push(Slot {
            a_own: spine_factor(r.entry(s), r.entry(t), order),
            next: index_of(s + 1, t + 1),
            x: BiSeries::one(order),
            b: BiSeries::zero(order),
        });
    }
    let r_inf = r.stabilized();
    slots.push(Slot {
        a_own: spine_factor(r_inf, r_inf, order),
        next: stab_idx,
        x: BiSeries::one(order),
        b: BiSeries::zero(order),
    });

    for d in (2..=order).step_by(2) {
        // B = A_own * X at level d (uses X levels <= d-2).
        for idx in 0..slots.len() {
            let mut acc = vec![C::zero(); d + 1];
            for e in (2..=d).step_by(2) {
                accumulate_level(&mut acc, &slots[idx].a_own, e, &slots[idx].x, d - e);
            }
            for (i, c) in acc.into_iter().enumerate() {
                slots[idx].b.set_coeff(i, d - i, c);
            }
        }
        // X_d = B_d + [B_{s,t} * B_{s+1,t+1}]_d, both factors at levels
        // <= d-2, already in place from earlier sweeps and the step above.
        for idx in 0..slots.len() {
            let next = slots[idx].next;
            let mut acc = vec![C::zero(); d + 1];
            for e in (2..=d.saturating_sub(2)).step_by(2) {
                accumulate_level(&mut acc, &slots[idx].b, e, &slots[next].b, d - e);
            }
            for (i, c) in acc.into_iter().enumerate() {
                let total = slots[idx].b.coeff_ref(i, d - i).clone() + c;
                slots[idx].x.set_coeff(i, d - i, total);
            }
        }
    }

    let stabilized = slots.pop().expect("stabilized slot").x;
    let mut xs: Vec<BiSeries<C>> = slots.into_iter().map(|s| s.x).collect();
    let lower = xs.split_off(2 * s_max + 1);
    let upper = xs.split_off(s_max + 1);
    let diag = xs;
    Ok(XTable {
        order,
        s_max,
        diag,
        upper,
        lower,
        stabilized,
    })
}

/// Accumulate level `da` of `a` times level `db` of `b` into `acc`
/// (a row of total degree `da + db`).
fn accumulate_level<C: Coeff>(
    acc: &mut [C],
    a: &BiSeries<C>,
    da: usize,
    b: &BiSeries<C>,
    db: usize,
) {
    for i in 0..=da {
        let ca = a.coeff_ref(i, da - i);
        if ca.is_zero() {
            continue;
        }
        for k in 0..=db {
            let cb = b.coeff_ref(k, db - k);
            if cb.is_zero() {
                continue;
            }
            acc[i + k] += ca.clone() * cb.clone();
        }
    }
}

/// Chains with no 0–0 spine edge: `N_{s,t} = X_{s,t} / (1 + uv R_s R_t X_{s,t})`.
pub fn n_from_x<C: Coeff>(
    x: &BiSeries<C>,
    r_s: &UniSeries<C>,
    r_t: &UniSeries<C>,
) -> Result<BiSeries<C>, SeriesError> {
    let a = spine_factor(r_s, r_t, x.truncation());
    let denom = BiSeries::one(x.truncation()).add(&a.mul(x));
    Ok(x.mul(&denom.reciprocal()?))
}

/// The sequence decomposition `X = 1/(1 - Z)` inverted: `Z = 1 - 1/X`.
pub fn z_from_x<C: Coeff>(x: &BiSeries<C>) -> Result<BiSeries<C>, SeriesError> {
    if *x.constant_term() != C::one() {
        return Err(SeriesError::NonUnitConstant);
    }
    Ok(BiSeries::one(x.truncation()).sub(&x.reciprocal()?))
}
