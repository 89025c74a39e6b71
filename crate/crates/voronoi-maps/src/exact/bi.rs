use super::coeff::Coeff;
use super::uni::UniSeries;
use super::{Rational, SeriesError};

/// Truncated bivariate power series in `u, v` with `u² = g`, `v² = h`.
///
/// A monomial `u^i v^j` encodes `g^{i/2} h^{j/2}`, so the half-integer
/// powers of the two edge weights that appear in two-face-map series are
/// polynomial-graded here. Truncation is by total degree in `(u, v)`
/// (twice the map area); binary operations truncate to the minimum of the
/// inputs, and coefficient access beyond the truncation is an error.
///
/// Storage is one dense row per total degree: `levels[d][i]` is the
/// coefficient of `u^i v^{d-i}`. Series arising from two-face-map weights
/// populate even total degrees only; odd rows stay zero.
#[derive(Clone, Debug, PartialEq)]
pub struct BiSeries<C = Rational> {
    trunc: usize,
    levels: Vec<Vec<C>>,
}

impl<C: Coeff> BiSeries<C> {
    pub fn zero(trunc: usize) -> Self {
        Self {
            trunc,
            levels: (0..=trunc).map(|d| vec![C::zero(); d + 1]).collect(),
        }
    }

    pub fn constant(value: C, trunc: usize) -> Self {
        let mut s = Self::zero(trunc);
        s.levels[0][0] = value;
        s
    }

    pub fn one(trunc: usize) -> Self {
        Self::constant(C::one(), trunc)
    }

    /// `value * u^i v^j`; zero if the total degree exceeds the truncation.
    pub fn monomial(value: C, i: usize, j: usize, trunc: usize) -> Self {
        let mut s = Self::zero(trunc);
        if i + j <= trunc {
            s.levels[i + j][i] = value;
        }
        s
    }

    /// Embed a series in `g` as a series in `u` via `g = u²`.
    pub fn from_g_series(f: &UniSeries<C>, trunc: usize) -> Self {
        let mut s = Self::zero(trunc);
        for n in 0..=f.truncation() {
            if 2 * n > trunc {
                break;
            }
            s.levels[2 * n][2 * n] = f.coeff_ref(n).clone();
        }
        s
    }

    /// Embed a series in `h` as a series in `v` via `h = v²`.
    pub fn from_h_series(f: &UniSeries<C>, trunc: usize) -> Self {
        let mut s = Self::zero(trunc);
        for n in 0..=f.truncation() {
            if 2 * n > trunc {
                break;
            }
            s.levels[2 * n][0] = f.coeff_ref(n).clone();
        }
        s
    }

    pub fn truncation(&self) -> usize {
        self.trunc
    }

    /// Exact coefficient of `u^i v^j` (= `g^{i/2} h^{j/2}`).
    pub fn coeff(&self, i: usize, j: usize) -> Result<C, SeriesError> {
        if i + j > self.trunc {
            return Err(SeriesError::BeyondTruncation {
                degree: i + j,
                truncation: self.trunc,
            });
        }
        Ok(self.levels[i + j][i].clone())
    }

    pub(crate) fn coeff_ref(&self, i: usize, j: usize) -> &C {
        &self.levels[i + j][i]
    }

    pub(crate) fn set_coeff(&mut self, i: usize, j: usize, value: C) {
        self.levels[i + j][i] = value;
    }

    pub(crate) fn add_to_coeff(&mut self, i: usize, j: usize, value: C) {
        self.levels[i + j][i] += value;
    }

    pub fn is_zero(&self) -> bool {
        self.levels
            .iter()
            .all(|row| row.iter().all(C::is_zero))
    }

    pub fn constant_term(&self) -> &C {
        &self.levels[0][0]
    }

    /// Iterate over nonzero monomials as `(i, j, coeff)`.
    pub fn iter_nonzero(&self) -> impl Iterator<Item = (usize, usize, &C)> {
        self.levels.iter().enumerate().flat_map(|(d, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(move |(i, c)| (i, d - i, c))
        })
    }

    /// True when every stored monomial has even total degree, as is the
    /// case for series of two-face-map weights.
    pub fn is_even_graded(&self) -> bool {
        self.levels
            .iter()
            .enumerate()
            .filter(|(d, _)| d % 2 == 1)
            .all(|(_, row)| row.iter().all(C::is_zero))
    }

    pub fn truncated(&self, trunc: usize) -> Self {
        let t = trunc.min(self.trunc);
        Self {
            trunc: t,
            levels: self.levels[..=t].to_vec(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let t = self.trunc.min(other.trunc);
        let mut out = self.truncated(t);
        for d in 0..=t {
            for i in 0..=d {
                out.levels[d][i] += other.levels[d][i].clone();
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            trunc: self.trunc,
            levels: self
                .levels
                .iter()
                .map(|row| row.iter().map(|c| -c.clone()).collect())
                .collect(),
        }
    }

    pub fn scale(&self, factor: &C) -> Self {
        Self {
            trunc: self.trunc,
            levels: self
                .levels
                .iter()
                .map(|row| row.iter().map(|c| c.clone() * factor.clone()).collect())
                .collect(),
        }
    }

    /// Convolution of level `da` of `a` with level `db` of `b`, accumulated
    /// into the level `da + db` row `acc`.
    fn conv_level_into(acc: &mut [C], a: &[C], b: &[C]) {
        for (i, ca) in a.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (k, cb) in b.iter().enumerate() {
                if cb.is_zero() {
                    continue;
                }
                acc[i + k] += ca.clone() * cb.clone();
            }
        }
    }

    /// Exact Cauchy product truncated at the minimum total degree.
    pub fn mul(&self, other: &Self) -> Self {
        let t = self.trunc.min(other.trunc);
        let mut out = Self::zero(t);
        for da in 0..=t {
            if self.levels[da].iter().all(C::is_zero) {
                continue;
            }
            for db in 0..=(t - da) {
                let (head, tail) = (&self.levels[da], &other.levels[db]);
                if tail.iter().all(C::is_zero) {
                    continue;
                }
                Self::conv_level_into(&mut out.levels[da + db], head, tail);
            }
        }
        out
    }

    /// Euler operator `u ∂u + v ∂v`: multiplies each total-degree-d level
    /// by d. Together with a reciprocal this yields log and exp without
    /// iterated products.
    fn euler(&self) -> Self {
        let mut out = self.clone();
        for (d, row) in out.levels.iter_mut().enumerate() {
            let factor = C::from_i64(d as i64);
            for c in row.iter_mut() {
                if !c.is_zero() {
                    *c = c.clone() * factor.clone();
                }
            }
        }
        out.levels[0][0] = C::zero();
        out
    }

    /// Multiplicative inverse: `self * result = 1` to truncation.
    pub fn reciprocal(&self) -> Result<Self, SeriesError> {
        if self.levels[0][0].is_zero() {
            return Err(SeriesError::ZeroConstant);
        }
        let inv0 = C::one() / self.levels[0][0].clone();
        let mut out = Self::zero(self.trunc);
        out.levels[0][0] = inv0.clone();
        for d in 1..=self.trunc {
            // 0 = sum_{e=0..d} f_e * q_{d-e}  =>  q_d from lower levels.
            let mut acc = vec![C::zero(); d + 1];
            for e in 1..=d {
                if self.levels[e].iter().all(C::is_zero) {
                    continue;
                }
                let q = out.levels[d - e].clone();
                Self::conv_level_into(&mut acc, &self.levels[e], &q);
            }
            for (i, a) in acc.into_iter().enumerate() {
                out.levels[d][i] = -(inv0.clone() * a);
            }
        }
        Ok(out)
    }

    /// Logarithm of a series with constant term exactly 1: the Euler
    /// derivative of `log f` is `(Ef)/f`, so each level of the quotient is
    /// divided by its total degree.
    pub fn log(&self) -> Result<Self, SeriesError> {
        if self.levels[0][0] != C::one() {
            return Err(SeriesError::NonUnitConstant);
        }
        let q = self.euler().mul(&self.reciprocal()?);
        let mut out = q;
        for d in 1..=out.trunc {
            let inv = C::one() / C::from_i64(d as i64);
            for c in out.levels[d].iter_mut() {
                if !c.is_zero() {
                    *c = c.clone() * inv.clone();
                }
            }
        }
        out.levels[0][0] = C::zero();
        Ok(out)
    }

    /// Exponential of a series with zero constant term.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        if !self.levels[0][0].is_zero() {
            return Err(SeriesError::ComposeConstant);
        }
        let ew = self.euler();
        let mut out = Self::zero(self.trunc);
        out.levels[0][0] = C::one();
        for d in 1..=self.trunc {
            let mut acc = vec![C::zero(); d + 1];
            for e in 1..=d {
                if ew.levels[e].iter().all(C::is_zero) {
                    continue;
                }
                let g = out.levels[d - e].clone();
                Self::conv_level_into(&mut acc, &ew.levels[e], &g);
            }
            let inv = C::one() / C::from_i64(d as i64);
            for (i, a) in acc.into_iter().enumerate() {
                out.levels[d][i] = a * inv.clone();
            }
        }
        Ok(out)
    }

    /// Exchange `u ↔ v` (cell 1 ↔ cell 2).
    pub fn swap_uv(&self) -> Self {
        Self {
            trunc: self.trunc,
            levels: self
                .levels
                .iter()
                .map(|row| row.iter().rev().cloned().collect())
                .collect(),
        }
    }

    /// Restrict to the diagonal `v := u`, producing a univariate series in
    /// `u` (so `u² = g`; use [`Self::diagonal_in_g`] for even-graded input).
    pub fn diagonal(&self) -> UniSeries<C> {
        let coeffs = self
            .levels
            .iter()
            .map(|row| {
                let mut acc = C::zero();
                for c in row {
                    acc += c.clone();
                }
                acc
            })
            .collect();
        UniSeries::from_coeffs(coeffs, self.trunc)
    }

    /// Diagonal restriction of an even-graded series reinterpreted as a
    /// series in `g` (coefficient of `g^n` = total-degree-2n diagonal sum).
    pub fn diagonal_in_g(&self) -> Result<UniSeries<C>, SeriesError> {
        let diag = self.diagonal();
        let half = self.trunc / 2;
        let mut coeffs = Vec::with_capacity(half + 1);
        for n in 0..=half {
            coeffs.push(diag.coeff(2 * n)?);
        }
        for d in (1..=self.trunc).step_by(2) {
            if !diag.coeff_ref(d).is_zero() {
                return Err(SeriesError::NonUnitConstant);
            }
        }
        Ok(UniSeries::from_coeffs(coeffs, half))
    }
}

#[cfg(test)]
mod tests {
    use super::super::coeff::rat;
    use super::*;
    use proptest::prelude::*;

    type B = BiSeries<Rational>;

    fn uv(trunc: usize) -> B {
        B::monomial(rat(1, 1), 1, 1, trunc)
    }

    #[test]
    fn add_examples() {
        let t = 6;
        // (1 + 2u²) + (3u²) = 1 + 5u²
        let a = B::one(t).add(&B::monomial(rat(2, 1), 2, 0, t));
        let b = B::monomial(rat(3, 1), 2, 0, t);
        let sum = a.add(&b);
        assert_eq!(sum.coeff(2, 0).unwrap(), rat(5, 1));
        assert_eq!(sum.coeff(0, 0).unwrap(), rat(1, 1));
        // f + 0 = f
        assert_eq!(a.add(&B::zero(t)), a);
        // uv + (-uv) = 0
        assert!(uv(t).add(&uv(t).neg()).is_zero());
    }

    #[test]
    fn mul_examples() {
        let t = 6;
        // (1 + u²)² = 1 + 2u² + u⁴
        let f = B::one(t).add(&B::monomial(rat(1, 1), 2, 0, t));
        let sq = f.mul(&f);
        assert_eq!(sq.coeff(0, 0).unwrap(), rat(1, 1));
        assert_eq!(sq.coeff(2, 0).unwrap(), rat(2, 1));
        assert_eq!(sq.coeff(4, 0).unwrap(), rat(1, 1));
        // (uv)(uv) = u²v²
        assert_eq!(uv(t).mul(&uv(t)).coeff(2, 2).unwrap(), rat(1, 1));
        // f * 1 = f
        assert_eq!(f.mul(&B::one(t)), f);
    }

    #[test]
    fn log_examples() {
        // log(1 + u²) to degree 6 = u² - u⁴/2 + u⁶/3
        let f = B::one(6).add(&B::monomial(rat(1, 1), 2, 0, 6));
        let l = f.log().unwrap();
        assert_eq!(l.coeff(2, 0).unwrap(), rat(1, 1));
        assert_eq!(l.coeff(4, 0).unwrap(), rat(-1, 2));
        assert_eq!(l.coeff(6, 0).unwrap(), rat(1, 3));
        // log(1) = 0
        assert!(B::one(4).log().unwrap().is_zero());
        // log((1 + uv)²) = 2 log(1 + uv)
        let g = B::one(8).add(&uv(8));
        let lhs = g.mul(&g).log().unwrap();
        let rhs = g.log().unwrap().scale(&rat(2, 1));
        assert_eq!(lhs, rhs);
        // precondition
        assert_eq!(uv(4).log(), Err(SeriesError::NonUnitConstant));
    }

    #[test]
    fn reciprocal_examples() {
        // 1/(1 - uv) to degree 4 = 1 + uv + u²v²
        let f = B::one(4).sub(&uv(4));
        let r = f.reciprocal().unwrap();
        assert_eq!(r.coeff(0, 0).unwrap(), rat(1, 1));
        assert_eq!(r.coeff(1, 1).unwrap(), rat(1, 1));
        assert_eq!(r.coeff(2, 2).unwrap(), rat(1, 1));
        // 1/1 = 1
        assert_eq!(B::one(3).reciprocal().unwrap(), B::one(3));
        // 1/(1 + u²) alternates
        let g = B::one(6).add(&B::monomial(rat(1, 1), 2, 0, 6));
        let rg = g.reciprocal().unwrap();
        assert_eq!(rg.coeff(2, 0).unwrap(), rat(-1, 1));
        assert_eq!(rg.coeff(4, 0).unwrap(), rat(1, 1));
        assert_eq!(rg.coeff(6, 0).unwrap(), rat(-1, 1));
        // precondition
        assert_eq!(uv(4).reciprocal(), Err(SeriesError::ZeroConstant));
    }

    #[test]
    fn coeff_examples_and_range_error() {
        let f = B::one(4).add(&B::monomial(rat(5, 1), 2, 2, 4));
        assert_eq!(f.coeff(2, 2).unwrap(), rat(5, 1));
        assert_eq!(uv(4).coeff(1, 1).unwrap(), rat(1, 1));
        assert_eq!(uv(4).coeff(2, 0).unwrap(), rat(0, 1));
        assert!(matches!(
            uv(4).coeff(3, 2),
            Err(SeriesError::BeyondTruncation { .. })
        ));
    }

    #[test]
    fn swap_and_diagonal() {
        let f = B::monomial(rat(3, 1), 2, 0, 4).add(&B::monomial(rat(7, 1), 1, 1, 4));
        let s = f.swap_uv();
        assert_eq!(s.coeff(0, 2).unwrap(), rat(3, 1));
        assert_eq!(s.coeff(1, 1).unwrap(), rat(7, 1));
        let d = f.diagonal_in_g().unwrap();
        assert_eq!(d.coeff(1).unwrap(), rat(10, 1));
    }

    fn arb_rational() -> impl Strategy<Value = Rational> {
        (-6i64..=6, 1i64..=4).prop_map(|(n, d)| rat(n, d))
    }

    fn arb_series(trunc: usize) -> impl Strategy<Value = B> {
        proptest::collection::vec(arb_rational(), (trunc + 1) * (trunc + 2) / 2).prop_map(
            move |vals| {
                let mut s = B::zero(trunc);
                let mut it = vals.into_iter();
                for d in 0..=trunc {
                    for i in 0..=d {
                        s.set_coeff(i, d - i, it.next().unwrap());
                    }
                }
                s
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn ring_axioms(a in arb_series(5), b in arb_series(5), c in arb_series(5)) {
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
        }

        #[test]
        fn mul_reciprocal_round_trip(a in arb_series(5)) {
            let mut f = a;
            f.set_coeff(0, 0, rat(1, 1));
            let r = f.reciprocal().unwrap();
            prop_assert_eq!(f.mul(&r), B::one(5));
        }

        #[test]
        fn exp_log_round_trip(a in arb_series(5)) {
            let mut f = a;
            f.set_coeff(0, 0, rat(1, 1));
            let l = f.log().unwrap();
            prop_assert_eq!(l.exp().unwrap(), f);
        }
    }
}
