use super::coeff::Coeff;
use super::{Rational, SeriesError};

/// Dense truncated power series in one formal variable.
///
/// Coefficients are stored for every degree `0..=trunc`. Binary operations
/// on series with truncations `D1`, `D2` produce truncation `min(D1, D2)`;
/// coefficient access beyond the truncation is an error.
#[derive(Clone, Debug, PartialEq)]
pub struct UniSeries<C = Rational> {
    trunc: usize,
    coeffs: Vec<C>,
}

impl<C: Coeff> UniSeries<C> {
    pub fn zero(trunc: usize) -> Self {
        Self {
            trunc,
            coeffs: vec![C::zero(); trunc + 1],
        }
    }

    pub fn constant(value: C, trunc: usize) -> Self {
        let mut s = Self::zero(trunc);
        s.coeffs[0] = value;
        s
    }

    pub fn one(trunc: usize) -> Self {
        Self::constant(C::one(), trunc)
    }

    /// `value * x^degree`, zero if the degree exceeds the truncation.
    pub fn monomial(value: C, degree: usize, trunc: usize) -> Self {
        let mut s = Self::zero(trunc);
        if degree <= trunc {
            s.coeffs[degree] = value;
        }
        s
    }

    /// Build from explicit low-order coefficients; missing entries are zero.
    pub fn from_coeffs(coeffs: Vec<C>, trunc: usize) -> Self {
        let mut c = coeffs;
        c.truncate(trunc + 1);
        c.resize(trunc + 1, C::zero());
        Self { trunc, coeffs: c }
    }

    pub fn truncation(&self) -> usize {
        self.trunc
    }

    /// Exact coefficient of `x^degree`; degrees beyond the truncation are a
    /// range error, never silently zero.
    pub fn coeff(&self, degree: usize) -> Result<C, SeriesError> {
        if degree > self.trunc {
            return Err(SeriesError::BeyondTruncation {
                degree,
                truncation: self.trunc,
            });
        }
        Ok(self.coeffs[degree].clone())
    }

    pub(crate) fn coeff_ref(&self, degree: usize) -> &C {
        &self.coeffs[degree]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(C::is_zero)
    }

    /// Drop coefficients above `trunc`.
    pub fn truncated(&self, trunc: usize) -> Self {
        let t = trunc.min(self.trunc);
        Self::from_coeffs(self.coeffs[..=t].to_vec(), t)
    }

    pub fn add(&self, other: &Self) -> Self {
        let t = self.trunc.min(other.trunc);
        let coeffs = (0..=t)
            .map(|n| self.coeffs[n].clone() + other.coeffs[n].clone())
            .collect();
        Self { trunc: t, coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let t = self.trunc.min(other.trunc);
        let coeffs = (0..=t)
            .map(|n| self.coeffs[n].clone() - other.coeffs[n].clone())
            .collect();
        Self { trunc: t, coeffs }
    }

    pub fn neg(&self) -> Self {
        Self {
            trunc: self.trunc,
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    pub fn scale(&self, factor: &C) -> Self {
        Self {
            trunc: self.trunc,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| c.clone() * factor.clone())
                .collect(),
        }
    }

    /// Exact Cauchy product truncated at the minimum total degree.
    pub fn mul(&self, other: &Self) -> Self {
        let t = self.trunc.min(other.trunc);
        let mut coeffs = vec![C::zero(); t + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(t + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(t + 1 - i) {
                if b.is_zero() {
                    continue;
                }
                coeffs[i + j] += a.clone() * b.clone();
            }
        }
        Self { trunc: t, coeffs }
    }

    pub fn pow(&self, exponent: usize) -> Self {
        let mut acc = Self::one(self.trunc);
        for _ in 0..exponent {
            acc = acc.mul(self);
        }
        acc
    }

    /// Multiplicative inverse: `self * result = 1` to truncation.
    pub fn reciprocal(&self) -> Result<Self, SeriesError> {
        if self.coeffs[0].is_zero() {
            return Err(SeriesError::ZeroConstant);
        }
        let inv0 = C::one() / self.coeffs[0].clone();
        let mut coeffs = vec![C::zero(); self.trunc + 1];
        coeffs[0] = inv0.clone();
        for n in 1..=self.trunc {
            let mut acc = C::zero();
            for k in 1..=n {
                if self.coeffs[k].is_zero() {
                    continue;
                }
                acc += self.coeffs[k].clone() * coeffs[n - k].clone();
            }
            coeffs[n] = -(inv0.clone() * acc);
        }
        Ok(Self {
            trunc: self.trunc,
            coeffs,
        })
    }

    /// Logarithm of a series with constant term exactly 1, via
    /// `(log f)' = f'/f` integrated term by term.
    pub fn log(&self) -> Result<Self, SeriesError> {
        if self.coeffs[0] != C::one() {
            return Err(SeriesError::NonUnitConstant);
        }
        let recip = self.reciprocal()?;
        // derivative f' has degree trunc-1; the quotient determines log f
        // at degrees 1..=trunc.
        let mut coeffs = vec![C::zero(); self.trunc + 1];
        for n in 1..=self.trunc {
            // [x^{n-1}] f' / f = sum_k k * f_k * recip_{n-k}
            let mut acc = C::zero();
            for k in 1..=n {
                if self.coeffs[k].is_zero() {
                    continue;
                }
                acc += C::from_i64(k as i64) * self.coeffs[k].clone() * recip.coeffs[n - k].clone();
            }
            coeffs[n] = acc / C::from_i64(n as i64);
        }
        Ok(Self {
            trunc: self.trunc,
            coeffs,
        })
    }

    /// Exponential of a series with zero constant term.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        if !self.coeffs[0].is_zero() {
            return Err(SeriesError::ComposeConstant);
        }
        let mut coeffs = vec![C::zero(); self.trunc + 1];
        coeffs[0] = C::one();
        for n in 1..=self.trunc {
            // n g_n = sum_{k=1..n} k w_k g_{n-k}
            let mut acc = C::zero();
            for k in 1..=n {
                if self.coeffs[k].is_zero() {
                    continue;
                }
                acc += C::from_i64(k as i64) * self.coeffs[k].clone() * coeffs[n - k].clone();
            }
            coeffs[n] = acc / C::from_i64(n as i64);
        }
        Ok(Self {
            trunc: self.trunc,
            coeffs,
        })
    }

    /// Substitute `inner` (which must vanish at 0) for the variable.
    pub fn compose(&self, inner: &Self) -> Result<Self, SeriesError> {
        if !inner.coeffs[0].is_zero() {
            return Err(SeriesError::ComposeConstant);
        }
        let t = self.trunc.min(inner.trunc);
        // Horner evaluation.
        let mut acc = UniSeries::constant(self.coeffs[t].clone(), t);
        for n in (0..t).rev() {
            acc = acc.mul(&inner.truncated(t));
            acc.coeffs[0] += self.coeffs[n].clone();
        }
        Ok(acc)
    }

    /// Compositional inverse: `self(result(t)) = t` to truncation.
    ///
    /// Requires `f(0) = 0` and `f'(0) != 0`. Solved order by order: with the
    /// inverse correct through degree n-1, the degree-n residual of
    /// `f(inverse)` is cancelled by adjusting the degree-n coefficient,
    /// whose feedback enters through `f'(0)` alone.
    pub fn revert(&self) -> Result<Self, SeriesError> {
        if !self.coeffs[0].is_zero() || self.trunc < 1 || self.coeffs[1].is_zero() {
            return Err(SeriesError::RevertPrecondition);
        }
        let inv1 = C::one() / self.coeffs[1].clone();
        let mut h = Self::zero(self.trunc);
        h.coeffs[1] = inv1.clone();
        for n in 2..=self.trunc {
            let r = self.compose(&h)?;
            h.coeffs[n] = -(inv1.clone() * r.coeffs[n].clone());
        }
        Ok(h)
    }
}

#[cfg(test)]
mod tests {
    use super::super::coeff::rat;
    use super::*;

    fn s(coeffs: &[i64], trunc: usize) -> UniSeries {
        UniSeries::from_coeffs(
            coeffs.iter().map(|&n| Rational::from_i64(n)).collect(),
            trunc,
        )
    }

    #[test]
    fn truncation_is_min_of_inputs() {
        let a = s(&[1, 2, 3], 5);
        let b = s(&[1, 1], 3);
        assert_eq!(a.add(&b).truncation(), 3);
        assert_eq!(a.mul(&b).truncation(), 3);
    }

    #[test]
    fn coeff_beyond_truncation_is_error() {
        let a = s(&[1, 2], 2);
        assert!(a.coeff(2).is_ok());
        assert_eq!(
            a.coeff(3),
            Err(SeriesError::BeyondTruncation {
                degree: 3,
                truncation: 2
            })
        );
    }

    #[test]
    fn reciprocal_of_geometric() {
        // 1/(1 - x) = 1 + x + x^2 + ...
        let f = s(&[1, -1], 4);
        let r = f.reciprocal().unwrap();
        for n in 0..=4 {
            assert_eq!(r.coeff(n).unwrap(), rat(1, 1), "degree {n}");
        }
    }

    #[test]
    fn log_of_one_plus_x() {
        let f = s(&[1, 1], 5);
        let l = f.log().unwrap();
        assert_eq!(l.coeff(1).unwrap(), rat(1, 1));
        assert_eq!(l.coeff(2).unwrap(), rat(-1, 2));
        assert_eq!(l.coeff(3).unwrap(), rat(1, 3));
        assert_eq!(l.coeff(4).unwrap(), rat(-1, 4));
        // exp round-trips
        assert_eq!(l.exp().unwrap(), f);
    }

    #[test]
    fn log_requires_unit_constant() {
        assert_eq!(s(&[2, 1], 3).log(), Err(SeriesError::NonUnitConstant));
        assert_eq!(s(&[0, 1], 3).reciprocal(), Err(SeriesError::ZeroConstant));
    }

    #[test]
    fn revert_identity_and_scaling() {
        let id = s(&[0, 1], 6);
        assert_eq!(id.revert().unwrap(), id);
        let double = s(&[0, 2], 6);
        let half = double.revert().unwrap();
        assert_eq!(half.coeff(1).unwrap(), rat(1, 2));
        assert!(half.coeff(2).unwrap().is_zero());
    }

    #[test]
    fn revert_matches_substitution_back() {
        // f = x + x^2 - 3x^3
        let f = s(&[0, 1, 1, -3], 8);
        let h = f.revert().unwrap();
        let back = f.compose(&h).unwrap();
        assert_eq!(back, s(&[0, 1], 8));
        let fwd = h.compose(&f).unwrap();
        assert_eq!(fwd, s(&[0, 1], 8));
    }

    #[test]
    fn revert_precondition_errors() {
        assert_eq!(s(&[1, 1], 3).revert(), Err(SeriesError::RevertPrecondition));
        assert_eq!(s(&[0, 0, 1], 3).revert(), Err(SeriesError::RevertPrecondition));
    }
}
