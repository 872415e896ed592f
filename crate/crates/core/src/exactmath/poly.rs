//! Dense univariate polynomials, low degree first.

use crate::error::{Error, Result};
use crate::exactmath::field::Field;

#[derive(Debug, Clone, PartialEq)]
pub struct Poly<F: Field> {
    field: F,
    coeffs: Vec<F::Elem>,
}

impl<F: Field> Poly<F> {
    pub fn new(field: &F, mut coeffs: Vec<F::Elem>) -> Self {
        while coeffs.last().is_some_and(|c| field.is_zero(c)) {
            coeffs.pop();
        }
        Poly {
            field: field.clone(),
            coeffs,
        }
    }

    pub fn from_i64(field: &F, coeffs: &[i64]) -> Self {
        Self::new(field, coeffs.iter().map(|&c| field.from_i64(c)).collect())
    }

    pub fn zero(field: &F) -> Self {
        Self::new(field, Vec::new())
    }

    pub fn constant(field: &F, c: F::Elem) -> Self {
        Self::new(field, vec![c])
    }

    /// `t - root`.
    pub fn linear_factor(field: &F, root: &F::Elem) -> Self {
        Self::new(field, vec![field.neg(root), field.one()])
    }

    /// `∏ (t - r)` over `roots`.
    pub fn from_roots(field: &F, roots: &[F::Elem]) -> Self {
        roots
            .iter()
            .fold(Self::constant(field, field.one()), |acc, r| acc.mul(&Self::linear_factor(field, r)))
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[F::Elem] {
        &self.coeffs
    }

    /// Coefficient of `t^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> F::Elem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.field.zero())
    }

    /// Coefficients padded with zeros to length `len`.
    pub fn padded(&self, len: usize) -> Vec<F::Elem> {
        assert!(self.coeffs.len() <= len, "polynomial does not fit in {len} coefficients");
        let mut v = self.coeffs.clone();
        v.resize(len, self.field.zero());
        v
    }

    pub fn leading(&self) -> Option<&F::Elem> {
        self.coeffs.last()
    }

    pub fn eval(&self, t: &F::Elem) -> F::Elem {
        let f = &self.field;
        self.coeffs
            .iter()
            .rev()
            .fold(f.zero(), |acc, c| f.add(&f.mul(&acc, t), c))
    }

    pub fn add(&self, other: &Self) -> Self {
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(f, (0..n).map(|i| f.add(&self.coeff(i), &other.coeff(i))).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(f, (0..n).map(|i| f.sub(&self.coeff(i), &other.coeff(i))).collect())
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        let f = &self.field;
        Self::new(f, self.coeffs.iter().map(|x| f.mul(x, c)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let f = &self.field;
        if self.is_zero() || other.is_zero() {
            return Self::zero(f);
        }
        let mut out = vec![f.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if f.is_zero(a) {
                continue;
            }
            let na = f.neg(a);
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.sub_mul(&out[i + j], &na, b);
            }
        }
        Self::new(f, out)
    }

    /// Euclidean division: `self = q * den + r` with `deg r < deg den`.
    pub fn div_rem(&self, den: &Self) -> Result<(Self, Self)> {
        let f = &self.field;
        let dl = den.leading().ok_or(Error::DivisionByZero)?;
        let dl_inv = f.inv(dl).expect("leading coefficient is nonzero");
        let dd = den.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Self::zero(f), self.clone()));
        }
        let mut quot = vec![f.zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = f.mul(&rem[k + dd], &dl_inv);
            if f.is_zero(&c) {
                continue;
            }
            for (j, d) in den.coeffs.iter().enumerate() {
                rem[k + j] = f.sub_mul(&rem[k + j], &c, d);
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        Ok((Self::new(f, quot), Self::new(f, rem)))
    }

    /// The quotient `self / den`, which must be exact.
    pub fn exact_divide(&self, den: &Self) -> Result<Self> {
        let (q, r) = self.div_rem(den)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::NonExactDivision)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::field::{PrimeField, RationalField};

    #[test]
    fn divide_difference_of_squares() {
        let q = RationalField;
        let num = Poly::from_i64(&q, &[-1, 0, 1]);
        let den = Poly::from_i64(&q, &[-1, 1]);
        assert_eq!(num.exact_divide(&den).unwrap(), Poly::from_i64(&q, &[1, 1]));
    }

    #[test]
    fn divide_by_one() {
        let q = RationalField;
        let p = Poly::from_i64(&q, &[3, 0, -2, 5]);
        assert_eq!(p.exact_divide(&Poly::from_i64(&q, &[1])).unwrap(), p);
    }

    #[test]
    fn divide_cubic_by_linear() {
        // t^3 + 2t^2 + 2t + 1 = (t + 1)(t^2 + t + 1)
        let q = RationalField;
        let num = Poly::from_i64(&q, &[1, 2, 2, 1]);
        let den = Poly::from_i64(&q, &[1, 1]);
        assert_eq!(num.exact_divide(&den).unwrap(), Poly::from_i64(&q, &[1, 1, 1]));
    }

    #[test]
    fn inexact_and_zero_division() {
        let f = PrimeField::new(7).unwrap();
        let num = Poly::from_i64(&f, &[1, 0, 1]);
        let den = Poly::from_i64(&f, &[-1, 1]);
        assert_eq!(num.exact_divide(&den), Err(Error::NonExactDivision));
        let (quo, rem) = num.div_rem(&den).unwrap();
        assert_eq!(quo.mul(&den).add(&rem), num);
        assert_eq!(num.exact_divide(&Poly::zero(&f)), Err(Error::DivisionByZero));
    }

    #[test]
    fn roots_and_evaluation() {
        let f = PrimeField::new(101).unwrap();
        let roots = [3u64, 5, 9];
        let p = Poly::from_roots(&f, &roots);
        assert_eq!(p.degree(), Some(3));
        for r in roots {
            assert_eq!(p.eval(&r), 0);
        }
        assert_eq!(p.eval(&0), f.from_i64(-135));
    }
}
