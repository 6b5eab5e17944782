//! Truncated formal power series in one variable `z` over exact rationals.
//!
//! A [`TruncSeries`] stores the coefficients of `z^0 .. z^order` densely; the
//! series is known modulo `z^(order+1)`. Binary operations truncate to the
//! smaller order of the two operands, and division by `z` shrinks the order,
//! so "known modulo `z^(p+1)`" stays machine-checkable through every
//! computation. Coefficients are `BigRational`s and therefore always in
//! canonical reduced form with positive denominator.

use std::fmt;

use num::bigint::BigInt;
use num::traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exact rational coefficient type.
pub type Rat = num::BigRational;

/// Shorthand for an integer rational, mostly used in tests.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `n/d` as an exact rational.
pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Canonical `"numerator/denominator"` rendering used by the JSON exports.
pub fn rat_string(x: &Rat) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeriesError {
    /// Division requires an invertible constant term; exact shifts are a
    /// separate operation ([`TruncSeries::shift_div_z`]).
    #[error("division by a series with zero constant term")]
    ZeroConstantTerm,
    /// `shift_div_z(m)` found a nonzero coefficient below `z^m`.
    #[error("coefficient of z^{index} is nonzero; cannot divide exactly by z^{shift}")]
    NonVanishingLowOrder { index: usize, shift: usize },
    /// The square root branch implemented here requires constant term 1.
    #[error("series square root requires constant term 1")]
    BadConstantTerm,
    /// Composition and the kernel branch map need an inner series that
    /// vanishes at `z = 0`.
    #[error("inner series must have positive valuation (zero constant term)")]
    NonPositiveValuation,
}

/// A power series truncated at a fixed order: `coeffs[n]` is the coefficient
/// of `z^n` and `coeffs.len() == order + 1`.
#[derive(Clone, PartialEq, Eq)]
pub struct TruncSeries {
    coeffs: Vec<Rat>,
}

impl TruncSeries {
    /// The zero truncation at the given order.
    pub fn zero(order: usize) -> Self {
        Self { coeffs: vec![Rat::zero(); order + 1] }
    }

    /// The constant 1 at the given order.
    pub fn one(order: usize) -> Self {
        Self::monomial(Rat::one(), 0, order)
    }

    /// The monomial `z` at the given order.
    pub fn z(order: usize) -> Self {
        Self::monomial(Rat::one(), 1, order)
    }

    /// `c * z^n`, silently zero if `n > order`.
    pub fn monomial(c: Rat, n: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if n <= order {
            s.coeffs[n] = c;
        }
        s
    }

    /// Wraps a dense coefficient vector; the order is `coeffs.len() - 1`.
    pub fn from_coeffs(coeffs: Vec<Rat>) -> Self {
        assert!(!coeffs.is_empty(), "a truncated series has at least the z^0 coefficient");
        Self { coeffs }
    }

    /// Integer coefficients, ascending powers. Test and example helper.
    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&n| rat(n)).collect())
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `z^n`. Panics if `n` exceeds the order: that
    /// coefficient is unknown, not zero.
    pub fn coeff(&self, n: usize) -> &Rat {
        assert!(n <= self.order(), "coefficient of z^{n} unknown at order {}", self.order());
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    /// Index of the first nonzero coefficient, `None` for the zero truncation.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Restriction to a smaller (or equal) order.
    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.order(), "cannot extend a truncation from {} to {order}", self.order());
        Self { coeffs: self.coeffs[..=order].to_vec() }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.order().min(rhs.order());
        Self::from_coeffs((0..=n).map(|k| &self.coeffs[k] + &rhs.coeffs[k]).collect())
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let n = self.order().min(rhs.order());
        Self::from_coeffs((0..=n).map(|k| &self.coeffs[k] - &rhs.coeffs[k]).collect())
    }

    pub fn neg(&self) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn scalar_mul(&self, c: &Rat) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Truncated Cauchy product at the shared order.
    pub fn mul(&self, rhs: &Self) -> Self {
        let n = self.order().min(rhs.order());
        let mut out = vec![Rat::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(n + 1 - i) {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Self::from_coeffs(out)
    }

    /// `self^e` at this order.
    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::one(self.order());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Series division; requires `rhs` to have a nonzero constant term.
    /// The quotient satisfies `q * rhs = self` modulo `z^(order+1)`.
    pub fn div(&self, rhs: &Self) -> Result<Self, SeriesError> {
        if rhs.coeffs[0].is_zero() {
            return Err(SeriesError::ZeroConstantTerm);
        }
        let n = self.order().min(rhs.order());
        let mut out = vec![Rat::zero(); n + 1];
        for k in 0..=n {
            let mut acc = self.coeffs[k].clone();
            for i in 1..=k {
                if !rhs.coeffs[i].is_zero() && !out[k - i].is_zero() {
                    acc -= &rhs.coeffs[i] * &out[k - i];
                }
            }
            out[k] = acc / &rhs.coeffs[0];
        }
        Ok(Self::from_coeffs(out))
    }

    /// Exact division by `z^m`. The result has order `self.order() - m`;
    /// fails if any coefficient below `z^m` is nonzero.
    pub fn shift_div_z(&self, m: usize) -> Result<Self, SeriesError> {
        assert!(m >= 1 && m <= self.order(), "shift {m} out of range for order {}", self.order());
        if let Some(index) = self.coeffs[..m].iter().position(|c| !c.is_zero()) {
            return Err(SeriesError::NonVanishingLowOrder { index, shift: m });
        }
        Ok(Self::from_coeffs(self.coeffs[m..].to_vec()))
    }

    /// Multiplication by `z^m` at the same order (the top `m` coefficients
    /// fall off the truncation).
    pub fn mul_z_pow(&self, m: usize) -> Self {
        let n = self.order();
        let mut out = vec![Rat::zero(); n + 1];
        for k in m..=n {
            out[k] = self.coeffs[k - m].clone();
        }
        Self::from_coeffs(out)
    }

    /// Square root branch with constant term 1: the result `r` satisfies
    /// `r * r = self` modulo `z^(order+1)` and `r(0) = 1`. Computed by the
    /// coefficient recurrence `2 r[k] = s[k] - sum r[i] r[k-i]`.
    pub fn sqrt(&self) -> Result<Self, SeriesError> {
        if !self.coeffs[0].is_one() {
            return Err(SeriesError::BadConstantTerm);
        }
        let n = self.order();
        let mut out = vec![Rat::zero(); n + 1];
        out[0] = Rat::one();
        let two = rat(2);
        for k in 1..=n {
            let mut acc = self.coeffs[k].clone();
            for i in 1..k {
                if !out[i].is_zero() && !out[k - i].is_zero() {
                    acc -= &out[i] * &out[k - i];
                }
            }
            out[k] = acc / &two;
        }
        Ok(Self::from_coeffs(out))
    }

    /// Substitution `self(inner)`; the inner series must vanish at 0 so that
    /// coefficient `n` of the result only involves `inner` up to `z^n`.
    pub fn compose(&self, inner: &Self) -> Result<Self, SeriesError> {
        if !inner.coeffs[0].is_zero() {
            return Err(SeriesError::NonPositiveValuation);
        }
        let n = self.order().min(inner.order());
        let inner = inner.truncate(n);
        let mut acc = Self::zero(n);
        for c in self.coeffs[..=n].iter().rev() {
            acc = acc.mul(&inner);
            acc.coeffs[0] = &acc.coeffs[0] + c;
        }
        Ok(acc)
    }

    /// Termwise derivative; the order drops by one.
    pub fn derivative(&self) -> Self {
        assert!(self.order() >= 1, "derivative needs order >= 1");
        Self::from_coeffs(
            (1..=self.order()).map(|n| &self.coeffs[n] * rat(n as i64)).collect(),
        )
    }

    /// Horner evaluation in double precision.
    pub fn eval_f64(&self, z: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c.to_f64().expect("rational out of f64 range");
        }
        acc
    }

    /// JSON form `{"order": n, "coeffs": ["p/q", ...]}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "order": self.order(),
            "coeffs": self.coeffs.iter().map(rat_string).collect::<Vec<_>>(),
        })
    }
}

impl fmt::Debug for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let a = c.abs();
            match n {
                0 => write!(f, "{a}")?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{a}*")?;
                    }
                    if n == 1 {
                        write!(f, "z")?;
                    } else {
                        write!(f, "z^{n}")?;
                    }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(z^{})", self.order() + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn add_preserves_order_and_cancels() {
        let a = TruncSeries::from_ints(&[1, 1]);
        let b = TruncSeries::from_ints(&[1, -1]);
        assert_eq!(a.add(&b), TruncSeries::from_ints(&[2, 0]));
    }

    #[test]
    fn mul_difference_of_squares() {
        let a = TruncSeries::from_ints(&[1, 1, 0]);
        let b = TruncSeries::from_ints(&[1, -1, 0]);
        assert_eq!(a.mul(&b), TruncSeries::from_ints(&[1, 0, -1]));
    }

    #[test]
    fn mul_by_z() {
        // z * (z + 2z^3) at order 4
        let a = TruncSeries::z(4);
        let b = TruncSeries::from_ints(&[0, 1, 0, 2, 0]);
        assert_eq!(a.mul(&b), TruncSeries::from_ints(&[0, 0, 1, 0, 2]));
    }

    #[test]
    fn div_geometric() {
        let one = TruncSeries::one(3);
        let b = TruncSeries::from_ints(&[1, -1, 0, 0]);
        assert_eq!(one.div(&b).unwrap(), TruncSeries::from_ints(&[1, 1, 1, 1]));
    }

    #[test]
    fn div_factored() {
        // (z + z^2) / (1 + z) = z
        let a = TruncSeries::from_ints(&[0, 1, 1, 0]);
        let b = TruncSeries::from_ints(&[1, 1, 0, 0]);
        assert_eq!(a.div(&b).unwrap(), TruncSeries::from_ints(&[0, 1, 0, 0]));
    }

    #[test]
    fn div_zero_constant_term_rejected() {
        let a = TruncSeries::one(3);
        let b = TruncSeries::z(3);
        assert_eq!(a.div(&b), Err(SeriesError::ZeroConstantTerm));
    }

    #[test]
    fn shift_div_examples() {
        // (4z^2 + 8z^4) / (4z) = z + 2z^3
        let a = TruncSeries::from_ints(&[0, 0, 4, 0, 8]);
        let s = a.shift_div_z(1).unwrap().scalar_mul(&ratio(1, 4));
        assert_eq!(s, TruncSeries::from_ints(&[0, 1, 0, 2]));

        let z3 = TruncSeries::monomial(Rat::one(), 3, 3);
        let s = z3.shift_div_z(1).unwrap();
        assert_eq!(s.order(), 2);
        assert_eq!(s, TruncSeries::from_ints(&[0, 0, 1]));

        let bad = TruncSeries::from_ints(&[1, 1]);
        assert_eq!(
            bad.shift_div_z(1),
            Err(SeriesError::NonVanishingLowOrder { index: 0, shift: 1 })
        );
    }

    #[test]
    fn sqrt_examples() {
        let mut s = TruncSeries::one(6);
        s.coeffs[2] = rat(-8);
        let r = s.sqrt().unwrap();
        assert_eq!(r, TruncSeries::from_ints(&[1, 0, -4, 0, -8, 0, -32]));
        assert_eq!(r.mul(&r), s);

        assert_eq!(TruncSeries::one(4).sqrt().unwrap(), TruncSeries::one(4));

        let p = TruncSeries::from_ints(&[1, 1, 0, 0]);
        assert_eq!(p.mul(&p).sqrt().unwrap(), p);

        let bad = TruncSeries::from_ints(&[2, 0]);
        assert_eq!(bad.sqrt(), Err(SeriesError::BadConstantTerm));
    }

    #[test]
    fn compose_examples() {
        // 1/(1-t) composed with z
        let geo = TruncSeries::from_ints(&[1, 1, 1, 1]);
        assert_eq!(geo.compose(&TruncSeries::z(3)).unwrap(), geo);

        // t^2 at z + z^2, order 4
        let t2 = TruncSeries::from_ints(&[0, 0, 1, 0, 0]);
        let inner = TruncSeries::from_ints(&[0, 1, 1, 0, 0]);
        assert_eq!(t2.compose(&inner).unwrap(), TruncSeries::from_ints(&[0, 0, 1, 2, 1]));

        let bad = TruncSeries::one(4);
        assert_eq!(t2.compose(&bad), Err(SeriesError::NonPositiveValuation));
    }

    #[test]
    fn derivative_examples() {
        let s = TruncSeries::from_ints(&[0, 1, 0, 2]);
        assert_eq!(s.derivative(), TruncSeries::from_ints(&[1, 0, 6]));

        let c = TruncSeries::from_ints(&[7, 0, 0]);
        assert!(c.derivative().is_zero());
    }

    #[test]
    fn valuation_and_zero() {
        assert_eq!(TruncSeries::zero(5).valuation(), None);
        assert_eq!(TruncSeries::from_ints(&[0, 0, 3, 1]).valuation(), Some(2));
    }

    #[test]
    fn display_reads_naturally() {
        let s = TruncSeries::from_ints(&[1, 0, -4, 2]);
        assert_eq!(format!("{s}"), "1 - 4*z^2 + 2*z^3 + O(z^4)");
    }

    #[test]
    fn json_uses_rational_strings() {
        let s = TruncSeries::from_coeffs(vec![ratio(1, 3), rat(-2)]);
        assert_eq!(
            s.to_json().to_string(),
            r#"{"coeffs":["1/3","-2/1"],"order":1}"#
        );
    }

    fn small_series(order: usize) -> impl Strategy<Value = TruncSeries> {
        proptest::collection::vec((-20i64..=20, 1i64..=10), order + 1).prop_map(|cs| {
            TruncSeries::from_coeffs(cs.into_iter().map(|(n, d)| ratio(n, d)).collect())
        })
    }

    proptest! {
        #[test]
        fn div_inverts_mul(a in small_series(5), b in small_series(5)) {
            prop_assume!(!b.coeff(0).is_zero());
            prop_assert_eq!(a.mul(&b).div(&b).unwrap(), a);
        }

        #[test]
        fn sqrt_squares_back(t in small_series(5)) {
            let s = TruncSeries::one(6).add(&TruncSeries::from_coeffs(
                std::iter::once(Rat::zero()).chain(t.coeffs().iter().cloned()).collect(),
            ));
            let r = s.sqrt().unwrap();
            prop_assert_eq!(r.mul(&r), s);
        }

        #[test]
        fn compose_with_z_is_identity(a in small_series(6)) {
            prop_assert_eq!(a.compose(&TruncSeries::z(6)).unwrap(), a);
        }

        #[test]
        fn ring_laws_and_canonical_form(a in small_series(5), b in small_series(5), c in small_series(5)) {
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            // BigRational keeps gcd(|p|, q) = 1 and q >= 1 through every operation
            for x in a.mul(&b).add(&c).coeffs() {
                prop_assert!(x.denom() > &BigInt::from(0));
                prop_assert!(num::integer::gcd(x.numer().clone(), x.denom().clone())
                    <= BigInt::from(1));
            }
        }
    }
}
