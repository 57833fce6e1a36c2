use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Shorthand for the rational `num / den`.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Integer square root, `Some(s)` iff `n == s * s`.
pub fn isqrt(n: u64) -> Option<u64> {
    let mut s = libm::sqrt(n as f64) as u64;
    while s.saturating_mul(s) > n {
        s -= 1;
    }
    while (s + 1).saturating_mul(s + 1) <= n {
        s += 1;
    }
    (s * s == n).then_some(s)
}

/// An element `a + b sqrt(q)` of `Q[sqrt q]`.
///
/// When `q` is a perfect square the irrational part is folded into `a`, so
/// `b == 0` always holds in that case and structural equality is ring
/// equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SqrtQScalar {
    q: u64,
    a: BigRational,
    b: BigRational,
}

impl SqrtQScalar {
    pub fn new(q: u64, a: BigRational, b: BigRational) -> Self {
        assert!(q >= 1, "ambient q must be at least 1");
        match isqrt(q) {
            Some(s) if !b.is_zero() => SqrtQScalar {
                q,
                a: a + b * BigRational::from_integer(BigInt::from(s)),
                b: BigRational::zero(),
            },
            _ => SqrtQScalar { q, a, b },
        }
    }

    pub fn zero(q: u64) -> Self {
        Self::new(q, BigRational::zero(), BigRational::zero())
    }

    pub fn one(q: u64) -> Self {
        Self::from_rational(q, BigRational::one())
    }

    pub fn from_rational(q: u64, a: BigRational) -> Self {
        Self::new(q, a, BigRational::zero())
    }

    pub fn from_int(q: u64, a: i64) -> Self {
        Self::from_rational(q, BigRational::from_integer(a.into()))
    }

    /// `sqrt(q)` itself.
    pub fn sqrt_q(q: u64) -> Self {
        Self::new(q, BigRational::zero(), BigRational::one())
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Rational part.
    pub fn a(&self) -> &BigRational {
        &self.a
    }

    /// Coefficient of `sqrt(q)`.
    pub fn b(&self) -> &BigRational {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Galois conjugate `a - b sqrt(q)`.
    pub fn conj(&self) -> Self {
        SqrtQScalar { q: self.q, a: self.a.clone(), b: -self.b.clone() }
    }

    /// Field norm `a^2 - q b^2`.
    pub fn norm(&self) -> BigRational {
        let q = BigRational::from_integer(BigInt::from(self.q));
        &self.a * &self.a - q * &self.b * &self.b
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        // q is not a square whenever b != 0, so the norm vanishes only at 0.
        let n = self.norm();
        let c = self.conj();
        Some(SqrtQScalar { q: self.q, a: c.a / &n, b: c.b / n })
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        SqrtQScalar { q: self.q, a: &self.a * r, b: &self.b * r }
    }

    pub fn to_complex(&self) -> Complex64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        Complex64::new(a + b * libm::sqrt(self.q as f64), 0.0)
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.q, other.q, "mixing scalars of Q[sqrt {}] and Q[sqrt {}]", self.q, other.q);
    }
}

impl fmt::Debug for SqrtQScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for SqrtQScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "{}*sqrt({})", self.b, self.q),
            (false, false) => {
                let sign = if self.b.is_negative() { '-' } else { '+' };
                write!(f, "({} {} {}*sqrt({}))", self.a, sign, self.b.abs(), self.q)
            }
        }
    }
}

impl<'a> Add<&'a SqrtQScalar> for &'a SqrtQScalar {
    type Output = SqrtQScalar;
    fn add(self, rhs: &SqrtQScalar) -> SqrtQScalar {
        self.check(rhs);
        SqrtQScalar { q: self.q, a: &self.a + &rhs.a, b: &self.b + &rhs.b }
    }
}

impl<'a> Sub<&'a SqrtQScalar> for &'a SqrtQScalar {
    type Output = SqrtQScalar;
    fn sub(self, rhs: &SqrtQScalar) -> SqrtQScalar {
        self.check(rhs);
        SqrtQScalar { q: self.q, a: &self.a - &rhs.a, b: &self.b - &rhs.b }
    }
}

impl<'a> Mul<&'a SqrtQScalar> for &'a SqrtQScalar {
    type Output = SqrtQScalar;
    fn mul(self, rhs: &SqrtQScalar) -> SqrtQScalar {
        self.check(rhs);
        let q = BigRational::from_integer(BigInt::from(self.q));
        SqrtQScalar {
            q: self.q,
            a: &self.a * &rhs.a + q * &self.b * &rhs.b,
            b: &self.a * &rhs.b + &self.b * &rhs.a,
        }
    }
}

impl Neg for &SqrtQScalar {
    type Output = SqrtQScalar;
    fn neg(self) -> SqrtQScalar {
        SqrtQScalar { q: self.q, a: -self.a.clone(), b: -self.b.clone() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<SqrtQScalar> for SqrtQScalar {
            type Output = SqrtQScalar;
            fn $m(self, rhs: SqrtQScalar) -> SqrtQScalar {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for SqrtQScalar {
    type Output = SqrtQScalar;
    fn neg(self) -> SqrtQScalar {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(q: u64, a: (i64, i64), b: (i64, i64)) -> SqrtQScalar {
        SqrtQScalar::new(q, rat(a.0, a.1), rat(b.0, b.1))
    }

    #[test]
    fn product_rule() {
        // (1 + 2 sqrt3)(3 - sqrt3) = 3 - 6 + (6 - 1) sqrt3
        let x = s(3, (1, 1), (2, 1));
        let y = s(3, (3, 1), (-1, 1));
        assert_eq!(&x * &y, s(3, (-3, 1), (5, 1)));
    }

    #[test]
    fn square_q_folds_root() {
        let x = SqrtQScalar::sqrt_q(4);
        assert!(x.is_rational());
        assert_eq!(x, SqrtQScalar::from_int(4, 2));
        assert_eq!(isqrt(49), Some(7));
        assert_eq!(isqrt(50), None);
    }

    #[test]
    fn inverse() {
        let x = s(2, (1, 1), (1, 1));
        assert_eq!(&x * &x.inv().unwrap(), SqrtQScalar::one(2));
        assert!(SqrtQScalar::zero(2).inv().is_none());
    }

    fn arb_scalar(q: u64) -> impl Strategy<Value = SqrtQScalar> {
        (-20i64..20, 1i64..6, -20i64..20, 1i64..6)
            .prop_map(move |(a, da, b, db)| SqrtQScalar::new(q, rat(a, da), rat(b, db)))
    }

    proptest! {
        #[test]
        fn ring_laws((x, y, z) in (1u64..12).prop_flat_map(|q| (arb_scalar(q), arb_scalar(q), arb_scalar(q)))) {
            let q = x.q();
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
            prop_assert_eq!(&x * &SqrtQScalar::one(q), x.clone());
            prop_assert_eq!(&x * &y, &y * &x);
        }
    }
}
