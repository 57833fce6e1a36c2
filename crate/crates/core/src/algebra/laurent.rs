use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::BigRational;

use super::SqrtQScalar;

/// A Laurent polynomial in `mu` with coefficients in `Q[sqrt q]`.
///
/// Zero coefficients are never stored; the empty map is the zero polynomial.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentPoly {
    q: u64,
    terms: BTreeMap<i64, SqrtQScalar>,
}

impl LaurentPoly {
    pub fn zero(q: u64) -> Self {
        LaurentPoly { q, terms: BTreeMap::new() }
    }

    pub fn one(q: u64) -> Self {
        Self::constant(SqrtQScalar::one(q))
    }

    pub fn constant(c: SqrtQScalar) -> Self {
        Self::monomial(c, 0)
    }

    /// `c * mu^exp`.
    pub fn monomial(c: SqrtQScalar, exp: i64) -> Self {
        let mut p = Self::zero(c.q());
        if !c.is_zero() {
            p.terms.insert(exp, c);
        }
        p
    }

    /// The variable `mu`.
    pub fn mu(q: u64) -> Self {
        Self::monomial(SqrtQScalar::one(q), 1)
    }

    pub fn from_terms(q: u64, terms: impl IntoIterator<Item = (i64, SqrtQScalar)>) -> Self {
        let mut p = Self::zero(q);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &SqrtQScalar)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn coeff(&self, exp: i64) -> SqrtQScalar {
        self.terms.get(&exp).cloned().unwrap_or_else(|| SqrtQScalar::zero(self.q))
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    fn add_term(&mut self, exp: i64, c: SqrtQScalar) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&exp) {
            Some(old) => &old + &c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(exp, sum);
        }
    }

    pub fn scale(&self, c: &SqrtQScalar) -> Self {
        Self::from_terms(self.q, self.terms.iter().map(|(e, x)| (*e, x * c)))
    }

    pub fn scale_rational(&self, r: &BigRational) -> Self {
        Self::from_terms(self.q, self.terms.iter().map(|(e, x)| (*e, x.scale(r))))
    }

    /// Multiply by `mu^k`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentPoly { q: self.q, terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect() }
    }

    pub fn eval(&self, mu: Complex64) -> Complex64 {
        self.terms.iter().map(|(e, c)| c.to_complex() * mu.powi(*e as i32)).sum()
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`
    /// in `Q(sqrt q)[mu, 1/mu]`.
    pub fn div_exact(&self, d: &LaurentPoly) -> Option<LaurentPoly> {
        let (dlo, dhi) = (d.min_exp()?, d.max_exp()?);
        if self.is_zero() {
            return Some(Self::zero(self.q));
        }
        // Monomials are units; strip them and do ordinary long division.
        let lo = self.min_exp().unwrap();
        let mut rem: Vec<SqrtQScalar> = dense(self, lo);
        let den: Vec<SqrtQScalar> = dense(d, dlo);
        let lead_inv = den[(dhi - dlo) as usize].inv()?;
        let dd = den.len() - 1;
        if rem.len() < den.len() {
            return None;
        }
        let mut quot = alloc::vec![SqrtQScalar::zero(self.q); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = &rem[i + dd] * &lead_inv;
            if c.is_zero() {
                continue;
            }
            for (j, dj) in den.iter().enumerate() {
                rem[i + j] = &rem[i + j] - &(&c * dj);
            }
            quot[i] = c;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(Self::from_terms(self.q, quot.into_iter().enumerate().map(|(i, c)| (i as i64 + lo - dlo, c))))
    }
}

fn dense(p: &LaurentPoly, lo: i64) -> Vec<SqrtQScalar> {
    let hi = p.max_exp().unwrap();
    (lo..=hi).map(|e| p.coeff(e)).collect()
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            match e {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*mu")?,
                _ => write!(f, "{c}*mu^{e}")?,
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c);
        }
        out
    }
}

impl<'a> Mul<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        assert_eq!(self.q, rhs.q, "mixing Laurent polynomials over different rings");
        let mut out = LaurentPoly::zero(self.q);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly { q: self.q, terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect() }
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: LaurentPoly) -> LaurentPoly {
        &self + &rhs
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: LaurentPoly) -> LaurentPoly {
        &self - &rhs
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}
