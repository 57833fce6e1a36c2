//! The finite field `F_p[t]/(m(t))` with elements encoded as integers
//! `sum c_i p^i` (`c_i` the coefficient of `t^i`).

use alloc::vec;
use alloc::vec::Vec;

use super::ZetaError;

/// Polynomials over `F_p`, coefficients in ascending order, trimmed.
type FpPoly = Vec<u64>;

fn trim(mut a: FpPoly) -> FpPoly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_mul(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    trim(out)
}

fn inv_mod_p(a: u64, p: u64) -> u64 {
    // p is prime and small (p <= 10^6), so Fermat is cheap.
    let mut base = a % p;
    let mut e = p - 2;
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

fn poly_rem(a: &[u64], m: &[u64], p: u64) -> FpPoly {
    let mut r = trim(a.to_vec());
    let dm = m.len() - 1;
    let inv = inv_mod_p(m[dm], p);
    while r.len() > dm {
        let shift = r.len() - 1 - dm;
        let c = r[r.len() - 1] * inv % p;
        for (i, &x) in m.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - c * x % p) % p;
        }
        r = trim(r);
    }
    r
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// `x^(p^k) mod m` by repeated `p`-th powering.
fn frobenius_power(m: &[u64], p: u64, k: usize) -> FpPoly {
    let mut x = poly_rem(&[0, 1], m, p);
    for _ in 0..k {
        // x <- x^p mod m
        let mut acc: FpPoly = vec![1];
        let mut base = x.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = poly_rem(&poly_mul(&acc, &base, p), m, p);
            }
            base = poly_rem(&poly_mul(&base, &base, p), m, p);
            e >>= 1;
        }
        x = acc;
    }
    x
}

/// Irreducibility of a monic `m` of degree `r >= 1` over `F_p`: no common
/// factor with `x^(p^k) - x` for `k <= r/2`.
pub fn is_irreducible(m: &[u64], p: u64) -> bool {
    let m = trim(m.to_vec());
    if m.len() < 2 {
        return false;
    }
    let r = m.len() - 1;
    for k in 1..=r / 2 {
        let mut f = frobenius_power(&m, p, k);
        f.resize(f.len().max(2), 0);
        f[1] = (f[1] + p - 1) % p;
        let g = poly_gcd(&m, &trim(f), p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

/// All monic irreducible polynomials of degree `r` over `F_p` in
/// lexicographic order of `(c_{r-1}, ..., c_0)`, lazily.
pub fn monic_irreducibles(p: u64, r: u32) -> impl Iterator<Item = Vec<u64>> {
    let count = p.pow(r);
    (0..count).filter_map(move |code| {
        let mut m = Vec::with_capacity(r as usize + 1);
        let mut c = code;
        // code = c_{r-1} p^{r-1} + ... + c_0, so plain digit order is
        // lexicographic with c_{r-1} most significant.
        for _ in 0..r {
            m.push(c % p);
            c /= p;
        }
        m.push(1);
        is_irreducible(&m, p).then_some(m)
    })
}

/// `F_{p^r}` realised as `F_p[t]/(m)`.
#[derive(Debug, Clone)]
pub struct FiniteField {
    p: u64,
    r: u32,
    modulus: Vec<u64>,
    size: u64,
}

impl FiniteField {
    /// The field with the lexicographically first monic irreducible modulus.
    pub fn new(p: u64, r: u32) -> Result<Self, ZetaError> {
        let m = monic_irreducibles(p, r).next().ok_or(ZetaError::ReducibleModulus)?;
        Self::with_modulus(p, m)
    }

    /// The field with a given monic modulus (ascending coefficients).
    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> Result<Self, ZetaError> {
        let modulus = trim(modulus);
        if modulus.len() < 2 || modulus.last() != Some(&1) || !is_irreducible(&modulus, p) {
            return Err(ZetaError::ReducibleModulus);
        }
        let r = (modulus.len() - 1) as u32;
        Ok(FiniteField { p, r, modulus, size: p.pow(r) })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.r
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    fn digits(&self, mut a: u64) -> FpPoly {
        let mut d = Vec::with_capacity(self.r as usize);
        for _ in 0..self.r {
            d.push(a % self.p);
            a /= self.p;
        }
        trim(d)
    }

    fn encode(&self, d: &[u64]) -> u64 {
        d.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    /// The image of an integer in the prime field.
    pub fn from_int(&self, n: i64) -> u64 {
        n.rem_euclid(self.p as i64) as u64
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.r {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn neg(&self, a: u64) -> u64 {
        let mut a = a;
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.r {
            out += ((self.p - a % self.p) % self.p) * place;
            a /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        let prod = poly_mul(&self.digits(a), &self.digits(b), self.p);
        self.encode(&poly_rem(&prod, &self.modulus, self.p))
    }

    pub fn pow(&self, a: u64, mut e: u64) -> u64 {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: u64) -> Option<u64> {
        (a != 0).then(|| self.pow(a, self.size - 2))
    }
}
