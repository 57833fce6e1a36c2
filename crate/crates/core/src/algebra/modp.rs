//! Word-sized modular arithmetic used by the multi-modular determinant, the
//! square-free pre-test and primality checks.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
pub(crate) fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % p as u128) as u64
}

#[inline]
pub(crate) fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        p - (b - a)
    }
}

pub(crate) fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

/// Inverse modulo a prime `p`; `a` must be nonzero mod `p`.
pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    pow_mod(a, p - 2, p)
}

/// Deterministic Miller–Rabin, exact for every `u64`.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in SMALL {
        if n % p == 0 {
            return n == p;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes just below `2^62`, in decreasing order.
pub(crate) fn large_primes() -> impl Iterator<Item = u64> {
    let mut n = (1u64 << 62) - 1;
    core::iter::from_fn(move || {
        while !is_prime_u64(n) {
            n -= 2;
        }
        let p = n;
        n -= 2;
        Some(p)
    })
}

pub(crate) fn reduce(x: &BigInt, p: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(p));
    r.to_u64().expect("residue fits in u64")
}

/// Determinant of a square matrix over `F_p`, destroying the input.
pub(crate) fn det_mod(mut a: Vec<Vec<u64>>, p: u64) -> u64 {
    let n = a.len();
    let mut det = 1u64;
    for k in 0..n {
        let Some(piv) = (k..n).find(|&i| a[i][k] != 0) else {
            return 0;
        };
        if piv != k {
            a.swap(piv, k);
            det = sub_mod(0, det, p);
        }
        det = mul_mod(det, a[k][k], p);
        let inv = inv_mod(a[k][k], p);
        for i in k + 1..n {
            if a[i][k] == 0 {
                continue;
            }
            let f = mul_mod(a[i][k], inv, p);
            let (top, bottom) = a.split_at_mut(i);
            let (rk, ri) = (&top[k], &mut bottom[0]);
            for j in k + 1..n {
                ri[j] = sub_mod(ri[j], mul_mod(f, rk[j], p), p);
            }
            ri[k] = 0;
        }
    }
    det
}

/// Coefficients (ascending) of the unique polynomial of degree `<= d`
/// through the points `(x, ys[x])`, `x = 0..=d`, over `F_p`.
pub(crate) fn interpolate_mod(ys: &[u64], p: u64) -> Vec<u64> {
    let n = ys.len();
    // Newton divided differences on the nodes 0, 1, ..., n-1.
    let mut dd = ys.to_vec();
    for level in 1..n {
        let inv = inv_mod(level as u64 % p, p);
        for i in (level..n).rev() {
            dd[i] = mul_mod(sub_mod(dd[i], dd[i - 1], p), inv, p);
        }
    }
    // Horner in Newton form: c(x) = dd0 + (x - 0)(dd1 + (x - 1)(dd2 + ...)).
    let mut coeffs: Vec<u64> = alloc::vec![0; n];
    for i in (0..n).rev() {
        // coeffs <- coeffs * (x - i) + dd[i]
        let node = i as u64 % p;
        let mut next = alloc::vec![0u64; n];
        for j in 0..n {
            if coeffs[j] == 0 {
                continue;
            }
            if j + 1 < n {
                next[j + 1] = add_mod(next[j + 1], coeffs[j], p);
            }
            next[j] = sub_mod(next[j], mul_mod(coeffs[j], node, p), p);
        }
        next[0] = add_mod(next[0], dd[i], p);
        coeffs = next;
    }
    coeffs
}

/// Incremental Chinese remaindering of a vector of residues.
pub(crate) struct Crt {
    pub modulus: BigInt,
    pub values: Vec<BigInt>,
}

impl Crt {
    pub fn new(len: usize) -> Self {
        Crt { modulus: BigInt::from(1), values: alloc::vec![BigInt::zero(); len] }
    }

    pub fn push(&mut self, residues: &[u64], p: u64) {
        let m_mod_p = reduce(&self.modulus, p);
        let m_inv = inv_mod(m_mod_p, p);
        for (v, &r) in self.values.iter_mut().zip(residues) {
            let cur = reduce(v, p);
            let t = mul_mod(sub_mod(r, cur, p), m_inv, p);
            *v += &self.modulus * BigInt::from(t);
        }
        self.modulus *= BigInt::from(p);
    }

    /// Values in the symmetric range `(-M/2, M/2]`.
    pub fn symmetric(&self) -> Vec<BigInt> {
        let half: BigInt = &self.modulus / 2;
        self.values
            .iter()
            .map(|v| if v > &half { v - &self.modulus } else { v.clone() })
            .collect()
    }
}

/// Upper bound on `log2 |x|` for a nonzero big integer (0 for zero).
pub(crate) fn log2_bound(x: &BigInt) -> f64 {
    if x.is_zero() {
        0.0
    } else {
        x.abs().bits() as f64
    }
}
