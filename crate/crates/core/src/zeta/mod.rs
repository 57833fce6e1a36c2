//! Point counting for plane curves over finite fields, Hasse–Weil zeta
//! numerators, and the comparison of a numerator with a resonance
//! polynomial.
//!
//! Only genus 0 (the projective line) and genus 1 (smooth Weierstrass
//! cubics) are supported; for those `Z(T) = P(T) / ((1 - T)(1 - qT))` with
//! `P = 1` and `P = qT^2 - aT + 1`, `a = q + 1 - N_1`, respectively.

mod field;

pub use field::{is_irreducible, monic_irreducibles, FiniteField};

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use thiserror::Error;

use crate::algebra::{divides, is_prime_u64, poly_roots, write_poly, LambdaPoly, Poly, Root};
use crate::engine::{resonance_polynomial, EngineError};
use crate::graph::GeomFiniteGraph;

/// Largest field size `p^r` accepted by the brute-force counter.
pub const MAX_FIELD_SIZE: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ZetaError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field of size {p}^{r} exceeds the brute-force limit of {MAX_FIELD_SIZE}")]
    FieldTooLarge { p: u64, r: u32 },
    #[error("the Weierstrass equation is singular (discriminant vanishes mod {0})")]
    Singular(u64),
    #[error("field modulus is not a monic irreducible polynomial")]
    ReducibleModulus,
    #[error("numerator root off the circle |T| = q^(-1/2) by {0:e}")]
    WeilViolation(f64),
    #[error("numerator violates the functional equation")]
    FunctionalEquation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurveKind {
    ProjectiveLine,
    Weierstrass,
}

impl fmt::Display for CurveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CurveKind::ProjectiveLine => "projective_line",
            CurveKind::Weierstrass => "weierstrass",
        })
    }
}

/// A curve over `F_p`: the projective line, or the projective closure of
/// `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6`, stored as
/// `[a1, a3, a2, a4, a6]` reduced mod `p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CurveSpec {
    p: u64,
    kind: CurveKind,
    a: [u64; 5],
}

impl CurveSpec {
    pub fn projective_line(p: u64) -> Result<Self, ZetaError> {
        check_prime(p)?;
        Ok(CurveSpec { p, kind: CurveKind::ProjectiveLine, a: [0; 5] })
    }

    /// A smooth Weierstrass cubic; coefficients are `[a1, a3, a2, a4, a6]`.
    pub fn weierstrass(p: u64, a: [i64; 5]) -> Result<Self, ZetaError> {
        check_prime(p)?;
        let a = a.map(|x| x.rem_euclid(p as i64) as u64);
        let c = CurveSpec { p, kind: CurveKind::Weierstrass, a };
        if c.discriminant_mod_p() == 0 {
            return Err(ZetaError::Singular(p));
        }
        Ok(c)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    /// `[a1, a3, a2, a4, a6]` in `0..p`.
    pub fn coefficients(&self) -> [u64; 5] {
        self.a
    }

    pub fn genus(&self) -> u32 {
        match self.kind {
            CurveKind::ProjectiveLine => 0,
            CurveKind::Weierstrass => 1,
        }
    }

    /// The discriminant of the Weierstrass equation reduced mod `p`
    /// (`0` for the projective line, which is not given by one).
    pub fn discriminant_mod_p(&self) -> u64 {
        if self.kind == CurveKind::ProjectiveLine {
            return 0;
        }
        let [a1, a3, a2, a4, a6] = self.a.map(|x| x as i128);
        let b2 = a1 * a1 + 4 * a2;
        let b4 = 2 * a4 + a1 * a3;
        let b6 = a3 * a3 + 4 * a6;
        let b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
        let d = -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6;
        d.rem_euclid(self.p as i128) as u64
    }
}

fn check_prime(p: u64) -> Result<(), ZetaError> {
    if is_prime_u64(p) {
        Ok(())
    } else {
        Err(ZetaError::NotPrime(p))
    }
}

fn check_size(p: u64, r: u32) -> Result<(), ZetaError> {
    if r == 0 {
        return Err(ZetaError::ZeroDegree);
    }
    match p.checked_pow(r) {
        Some(n) if n <= MAX_FIELD_SIZE => Ok(()),
        _ => Err(ZetaError::FieldTooLarge { p, r }),
    }
}

/// `N_r`: the number of projective points over `F_{p^r}`, counted in the
/// field built on the lexicographically first monic irreducible modulus.
pub fn count_points(curve: &CurveSpec, r: u32) -> Result<u64, ZetaError> {
    check_size(curve.p, r)?;
    count_in(curve, &FiniteField::new(curve.p, r)?)
}

/// `N_r` with an explicit field modulus (ascending coefficients, monic,
/// irreducible of degree `r`).
pub fn count_points_with_modulus(curve: &CurveSpec, modulus: Vec<u64>) -> Result<u64, ZetaError> {
    let r = modulus.len().saturating_sub(1) as u32;
    check_size(curve.p, r)?;
    count_in(curve, &FiniteField::with_modulus(curve.p, modulus)?)
}

fn count_in(curve: &CurveSpec, k: &FiniteField) -> Result<u64, ZetaError> {
    let n = k.size();
    if curve.kind == CurveKind::ProjectiveLine {
        return Ok(n + 1);
    }
    let [a1, a3, a2, a4, a6] = curve.a.map(|x| x as i64).map(|x| k.from_int(x));
    // sq[d]: solutions of y^2 = d; as[d]: solutions of w^2 + w = d.
    let mut sq = vec![0u32; n as usize];
    let mut artin = vec![0u32; n as usize];
    for y in 0..n {
        let y2 = k.mul(y, y);
        sq[y2 as usize] += 1;
        artin[k.add(y2, y) as usize] += 1;
    }
    let two = k.from_int(2);
    let quarter = if k.p() == 2 { 0 } else { k.inv(k.mul(two, two)).expect("p odd") };
    let mut affine = 0u64;
    for x in 0..n {
        // y^2 + b y = c with b = a1 x + a3, c = x^3 + a2 x^2 + a4 x + a6.
        let x2 = k.mul(x, x);
        let c = k.add(k.add(k.mul(x2, x), k.mul(a2, x2)), k.add(k.mul(a4, x), a6));
        let b = k.add(k.mul(a1, x), a3);
        affine += if b == 0 {
            sq[c as usize]
        } else if k.p() == 2 {
            // y = b w turns the equation into w^2 + w = c / b^2.
            let b2inv = k.inv(k.mul(b, b)).expect("b nonzero");
            artin[k.mul(c, b2inv) as usize]
        } else {
            // (y + b/2)^2 = c + b^2/4.
            sq[k.add(c, k.mul(k.mul(b, b), quarter)) as usize]
        } as u64;
    }
    Ok(affine + points_at_infinity(curve, k))
}

/// Points with `Z = 0` on the homogenised equation
/// `Y^2 Z + a1 XYZ + a3 YZ^2 = X^3 + a2 X^2 Z + a4 X Z^2 + a6 Z^3`,
/// i.e. projective solutions `(X : Y)` of `X^3 = 0`.
fn points_at_infinity(_curve: &CurveSpec, k: &FiniteField) -> u64 {
    let cubic = |x: u64| k.mul(k.mul(x, x), x);
    // (1 : y) for every y, and (0 : 1).
    let with_x_one = if cubic(1) == 0 { k.size() } else { 0 };
    let with_x_zero = u64::from(cubic(0) == 0);
    with_x_one + with_x_zero
}

/// The numerator `P(T)` of the Hasse–Weil zeta function, integer
/// coefficients in ascending powers of `T`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ZetaNumerator {
    q: u64,
    genus: u32,
    coeffs: Vec<i64>,
}

/// Tolerance on `|T| sqrt(q) = 1` for the roots of `P`.
pub const WEIL_TOL: f64 = 1e-8;

/// `P(T)` for a supported curve, checked against the Riemann hypothesis
/// and the functional equation before it is returned.
pub fn zeta_numerator(curve: &CurveSpec) -> Result<ZetaNumerator, ZetaError> {
    let q = curve.p;
    let z = match curve.genus() {
        0 => ZetaNumerator { q, genus: 0, coeffs: vec![1] },
        _ => {
            let n1 = count_points(curve, 1)?;
            let a = q as i64 + 1 - n1 as i64;
            ZetaNumerator { q, genus: 1, coeffs: vec![1, -a, q as i64] }
        }
    };
    let dev = z.weil_deviation();
    if dev > WEIL_TOL {
        return Err(ZetaError::WeilViolation(dev));
    }
    if !z.satisfies_functional_equation() {
        return Err(ZetaError::FunctionalEquation);
    }
    Ok(z)
}

impl ZetaNumerator {
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    /// Coefficients in ascending powers of `T`.
    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn as_poly(&self) -> Poly {
        Poly::from_ints(&self.coeffs)
    }

    /// Roots of `P` in `T`.
    pub fn roots(&self) -> Vec<Root> {
        if self.coeffs.len() <= 1 {
            return Vec::new();
        }
        poly_roots(&self.as_poly(), 1e-10).expect("nonconstant integer polynomial")
    }

    /// `max | |T| sqrt(q) - 1 |` over the roots `T` of `P` (0 for `P = 1`).
    pub fn weil_deviation(&self) -> f64 {
        let sq = libm::sqrt(self.q as f64);
        self.roots().iter().map(|r| libm::fabs(r.value.norm() * sq - 1.0)).fold(0.0, f64::max)
    }

    /// `P(T) = q^g T^{2g} P(1/(qT))`, i.e. `p_{2g-i} = q^{g-i} p_i`, exactly.
    pub fn satisfies_functional_equation(&self) -> bool {
        let n = self.coeffs.len() - 1;
        if n != 2 * self.genus as usize {
            return false;
        }
        let q = self.q as i128;
        (0..=n).all(|i| {
            let (lhs, rhs) = (self.coeffs[n - i] as i128, self.coeffs[i] as i128);
            let g = self.genus as i32;
            let e = g - i as i32;
            if e >= 0 {
                lhs == q.pow(e as u32) * rhs
            } else {
                lhs * q.pow((-e) as u32) == rhs
            }
        })
    }

    /// The count `N_r = q^r + 1 - sum alpha_i^r` predicted by `P` through
    /// Newton's identities on its integer coefficients (`alpha_i` the
    /// reciprocal roots).
    pub fn predicted_count(&self, r: u32) -> i128 {
        // Reciprocal roots are the roots of x^n + c_1 x^{n-1} + ... + c_n.
        let c: Vec<i128> = self.coeffs.iter().map(|&x| x as i128).collect();
        let n = c.len() - 1;
        let mut s: Vec<i128> = vec![n as i128];
        for k in 1..=r as usize {
            let mut acc = 0i128;
            for i in 1..=k.min(n) {
                acc -= c[i] * if i == k { 1 } else { s[k - i] };
            }
            if k <= n {
                acc -= (k as i128 - 1) * c[k];
            }
            s.push(acc);
        }
        (self.q as i128).pow(r) + 1 - s[r as usize]
    }

    /// `q^g P(mu^2)` written in `lambda = sqrt(q) mu`, normalised.
    pub fn lambda_form(&self) -> LambdaPoly {
        let q = BigRational::from_integer(BigInt::from(self.q));
        let g = self.genus as usize;
        let mut out = vec![BigRational::from_integer(0.into()); 2 * self.coeffs.len() - 1];
        let mut qpow = BigRational::from_integer(1.into());
        // q^g p_i T^i with T = lambda^2 / q contributes p_i q^{g-i} lambda^{2i}.
        let mut scale: Vec<BigRational> = Vec::with_capacity(self.coeffs.len());
        for _ in 0..self.coeffs.len() {
            scale.push(qpow.clone());
            qpow = &qpow * &q;
        }
        for (i, &p) in self.coeffs.iter().enumerate() {
            let factor = if i <= g { scale[g - i].clone() } else { BigRational::from_integer(1.into()) / &scale[i - g] };
            out[2 * i] = BigRational::from_integer(p.into()) * factor;
        }
        LambdaPoly::normalize(&Poly::new(out)).expect("nonzero numerator")
    }
}

impl fmt::Display for ZetaNumerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_poly(f, &self.as_poly(), "T")
    }
}

/// Outcome of comparing `P(mu^2)` with a resonance polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceLink {
    pub q: u64,
    /// `q^g P(mu^2)` in `lambda = sqrt(q) mu`.
    pub zeta_factor: LambdaPoly,
    /// The resonance polynomial of the graph.
    pub resonance_polynomial: LambdaPoly,
    pub divides: bool,
    /// The normalised quotient when `divides` holds.
    pub cofactor: Option<LambdaPoly>,
}

impl ResonanceLink {
    /// Roots of the cofactor, mapped to `mu = lambda / sqrt q`.
    pub fn cofactor_roots(&self, tol: f64) -> Vec<Root> {
        let Some(c) = &self.cofactor else { return Vec::new() };
        if c.degree() == 0 {
            return Vec::new();
        }
        let sq = libm::sqrt(self.q as f64);
        let mut rs = poly_roots(c.as_poly(), tol).expect("nonconstant polynomial");
        for r in &mut rs {
            r.value /= Complex64::new(sq, 0.0);
        }
        rs
    }
}

/// Tests whether `P(mu^2)` divides the resonance polynomial of `g` exactly
/// and returns the cofactor. Graphs over a different `q` never match.
pub fn check_resonance_link(g: &GeomFiniteGraph, curve: &CurveSpec) -> Result<ResonanceLink, ResonanceLinkError> {
    let z = zeta_numerator(curve)?;
    let (_, res) = resonance_polynomial(g)?;
    let zf = z.lambda_form();
    let divides = g.q() == curve.p && divides(zf.as_poly(), res.as_poly());
    let cofactor = if divides { res.exact_quotient(&zf) } else { None };
    Ok(ResonanceLink { q: g.q(), zeta_factor: zf, resonance_polynomial: res, divides, cofactor })
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ResonanceLinkError {
    #[error(transparent)]
    Zeta(#[from] ZetaError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}
