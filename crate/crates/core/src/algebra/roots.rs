use alloc::vec::Vec;

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

use super::modp;
use super::{AlgebraError, Poly};

/// Default relative clustering tolerance for [`poly_roots`].
pub const DEFAULT_ROOT_TOL: f64 = 1e-8;

/// A complex root together with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub value: Complex64,
    pub multiplicity: usize,
}

/// All complex roots of a rational polynomial with multiplicities.
///
/// Multiplicities come from an exact square-free decomposition; each
/// square-free factor is solved through the eigenvalues of its (rescaled)
/// companion matrix and every root is then polished by Newton's method on
/// that factor. Roots closer than `tol * max(1, |root|)` are merged. The
/// multiplicities always sum to the degree.
pub fn poly_roots(p: &Poly, tol: f64) -> Result<Vec<Root>, AlgebraError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(AlgebraError::BadTolerance(tol));
    }
    let deg = p.degree().ok_or(AlgebraError::ZeroPolynomial)?;
    if deg == 0 {
        return Err(AlgebraError::ConstantPolynomial);
    }
    let mut roots = Vec::new();
    // Zero roots are exact.
    let zeros = p.coeffs().iter().take_while(|c| c.is_zero()).count();
    if zeros > 0 {
        roots.push(Root { value: Complex64::new(0.0, 0.0), multiplicity: zeros });
    }
    let rest = Poly::new(p.coeffs()[zeros..].to_vec());
    if rest.degree().unwrap_or(0) > 0 {
        for (factor, mult) in square_free_parts(&rest) {
            for value in square_free_roots(&factor) {
                roots.push(Root { value, multiplicity: mult });
            }
        }
    }
    Ok(conjugate_symmetrize(merge(roots, tol)))
}

/// Square-free decomposition with a cheap modular shortcut for the common
/// case `gcd(p, p') = 1`.
fn square_free_parts(p: &Poly) -> Vec<(Poly, usize)> {
    let prim = p.primitive_part();
    if modular_coprime_with_derivative(&prim) {
        return alloc::vec![(prim.monic(), 1)];
    }
    prim.square_free_decomposition()
}

/// `true` proves `gcd(p, p') = 1` over `Q`; `false` is inconclusive.
fn modular_coprime_with_derivative(p: &Poly) -> bool {
    let prime = modp::large_primes().next().unwrap();
    let ints: Vec<_> = p.coeffs().iter().map(|c| c.to_integer()).collect();
    let f: Vec<u64> = ints.iter().map(|c| modp::reduce(c, prime)).collect();
    let n = f.len() - 1;
    if f[n] == 0 || (n as u64) % prime == 0 {
        return false;
    }
    let df: Vec<u64> = (1..=n).map(|i| modp::mul_mod(f[i], i as u64, prime)).collect();
    gcd_degree_mod(f, df, prime) == 0
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn gcd_degree_mod(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> usize {
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        // a <- a mod b
        let inv = modp::inv_mod(*b.last().unwrap(), p);
        while a.len() >= b.len() {
            let shift = a.len() - b.len();
            let c = modp::mul_mod(*a.last().unwrap(), inv, p);
            for (j, &bj) in b.iter().enumerate() {
                a[shift + j] = modp::sub_mod(a[shift + j], modp::mul_mod(c, bj, p), p);
            }
            trim(&mut a);
        }
        core::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

/// Roots of a square-free polynomial with nonzero constant term.
fn square_free_roots(f: &Poly) -> Vec<Complex64> {
    let c: Vec<f64> = f.to_f64();
    let d = c.len() - 1;
    if d == 1 {
        return alloc::vec![Complex64::new(-c[0] / c[1], 0.0)];
    }
    let exact: Vec<Complex64> = exact_coeffs(f);
    // Translating the variable breaks the symmetry of permutation-like
    // companion matrices (e.g. x^n - 1) on which unshifted QR can stall.
    for shift in [0.0, 0.3183098861837907, -0.5772156649015329, 1.4142135623730951] {
        if let Some(eig) = companion_eigenvalues(&translate(&c, shift)) {
            return eig.into_iter().map(|z| newton_polish(&exact, z + shift)).collect();
        }
    }
    unreachable!("QR iteration failed for every shifted companion matrix")
}

/// Coefficients of `p(y + t)` in `y`.
fn translate(c: &[f64], t: f64) -> Vec<f64> {
    if t == 0.0 {
        return c.to_vec();
    }
    // repeated synthetic division (Taylor shift)
    let mut a = c.to_vec();
    let n = a.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            a[j] += t * a[j + 1];
        }
    }
    a
}

/// Eigenvalues of the companion matrix after rescaling `x = s y`, so that
/// the roots of the scaled polynomial cluster near the unit circle.
fn companion_eigenvalues(c: &[f64]) -> Option<Vec<Complex64>> {
    let d = c.len() - 1;
    let s = libm::pow((c[0] / c[d]).abs(), 1.0 / d as f64);
    let s = if s.is_finite() && s > 0.0 { s } else { 1.0 };
    let mut scaled: Vec<f64> = Vec::with_capacity(d + 1);
    let mut pow = 1.0;
    for &ci in c {
        scaled.push(ci * pow);
        pow *= s;
    }
    let lead = scaled[d];
    let mut m = DMatrix::<f64>::zeros(d, d);
    for i in 1..d {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..d {
        m[(i, d - 1)] = -scaled[i] / lead;
    }
    let schur = Schur::try_new(m, f64::EPSILON, 200 * d.max(10))?;
    Some(schur.complex_eigenvalues().iter().map(|z| Complex64::new(z.re * s, z.im * s)).collect())
}

fn exact_coeffs(f: &Poly) -> Vec<Complex64> {
    f.coeffs().iter().map(|c| Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0)).collect()
}

fn horner(c: &[Complex64], x: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::zero();
    let mut dp = Complex64::zero();
    for &a in c.iter().rev() {
        dp = dp * x + p;
        p = p * x + a;
    }
    (p, dp)
}

fn newton_polish(c: &[Complex64], mut x: Complex64) -> Complex64 {
    let (mut fx, mut dfx) = horner(c, x);
    for _ in 0..60 {
        if dfx.norm() == 0.0 || fx.norm() == 0.0 {
            break;
        }
        let step = fx / dfx;
        let y = x - step;
        let (fy, dfy) = horner(c, y);
        if !(fy.norm() < fx.norm()) {
            break;
        }
        x = y;
        fx = fy;
        dfx = dfy;
        if step.norm() <= 1e-16 * x.norm().max(1e-300) {
            break;
        }
    }
    x
}

/// Enforces the symmetry of roots of real polynomials: imaginary parts
/// below `1e-13 max(1, |z|)` become exactly zero, and each root in the
/// upper half plane is paired with the nearest lower-half-plane root of the
/// same multiplicity (within `1e-8 max(1, |z|)`), both replaced by the
/// conjugate pair through their mean.
pub(crate) fn conjugate_symmetrize(mut roots: Vec<Root>) -> Vec<Root> {
    for r in roots.iter_mut() {
        let scale = r.value.norm().max(1.0);
        if r.value.im.abs() <= 1e-13 * scale {
            r.value.im = 0.0;
        }
        // normalise negative zeros so that output is sign-stable
        r.value.re += 0.0;
    }
    let mut paired = alloc::vec![false; roots.len()];
    for i in 0..roots.len() {
        if paired[i] || roots[i].value.im <= 0.0 {
            continue;
        }
        let a = roots[i];
        let best = (0..roots.len())
            .filter(|&j| !paired[j] && j != i && roots[j].value.im < 0.0 && roots[j].multiplicity == a.multiplicity)
            .min_by(|&j, &k| {
                (roots[j].value.conj() - a.value).norm().total_cmp(&(roots[k].value.conj() - a.value).norm())
            });
        if let Some(j) = best {
            if (roots[j].value.conj() - a.value).norm() <= 1e-8 * a.value.norm().max(1.0) {
                let mean = (a.value + roots[j].value.conj()) * 0.5;
                roots[i].value = mean;
                roots[j].value = mean.conj();
                paired[i] = true;
                paired[j] = true;
            }
        }
    }
    roots
}

/// Greedy clustering: a root joins the first earlier cluster within
/// `tol * max(1, |root|)` of its representative.
fn merge(roots: Vec<Root>, tol: f64) -> Vec<Root> {
    let mut out: Vec<Root> = Vec::new();
    for r in roots {
        let radius = tol * r.value.norm().max(1.0);
        match out.iter_mut().find(|o| (o.value - r.value).norm() <= radius) {
            Some(o) => {
                // keep the representative weighted toward the larger cluster
                let (a, b) = (o.multiplicity as f64, r.multiplicity as f64);
                o.value = (o.value * a + r.value * b) / (a + b);
                o.multiplicity += r.multiplicity;
            }
            None => out.push(r),
        }
    }
    out
}
