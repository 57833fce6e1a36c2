use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;

use super::states::{rank_scale, singular_values};
use super::{build_h, check_tol, EngineError, ResonanceMatrix};
use crate::algebra::{conjugate_symmetrize, poly_det, poly_roots, LambdaPoly, Poly, Root};
use crate::graph::GeomFiniteGraph;

/// A resonance `mu` with its order as a root of the resonance polynomial,
/// the dimension of `ker H(mu)` and the relative smallest singular value
/// `sigma_min / max(sigma_max, (|mu| + 1/|mu|)/2)` of `H(mu)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resonance {
    pub mu: Complex64,
    pub root_multiplicity: usize,
    pub kernel_dim: usize,
    pub residual: f64,
}

/// `(k, P)` with `det(2 q mu H(mu)) = unit * mu^k * P(sqrt(q) mu)`, `P`
/// normalised and `P(0) != 0`.
pub fn resonance_polynomial(g: &GeomFiniteGraph) -> Result<(i64, LambdaPoly), EngineError> {
    polynomial_of(&build_h(g)?)
}

pub(crate) fn polynomial_of(h: &ResonanceMatrix) -> Result<(i64, LambdaPoly), EngineError> {
    let det = poly_det(h.lambda_form())?;
    let k = det.coeffs().iter().take_while(|c| c.is_zero()).count();
    let p = LambdaPoly::normalize(&Poly::new(det.coeffs()[k..].to_vec()))?;
    assert!(p.degree() <= 2 * h.len(), "resonance polynomial degree exceeds 2|L|");
    Ok((k as i64, p))
}

/// All resonances of a valid graph.
pub fn find_resonances(g: &GeomFiniteGraph, tol: f64) -> Result<Vec<Resonance>, EngineError> {
    check_tol(tol)?;
    resonances_of(&build_h(g)?, tol)
}

/// All resonances from an already built resonance matrix: the nonzero
/// roots `lambda` of the resonance polynomial mapped to `mu = lambda/sqrt q`,
/// each refined by Newton's method on `det H` and annotated with kernel data.
pub fn resonances_of(h: &ResonanceMatrix, tol: f64) -> Result<Vec<Resonance>, EngineError> {
    check_tol(tol)?;
    let (_, p) = polynomial_of(h)?;
    if p.degree() == 0 {
        return Ok(Vec::new());
    }
    let sq = libm::sqrt(h.q() as f64);
    let refined: Vec<Root> = poly_roots(p.as_poly(), tol)?
        .into_iter()
        .map(|r| Root { value: refine(h, r.value, r.multiplicity), multiplicity: r.multiplicity })
        .collect();
    let mut out = Vec::new();
    for root in conjugate_symmetrize(refined) {
        let mu = root.value / sq;
        let s = singular_values(&h.eval(mu));
        let smax = rank_scale(&s, mu);
        let kernel_dim = s.iter().filter(|&&x| x <= tol * smax).count();
        let smin = s.iter().cloned().fold(f64::INFINITY, f64::min);
        out.push(Resonance { mu, root_multiplicity: root.multiplicity, kernel_dim, residual: smin / smax });
    }
    assert!(out.len() <= 2 * h.len(), "more than 2|L| distinct resonances");
    out.sort_by(|a, b| a.mu.re.total_cmp(&b.mu.re).then(a.mu.im.total_cmp(&b.mu.im)));
    if is_odd_symmetric(&out, tol) {
        log::debug!("resonance set is symmetric under mu -> -mu");
    }
    Ok(out)
}

fn is_odd_symmetric(rs: &[Resonance], tol: f64) -> bool {
    rs.iter().all(|r| {
        rs.iter().any(|s| {
            (s.mu + r.mu).norm() <= tol * r.mu.norm().max(1.0) && s.root_multiplicity == r.root_multiplicity
        })
    })
}

/// `log |det M|` and `tr(M^{-1} D)` from one LU factorisation, or `None`
/// if `M` is exactly singular.
fn log_det_and_trace(m: DMatrix<Complex64>, d: &DMatrix<Complex64>) -> Option<(f64, Complex64)> {
    let lu = m.lu();
    let u = lu.u();
    let mut log_det = 0.0;
    for i in 0..u.nrows() {
        let x = u[(i, i)].norm();
        if x == 0.0 {
            return None;
        }
        log_det += libm::log(x);
    }
    let x = lu.solve(d)?;
    Some((log_det, x.trace()))
}

/// Newton's method on `det Q(lambda)` for `Q = 2 q mu H`, using
/// `det'/det = tr(Q^{-1} Q')` and the known multiplicity `m`. A step is
/// only taken while it decreases `|det Q|` and stays within `1e-6 max(1,
/// |lambda|)`, so a root cannot wander to a neighbour.
fn refine(h: &ResonanceMatrix, lambda0: Complex64, m: usize) -> Complex64 {
    let mut lambda = lambda0;
    let Some((mut cur, mut tr)) = log_det_and_trace(h.eval_lambda(lambda), &h.eval_lambda_derivative(lambda))
    else {
        return lambda;
    };
    let cap = 1e-6 * lambda0.norm().max(1.0);
    for _ in 0..30 {
        if tr.norm() == 0.0 {
            break;
        }
        let next = lambda - Complex64::new(m as f64, 0.0) / tr;
        if (next - lambda0).norm() > cap {
            break;
        }
        match log_det_and_trace(h.eval_lambda(next), &h.eval_lambda_derivative(next)) {
            None => return next,
            Some((val, t)) if val < cur => {
                let step = (next - lambda).norm();
                lambda = next;
                cur = val;
                tr = t;
                if step <= 1e-16 * lambda.norm() {
                    break;
                }
            }
            _ => break,
        }
    }
    lambda
}

/// Comparison of resonance data with the a-priori bounds: at most `2|L|`
/// distinct resonances, and `kernel_dim <= 3 (|L| + n_c + (q+1) n_f)^2` with
/// `n_c = ceil(sum c_v)`, `n_f = ceil(sum f_v)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundsReport {
    pub distinct: usize,
    pub distinct_bound: usize,
    pub max_kernel_dim: usize,
    pub kernel_dim_bound: u64,
}

impl BoundsReport {
    pub fn ok(&self) -> bool {
        self.distinct <= self.distinct_bound && self.max_kernel_dim as u64 <= self.kernel_dim_bound
    }
}

pub fn check_bounds(g: &GeomFiniteGraph, resonances: &[Resonance]) -> BoundsReport {
    let (nc, nf) = g.end_counts();
    let l = g.len() as u64;
    let t = l + nc + (g.q() + 1) * nf;
    BoundsReport {
        distinct: resonances.len(),
        distinct_bound: 2 * g.len(),
        max_kernel_dim: resonances.iter().map(|r| r.kernel_dim).max().unwrap_or(0),
        kernel_dim_bound: 3 * t * t,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::DEFAULT_TOL;
    use crate::fixtures;

    fn mus(g: &GeomFiniteGraph) -> Vec<Resonance> {
        find_resonances(g, DEFAULT_TOL).unwrap()
    }

    #[test]
    fn tree_resonances() {
        for q in [2u64, 3, 5] {
            let r = mus(&fixtures::tree(q));
            let s = 1.0 / libm::sqrt(q as f64);
            assert_eq!(r.len(), 2);
            assert!((r[0].mu - Complex64::new(-s, 0.0)).norm() < 1e-12);
            assert!((r[1].mu - Complex64::new(s, 0.0)).norm() < 1e-12);
            assert!(r.iter().all(|x| x.root_multiplicity == 1 && x.kernel_dim == 1));
            assert!(check_bounds(&fixtures::tree(q), &r).ok());
        }
    }

    #[test]
    fn polynomial_examples() {
        let (_, p) = resonance_polynomial(&fixtures::tree(2)).unwrap();
        assert_eq!(p, LambdaPoly::from_ints(&[-1, 0, 1]).unwrap());
        let (_, p) = resonance_polynomial(&fixtures::parabolic(5)).unwrap();
        assert_eq!(p, LambdaPoly::from_ints(&[-5, 0, 1]).unwrap());
        let (_, p) = resonance_polynomial(&fixtures::modular(3)).unwrap();
        assert_eq!(p, LambdaPoly::from_ints(&[-9, 0, 1]).unwrap());
    }

    #[test]
    fn modular_resonances() {
        for q in [2u64, 3, 4] {
            let r = mus(&fixtures::modular(q));
            let s = libm::sqrt(q as f64);
            assert_eq!(r.len(), 2);
            assert!((r[0].mu + s).norm() < 1e-12 && (r[1].mu - s).norm() < 1e-12);
        }
    }

    #[test]
    fn refined_roots_are_singular() {
        let g = fixtures::elliptic_f3();
        for r in mus(&g) {
            assert!(r.residual < 1e-12, "{r:?}");
            assert!(r.kernel_dim >= 1);
        }
    }

    #[test]
    fn bad_tolerance() {
        assert_eq!(find_resonances(&fixtures::tree(2), -1.0), Err(EngineError::BadTolerance(-1.0)));
    }
}
