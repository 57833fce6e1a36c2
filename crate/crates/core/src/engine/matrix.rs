use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::EngineError;
use crate::algebra::{LaurentPoly, Poly, SqrtQScalar};
use crate::graph::{GeomFiniteGraph, VertexId};

/// `H(mu)` for a valid graph, exactly (Laurent entries), in the scaled
/// `lambda` form, and as floating-point data for numerical evaluation.
#[derive(Debug, Clone)]
pub struct ResonanceMatrix {
    q: u64,
    ids: Vec<VertexId>,
    laurent: Vec<Vec<LaurentPoly>>,
    lambda: Vec<Vec<Poly>>,
    adj: Vec<Vec<f64>>,
    /// `c_v / 2 + f_v / (2 q)`: the `1/mu` coefficient contributed by the ends.
    end_coeff: Vec<f64>,
}

/// Builds `H(mu)`; the graph must pass validation.
pub fn build_h(g: &GeomFiniteGraph) -> Result<ResonanceMatrix, EngineError> {
    let violations = g.validate();
    if !violations.is_empty() {
        return Err(EngineError::Invalid(violations));
    }
    let q = g.q();
    let qr = BigRational::from_integer(BigInt::from(q));
    let two_q = &qr * BigRational::from_integer(2.into());
    let half = BigRational::new(1.into(), 2.into());
    let m = g.operator_matrix();
    let n = g.len();
    let ids: Vec<VertexId> = g.core().vertices().iter().map(|v| v.id).collect();
    let mut laurent = Vec::with_capacity(n);
    let mut lambda = Vec::with_capacity(n);
    let mut end_coeff = Vec::with_capacity(n);
    for (v, &id) in ids.iter().enumerate() {
        let (c, f) = (g.cusp_weight(id), g.funnel_weight(id));
        let mut lrow = Vec::with_capacity(n);
        let mut prow = Vec::with_capacity(n);
        for w in 0..n {
            let a = m.get(v, w);
            // a / (2 sqrt q) = a sqrt(q) / (2q)
            let off = SqrtQScalar::new(q, BigRational::zero(), a / &two_q);
            if v == w {
                let inv_mu = &c * &half + &f / &two_q - &half;
                lrow.push(LaurentPoly::from_terms(
                    q,
                    [
                        (0, off),
                        (-1, SqrtQScalar::from_rational(q, inv_mu)),
                        (1, SqrtQScalar::from_rational(q, -half.clone())),
                    ],
                ));
                prow.push(Poly::new(alloc::vec![&qr * &c + &f - &qr, a.clone(), BigRational::from_integer((-1).into())]));
            } else {
                lrow.push(LaurentPoly::constant(off));
                prow.push(Poly::new(alloc::vec![BigRational::zero(), a.clone()]));
            }
        }
        laurent.push(lrow);
        lambda.push(prow);
        end_coeff.push((c * &half + f / &two_q).to_f64().unwrap_or(f64::NAN));
    }
    Ok(ResonanceMatrix { q, ids, laurent, lambda, adj: m.to_f64(), end_coeff })
}

impl ResonanceMatrix {
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Vertex ids in row order.
    pub fn ids(&self) -> &[VertexId] {
        &self.ids
    }

    /// Exact entries of `H(mu)`.
    pub fn laurent(&self) -> &[Vec<LaurentPoly>] {
        &self.laurent
    }

    /// Exact entries of `2 q mu H(mu)` as polynomials in `lambda`.
    pub fn lambda_form(&self) -> &[Vec<Poly>] {
        &self.lambda
    }

    /// Exact entries of `2 q mu H(mu)` as Laurent polynomials in `mu`.
    pub fn scaled_laurent(&self) -> Vec<Vec<LaurentPoly>> {
        let s = LaurentPoly::monomial(SqrtQScalar::from_int(self.q, 2 * self.q as i64), 1);
        self.laurent.iter().map(|r| r.iter().map(|x| x * &s).collect()).collect()
    }

    /// Numerical `H(mu)`.
    pub fn eval(&self, mu: Complex64) -> DMatrix<Complex64> {
        let n = self.len();
        let norm = 1.0 / (2.0 * libm::sqrt(self.q as f64));
        let z = (mu + mu.inv()) * 0.5;
        DMatrix::from_fn(n, n, |v, w| {
            let mut x = Complex64::new(self.adj[v][w] * norm, 0.0);
            if v == w {
                x += self.end_coeff[v] / mu - z;
            }
            x
        })
    }

    /// Numerical `2 q mu H(mu)` at `lambda = sqrt(q) mu`.
    pub fn eval_lambda(&self, lambda: Complex64) -> DMatrix<Complex64> {
        let n = self.len();
        let q = self.q as f64;
        DMatrix::from_fn(n, n, |v, w| {
            let mut x = lambda * self.adj[v][w];
            if v == w {
                x += 2.0 * q * self.end_coeff[v] - lambda * lambda - q;
            }
            x
        })
    }

    /// Derivative of [`Self::eval_lambda`] with respect to `lambda`.
    pub fn eval_lambda_derivative(&self, lambda: Complex64) -> DMatrix<Complex64> {
        let n = self.len();
        DMatrix::from_fn(n, n, |v, w| {
            let mut x = Complex64::new(self.adj[v][w], 0.0);
            if v == w {
                x -= lambda * 2.0;
            }
            x
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{laurent_det, poly_det, rat, to_lambda, LambdaPoly};
    use crate::fixtures;

    #[test]
    fn tree_entry() {
        // 3/(4 mu) - (mu + 1/mu)/2 for q = 2
        let h = build_h(&fixtures::tree(2)).unwrap();
        let expected = LaurentPoly::from_terms(
            2,
            [(-1, SqrtQScalar::from_rational(2, rat(1, 4))), (1, SqrtQScalar::from_rational(2, rat(-1, 2)))],
        );
        assert_eq!(h.laurent()[0][0], expected);
        let d = laurent_det(2, h.laurent()).unwrap();
        assert_eq!(d, expected);
    }

    #[test]
    fn parabolic_entry() {
        for q in [2, 3, 7] {
            let h = build_h(&fixtures::parabolic(q)).unwrap();
            let expected = LaurentPoly::from_terms(
                q,
                [(1, SqrtQScalar::from_rational(q, rat(-1, 2))), (-1, SqrtQScalar::from_rational(q, rat(1, 2)))],
            );
            // (mu^{-1} - mu)/2, i.e. -(mu - mu^{-1})/2
            assert_eq!(h.laurent()[0][0], expected);
        }
    }

    #[test]
    fn hyperbolic_cylinder_is_circulant() {
        let (q, n) = (3u64, 6usize);
        let h = build_h(&fixtures::hyperbolic_cylinder(q, n)).unwrap();
        let off = LaurentPoly::constant(SqrtQScalar::new(q, rat(0, 1), rat(1, 2 * q as i64)));
        let diag = LaurentPoly::from_terms(
            q,
            [
                (-1, SqrtQScalar::from_rational(q, rat(q as i64 - 1, 2 * q as i64) - rat(1, 2))),
                (1, SqrtQScalar::from_rational(q, rat(-1, 2))),
            ],
        );
        for v in 0..n {
            for w in 0..n {
                let d = (w + n - v) % n;
                let e = match d {
                    0 => diag.clone(),
                    1 => off.clone(),
                    _ if d == n - 1 => off.clone(),
                    _ => LaurentPoly::zero(q),
                };
                assert_eq!(h.laurent()[v][w], e, "entry ({v}, {w})");
            }
        }
    }

    #[test]
    fn lambda_form_matches_exact_determinant() {
        for g in [fixtures::elliptic_f2(), fixtures::hyperbolic_cylinder(2, 4), fixtures::modular(3)] {
            let h = build_h(&g).unwrap();
            let (_, from_laurent) = to_lambda(&laurent_det(h.q(), &h.scaled_laurent()).unwrap()).unwrap();
            let p = poly_det(h.lambda_form()).unwrap();
            let stripped = Poly::new(p.coeffs().iter().skip_while(|c| c.is_zero()).cloned().collect());
            assert_eq!(LambdaPoly::normalize(&stripped).unwrap(), from_laurent);
        }
    }

    #[test]
    fn numeric_forms_agree() {
        let g = fixtures::elliptic_f3();
        let h = build_h(&g).unwrap();
        let mu = Complex64::new(0.3, -1.1);
        let lam = mu * libm::sqrt(3.0);
        let a = h.eval(mu) * (mu * 6.0);
        let b = h.eval_lambda(lam);
        assert!((a - b).norm() < 1e-12);
        for v in 0..h.len() {
            for w in 0..h.len() {
                assert!((h.laurent()[v][w].eval(mu) - h.eval(mu)[(v, w)]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn invalid_graph_rejected() {
        let core = crate::graph::StabilizerGraph::unweighted(1, &[]).unwrap();
        let g = GeomFiniteGraph::compact(2, core).unwrap();
        assert!(matches!(build_h(&g), Err(EngineError::Invalid(_))));
    }
}
