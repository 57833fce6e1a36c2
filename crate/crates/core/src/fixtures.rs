//! Standard worked examples.
//!
//! | fixture | core | ends |
//! |---|---|---|
//! | [`tree`] | one vertex | `q + 1` funnels |
//! | [`parabolic`] | one vertex | one cusp, `q` funnels |
//! | [`hyperbolic_cylinder`] | `N`-cycle | `q - 1` funnels per vertex |
//! | [`modular`] | one vertex | one cusp of weight `q + 1` |
//! | [`elliptic_f2`], [`elliptic_f3`] | quotients of the tree by `GL_2` of the coordinate ring of an elliptic curve minus a point | cusps |
//!
//! The elliptic lattices are built from the classification of rank-two
//! bundles on the curve. Writing `E` for the group of rational points:
//!
//! * `S` — the stable bundle class, stabilizer `1`;
//! * `X_L` for each pair `{L, -L}` of points of order > 2: stabilizer
//!   `q - 1`, two cusps, joined to `S` (weight `q - 1` towards `S`);
//! * for each 2-torsion point (including the origin) a chain
//!   `D_L — C_L — F_L — S` with stabilizers `q(q^2 - 1)`, `q(q - 1)`, `q`;
//!   `C_L` carries one cusp;
//! * `R_N` for each conjugate pair of norm-one points over `F_{q^2}` not
//!   defined over `F_q`: stabilizer `q + 1`, joined to `S`.
//!
//! (All stabilizers are divided by the common central factor `q - 1`.)

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::graph::{Edge, GeomFiniteGraph, StabilizerGraph, Vertex, VertexId};
use crate::zeta::CurveSpec;

fn int(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn single_vertex(q: u64, cusp: u64, funnel: u64) -> GeomFiniteGraph {
    let core = StabilizerGraph::unweighted(1, &[]).expect("valid core");
    let ends = |w: u64| if w == 0 { BTreeMap::new() } else { BTreeMap::from([(0, int(w))]) };
    GeomFiniteGraph::new(q, core, ends(cusp), ends(funnel)).expect("valid fixture")
}

/// The `(q+1)`-regular tree: a single vertex with `q + 1` attached funnels.
pub fn tree(q: u64) -> GeomFiniteGraph {
    single_vertex(q, 0, q + 1)
}

/// The parabolic cylinder: a single vertex with one cusp and `q` funnels.
pub fn parabolic(q: u64) -> GeomFiniteGraph {
    single_vertex(q, 1, q)
}

/// The modular-curve model: a single vertex attached `q + 1` times to a
/// cusp.
pub fn modular(q: u64) -> GeomFiniteGraph {
    single_vertex(q, q + 1, 0)
}

/// The hyperbolic cylinder: a cycle of length `n` with `q - 1` funnels at
/// every vertex. `n = 2` uses two parallel edges, `n = 1` a loop.
pub fn hyperbolic_cylinder(q: u64, n: usize) -> GeomFiniteGraph {
    assert!(n >= 1 && q >= 1);
    let edges: Vec<(VertexId, VertexId)> = (0..n).map(|i| (i as VertexId, ((i + 1) % n) as VertexId)).collect();
    let core = StabilizerGraph::unweighted(n, &edges).expect("valid core");
    let funnels = if q > 1 { (0..n as VertexId).map(|v| (v, int(q - 1))).collect() } else { BTreeMap::new() };
    GeomFiniteGraph::new(q, core, BTreeMap::new(), funnels).expect("valid fixture")
}

/// Quotient of the tree by the arithmetic lattice of an elliptic curve over
/// `F_q`, given the number of `{L, -L}` pairs of points of order > 2, the
/// number of 2-torsion points (origin included) and the number of conjugate
/// norm-one pairs over `F_{q^2}`. Vertex ids: `S = 0`, then the `X_L`, then
/// `D, C, F` per 2-torsion point, then the `R_N`.
pub fn elliptic_lattice(q: u64, pairs: usize, two_torsion: usize, norm_pairs: usize) -> GeomFiniteGraph {
    let mut vertices = alloc::vec![Vertex::new(0, int(1))];
    let mut edges = Vec::new();
    let mut cusps = BTreeMap::new();
    let mut next: VertexId = 1;
    let mut fresh = || {
        let id = next;
        next += 1;
        id
    };
    for _ in 0..pairs {
        let x = fresh();
        vertices.push(Vertex::new(x, int(q - 1)));
        edges.push(Edge::new(x, 0, int(1)));
        cusps.insert(x, int(2));
    }
    for _ in 0..two_torsion {
        let (d, c, f) = (fresh(), fresh(), fresh());
        vertices.push(Vertex::new(d, int(q * (q * q - 1))));
        vertices.push(Vertex::new(c, int(q * (q - 1))));
        vertices.push(Vertex::new(f, int(q)));
        edges.push(Edge::new(d, c, int(q * (q - 1))));
        edges.push(Edge::new(c, f, int(q)));
        edges.push(Edge::new(f, 0, int(1)));
        cusps.insert(c, int(1));
    }
    for _ in 0..norm_pairs {
        let r = fresh();
        vertices.push(Vertex::new(r, int(q + 1)));
        edges.push(Edge::new(r, 0, int(1)));
    }
    let core = StabilizerGraph::new(vertices, edges).expect("valid core");
    GeomFiniteGraph::new(q, core, cusps, BTreeMap::new()).expect("valid fixture")
}

/// The lattice for `y^2 + y = x^3 + x + 1` over `F_2` (one rational point).
pub fn elliptic_f2() -> GeomFiniteGraph {
    elliptic_lattice(2, 0, 1, 2)
}

/// The lattice for `y^2 = x^3 + x + 1` over `F_3` (four rational points:
/// the origin, one further 2-torsion point and one pair `{L, -L}`).
pub fn elliptic_f3() -> GeomFiniteGraph {
    elliptic_lattice(3, 1, 2, 1)
}

/// `y^2 + y = x^3 + x + 1` over `F_2`.
pub fn curve_f2() -> CurveSpec {
    CurveSpec::weierstrass(2, [0, 1, 0, 1, 1]).expect("smooth curve")
}

/// `y^2 = x^3 + x + 1` over `F_3`.
pub fn curve_f3() -> CurveSpec {
    CurveSpec::weierstrass(3, [0, 0, 0, 1, 1]).expect("smooth curve")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{poly_det, LambdaPoly, Poly};
    use crate::engine::{build_h, resonance_polynomial};

    #[test]
    fn all_fixtures_are_valid() {
        for q in 1..6 {
            for g in [tree(q), parabolic(q), modular(q)] {
                assert!(g.is_valid(), "{:?}", g.validate());
            }
            for n in 1..8 {
                assert!(hyperbolic_cylinder(q, n).is_valid());
            }
        }
        assert!(elliptic_f2().is_valid(), "{:?}", elliptic_f2().validate());
        assert!(elliptic_f3().is_valid(), "{:?}", elliptic_f3().validate());
        assert_eq!(elliptic_f2().len(), 6);
        assert_eq!(elliptic_f3().len(), 9);
    }

    #[test]
    fn elliptic_f2_determinant() {
        // lambda^2 (lambda^2 - 4)(lambda^2 + 2)^2 (lambda^4 - 2 lambda^2 + 2)
        let f = [
            Poly::from_ints(&[0, 0, 1]),
            Poly::from_ints(&[-4, 0, 1]),
            Poly::from_ints(&[2, 0, 1]),
            Poly::from_ints(&[2, 0, 1]),
            Poly::from_ints(&[2, 0, -2, 0, 1]),
        ];
        let want = f.iter().fold(Poly::one(), |acc, p| &acc * p);
        let got = poly_det(build_h(&elliptic_f2()).unwrap().lambda_form()).unwrap();
        assert_eq!(LambdaPoly::normalize(&got).unwrap(), LambdaPoly::normalize(&want).unwrap());
        let (k, _) = resonance_polynomial(&elliptic_f2()).unwrap();
        assert_eq!(k, 2);
    }

    #[test]
    fn elliptic_f3_determinant() {
        // lambda^4 (lambda^2 - 9)(lambda^2 - 3)^2 (lambda^2 + 3)^2 (lambda^4 + 3)
        let f = [
            Poly::from_ints(&[0, 0, 0, 0, 1]),
            Poly::from_ints(&[-9, 0, 1]),
            Poly::from_ints(&[-3, 0, 1]),
            Poly::from_ints(&[-3, 0, 1]),
            Poly::from_ints(&[3, 0, 1]),
            Poly::from_ints(&[3, 0, 1]),
            Poly::from_ints(&[3, 0, 0, 0, 1]),
        ];
        let want = f.iter().fold(Poly::one(), |acc, p| &acc * p);
        let got = poly_det(build_h(&elliptic_f3()).unwrap().lambda_form()).unwrap();
        assert_eq!(LambdaPoly::normalize(&got).unwrap(), LambdaPoly::normalize(&want).unwrap());
    }
}
