use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use nalgebra::DVector;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::states::{equation_residual, extend_outgoing, rank_scale, singular_values, OutgoingExtension};
use super::{build_h, check_mu, check_tol, resonances_of, EngineError};
use crate::graph::{Edge, EndKind, GeomFiniteGraph, StabilizerGraph, Vertex, VertexId};

/// The continued resolvent applied to a core-supported `f`: the unique
/// purely outgoing `u` of constant type with `(A/(2 sqrt q) - z(mu)) u = f`,
/// i.e. `H(mu) u_core = f` extended outgoingly, truncated at `depth`.
///
/// Fails with [`EngineError::Singular`] when `sigma_min(H) <= tol
/// max(sigma_max, (|mu| + 1/|mu|)/2)`.
pub fn apply_resolvent(
    g: &GeomFiniteGraph,
    f: &[Complex64],
    mu: Complex64,
    depth: usize,
    tol: f64,
) -> Result<OutgoingExtension, EngineError> {
    check_tol(tol)?;
    check_mu(mu)?;
    if f.len() != g.len() {
        return Err(EngineError::SourceLength { expected: g.len(), got: f.len() });
    }
    let h = build_h(g)?;
    let m = h.eval(mu);
    let s = singular_values(&m);
    let smax = rank_scale(&s, mu);
    let smin = s.iter().cloned().fold(f64::INFINITY, f64::min);
    let solution = if smin <= tol * smax { None } else { m.lu().solve(&DVector::from_column_slice(f)) };
    let Some(u) = solution else {
        let nearest = resonances_of(&h, tol)
            .ok()
            .and_then(|rs| rs.into_iter().map(|r| r.mu).min_by(|a, b| (a - mu).norm().total_cmp(&(b - mu).norm())));
        return Err(EngineError::Singular { mu, nearest });
    };
    let core: Vec<Complex64> = u.iter().cloned().collect();
    Ok(extend_outgoing(g, &core, mu, depth))
}

/// Largest deviation `|((A/(2 sqrt q) - z(mu)) u - f)(x)|` over the core and
/// the interior levels of every end.
pub fn resolvent_residual(g: &GeomFiniteGraph, ext: &OutgoingExtension, f: &[Complex64]) -> f64 {
    equation_residual(g, ext, Some(f))
}

fn fresh_ids(g: &GeomFiniteGraph, count: usize) -> Vec<VertexId> {
    let next = g.core().vertices().iter().map(|v| v.id).max().map_or(0, |m| m + 1);
    (next..next + count as VertexId).collect()
}

fn rebuild(
    g: &GeomFiniteGraph,
    new_vertices: Vec<Vertex>,
    new_edges: Vec<Edge>,
    cusps: BTreeMap<VertexId, BigRational>,
    funnels: BTreeMap<VertexId, BigRational>,
) -> Result<GeomFiniteGraph, EngineError> {
    let mut vertices = g.core().vertices().to_vec();
    vertices.extend(new_vertices);
    let mut edges = g.core().edges().to_vec();
    edges.extend(new_edges);
    Ok(GeomFiniteGraph::new(g.q(), StabilizerGraph::new(vertices, edges)?, cusps, funnels)?)
}

/// Moves the first `levels` levels of the cusp attached at `vertex` into the
/// core. With cusp weight `c` and `s = stab(vertex)`, level `j` becomes a
/// vertex of stabilizer `q^j s / c`; the new outermost vertex carries a
/// cusp of weight 1. Returns the new graph and the ids of the added levels.
pub fn absorb_cusp(
    g: &GeomFiniteGraph,
    vertex: VertexId,
    levels: usize,
) -> Result<(GeomFiniteGraph, Vec<VertexId>), EngineError> {
    let c = g.cusp_weight(vertex);
    if c.is_zero() {
        return Err(EngineError::NoEnd { vertex, kind: EndKind::Cusp });
    }
    if levels == 0 {
        return Ok((g.clone(), Vec::new()));
    }
    let q = BigRational::from_integer(BigInt::from(g.q()));
    let ids = fresh_ids(g, levels);
    let s = g.core().stab(vertex).expect("attachment vertex exists").clone();
    let mut stab = &s / &c; // stab of the edge into level 1
    let mut prev = vertex;
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    for &id in &ids {
        edges.push(Edge::new(prev, id, stab.clone()));
        let vs = &stab * &q;
        vertices.push(Vertex::new(id, vs.clone()));
        stab = vs;
        prev = id;
    }
    let mut cusps = g.cusps().clone();
    cusps.remove(&vertex);
    cusps.insert(*ids.last().unwrap(), BigRational::one());
    Ok((rebuild(g, vertices, edges, cusps, g.funnels().clone())?, ids))
}

/// Moves the first `levels` levels of the funnel attached at `vertex` into
/// the core. Level `j` (which consists of `f q^{j-1}` vertices in the cover)
/// is represented by a single vertex of stabilizer `s / (f q^{j-1})`; the
/// outermost new vertex carries a funnel of weight `q`.
pub fn absorb_funnel(
    g: &GeomFiniteGraph,
    vertex: VertexId,
    levels: usize,
) -> Result<(GeomFiniteGraph, Vec<VertexId>), EngineError> {
    let f = g.funnel_weight(vertex);
    if f.is_zero() {
        return Err(EngineError::NoEnd { vertex, kind: EndKind::Funnel });
    }
    if levels == 0 {
        return Ok((g.clone(), Vec::new()));
    }
    let q = BigRational::from_integer(BigInt::from(g.q()));
    let ids = fresh_ids(g, levels);
    let s = g.core().stab(vertex).expect("attachment vertex exists").clone();
    let mut stab = &s / &f;
    let mut prev = vertex;
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    for (j, &id) in ids.iter().enumerate() {
        if j > 0 {
            stab = &stab / &q;
        }
        edges.push(Edge::new(prev, id, stab.clone()));
        vertices.push(Vertex::new(id, stab.clone()));
        prev = id;
    }
    let mut funnels = g.funnels().clone();
    funnels.remove(&vertex);
    funnels.insert(*ids.last().unwrap(), q);
    Ok((rebuild(g, vertices, edges, g.cusps().clone(), funnels)?, ids))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{find_resonances, DEFAULT_TOL};
    use crate::fixtures;
    use crate::kernels::{cusp_kernel, tree_kernel, CuspKernelParams, TreeKernelParams};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn tree_column() {
        for (q, mu) in [(2u64, c(1.3, 0.4)), (3, c(-0.2, 0.9)), (5, c(2.0, 0.0))] {
            let g = fixtures::tree(q);
            let ext = apply_resolvent(&g, &[c(1.0, 0.0)], mu, 12, DEFAULT_TOL).unwrap();
            let p = TreeKernelParams::new(q, mu).unwrap();
            assert!((ext.core[0] - tree_kernel(&p, 0)).norm() < 1e-12);
            for (k, x) in ext.ends[0].levels.iter().enumerate() {
                let want = tree_kernel(&p, k as u32 + 1);
                assert!((x - want).norm() <= 1e-10 * want.norm().max(1e-300));
            }
            assert!(resolvent_residual(&g, &ext, &[c(1.0, 0.0)]) < 1e-12 * ext.sup_norm());
        }
    }

    #[test]
    fn parabolic_column_is_cusp_kernel() {
        // The cusp side sits at heights k >= 1, the funnel side at -k.
        for q in [2u64, 3] {
            let g = fixtures::parabolic(q);
            let mu = c(0.5, 0.5);
            let ext = apply_resolvent(&g, &[c(1.0, 0.0)], mu, 8, DEFAULT_TOL).unwrap();
            let p = CuspKernelParams::new(q, mu).unwrap();
            assert!((ext.core[0] - cusp_kernel(&p, 0, 0)).norm() < 1e-12);
            for k in 1..=8i64 {
                let cusp = ext.end(0, EndKind::Cusp).unwrap().levels[k as usize - 1];
                let funnel = ext.end(0, EndKind::Funnel).unwrap().levels[k as usize - 1];
                assert!((cusp - cusp_kernel(&p, k, 0)).norm() < 1e-11 * cusp.norm());
                assert!((funnel - cusp_kernel(&p, -k, 0)).norm() < 1e-11 * funnel.norm());
            }
        }
    }

    #[test]
    fn zero_source() {
        let g = fixtures::elliptic_f2();
        let ext = apply_resolvent(&g, &alloc::vec![c(0.0, 0.0); g.len()], c(0.3, 0.2), 5, DEFAULT_TOL).unwrap();
        assert_eq!(ext.sup_norm(), 0.0);
    }

    #[test]
    fn singular_at_resonance() {
        let g = fixtures::modular(2);
        let mu = c(libm::sqrt(2.0), 0.0);
        assert!(matches!(
            apply_resolvent(&g, &[c(1.0, 0.0)], mu, 4, DEFAULT_TOL),
            Err(EngineError::Singular { nearest: Some(_), .. })
        ));
        assert!(matches!(
            apply_resolvent(&g, &[], c(0.5, 0.0), 4, DEFAULT_TOL),
            Err(EngineError::SourceLength { expected: 1, got: 0 })
        ));
    }

    #[test]
    fn absorbing_ends_preserves_resolvent() {
        let mu = c(0.8, -0.6) * 1.2;
        for (g, kind) in [(fixtures::parabolic(2), EndKind::Cusp), (fixtures::parabolic(3), EndKind::Funnel)] {
            let base = apply_resolvent(&g, &[c(1.0, 0.0)], mu, 6, DEFAULT_TOL).unwrap();
            let (big, ids) = match kind {
                EndKind::Cusp => absorb_cusp(&g, 0, 3).unwrap(),
                EndKind::Funnel => absorb_funnel(&g, 0, 3).unwrap(),
            };
            assert!(big.is_valid(), "{:?}", big.validate());
            let mut f = alloc::vec![c(0.0, 0.0); big.len()];
            f[0] = c(1.0, 0.0);
            let ext = apply_resolvent(&big, &f, mu, 3, DEFAULT_TOL).unwrap();
            let profile = base.end(0, kind).unwrap();
            for (j, id) in ids.iter().enumerate() {
                let got = ext.core[big.core().index_of(*id).unwrap()];
                assert!((got - profile.levels[j]).norm() < 1e-10 * got.norm().max(1.0));
            }
            assert!((ext.core[0] - base.core[0]).norm() < 1e-12);
        }
    }

    #[test]
    fn absorbing_does_not_change_resonances() {
        let g = fixtures::elliptic_f2();
        let cusp_vertex = *g.cusps().keys().next().unwrap();
        let (big, _) = absorb_cusp(&g, cusp_vertex, 2).unwrap();
        let a = find_resonances(&g, DEFAULT_TOL).unwrap();
        let b = find_resonances(&big, DEFAULT_TOL).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!((x.mu - y.mu).norm() < 1e-10);
            assert_eq!(x.root_multiplicity, y.root_multiplicity);
        }
    }
}
