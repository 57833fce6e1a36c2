//! Graphs with stabilizer weights and geometrically finite end data.
//!
//! A [`StabilizerGraph`] is a finite multigraph (loops and parallel edges
//! allowed) whose vertices and edges carry positive rational stabilizer
//! sizes. A [`GeomFiniteGraph`] adds the branching parameter `q` and, per
//! vertex, the total adjacency weight `c_v` going into standard cusps and
//! `f_v` going into standard funnels. Nothing beyond the core is stored: the
//! ends are standard, so this data determines the whole graph.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Vertex identifier as it appears in graph documents.
pub type VertexId = u64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub id: VertexId,
    pub stab: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub stab: BigRational,
}

impl Vertex {
    pub fn new(id: VertexId, stab: BigRational) -> Self {
        Vertex { id, stab }
    }
}

impl Edge {
    pub fn new(u: VertexId, v: VertexId, stab: BigRational) -> Self {
        Edge { u, v, stab }
    }

    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }
}

/// Structural errors: data that cannot be interpreted as a graph at all.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph has no vertices")]
    EmptyCore,
    #[error("duplicate vertex id {0}")]
    DuplicateVertex(VertexId),
    #[error("edge {edge} references unknown vertex {vertex}")]
    UnknownEndpoint { edge: usize, vertex: VertexId },
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("stabilizer of vertex {0} must be positive")]
    NonPositiveVertexStab(VertexId),
    #[error("stabilizer of edge {0} must be positive")]
    NonPositiveEdgeStab(usize),
    #[error("{kind} weight at vertex {vertex} must be nonnegative")]
    NegativeWeight { kind: EndKind, vertex: VertexId },
    #[error("q must be at least 1")]
    BadQ,
}

/// Regularity and stabilizer violations reported by [`GeomFiniteGraph::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// `deg(v) != q + 1`.
    Degree { vertex: VertexId, degree: BigRational, expected: u64 },
    /// All stabilizers are integers but `stab(vertex) / stab(edge)` is not.
    EdgeStabilizer { edge: usize, vertex: VertexId, quotient: BigRational },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Degree { vertex, degree, expected } => {
                write!(f, "vertex {vertex}: degree {degree} != {expected}")
            }
            Violation::EdgeStabilizer { edge, vertex, quotient } => {
                write!(f, "edge {edge}: stab({vertex})/stab(e) = {quotient} is not an integer")
            }
        }
    }
}

/// The two kinds of standard ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EndKind {
    Cusp,
    Funnel,
}

impl fmt::Display for EndKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EndKind::Cusp => "cusp",
            EndKind::Funnel => "funnel",
        })
    }
}

/// A finite multigraph with positive rational stabilizers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizerGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    index: BTreeMap<VertexId, usize>,
}

impl StabilizerGraph {
    pub fn new(vertices: Vec<Vertex>, edges: Vec<Edge>) -> Result<Self, GraphError> {
        let mut index = BTreeMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if !v.stab.is_positive() {
                return Err(GraphError::NonPositiveVertexStab(v.id));
            }
            if index.insert(v.id, i).is_some() {
                return Err(GraphError::DuplicateVertex(v.id));
            }
        }
        for (i, e) in edges.iter().enumerate() {
            for end in [e.u, e.v] {
                if !index.contains_key(&end) {
                    return Err(GraphError::UnknownEndpoint { edge: i, vertex: end });
                }
            }
            if !e.stab.is_positive() {
                return Err(GraphError::NonPositiveEdgeStab(i));
            }
        }
        Ok(StabilizerGraph { vertices, edges, index })
    }

    /// A graph with every stabilizer equal to one, from an edge list over
    /// vertices `0..n`.
    pub fn unweighted(n: usize, edges: &[(VertexId, VertexId)]) -> Result<Self, GraphError> {
        let one = BigRational::one();
        Self::new(
            (0..n as VertexId).map(|i| Vertex::new(i, one.clone())).collect(),
            edges.iter().map(|&(u, v)| Edge::new(u, v, one.clone())).collect(),
        )
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Position of a vertex in [`Self::vertices`].
    pub fn index_of(&self, id: VertexId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn stab(&self, id: VertexId) -> Option<&BigRational> {
        self.index_of(id).map(|i| &self.vertices[i].stab)
    }

    /// Sum over incident edges of `stab(v)/stab(e)`, loops counted twice.
    pub fn core_degree(&self, id: VertexId) -> Result<BigRational, GraphError> {
        let sv = self.stab(id).ok_or(GraphError::UnknownVertex(id))?;
        let mut d = BigRational::zero();
        for e in &self.edges {
            let hits = (e.u == id) as u32 + (e.v == id) as u32;
            if hits > 0 {
                d += sv / &e.stab * BigRational::from_integer(hits.into());
            }
        }
        Ok(d)
    }

    /// The weighted adjacency matrix `M[v][w] = sum_{e: w -> v} stab(v)/stab(e)`
    /// in vertex order, a loop contributing twice on the diagonal.
    pub fn operator_matrix(&self) -> OperatorMatrix {
        let n = self.len();
        let mut m = alloc::vec![alloc::vec![BigRational::zero(); n]; n];
        for e in &self.edges {
            let (iu, iv) = (self.index[&e.u], self.index[&e.v]);
            if iu == iv {
                m[iu][iu] += BigRational::from_integer(2.into()) * &self.vertices[iu].stab / &e.stab;
            } else {
                m[iu][iv] += &self.vertices[iu].stab / &e.stab;
                m[iv][iu] += &self.vertices[iv].stab / &e.stab;
            }
        }
        OperatorMatrix { entries: m, stabs: self.vertices.iter().map(|v| v.stab.clone()).collect() }
    }
}

/// The adjacency operator of a core as an exact rational matrix, together
/// with the vertex stabilizers that define its measure `nu(v) = 1/stab(v)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorMatrix {
    entries: Vec<Vec<BigRational>>,
    stabs: Vec<BigRational>,
}

impl OperatorMatrix {
    pub fn entries(&self) -> &[Vec<BigRational>] {
        &self.entries
    }

    pub fn get(&self, v: usize, w: usize) -> &BigRational {
        &self.entries[v][w]
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `M[v][w] stab(w) == M[w][v] stab(v)` for every pair: self-adjointness
    /// with respect to `nu`.
    pub fn is_nu_symmetric(&self) -> bool {
        let n = self.len();
        (0..n).all(|v| (0..n).all(|w| &self.entries[v][w] * &self.stabs[w] == &self.entries[w][v] * &self.stabs[v]))
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.entries.iter().map(|r| r.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()).collect()
    }

    /// `D^{1/2} M D^{-1/2}` with `D = diag(nu)`: the symmetric matrix
    /// unitarily equivalent to `M` on `l^2(nu)`.
    pub fn symmetrized(&self) -> Vec<Vec<f64>> {
        let nu: Vec<f64> = self.stabs.iter().map(|s| 1.0 / s.to_f64().unwrap_or(f64::NAN)).collect();
        let m = self.to_f64();
        let n = self.len();
        (0..n).map(|v| (0..n).map(|w| m[v][w] * libm::sqrt(nu[v] / nu[w])).collect()).collect()
    }

    /// Spectral radius of the symmetrized matrix by power iteration.
    pub fn spectral_radius(&self) -> f64 {
        let s = self.symmetrized();
        let n = s.len();
        if n == 0 {
            return 0.0;
        }
        let mut x = alloc::vec![1.0 / libm::sqrt(n as f64); n];
        let mut rho = 0.0;
        for _ in 0..5000 {
            let y: Vec<f64> = (0..n).map(|i| (0..n).map(|j| s[i][j] * x[j]).sum()).collect();
            let norm = libm::sqrt(y.iter().map(|v| v * v).sum::<f64>());
            if norm == 0.0 {
                return 0.0;
            }
            let converged = (norm - rho).abs() <= 1e-14 * norm;
            rho = norm;
            x = y.into_iter().map(|v| v / norm).collect();
            if converged {
                break;
            }
        }
        rho
    }
}

/// A core with end data: the object whose resonances are computed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeomFiniteGraph {
    q: u64,
    core: StabilizerGraph,
    cusps: BTreeMap<VertexId, BigRational>,
    funnels: BTreeMap<VertexId, BigRational>,
}

impl GeomFiniteGraph {
    /// Zero weights are dropped; vertices must exist and weights be
    /// nonnegative.
    pub fn new(
        q: u64,
        core: StabilizerGraph,
        cusps: BTreeMap<VertexId, BigRational>,
        funnels: BTreeMap<VertexId, BigRational>,
    ) -> Result<Self, GraphError> {
        if q == 0 {
            return Err(GraphError::BadQ);
        }
        if core.is_empty() {
            return Err(GraphError::EmptyCore);
        }
        let clean = |kind, m: BTreeMap<VertexId, BigRational>| -> Result<BTreeMap<_, _>, GraphError> {
            let mut out = BTreeMap::new();
            for (v, w) in m {
                if core.index_of(v).is_none() {
                    return Err(GraphError::UnknownVertex(v));
                }
                if w.is_negative() {
                    return Err(GraphError::NegativeWeight { kind, vertex: v });
                }
                if !w.is_zero() {
                    out.insert(v, w);
                }
            }
            Ok(out)
        };
        let cusps = clean(EndKind::Cusp, cusps)?;
        let funnels = clean(EndKind::Funnel, funnels)?;
        Ok(GeomFiniteGraph { q, core, cusps, funnels })
    }

    /// A graph without ends.
    pub fn compact(q: u64, core: StabilizerGraph) -> Result<Self, GraphError> {
        Self::new(q, core, BTreeMap::new(), BTreeMap::new())
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn core(&self) -> &StabilizerGraph {
        &self.core
    }

    pub fn len(&self) -> usize {
        self.core.len()
    }

    pub fn is_empty(&self) -> bool {
        self.core.is_empty()
    }

    pub fn cusps(&self) -> &BTreeMap<VertexId, BigRational> {
        &self.cusps
    }

    pub fn funnels(&self) -> &BTreeMap<VertexId, BigRational> {
        &self.funnels
    }

    pub fn cusp_weight(&self, id: VertexId) -> BigRational {
        self.cusps.get(&id).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn funnel_weight(&self, id: VertexId) -> BigRational {
        self.funnels.get(&id).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn end_weight(&self, kind: EndKind, id: VertexId) -> BigRational {
        match kind {
            EndKind::Cusp => self.cusp_weight(id),
            EndKind::Funnel => self.funnel_weight(id),
        }
    }

    /// All attachments `(vertex, kind, weight)` with nonzero weight, cusps
    /// first, each in vertex-id order.
    pub fn attachments(&self) -> impl Iterator<Item = (VertexId, EndKind, &BigRational)> {
        self.cusps
            .iter()
            .map(|(v, w)| (*v, EndKind::Cusp, w))
            .chain(self.funnels.iter().map(|(v, w)| (*v, EndKind::Funnel, w)))
    }

    /// `ceil(sum c_v)` and `ceil(sum f_v)`: upper-bound readings of the
    /// number of cusp and funnel attachments.
    pub fn end_counts(&self) -> (u64, u64) {
        let ceil_sum = |m: &BTreeMap<VertexId, BigRational>| {
            let s: BigRational = m.values().sum();
            s.ceil().to_integer().to_u64().unwrap_or(u64::MAX)
        };
        (ceil_sum(&self.cusps), ceil_sum(&self.funnels))
    }

    /// Full degree: core contribution plus cusp and funnel weights.
    pub fn degree(&self, id: VertexId) -> Result<BigRational, GraphError> {
        Ok(self.core.core_degree(id)? + self.cusp_weight(id) + self.funnel_weight(id))
    }

    pub fn operator_matrix(&self) -> OperatorMatrix {
        self.core.operator_matrix()
    }

    /// Every vertex whose degree differs from `q + 1`, and, when all
    /// stabilizers are integers, every non-integral `stab(v)/stab(e)`.
    /// Empty iff the graph is an asymptotically `(q+1)`-regular
    /// geometrically finite graph.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let expected = BigRational::from_integer(BigInt::from(self.q + 1));
        for v in self.core.vertices() {
            let d = self.degree(v.id).expect("vertex exists");
            if d != expected {
                out.push(Violation::Degree { vertex: v.id, degree: d, expected: self.q + 1 });
            }
        }
        let integral = self.core.vertices().iter().all(|v| v.stab.is_integer())
            && self.core.edges().iter().all(|e| e.stab.is_integer());
        if integral {
            for (i, e) in self.core.edges().iter().enumerate() {
                let ends: &[VertexId] = if e.is_loop() { &[e.u] } else { &[e.u, e.v] };
                for &v in ends {
                    let quotient = self.core.stab(v).unwrap() / &e.stab;
                    if !quotient.is_integer() {
                        out.push(Violation::EdgeStabilizer { edge: i, vertex: v, quotient });
                    }
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;
    use proptest::prelude::*;

    fn single(q: u64, c: i64, f: i64) -> GeomFiniteGraph {
        let core = StabilizerGraph::unweighted(1, &[]).unwrap();
        GeomFiniteGraph::new(q, core, BTreeMap::from([(0, rat(c, 1))]), BTreeMap::from([(0, rat(f, 1))])).unwrap()
    }

    #[test]
    fn single_vertex_models() {
        assert!(single(2, 1, 2).is_valid()); // parabolic cylinder
        assert!(single(5, 6, 0).is_valid()); // modular curve
        let tree = single(2, 0, 3);
        assert!(tree.is_valid());
        assert_eq!(tree.degree(0).unwrap(), rat(3, 1));
        let bare = single(2, 0, 0);
        assert_eq!(
            bare.validate(),
            [Violation::Degree { vertex: 0, degree: rat(0, 1), expected: 3 }]
        );
        assert!(bare.cusps().is_empty());
    }

    #[test]
    fn cycle_vertex_degree() {
        let core = StabilizerGraph::unweighted(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        let funnels = (0..5).map(|v| (v, rat(2, 1))).collect();
        let g = GeomFiniteGraph::new(3, core, BTreeMap::new(), funnels).unwrap();
        assert_eq!(g.degree(2).unwrap(), rat(4, 1));
        assert!(g.is_valid());
        assert_eq!(g.degree(9), Err(GraphError::UnknownVertex(9)));
    }

    #[test]
    fn stabilizer_quotients() {
        let core = StabilizerGraph::new(
            alloc::vec![Vertex::new(0, rat(2, 1)), Vertex::new(1, rat(1, 1))],
            alloc::vec![Edge::new(0, 1, rat(1, 1))],
        )
        .unwrap();
        assert_eq!(core.core_degree(0).unwrap(), rat(2, 1));
        let m = core.operator_matrix();
        assert_eq!(m.get(0, 1), &rat(2, 1));
        assert_eq!(m.get(1, 0), &rat(1, 1));
        assert!(m.is_nu_symmetric());

        let bad = StabilizerGraph::new(
            alloc::vec![Vertex::new(0, rat(3, 1)), Vertex::new(1, rat(2, 1))],
            alloc::vec![Edge::new(0, 1, rat(2, 1))],
        )
        .unwrap();
        let g = GeomFiniteGraph::compact(1, bad).unwrap();
        assert!(g.validate().iter().any(|v| matches!(v, Violation::EdgeStabilizer { vertex: 0, .. })));
    }

    #[test]
    fn loops_count_twice() {
        let core = StabilizerGraph::unweighted(1, &[(0, 0)]).unwrap();
        assert_eq!(core.core_degree(0).unwrap(), rat(2, 1));
        assert_eq!(core.operator_matrix().get(0, 0), &rat(2, 1));
    }

    #[test]
    fn circulant_operator() {
        let core = StabilizerGraph::unweighted(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let m = core.operator_matrix();
        assert_eq!(m.entries()[0], [rat(0, 1), rat(1, 1), rat(0, 1), rat(1, 1)]);
        assert!((m.spectral_radius() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn structural_errors() {
        let one = rat(1, 1);
        assert_eq!(
            StabilizerGraph::new(alloc::vec![Vertex::new(0, one.clone()), Vertex::new(0, one.clone())], alloc::vec![]),
            Err(GraphError::DuplicateVertex(0))
        );
        assert_eq!(
            StabilizerGraph::new(alloc::vec![Vertex::new(0, one.clone())], alloc::vec![Edge::new(0, 3, one.clone())]),
            Err(GraphError::UnknownEndpoint { edge: 0, vertex: 3 })
        );
        let empty = StabilizerGraph::new(alloc::vec![], alloc::vec![]).unwrap();
        assert_eq!(GeomFiniteGraph::compact(2, empty), Err(GraphError::EmptyCore));
    }

    /// Random weighted multigraphs: a spanning path plus extra edges, with
    /// vertex stabilizers that are multiples of their edge stabilizers.
    fn arb_graph() -> impl Strategy<Value = StabilizerGraph> {
        (2usize..7)
            .prop_flat_map(|n| {
                (
                    Just(n),
                    proptest::collection::vec(1i64..4, n),
                    proptest::collection::vec((0..n, 0..n, 1i64..3), 0..8),
                )
            })
            .prop_map(|(n, base, extra)| {
                // stab(v) = 6 * base(v), edge stabs divide 6
                let verts = (0..n).map(|i| Vertex::new(i as VertexId, rat(6 * base[i], 1))).collect();
                let mut edges: Vec<Edge> =
                    (1..n).map(|i| Edge::new(i as VertexId - 1, i as VertexId, rat(1, 1))).collect();
                edges.extend(extra.into_iter().map(|(u, v, s)| Edge::new(u as VertexId, v as VertexId, rat(s, 1))));
                StabilizerGraph::new(verts, edges).unwrap()
            })
    }

    proptest! {
        #[test]
        fn nu_symmetry(g in arb_graph()) {
            prop_assert!(g.operator_matrix().is_nu_symmetric());
        }

        #[test]
        fn regular_completion_is_valid(g in arb_graph(), split in 0u64..100) {
            // Top every vertex up to degree q + 1 with cusp and funnel weight.
            let degs: Vec<BigRational> = g.vertices().iter().map(|v| g.core_degree(v.id).unwrap()).collect();
            let max = degs.iter().max().unwrap().ceil().to_integer().to_u64().unwrap();
            let q = max + 1;
            let mut cusps = BTreeMap::new();
            let mut funnels = BTreeMap::new();
            for (v, d) in g.vertices().iter().zip(&degs) {
                let rest = BigRational::from_integer((q + 1).into()) - d;
                let c = &rest * rat((split % 3) as i64, 2);
                funnels.insert(v.id, &rest - &c);
                cusps.insert(v.id, c);
            }
            let gf = GeomFiniteGraph::new(q, g, cusps, funnels).unwrap();
            prop_assert!(gf.validate().iter().all(|v| !matches!(v, Violation::Degree { .. })), "degree violation");
            prop_assert!(gf.operator_matrix().spectral_radius() <= (q + 1) as f64 + 1e-9);
        }
    }
}
