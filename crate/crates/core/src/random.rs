//! Seeded random `(q+1)`-regular graphs, cusp/funnel edge surgery and
//! resonance clouds.
//!
//! All randomness comes from [`SplitMix64`]: the state advances by
//! `0x9E3779B97F4A7C15` and each output is the state mixed by
//! `z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27;
//! z *= 0x94D049BB133111EB; z ^= z >> 31`. Independent streams for one seed
//! are keyed by a purpose tag ([`Stream`]), so generation and surgery never
//! share draws and a spec gives the same result wherever it is run.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::engine::{find_resonances, EngineError, Resonance};
use crate::graph::{GeomFiniteGraph, StabilizerGraph, VertexId};

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Purpose tags for the independent streams derived from one seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Generation = 0,
    Surgery = 1,
}

/// The SplitMix64 generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    /// The stream for `(seed, purpose)`: initial state
    /// `seed ^ mix64(purpose * GAMMA + GAMMA)`.
    pub fn stream(seed: u64, purpose: Stream) -> Self {
        let tag = (purpose as u64).wrapping_mul(GAMMA).wrapping_add(GAMMA);
        SplitMix64::new(seed ^ mix64(tag))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        mix64(self.state)
    }

    /// Uniform integer in `0..n` (`n > 0`) by rejection of the biased top
    /// range.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        let zone = u64::MAX - u64::MAX % n;
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % n;
            }
        }
    }

    /// Fisher–Yates shuffle.
    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            xs.swap(i, j);
        }
    }
}

/// Restart budget for simple-graph generation.
pub const MAX_RESTARTS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RandomError {
    #[error("n (q + 1) = {n} * {d} is odd, so no {d}-regular graph exists", d = .q + 1)]
    OddDegreeSum { n: usize, q: u64 },
    #[error("a simple {d}-regular graph needs at least {d} + 1 vertices, got {n}", d = .q + 1)]
    TooFewVertices { n: usize, q: u64 },
    #[error("q must be at least 1")]
    BadQ,
    #[error("no simple regular graph found after {0} restarts")]
    RestartsExhausted(usize),
    #[error("requested {requested} edges for surgery but the graph has {available}")]
    TooManyEdges { requested: usize, available: usize },
    #[error("surgery needs a regular graph with unit stabilizers")]
    NotRegular,
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// A random `(q+1)`-regular graph on vertices `0..n` with unit
/// stabilizers, edges sorted as `(min, max)` pairs.
///
/// Simple graphs come from incremental pairing with rejection: random
/// pairs of free half-edges are joined unless that would create a loop or a
/// parallel edge; when no admissible pair is left the attempt restarts (at
/// most [`MAX_RESTARTS`] times). With `allow_multigraph` the half-edges are
/// paired by one uniform shuffle (configuration model), loops and parallel
/// edges included.
pub fn generate_regular(n: usize, q: u64, seed: u64, allow_multigraph: bool) -> Result<StabilizerGraph, RandomError> {
    if q == 0 {
        return Err(RandomError::BadQ);
    }
    let d = (q + 1) as usize;
    if (n * d) % 2 == 1 {
        return Err(RandomError::OddDegreeSum { n, q });
    }
    if !allow_multigraph && n < d + 1 {
        return Err(RandomError::TooFewVertices { n, q });
    }
    let mut rng = SplitMix64::stream(seed, Stream::Generation);
    let mut edges = if allow_multigraph {
        let mut stubs: Vec<VertexId> = (0..n).flat_map(|v| core::iter::repeat(v as VertexId).take(d)).collect();
        rng.shuffle(&mut stubs);
        stubs.chunks(2).map(|p| (p[0].min(p[1]), p[0].max(p[1]))).collect()
    } else {
        (0..MAX_RESTARTS)
            .find_map(|_| try_simple(n, d, &mut rng))
            .ok_or(RandomError::RestartsExhausted(MAX_RESTARTS))?
    };
    edges.sort_unstable();
    Ok(StabilizerGraph::unweighted(n, &edges).expect("generated graph is well formed"))
}

fn try_simple(n: usize, d: usize, rng: &mut SplitMix64) -> Option<Vec<(VertexId, VertexId)>> {
    let mut stubs: Vec<VertexId> = (0..n).flat_map(|v| core::iter::repeat(v as VertexId).take(d)).collect();
    let mut used: BTreeSet<(VertexId, VertexId)> = BTreeSet::new();
    let ok = |used: &BTreeSet<_>, a: VertexId, b: VertexId| a != b && !used.contains(&(a.min(b), a.max(b)));
    while !stubs.is_empty() {
        let len = stubs.len() as u64;
        let mut pick = None;
        for _ in 0..64 {
            let i = rng.below(len) as usize;
            let j = rng.below(len) as usize;
            if i != j && ok(&used, stubs[i], stubs[j]) {
                pick = Some((i, j));
                break;
            }
        }
        if pick.is_none() {
            // Few free half-edges are left: choose among all admissible pairs.
            let admissible: Vec<(usize, usize)> = (0..stubs.len())
                .flat_map(|i| (i + 1..stubs.len()).map(move |j| (i, j)))
                .filter(|&(i, j)| ok(&used, stubs[i], stubs[j]))
                .collect();
            if admissible.is_empty() {
                return None;
            }
            pick = Some(admissible[rng.below(admissible.len() as u64) as usize]);
        }
        let (i, j) = pick?;
        let (a, b) = (stubs[i], stubs[j]);
        used.insert((a.min(b), a.max(b)));
        let (hi, lo) = (i.max(j), i.min(j));
        stubs.swap_remove(hi);
        stubs.swap_remove(lo);
    }
    Some(used.into_iter().collect())
}

/// Removes `c + f` distinct edges chosen by a seeded shuffle of the edge
/// list: the first `c` become cusps, the next `f` funnels. Each removed edge
/// adds weight 1 to the corresponding end at both of its endpoints.
pub fn surgery(gr: &StabilizerGraph, c: usize, f: usize, seed: u64) -> Result<GeomFiniteGraph, RandomError> {
    let q = regular_q(gr)?;
    let m = gr.edges().len();
    if c + f > m {
        return Err(RandomError::TooManyEdges { requested: c + f, available: m });
    }
    let mut order: Vec<usize> = (0..m).collect();
    SplitMix64::stream(seed, Stream::Surgery).shuffle(&mut order);
    let one = BigRational::from_integer(BigInt::from(1));
    let mut cusps: BTreeMap<VertexId, BigRational> = BTreeMap::new();
    let mut funnels: BTreeMap<VertexId, BigRational> = BTreeMap::new();
    let mut removed = alloc::vec![false; m];
    for (k, &e) in order.iter().take(c + f).enumerate() {
        removed[e] = true;
        let ends = if k < c { &mut cusps } else { &mut funnels };
        let edge = &gr.edges()[e];
        for v in [edge.u, edge.v] {
            *ends.entry(v).or_insert_with(|| BigRational::from_integer(0.into())) += &one;
        }
    }
    let kept = gr.edges().iter().zip(&removed).filter(|(_, &r)| !r).map(|(e, _)| e.clone()).collect();
    let core = StabilizerGraph::new(gr.vertices().to_vec(), kept).expect("subgraph of a valid graph");
    let g = GeomFiniteGraph::new(q, core, cusps, funnels).expect("positive weights");
    debug_assert!(g.is_valid());
    Ok(g)
}

/// `q` for a regular graph with unit stabilizers.
fn regular_q(gr: &StabilizerGraph) -> Result<u64, RandomError> {
    let one = BigRational::from_integer(1.into());
    if gr.vertices().iter().any(|v| v.stab != one) || gr.edges().iter().any(|e| e.stab != one) {
        return Err(RandomError::NotRegular);
    }
    let mut deg = None;
    for v in gr.vertices() {
        let d = gr.core_degree(v.id).map_err(|_| RandomError::NotRegular)?;
        let d = d.to_integer().to_u64().ok_or(RandomError::NotRegular)?;
        if *deg.get_or_insert(d) != d {
            return Err(RandomError::NotRegular);
        }
    }
    match deg {
        Some(d) if d >= 2 => Ok(d - 1),
        _ => Err(RandomError::NotRegular),
    }
}

/// One random experiment: a `(q+1)`-regular graph on `n` vertices with `c`
/// edges turned into cusps and `f` into funnels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SurgerySpec {
    pub n: usize,
    pub q: u64,
    pub c: usize,
    pub f: usize,
    pub seed: u64,
    pub allow_multigraph: bool,
}

impl SurgerySpec {
    pub fn new(n: usize, q: u64, c: usize, f: usize, seed: u64) -> Self {
        SurgerySpec { n, q, c, f, seed, allow_multigraph: false }
    }

    /// `n (q + 1) / 2`.
    pub fn edge_count(&self) -> usize {
        self.n * (self.q as usize + 1) / 2
    }

    pub fn validate(&self) -> Result<(), RandomError> {
        if self.q == 0 {
            return Err(RandomError::BadQ);
        }
        if (self.n * (self.q as usize + 1)) % 2 == 1 {
            return Err(RandomError::OddDegreeSum { n: self.n, q: self.q });
        }
        if self.c + self.f > self.edge_count() {
            return Err(RandomError::TooManyEdges { requested: self.c + self.f, available: self.edge_count() });
        }
        Ok(())
    }

    /// The graph after surgery.
    pub fn build(&self) -> Result<GeomFiniteGraph, RandomError> {
        self.validate()?;
        let gr = generate_regular(self.n, self.q, self.seed, self.allow_multigraph)?;
        surgery(&gr, self.c, self.f, self.seed)
    }
}

/// A distinct resonance in a cloud.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloudPoint {
    pub re: f64,
    pub im: f64,
    pub multiplicity: usize,
}

/// Curves and points the clouds are drawn against: the unit circle, the
/// circle of radius `1/sqrt q`, and the points `±sqrt q`, `±1/sqrt q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceGeometry {
    pub unit_radius: f64,
    pub inner_radius: f64,
    pub cusp_points: [f64; 2],
    pub funnel_points: [f64; 2],
}

impl ReferenceGeometry {
    pub fn new(q: u64) -> Self {
        let s = libm::sqrt(q as f64);
        ReferenceGeometry { unit_radius: 1.0, inner_radius: 1.0 / s, cusp_points: [-s, s], funnel_points: [-1.0 / s, 1.0 / s] }
    }
}

/// The resonances of one random experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceCloud {
    pub spec: SurgerySpec,
    pub points: Vec<CloudPoint>,
    pub reference: ReferenceGeometry,
}

impl ResonanceCloud {
    /// Resonances counted with multiplicity.
    pub fn total_multiplicity(&self) -> usize {
        self.points.iter().map(|p| p.multiplicity).sum()
    }
}

fn cloud_of(spec: SurgerySpec, rs: &[Resonance]) -> ResonanceCloud {
    ResonanceCloud {
        spec,
        points: rs.iter().map(|r| CloudPoint { re: r.mu.re, im: r.mu.im, multiplicity: r.root_multiplicity }).collect(),
        reference: ReferenceGeometry::new(spec.q),
    }
}

/// Runs one experiment.
pub fn run(spec: &SurgerySpec, tol: f64) -> Result<ResonanceCloud, RandomError> {
    let g = spec.build()?;
    Ok(cloud_of(*spec, &find_resonances(&g, tol)?))
}

/// Runs every experiment; results depend only on each spec.
pub fn sweep(specs: &[SurgerySpec], tol: f64) -> Result<Vec<ResonanceCloud>, RandomError> {
    specs.iter().map(|s| run(s, tol)).collect()
}
