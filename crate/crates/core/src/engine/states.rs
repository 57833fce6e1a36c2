use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

use super::{build_h, check_mu, check_tol, resonances_of, EngineError};
use crate::graph::{EndKind, GeomFiniteGraph, VertexId};

/// Outgoing decay ratio at one attachment: `sqrt(q)/mu` on a cusp,
/// `1/(sqrt(q) mu)` on a funnel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndRatio {
    pub vertex: VertexId,
    pub kind: EndKind,
    pub weight: f64,
    pub ratio: Complex64,
}

/// A kernel vector of `H(mu)` on the core with the end ratios that extend it
/// to a purely outgoing eigenfunction.
#[derive(Debug, Clone, PartialEq)]
pub struct ResonantState {
    pub mu: Complex64,
    /// Values on the core vertices, in core order.
    pub core_values: Vec<Complex64>,
    pub end_ratios: Vec<EndRatio>,
}

/// Values along one end: `levels[k - 1]` is the (constant) value at depth
/// `k` for `1 <= k <= depth`.
#[derive(Debug, Clone, PartialEq)]
pub struct EndProfile {
    pub vertex: VertexId,
    pub kind: EndKind,
    pub weight: f64,
    pub ratio: Complex64,
    pub levels: Vec<Complex64>,
}

/// A function on the core plus all ends truncated at `depth`.
#[derive(Debug, Clone, PartialEq)]
pub struct OutgoingExtension {
    pub mu: Complex64,
    pub depth: usize,
    pub core: Vec<Complex64>,
    pub ends: Vec<EndProfile>,
}

impl OutgoingExtension {
    /// Largest absolute value anywhere on the truncation.
    pub fn sup_norm(&self) -> f64 {
        self.core
            .iter()
            .chain(self.ends.iter().flat_map(|e| e.levels.iter()))
            .map(|x| x.norm())
            .fold(0.0, f64::max)
    }

    pub fn end(&self, vertex: VertexId, kind: EndKind) -> Option<&EndProfile> {
        self.ends.iter().find(|e| e.vertex == vertex && e.kind == kind)
    }
}

pub(crate) fn singular_values(m: &DMatrix<Complex64>) -> Vec<f64> {
    m.clone().svd(false, false).singular_values.iter().cloned().collect()
}

/// Reference size for rank decisions on `H(mu)`: `sigma_max`, but at least
/// the size `(|mu| + 1/|mu|)/2` of the `z(mu)` term, so that a matrix which
/// is small everywhere (e.g. `1 x 1` at a resonance) still counts as
/// singular.
pub(crate) fn rank_scale(singular: &[f64], mu: Complex64) -> f64 {
    let smax = singular.iter().cloned().fold(0.0, f64::max);
    let r = mu.norm();
    smax.max(0.5 * (r + 1.0 / r))
}

/// Orthonormal basis of the numerical kernel of `m`: right singular vectors
/// whose singular value is at most `tol * sigma_max`.
pub fn kernel_basis(m: &DMatrix<Complex64>, tol: f64) -> Vec<DVector<Complex64>> {
    kernel_basis_scaled(m, tol, None)
}

/// As [`kernel_basis`], with the threshold `tol * max(sigma_max, scale)`.
pub(crate) fn kernel_basis_scaled(m: &DMatrix<Complex64>, tol: f64, scale: Option<f64>) -> Vec<DVector<Complex64>> {
    let svd = m.clone().svd(false, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max).max(scale.unwrap_or(0.0));
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut out = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s <= tol * smax {
            out.push(v_t.row(i).transpose().map(|x| x.conj()));
        }
    }
    out
}

/// Rotates a vector so that its largest entry is real and positive.
fn fix_phase(v: &mut [Complex64]) {
    let Some(big) = v.iter().cloned().max_by(|a, b| a.norm().total_cmp(&b.norm())) else {
        return;
    };
    if big.norm() == 0.0 {
        return;
    }
    let phase = big.conj() / big.norm();
    for x in v.iter_mut() {
        *x *= phase;
    }
}

fn end_ratios(g: &GeomFiniteGraph, mu: Complex64) -> Vec<EndRatio> {
    let sq = libm::sqrt(g.q() as f64);
    g.attachments()
        .map(|(vertex, kind, w)| EndRatio {
            vertex,
            kind,
            weight: w.to_f64().unwrap_or(f64::NAN),
            ratio: match kind {
                EndKind::Cusp => Complex64::new(sq, 0.0) / mu,
                EndKind::Funnel => (mu * sq).inv(),
            },
        })
        .collect()
}

/// Resonant states at `mu`: an orthonormal basis of `ker H(mu)` (numerical
/// rank threshold `tol * max(sigma_max, |z(mu)| scale)`). A `mu` within `tol * max(1, |r|)` of a
/// computed resonance `r` is snapped to `r` first.
pub fn resonant_states(g: &GeomFiniteGraph, mu: Complex64, tol: f64) -> Result<Vec<ResonantState>, EngineError> {
    check_tol(tol)?;
    check_mu(mu)?;
    let h = build_h(g)?;
    let resonances = resonances_of(&h, tol)?;
    let nearest = resonances.iter().map(|r| r.mu).min_by(|a, b| (a - mu).norm().total_cmp(&(b - mu).norm()));
    let mu = match nearest {
        Some(r) if (r - mu).norm() <= tol * r.norm().max(1.0) => r,
        _ => mu,
    };
    let m = h.eval(mu);
    let basis = kernel_basis_scaled(&m, tol, Some(rank_scale(&[], mu)));
    if basis.is_empty() {
        return Err(EngineError::NotAResonance { mu, nearest });
    }
    let ratios = end_ratios(g, mu);
    Ok(basis
        .into_iter()
        .map(|v| {
            let mut core_values: Vec<Complex64> = v.iter().cloned().collect();
            fix_phase(&mut core_values);
            ResonantState { mu, core_values, end_ratios: ratios.clone() }
        })
        .collect())
}

/// Extends core values outgoingly: the value at depth `k` of an end attached
/// at `v` is `core(v) * ratio^k`.
pub fn extend_outgoing(g: &GeomFiniteGraph, core: &[Complex64], mu: Complex64, depth: usize) -> OutgoingExtension {
    let ends = end_ratios(g, mu)
        .into_iter()
        .map(|r| {
            let base = core[g.core().index_of(r.vertex).expect("attachment vertex exists")];
            let mut levels = Vec::with_capacity(depth);
            let mut x = base;
            for _ in 0..depth {
                x *= r.ratio;
                levels.push(x);
            }
            EndProfile { vertex: r.vertex, kind: r.kind, weight: r.weight, ratio: r.ratio, levels }
        })
        .collect();
    OutgoingExtension { mu, depth, core: core.to_vec(), ends }
}

impl ResonantState {
    pub fn extend(&self, g: &GeomFiniteGraph, depth: usize) -> OutgoingExtension {
        extend_outgoing(g, &self.core_values, self.mu, depth)
    }
}

/// Largest `|((A/(2 sqrt q) - z(mu)) u - f)(x)|` over the core and every end
/// level `1 <= k <= depth - 1` of the truncated graph. `source` is `f` on
/// the core (zero elsewhere); `None` means `f = 0`.
pub(crate) fn equation_residual(g: &GeomFiniteGraph, ext: &OutgoingExtension, source: Option<&[Complex64]>) -> f64 {
    let q = g.q() as f64;
    let norm = 1.0 / (2.0 * libm::sqrt(q));
    let mu = ext.mu;
    let z = (mu + mu.inv()) * 0.5;
    let m = g.operator_matrix().to_f64();
    let n = g.len();
    let mut worst: f64 = 0.0;
    for v in 0..n {
        let id = g.core().vertices()[v].id;
        let mut sum: Complex64 = (0..n).map(|w| ext.core[w] * m[v][w]).sum();
        for e in ext.ends.iter().filter(|e| e.vertex == id) {
            if let Some(first) = e.levels.first() {
                sum += first * e.weight;
            }
        }
        let f = source.map_or(Complex64::zero(), |s| s[v]);
        worst = worst.max((sum * norm - z * ext.core[v] - f).norm());
    }
    for e in &ext.ends {
        let base = ext.core[g.core().index_of(e.vertex).unwrap()];
        for k in 1..e.levels.len() {
            let below = if k == 1 { base } else { e.levels[k - 2] };
            let here = e.levels[k - 1];
            let above = e.levels[k];
            // cusp: one step up, q steps down; funnel: one parent, q children
            let sum = match e.kind {
                EndKind::Cusp => above + below * q,
                EndKind::Funnel => below + above * q,
            };
            worst = worst.max((sum * norm - z * here).norm());
        }
    }
    worst
}

/// Residual of the eigenvalue equation `(A/(2 sqrt q) - z(mu)) u = 0` on the
/// truncation interior.
pub fn verify_eigen_equation(g: &GeomFiniteGraph, ext: &OutgoingExtension) -> f64 {
    equation_residual(g, ext, None)
}

/// Per-end evidence for the l^2 verdict: the level-`k` contribution to
/// `||u||^2_{l^2(nu)}` is `first_level_mass * ratio^(k-1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndWitness {
    pub vertex: VertexId,
    pub kind: EndKind,
    /// `|u(v)|` at the attachment vertex.
    pub attachment_value: f64,
    /// `|mu|^{-2}`.
    pub ratio: f64,
    pub first_level_mass: f64,
    /// Sum of the contributions of levels `1..=200`.
    pub partial_sum: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct L2Classification {
    pub is_l2: bool,
    pub witness: Vec<EndWitness>,
}

/// Relative size below which an attachment value counts as zero.
const VANISH_TOL: f64 = 1e-8;

/// Whether the outgoing extension of a state is square-summable for the
/// vertex measure `nu = 1/stab`. On a cusp of weight `c` at `v` the level-`k`
/// vertex has measure `c / (q^k stab(v))` and value `u(v) (sqrt q/mu)^k`; on
/// a funnel of weight `f` the level-`k` vertices have total measure
/// `f q^{k-1} / stab(v)` and value `u(v) (sqrt q mu)^{-k}`. Both give
/// contributions proportional to `|mu|^{-2k}`, so the state is l^2 iff
/// `|mu| > 1` or it vanishes at every attachment vertex.
pub fn classify_l2(g: &GeomFiniteGraph, state: &ResonantState) -> L2Classification {
    let q = g.q() as f64;
    let ratio = 1.0 / state.mu.norm_sqr();
    let scale = state.core_values.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let mut all_vanish = true;
    let witness: Vec<EndWitness> = state
        .end_ratios
        .iter()
        .map(|r| {
            let idx = g.core().index_of(r.vertex).unwrap();
            let value = state.core_values[idx].norm();
            let stab = g.core().vertices()[idx].stab.to_f64().unwrap_or(f64::NAN);
            if value > VANISH_TOL * scale {
                all_vanish = false;
            }
            let first_level_mass = match r.kind {
                EndKind::Cusp => value * value * r.weight * ratio / stab,
                EndKind::Funnel => value * value * r.weight * ratio / (q * stab),
            };
            let mut partial_sum = 0.0;
            let mut term = first_level_mass;
            for _ in 0..200 {
                partial_sum += term;
                term *= ratio;
            }
            EndWitness { vertex: r.vertex, kind: r.kind, attachment_value: value, ratio, first_level_mass, partial_sum }
        })
        .collect();
    let decays = state.mu.norm() > 1.0 + 1e-9;
    L2Classification { is_l2: decays || all_vanish, witness }
}

/// Dimension of the subspace of `ker H(mu)` whose outgoing extensions are
/// l^2: the whole kernel if `|mu| > 1`, otherwise the kernel vectors
/// vanishing at every attachment vertex.
pub fn l2_kernel_dim(g: &GeomFiniteGraph, mu: Complex64, tol: f64) -> Result<usize, EngineError> {
    check_tol(tol)?;
    check_mu(mu)?;
    let h = build_h(g)?;
    let m = h.eval(mu);
    let basis = kernel_basis_scaled(&m, tol, Some(rank_scale(&[], mu)));
    if basis.is_empty() || mu.norm() > 1.0 + 1e-9 {
        return Ok(basis.len());
    }
    let rows: Vec<usize> = {
        let mut r: Vec<usize> = g.attachments().map(|(v, _, _)| g.core().index_of(v).unwrap()).collect();
        r.sort_unstable();
        r.dedup();
        r
    };
    if rows.is_empty() {
        return Ok(basis.len());
    }
    // rank of the kernel basis restricted to the attachment vertices
    let restricted = DMatrix::from_fn(rows.len(), basis.len(), |i, j| basis[j][rows[i]]);
    let s = singular_values(&restricted);
    let rank = s.iter().filter(|&&x| x > VANISH_TOL).count();
    Ok(basis.len() - rank)
}
