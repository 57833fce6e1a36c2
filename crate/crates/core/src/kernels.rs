//! Closed-form resolvent kernels of `A/(2 sqrt q) - z(mu)` on the
//! `(q+1)`-regular tree and on the idealized parabolic cylinder (the
//! bi-infinite Nagao ray), with direct verification on finite truncations.

use alloc::vec::Vec;

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum KernelError {
    #[error("mu = {0} is a pole of the kernel")]
    Pole(Complex64),
    #[error("q must be at least 1")]
    BadQ,
    #[error("truncation depth {0} is too small (need at least 2)")]
    DepthTooSmall(usize),
    #[error("truncated tree would have {0} vertices; refusing to build more than {1}")]
    TreeTooLarge(u128, usize),
}

/// Relative distance below which a parameter is treated as sitting on a pole.
const POLE_TOL: f64 = 1e-13;

/// `z(mu) = (mu + 1/mu) / 2`.
pub fn z_of(mu: Complex64) -> Complex64 {
    (mu + mu.inv()) * 0.5
}

fn check_poles(mu: Complex64, poles: &[f64]) -> Result<(), KernelError> {
    if mu.norm() <= POLE_TOL || poles.iter().any(|&p| (mu - p).norm() <= POLE_TOL * p.abs().max(1.0)) {
        return Err(KernelError::Pole(mu));
    }
    if !(mu.re.is_finite() && mu.im.is_finite()) {
        return Err(KernelError::Pole(mu));
    }
    Ok(())
}

/// Parameters of the tree kernel: poles at `0` and `+-q^{-1/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeKernelParams {
    q: u64,
    mu: Complex64,
}

impl TreeKernelParams {
    pub fn new(q: u64, mu: Complex64) -> Result<Self, KernelError> {
        if q == 0 {
            return Err(KernelError::BadQ);
        }
        let p = 1.0 / libm::sqrt(q as f64);
        check_poles(mu, &[p, -p])?;
        Ok(TreeKernelParams { q, mu })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn mu(&self) -> Complex64 {
        self.mu
    }
}

/// Parameters of the cusp kernel: poles at `0` and `+-1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CuspKernelParams {
    q: u64,
    mu: Complex64,
}

impl CuspKernelParams {
    pub fn new(q: u64, mu: Complex64) -> Result<Self, KernelError> {
        if q == 0 {
            return Err(KernelError::BadQ);
        }
        check_poles(mu, &[1.0, -1.0])?;
        Ok(CuspKernelParams { q, mu })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn mu(&self) -> Complex64 {
        self.mu
    }
}

/// `k_mu(d) = -2/(mu - 1/(q mu)) * (1/(mu sqrt q))^d`: the resolvent kernel
/// between two tree vertices at distance `d`.
pub fn tree_kernel(p: &TreeKernelParams, d: u32) -> Complex64 {
    let (q, mu) = (p.q as f64, p.mu);
    let c = -2.0 / (mu - (mu * q).inv());
    c * (mu * libm::sqrt(q)).inv().powu(d)
}

/// `K_mu(k1, k2) = -2/(mu - 1/mu) * (sqrt q / mu)^|k1-k2| * q^min(k1,k2)`:
/// the resolvent kernel of the idealized parabolic cylinder between
/// heights `k1` and `k2`.
pub fn cusp_kernel(p: &CuspKernelParams, k1: i64, k2: i64) -> Complex64 {
    let (q, mu) = (p.q as f64, p.mu);
    let c = -2.0 / (mu - mu.inv());
    let gap = (k1 - k2).unsigned_abs() as i32;
    c * (Complex64::new(libm::sqrt(q), 0.0) / mu).powi(gap) * libm::pow(q, k1.min(k2) as f64)
}

/// Residuals of the two defining relations of the cusp kernel at `(k1, k2)`:
/// with `R = (sqrt q/2) K(k1-1, k2) + (1/(2 sqrt q)) K(k1+1, k2) - z K(k1, k2)`
/// the first is `|R - q^{k2} delta(k1, k2)|`, the second the same in the
/// `k2` variable. Both are divided by the largest term involved.
pub fn cusp_relation_residuals(p: &CuspKernelParams, k1: i64, k2: i64) -> (f64, f64) {
    let q = p.q as f64;
    let sq = libm::sqrt(q);
    let z = z_of(p.mu);
    let k = |a, b| cusp_kernel(p, a, b);
    let delta = if k1 == k2 { libm::pow(q, k2 as f64) } else { 0.0 };
    let rel = |terms: [Complex64; 3]| {
        let r = terms[0] + terms[1] - terms[2] - delta;
        let scale = terms.iter().map(|t| t.norm()).fold(delta.abs(), f64::max);
        r.norm() / scale.max(f64::MIN_POSITIVE)
    };
    let left = rel([k(k1 - 1, k2) * (sq / 2.0), k(k1 + 1, k2) / (2.0 * sq), z * k(k1, k2)]);
    let right = rel([k(k1, k2 - 1) * (sq / 2.0), k(k1, k2 + 1) / (2.0 * sq), z * k(k1, k2)]);
    (left, right)
}

/// Largest explicit tree [`verify_tree_identity`] is willing to build.
pub const MAX_TREE_VERTICES: usize = 2_000_000;

/// Builds the ball of radius `depth` around a root `o` in the
/// `(q+1)`-regular tree, puts the radial column `k_mu(d(., o))` on it, applies
/// `A/(2 sqrt q) - z(mu)` at every vertex of distance `<= depth - 1`, and
/// returns the largest deviation from `delta_o`.
pub fn verify_tree_identity(p: &TreeKernelParams, depth: usize) -> Result<f64, KernelError> {
    if depth < 2 {
        return Err(KernelError::DepthTooSmall(depth));
    }
    let q = p.q as usize;
    let size: u128 = 1 + (0..depth as u32).map(|i| (q as u128 + 1) * (q as u128).pow(i)).sum::<u128>();
    if size > MAX_TREE_VERTICES as u128 {
        return Err(KernelError::TreeTooLarge(size, MAX_TREE_VERTICES));
    }
    // Explicit tree: parent pointers and distances, children appended level
    // by level.
    let mut parent: Vec<Option<usize>> = alloc::vec![None];
    let mut dist: Vec<u32> = alloc::vec![0];
    let mut children: Vec<Vec<usize>> = alloc::vec![Vec::new()];
    let mut frontier = alloc::vec![0usize];
    for d in 1..=depth as u32 {
        let mut next = Vec::new();
        for &v in &frontier {
            let count = if v == 0 { q + 1 } else { q };
            for _ in 0..count {
                let id = parent.len();
                parent.push(Some(v));
                dist.push(d);
                children.push(Vec::new());
                children[v].push(id);
                next.push(id);
            }
        }
        frontier = next;
    }
    let values: Vec<Complex64> = dist.iter().map(|&d| tree_kernel(p, d)).collect();
    let z = z_of(p.mu);
    let norm = 1.0 / (2.0 * libm::sqrt(p.q as f64));
    let mut worst: f64 = 0.0;
    for v in 0..values.len() {
        if dist[v] as usize > depth - 1 {
            continue;
        }
        let mut sum: Complex64 = children[v].iter().map(|&w| values[w]).sum();
        if let Some(u) = parent[v] {
            sum += values[u];
        }
        let delta = if v == 0 { 1.0 } else { 0.0 };
        worst = worst.max((sum * norm - z * values[v] - delta).norm());
    }
    Ok(worst)
}

/// Partial and tail data for the weighted `l^2` norm of a tree-kernel
/// column, `sum_d |S_d| |k(d)|^2 q^{-2 N d}` with `|S_d|` the sphere size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedNorm {
    /// Sum of the first `depth + 1` sphere contributions.
    pub partial: f64,
    /// Ratio of consecutive sphere contributions for `d >= 1`.
    pub ratio: f64,
    /// Geometric bound on the remainder; infinite when `ratio >= 1`.
    pub tail_bound: f64,
}

impl WeightedNorm {
    pub fn is_finite(&self) -> bool {
        self.ratio < 1.0 && self.tail_bound.is_finite()
    }
}

/// Weighted norm of the column `k_mu(d(., o))` in `l^2` with weight
/// `q^{-2 N d(., o)}`, truncated at `depth` with a geometric tail bound.
/// The contributions have ratio `1 / (|mu|^2 q^{2N})`, so the norm is
/// finite exactly for `|mu| > q^{-N}`.
pub fn weighted_tree_norm(p: &TreeKernelParams, n: u32, depth: u32) -> WeightedNorm {
    let q = p.q as f64;
    let sphere = |d: u32| if d == 0 { 1.0 } else { (q + 1.0) * libm::pow(q, d as f64 - 1.0) };
    let term = |d: u32| sphere(d) * tree_kernel(p, d).norm_sqr() * libm::pow(q, -2.0 * (n as f64) * d as f64);
    let partial: f64 = (0..=depth).map(term).sum();
    let ratio = 1.0 / (p.mu.norm_sqr() * libm::pow(q, 2.0 * n as f64));
    let tail_bound = if ratio < 1.0 { term(depth) * ratio / (1.0 - ratio) } else { f64::INFINITY };
    WeightedNorm { partial, ratio, tail_bound }
}
