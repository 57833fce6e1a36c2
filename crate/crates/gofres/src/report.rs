//! Text, CSV and JSON renderings of results. Every number is printed with
//! [`fmt_e`]; every line ends with `\n`.

use std::fmt::Write;

use gofres_core::algebra::{LambdaPoly, Root};
use gofres_core::engine::{EndRatio, L2Classification, Resonance, ResonantState};
use gofres_core::graph::{GeomFiniteGraph, Violation};
use gofres_core::random::ResonanceCloud;
use gofres_core::zeta::{CurveSpec, ResonanceLink, ZetaNumerator};
use num_complex::Complex64;

use crate::format::fmt_e;

/// JSON string literal.
fn js(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialise")
}

pub const RESONANCE_CSV_HEADER: &str = "re,im,root_multiplicity,kernel_dim,residual";

/// One row per distinct resonance.
pub fn resonances_csv(rs: &[Resonance]) -> String {
    let mut s = String::from(RESONANCE_CSV_HEADER);
    s.push('\n');
    for r in rs {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            fmt_e(r.mu.re),
            fmt_e(r.mu.im),
            r.root_multiplicity,
            r.kernel_dim,
            fmt_e(r.residual)
        );
    }
    s
}

/// `{"q", "mu_power", "polynomial", "resonances": [...]}` where the
/// resonance polynomial is `mu^mu_power * polynomial(sqrt(q) mu)` up to a
/// unit.
pub fn resonances_json(q: u64, mu_power: i64, p: &LambdaPoly, rs: &[Resonance]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{{");
    let _ = writeln!(s, "  \"q\": {q},");
    let _ = writeln!(s, "  \"mu_power\": {mu_power},");
    let _ = writeln!(s, "  \"polynomial\": {},", js(&p.to_string()));
    if rs.is_empty() {
        let _ = writeln!(s, "  \"resonances\": []");
    } else {
        let _ = writeln!(s, "  \"resonances\": [");
        for (i, r) in rs.iter().enumerate() {
            let _ = writeln!(
                s,
                "    {{\"re\": {}, \"im\": {}, \"root_multiplicity\": {}, \"kernel_dim\": {}, \"residual\": {}}}{}",
                fmt_e(r.mu.re),
                fmt_e(r.mu.im),
                r.root_multiplicity,
                r.kernel_dim,
                fmt_e(r.residual),
                if i + 1 < rs.len() { "," } else { "" }
            );
        }
        let _ = writeln!(s, "  ]");
    }
    let _ = writeln!(s, "}}");
    s
}

pub const CLOUD_CSV_HEADER: &str = "re,im,multiplicity,n,q,c,f,seed";

/// One row per distinct resonance with the experiment parameters.
pub fn cloud_csv(clouds: &[ResonanceCloud]) -> String {
    let mut s = String::from(CLOUD_CSV_HEADER);
    s.push('\n');
    for cl in clouds {
        let m = &cl.spec;
        for p in &cl.points {
            let _ = writeln!(s, "{},{},{},{},{},{},{},{}", fmt_e(p.re), fmt_e(p.im), p.multiplicity, m.n, m.q, m.c, m.f, m.seed);
        }
    }
    s
}

fn complex(z: Complex64) -> String {
    format!("{} {}", fmt_e(z.re), fmt_e(z.im))
}

/// Regularity report.
pub fn violations_text(violations: &[Violation]) -> String {
    let mut s = String::new();
    if violations.is_empty() {
        s.push_str("valid\n");
    } else {
        let _ = writeln!(s, "invalid: {} violation(s)", violations.len());
        for v in violations {
            let _ = writeln!(s, "  {v}");
        }
    }
    s
}

fn ratio_line(r: &EndRatio) -> String {
    format!("    vertex {} {} weight {} ratio {}", r.vertex, r.kind, fmt_e(r.weight), complex(r.ratio))
}

/// Data for one resonant state in a report.
pub struct StateReport<'a> {
    pub state: &'a ResonantState,
    pub eigen_residual: f64,
    pub l2: &'a L2Classification,
}

/// The `states` report: the resonance used, then each kernel vector with
/// its values, end ratios, eigen-equation residual and l^2 verdict.
pub fn states_text(g: &GeomFiniteGraph, mu: Complex64, depth: usize, states: &[StateReport<'_>], l2_dim: usize) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "mu {}", complex(mu));
    let _ = writeln!(s, "depth {depth}");
    let _ = writeln!(s, "kernel_dim {}", states.len());
    let _ = writeln!(s, "l2_kernel_dim {l2_dim}");
    for (i, st) in states.iter().enumerate() {
        let _ = writeln!(s, "state {}", i + 1);
        let _ = writeln!(s, "  core");
        for (v, x) in g.core().vertices().iter().zip(&st.state.core_values) {
            let _ = writeln!(s, "    vertex {} {}", v.id, complex(*x));
        }
        let _ = writeln!(s, "  ends");
        for r in &st.state.end_ratios {
            let _ = writeln!(s, "{}", ratio_line(r));
        }
        let _ = writeln!(s, "  eigen_residual {}", fmt_e(st.eigen_residual));
        let _ = writeln!(s, "  l2 {}", st.l2.is_l2);
    }
    s
}

fn roots_lines(s: &mut String, roots: &[Root]) {
    for r in roots {
        let _ = writeln!(s, "  {} {}", complex(r.value), r.multiplicity);
    }
}

/// The `zeta` report.
pub fn zeta_text(curve: &CurveSpec, n1: u64, z: &ZetaNumerator, link: Option<&ResonanceLink>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "p {}", curve.p());
    let _ = writeln!(s, "kind {}", curve.kind());
    let _ = writeln!(s, "genus {}", z.genus());
    let _ = writeln!(s, "N1 {n1}");
    let _ = writeln!(s, "P(T) {z}");
    let dev = z.weil_deviation();
    let _ = writeln!(s, "weil_rh {} max_deviation {}", if dev <= gofres_core::zeta::WEIL_TOL { "pass" } else { "fail" }, fmt_e(dev));
    let _ = writeln!(s, "functional_equation {}", if z.satisfies_functional_equation() { "pass" } else { "fail" });
    let _ = writeln!(s, "roots_T");
    roots_lines(&mut s, &z.roots());
    if let Some(l) = link {
        let _ = writeln!(s, "resonance_polynomial {}", l.resonance_polynomial);
        let _ = writeln!(s, "zeta_factor {}", l.zeta_factor);
        let _ = writeln!(s, "divides {}", l.divides);
        if let Some(c) = &l.cofactor {
            let _ = writeln!(s, "cofactor {c}");
            let _ = writeln!(s, "cofactor_roots_mu");
            roots_lines(&mut s, &l.cofactor_roots(1e-8));
        }
    }
    s
}
