//! The `gofres` command-line tool.
//!
//! Exit codes: `0` success, `1` I/O or other failure, `2` unparsable input
//! (command line or document), `3` invalid graph, curve or experiment, `4`
//! the requested `mu` is not a resonance.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use gofres_core::engine::{
    classify_l2, find_resonances, l2_kernel_dim, resonance_polynomial, resonant_states, verify_eigen_equation,
    EngineError, DEFAULT_TOL,
};
use gofres_core::graph::GeomFiniteGraph;
use gofres_core::kernels::{
    cusp_kernel, cusp_relation_residuals, tree_kernel, verify_tree_identity, CuspKernelParams, TreeKernelParams,
};
use gofres_core::random::{run as run_experiment, RandomError, SurgerySpec};
use gofres_core::zeta::{check_resonance_link, count_points, zeta_numerator, ResonanceLinkError, ZetaError};
use num_complex::Complex64;

use crate::format::fmt_e;
use crate::io::{load_curve, load_graph, DocError};
use crate::report::{self, StateReport};
use crate::svg;

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_PARSE: u8 = 2;
pub const EXIT_INVALID: u8 = 3;
pub const EXIT_NOT_RESONANCE: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "gofres", version, about = "Resonances of geometrically finite graphs of groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Tree,
    Cusp,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the resonances of a graph with root multiplicity and kernel dimension.
    Resonances {
        graph: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Resonant states at a resonance `mu`: kernel basis, outgoing ratios,
    /// eigen-equation residual and l^2 verdict.
    States {
        graph: PathBuf,
        /// The resonance as `re,im`.
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        mu: Complex64,
        /// Number of end levels used for the eigen-equation check.
        #[arg(long, default_value_t = 8)]
        depth: usize,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Random (q+1)-regular graph, edge surgery and its resonance cloud.
    Random {
        #[arg(long, default_value_t = 50)]
        n: usize,
        #[arg(long, default_value_t = 6)]
        q: u64,
        /// Number of edges replaced by pairs of cusps.
        #[arg(long, default_value_t = 0)]
        c: usize,
        /// Number of edges replaced by pairs of funnels.
        #[arg(long, default_value_t = 0)]
        f: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Allow loops and parallel edges (plain configuration model).
        #[arg(long)]
        multigraph: bool,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Also write an SVG scatter plot.
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Point counts and the zeta numerator of a curve, optionally compared
    /// with the resonance polynomial of a graph.
    Zeta {
        curve: PathBuf,
        #[arg(long)]
        link: Option<PathBuf>,
    },
    /// Evaluate a model resolvent kernel.
    Kernel {
        #[arg(long, value_enum)]
        model: Model,
        #[arg(long)]
        q: u64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        mu: Complex64,
        /// Tree distance (tree model).
        #[arg(long, default_value_t = 0)]
        d: u32,
        /// Heights (cusp model); negative heights lie on the funnel side.
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        k1: i64,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        k2: i64,
        /// Also check the tree kernel against an explicit tree of this depth.
        #[arg(long)]
        verify_depth: Option<usize>,
    },
    /// Check (q+1)-regularity of a graph file.
    Validate { graph: PathBuf },
}

/// Parses `re,im`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let (re, im) = s.split_once(',').ok_or_else(|| format!("expected re,im, got {s:?}"))?;
    let re: f64 = re.trim().parse().map_err(|_| format!("bad real part in {s:?}"))?;
    let im: f64 = im.trim().parse().map_err(|_| format!("bad imaginary part in {s:?}"))?;
    Ok(Complex64::new(re, im))
}

/// An error with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    fn new(code: u8, error: impl Into<anyhow::Error>) -> Self {
        Failure { code, error: error.into() }
    }
}

fn doc_failure(path: &Path, e: DocError) -> Failure {
    let code = if matches!(e, DocError::Io { .. }) { EXIT_FAILURE } else { EXIT_PARSE };
    Failure::new(code, anyhow!(e).context(format!("cannot load {}", path.display())))
}

fn engine_failure(e: EngineError) -> Failure {
    let code = match e {
        EngineError::Invalid(_) => EXIT_INVALID,
        EngineError::NotAResonance { .. } | EngineError::Singular { .. } => EXIT_NOT_RESONANCE,
        EngineError::BadTolerance(_) | EngineError::BadMu => EXIT_PARSE,
        _ => EXIT_FAILURE,
    };
    Failure::new(code, e)
}

fn io_failure(e: impl Into<anyhow::Error>) -> Failure {
    Failure::new(EXIT_FAILURE, e)
}

/// Loads a graph and refuses graphs that fail regularity.
fn load_valid(path: &Path) -> Result<GeomFiniteGraph, Failure> {
    let loaded = load_graph(path).map_err(|e| doc_failure(path, e))?;
    if !loaded.warnings.is_empty() {
        return Err(Failure::new(
            EXIT_INVALID,
            anyhow!("{}", report::violations_text(&loaded.warnings).trim_end())
                .context(format!("{} is not (q+1)-regular", path.display())),
        ));
    }
    Ok(loaded.graph)
}

/// Runs one parsed command, writing the report to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), Failure> {
    match cli.command {
        Command::Resonances { graph, tol, format } => {
            let g = load_valid(&graph)?;
            let rs = find_resonances(&g, tol).map_err(engine_failure)?;
            let text = match format {
                Format::Csv => report::resonances_csv(&rs),
                Format::Json => {
                    let (k, p) = resonance_polynomial(&g).map_err(engine_failure)?;
                    report::resonances_json(g.q(), k, &p, &rs)
                }
            };
            out.write_all(text.as_bytes()).map_err(io_failure)
        }
        Command::States { graph, mu, depth, tol } => {
            let g = load_valid(&graph)?;
            let states = resonant_states(&g, mu, tol).map_err(engine_failure)?;
            let snapped = states[0].mu;
            let verdicts: Vec<_> = states.iter().map(|s| classify_l2(&g, s)).collect();
            let residuals: Vec<f64> = states.iter().map(|s| verify_eigen_equation(&g, &s.extend(&g, depth))).collect();
            let reports: Vec<StateReport<'_>> = states
                .iter()
                .zip(&verdicts)
                .zip(&residuals)
                .map(|((state, l2), &eigen_residual)| StateReport { state, eigen_residual, l2 })
                .collect();
            let l2_dim = l2_kernel_dim(&g, snapped, tol).map_err(engine_failure)?;
            let text = report::states_text(&g, snapped, depth, &reports, l2_dim);
            out.write_all(text.as_bytes()).map_err(io_failure)
        }
        Command::Random { n, q, c, f, seed, multigraph, csv, svg: svg_path, tol } => {
            let spec = SurgerySpec { n, q, c, f, seed, allow_multigraph: multigraph };
            let cloud = run_experiment(&spec, tol).map_err(|e| match e {
                RandomError::Engine(e) => engine_failure(e),
                e => Failure::new(EXIT_INVALID, anyhow!(e).context("cannot build the random graph")),
            })?;
            let clouds = [cloud];
            let text = report::cloud_csv(&clouds);
            match csv {
                Some(p) => std::fs::write(&p, text).with_context(|| format!("cannot write {}", p.display())).map_err(io_failure)?,
                None => out.write_all(text.as_bytes()).map_err(io_failure)?,
            }
            if let Some(p) = svg_path {
                std::fs::write(&p, svg::render(q, &clouds))
                    .with_context(|| format!("cannot write {}", p.display()))
                    .map_err(io_failure)?;
            }
            Ok(())
        }
        Command::Zeta { curve, link } => {
            let c = load_curve(&curve).map_err(|e| doc_failure(&curve, e))?;
            let zeta = |e: ZetaError| Failure::new(EXIT_INVALID, e);
            let n1 = count_points(&c, 1).map_err(zeta)?;
            let z = zeta_numerator(&c).map_err(zeta)?;
            let l = match link {
                Some(p) => {
                    let g = load_valid(&p)?;
                    Some(check_resonance_link(&g, &c).map_err(|e| match e {
                        ResonanceLinkError::Engine(e) => engine_failure(e),
                        ResonanceLinkError::Zeta(e) => zeta(e),
                    })?)
                }
                None => None,
            };
            out.write_all(report::zeta_text(&c, n1, &z, l.as_ref()).as_bytes()).map_err(io_failure)
        }
        Command::Kernel { model, q, mu, d, k1, k2, verify_depth } => {
            let bad = |e: gofres_core::kernels::KernelError| Failure::new(EXIT_INVALID, e);
            let mut s = String::new();
            match model {
                Model::Tree => {
                    let p = TreeKernelParams::new(q, mu).map_err(bad)?;
                    let v = tree_kernel(&p, d);
                    s += &format!("model tree\nq {q}\nmu {} {}\nd {d}\nvalue {} {}\n", fmt_e(mu.re), fmt_e(mu.im), fmt_e(v.re), fmt_e(v.im));
                    if let Some(depth) = verify_depth {
                        let r = verify_tree_identity(&p, depth).map_err(bad)?;
                        s += &format!("tree_identity_residual {}\n", fmt_e(r));
                    }
                }
                Model::Cusp => {
                    let p = CuspKernelParams::new(q, mu).map_err(bad)?;
                    let v = cusp_kernel(&p, k1, k2);
                    let (r1, r2) = cusp_relation_residuals(&p, k1, k2);
                    s += &format!(
                        "model cusp\nq {q}\nmu {} {}\nk1 {k1}\nk2 {k2}\nvalue {} {}\nrelation_residuals {} {}\n",
                        fmt_e(mu.re),
                        fmt_e(mu.im),
                        fmt_e(v.re),
                        fmt_e(v.im),
                        fmt_e(r1),
                        fmt_e(r2)
                    );
                }
            }
            out.write_all(s.as_bytes()).map_err(io_failure)
        }
        Command::Validate { graph } => {
            let loaded = load_graph(&graph).map_err(|e| doc_failure(&graph, e))?;
            out.write_all(report::violations_text(&loaded.warnings).as_bytes()).map_err(io_failure)?;
            if loaded.warnings.is_empty() {
                Ok(())
            } else {
                Err(Failure::new(EXIT_INVALID, anyhow!("{} is not (q+1)-regular", graph.display())))
            }
        }
    }
}

/// Entry point used by the binary.
pub fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_PARSE } else { 0 });
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(cli, &mut lock) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let _ = lock.flush();
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_flag() {
        assert_eq!(parse_complex("1.5,-2").unwrap(), Complex64::new(1.5, -2.0));
        assert_eq!(parse_complex(" -1 , 0 ").unwrap(), Complex64::new(-1.0, 0.0));
        assert!(parse_complex("1.5").is_err());
        assert!(parse_complex("a,b").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn unknown_flags_rejected() {
        assert!(Cli::try_parse_from(["gofres", "validate", "x.json", "--bogus"]).is_err());
        assert!(Cli::try_parse_from(["gofres"]).is_err());
        let c = Cli::try_parse_from(["gofres", "states", "g.json", "--mu", "-1.5,0"]).unwrap();
        assert!(matches!(c.command, Command::States { mu, .. } if mu == Complex64::new(-1.5, 0.0)));
    }
}
