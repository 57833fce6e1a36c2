//! JSON documents for graphs and curves.
//!
//! Graph documents look like
//!
//! ```json
//! {
//!   "q": 2,
//!   "vertices": [{"id": 0, "stab": "1/1"}],
//!   "edges": [],
//!   "cusps": [{"vertex": 0, "weight": "1/1"}],
//!   "funnels": [{"vertex": 0, "weight": "2/1"}]
//! }
//! ```
//!
//! Rationals are `"num/den"` strings in lowest terms with `den >= 1`.
//! Unknown and duplicate keys are rejected. Syntax errors carry a line and
//! column, structural errors the path of the offending entry
//! (e.g. `edges[3].u`). A document whose graph fails regularity still loads;
//! the violations are returned alongside it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use gofres_core::graph::{Edge, GeomFiniteGraph, StabilizerGraph, Vertex, VertexId, Violation};
use gofres_core::zeta::{CurveKind, CurveSpec, ZetaError};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DocError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{at}: {message}")]
    Schema { at: String, message: String },
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl DocError {
    fn schema(at: impl Into<String>, message: impl Into<String>) -> Self {
        DocError::Schema { at: at.into(), message: message.into() }
    }
}

impl From<serde_json::Error> for DocError {
    fn from(e: serde_json::Error) -> Self {
        let message = e.to_string();
        // serde_json appends " at line L column C"; keep only the message.
        let message = match message.rfind(" at line ") {
            Some(i) => message[..i].to_string(),
            None => message,
        };
        DocError::Syntax { line: e.line(), column: e.column(), message }
    }
}

/// A rational in `"num/den"` form, checked for lowest terms while parsing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatStr(pub BigRational);

impl fmt::Display for RatStr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

/// Parses `"num/den"` with `den >= 1` in lowest terms.
pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let (n, d) = s.split_once('/').ok_or_else(|| format!("expected \"num/den\", got {s:?}"))?;
    let bad = || format!("expected \"num/den\" with integer parts, got {s:?}");
    let n: BigInt = n.trim().parse().map_err(|_| bad())?;
    let d: BigInt = d.trim().parse().map_err(|_| bad())?;
    if d < BigInt::one() {
        return Err(format!("denominator must be at least 1 in {s:?}"));
    }
    let r = BigRational::new(n.clone(), d.clone());
    if r.numer() != &n || r.denom() != &d {
        return Err(format!("{s:?} is not in lowest terms (use \"{}/{}\")", r.numer(), r.denom()));
    }
    Ok(r)
}

impl<'de> Deserialize<'de> for RatStr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map(RatStr).map_err(serde::de::Error::custom)
    }
}

impl Serialize for RatStr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexDoc {
    pub id: VertexId,
    pub stab: RatStr,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub u: VertexId,
    pub v: VertexId,
    pub stab: RatStr,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndDoc {
    pub vertex: VertexId,
    pub weight: RatStr,
}

/// The on-disk form of a graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDoc {
    pub q: u64,
    pub vertices: Vec<VertexDoc>,
    pub edges: Vec<EdgeDoc>,
    #[serde(default)]
    pub cusps: Vec<EndDoc>,
    #[serde(default)]
    pub funnels: Vec<EndDoc>,
}

/// A loaded graph together with its regularity violations (empty when the
/// graph is valid).
#[derive(Debug, Clone)]
pub struct Loaded {
    pub graph: GeomFiniteGraph,
    pub warnings: Vec<Violation>,
}

impl GraphDoc {
    pub fn from_graph(g: &GeomFiniteGraph) -> Self {
        let ends = |m: &BTreeMap<VertexId, BigRational>| {
            m.iter().map(|(&vertex, w)| EndDoc { vertex, weight: RatStr(w.clone()) }).collect()
        };
        GraphDoc {
            q: g.q(),
            vertices: g.core().vertices().iter().map(|v| VertexDoc { id: v.id, stab: RatStr(v.stab.clone()) }).collect(),
            edges: g.core().edges().iter().map(|e| EdgeDoc { u: e.u, v: e.v, stab: RatStr(e.stab.clone()) }).collect(),
            cusps: ends(g.cusps()),
            funnels: ends(g.funnels()),
        }
    }

    /// Structural checks with the path of the first offending entry.
    pub fn to_graph(&self) -> Result<GeomFiniteGraph, DocError> {
        if self.q == 0 {
            return Err(DocError::schema("q", "q must be at least 1"));
        }
        if self.vertices.is_empty() {
            return Err(DocError::schema("vertices", "the core needs at least one vertex"));
        }
        let mut ids = BTreeSet::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if !ids.insert(v.id) {
                return Err(DocError::schema(format!("vertices[{i}].id"), format!("duplicate vertex id {}", v.id)));
            }
            if !v.stab.0.is_positive() {
                return Err(DocError::schema(format!("vertices[{i}].stab"), "stabilizer must be positive"));
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            for (name, x) in [("u", e.u), ("v", e.v)] {
                if !ids.contains(&x) {
                    return Err(DocError::schema(format!("edges[{i}].{name}"), format!("unknown vertex {x}")));
                }
            }
            if !e.stab.0.is_positive() {
                return Err(DocError::schema(format!("edges[{i}].stab"), "stabilizer must be positive"));
            }
        }
        let ends = |list: &[EndDoc], key: &str| -> Result<BTreeMap<VertexId, BigRational>, DocError> {
            let mut out = BTreeMap::new();
            for (i, e) in list.iter().enumerate() {
                if !ids.contains(&e.vertex) {
                    return Err(DocError::schema(format!("{key}[{i}].vertex"), format!("unknown vertex {}", e.vertex)));
                }
                if e.weight.0 <= BigRational::zero() {
                    return Err(DocError::schema(
                        format!("{key}[{i}].weight"),
                        "weight must be positive (omit the entry for no end)",
                    ));
                }
                if out.insert(e.vertex, e.weight.0.clone()).is_some() {
                    return Err(DocError::schema(
                        format!("{key}[{i}].vertex"),
                        format!("vertex {} listed twice", e.vertex),
                    ));
                }
            }
            Ok(out)
        };
        let cusps = ends(&self.cusps, "cusps")?;
        let funnels = ends(&self.funnels, "funnels")?;
        let core = StabilizerGraph::new(
            self.vertices.iter().map(|v| Vertex::new(v.id, v.stab.0.clone())).collect(),
            self.edges.iter().map(|e| Edge::new(e.u, e.v, e.stab.0.clone())).collect(),
        )
        .map_err(|e| DocError::schema("", e.to_string()))?;
        GeomFiniteGraph::new(self.q, core, cusps, funnels).map_err(|e| DocError::schema("", e.to_string()))
    }
}

/// Parses a graph document.
pub fn parse_graph(text: &str) -> Result<Loaded, DocError> {
    let doc: GraphDoc = serde_json::from_str(text)?;
    let graph = doc.to_graph()?;
    let warnings = graph.validate();
    Ok(Loaded { graph, warnings })
}

/// Pretty-printed graph document with a trailing newline.
pub fn graph_to_json(g: &GeomFiniteGraph) -> String {
    let mut s = serde_json::to_string_pretty(&GraphDoc::from_graph(g)).expect("serialisable");
    s.push('\n');
    s
}

pub fn load_graph(path: &Path) -> Result<Loaded, DocError> {
    parse_graph(&read(path)?)
}

pub fn save_graph(g: &GeomFiniteGraph, path: &Path) -> std::io::Result<()> {
    std::fs::write(path, graph_to_json(g))
}

fn read(path: &Path) -> Result<String, DocError> {
    std::fs::read_to_string(path).map_err(|source| DocError::Io { path: path.display().to_string(), source })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindDoc {
    ProjectiveLine,
    Weierstrass,
}

/// The on-disk form of a curve: `a = [a1, a3, a2, a4, a6]` for Weierstrass
/// cubics, absent for the projective line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveDoc {
    pub p: u64,
    pub kind: KindDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<[i64; 5]>,
}

impl CurveDoc {
    pub fn from_curve(c: &CurveSpec) -> Self {
        match c.kind() {
            CurveKind::ProjectiveLine => CurveDoc { p: c.p(), kind: KindDoc::ProjectiveLine, a: None },
            CurveKind::Weierstrass => {
                CurveDoc { p: c.p(), kind: KindDoc::Weierstrass, a: Some(c.coefficients().map(|x| x as i64)) }
            }
        }
    }

    pub fn to_curve(&self) -> Result<CurveSpec, DocError> {
        let zeta = |e: ZetaError| DocError::schema(if matches!(e, ZetaError::NotPrime(_)) { "p" } else { "a" }, e.to_string());
        match (self.kind, self.a) {
            (KindDoc::ProjectiveLine, None) => CurveSpec::projective_line(self.p).map_err(zeta),
            (KindDoc::ProjectiveLine, Some(_)) => Err(DocError::schema("a", "the projective line takes no coefficients")),
            (KindDoc::Weierstrass, Some(a)) => CurveSpec::weierstrass(self.p, a).map_err(zeta),
            (KindDoc::Weierstrass, None) => Err(DocError::schema("a", "missing coefficients [a1, a3, a2, a4, a6]")),
        }
    }
}

pub fn parse_curve(text: &str) -> Result<CurveSpec, DocError> {
    serde_json::from_str::<CurveDoc>(text)?.to_curve()
}

pub fn curve_to_json(c: &CurveSpec) -> String {
    let mut s = serde_json::to_string_pretty(&CurveDoc::from_curve(c)).expect("serialisable");
    s.push('\n');
    s
}

pub fn load_curve(path: &Path) -> Result<CurveSpec, DocError> {
    parse_curve(&read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use gofres_core::fixtures;

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("3/2").unwrap(), BigRational::new(3.into(), 2.into()));
        assert_eq!(parse_rational("-4/1").unwrap(), BigRational::from_integer((-4).into()));
        assert!(parse_rational("4/2").unwrap_err().contains("lowest terms"));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("1/-2").is_err());
        assert!(parse_rational("3").is_err());
        assert!(parse_rational("a/b").is_err());
    }

    #[test]
    fn parabolic_document() {
        let text = r#"{"q": 2, "vertices": [{"id": 0, "stab": "1/1"}], "edges": [],
            "cusps": [{"vertex": 0, "weight": "1/1"}], "funnels": [{"vertex": 0, "weight": "2/1"}]}"#;
        let l = parse_graph(text).unwrap();
        assert!(l.warnings.is_empty());
        assert_eq!(l.graph, fixtures::parabolic(2));
    }

    #[test]
    fn positional_errors() {
        let e = parse_graph("{\"q\": 2,\n \"vertices\": [{\"id\": 0, \"stab\": \"2/4\"}], \"edges\": []}").unwrap_err();
        assert!(matches!(e, DocError::Syntax { line: 2, .. }), "{e}");
        let e = parse_graph(r#"{"q": 2, "vertices": [], "edges": []}"#).unwrap_err();
        assert_eq!(e.to_string(), "vertices: the core needs at least one vertex");
        let e = parse_graph(r#"{"q": 2, "vertices": [{"id": 0, "stab": "1/1"}], "edges": [{"u": 0, "v": 7, "stab": "1/1"}]}"#)
            .unwrap_err();
        assert_eq!(e.to_string(), "edges[0].v: unknown vertex 7");
        let e = parse_graph(r#"{"q": 2, "vertices": [{"id": 0, "stab": "1/1"}], "edges": [], "extra": 1}"#).unwrap_err();
        assert!(e.to_string().contains("unknown field `extra`"));
        let e = parse_graph(r#"{"q": 2, "q": 3, "vertices": [{"id": 0, "stab": "1/1"}], "edges": []}"#).unwrap_err();
        assert!(e.to_string().contains("duplicate field `q`"));
        let e = parse_graph(
            r#"{"q": 2, "vertices": [{"id": 0, "stab": "1/1"}], "edges": [],
                "cusps": [{"vertex": 0, "weight": "1/1"}, {"vertex": 0, "weight": "1/1"}]}"#,
        )
        .unwrap_err();
        assert_eq!(e.to_string(), "cusps[1].vertex: vertex 0 listed twice");
    }

    #[test]
    fn invalid_graph_loads_with_warnings() {
        let l = parse_graph(r#"{"q": 2, "vertices": [{"id": 0, "stab": "1/1"}], "edges": []}"#).unwrap();
        assert_eq!(l.warnings.len(), 1);
    }

    #[test]
    fn curves() {
        let c = parse_curve(r#"{"p": 2, "kind": "weierstrass", "a": [0, 1, 0, 1, 1]}"#).unwrap();
        assert_eq!(c, fixtures::curve_f2());
        assert_eq!(parse_curve(&curve_to_json(&c)).unwrap(), c);
        let l = parse_curve(r#"{"p": 5, "kind": "projective_line"}"#).unwrap();
        assert_eq!(parse_curve(&curve_to_json(&l)).unwrap(), l);
        assert!(parse_curve(r#"{"p": 6, "kind": "projective_line"}"#).unwrap_err().to_string().starts_with("p:"));
        assert!(parse_curve(r#"{"p": 5, "kind": "weierstrass", "a": [0, 0, 0, 0, 0]}"#).is_err());
        assert!(parse_curve(r#"{"p": 5, "kind": "elliptic"}"#).is_err());
    }
}
