//! save/load round trips for graph and curve documents.

mod common;

use std::collections::BTreeMap;

use gofres::io::{graph_to_json, parse_curve, parse_graph, curve_to_json};
use gofres_core::graph::{Edge, GeomFiniteGraph, StabilizerGraph, Vertex};
use gofres_core::zeta::CurveSpec;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = BigRational> {
    (1i64..50, 1i64..12).prop_map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
}

/// Arbitrary well-formed (not necessarily regular) graphs, with loops and
/// parallel edges and non-contiguous ids.
fn graph() -> impl Strategy<Value = GeomFiniteGraph> {
    (1usize..7, 1u64..6).prop_flat_map(|(n, q)| {
        let ids = proptest::collection::btree_set(0u64..1000, n);
        (ids, Just(q)).prop_flat_map(move |(ids, q)| {
            let ids: Vec<u64> = ids.into_iter().collect();
            let pick = proptest::sample::select(ids.clone());
            (
                proptest::collection::vec(rational(), n),
                proptest::collection::vec((pick.clone(), pick.clone(), rational()), 0..8),
                proptest::collection::btree_map(pick.clone(), rational(), 0..3),
                proptest::collection::btree_map(pick, rational(), 0..3),
                Just(ids),
                Just(q),
            )
        })
    })
    .prop_map(|(stabs, edges, cusps, funnels, ids, q)| {
        let vertices = ids.iter().zip(stabs).map(|(&id, s)| Vertex::new(id, s)).collect();
        let edges = edges.into_iter().map(|(u, v, s)| Edge::new(u, v, s)).collect();
        let core = StabilizerGraph::new(vertices, edges).unwrap();
        GeomFiniteGraph::new(q, core, cusps, funnels).unwrap()
    })
}

proptest! {
    #[test]
    fn graph_round_trip(g in graph()) {
        let text = graph_to_json(&g);
        let loaded = parse_graph(&text).unwrap();
        prop_assert_eq!(&loaded.graph, &g);
        prop_assert_eq!(loaded.warnings, g.validate());
        prop_assert_eq!(graph_to_json(&loaded.graph), text);
    }

    #[test]
    fn curve_round_trip(p in proptest::sample::select(vec![2u64, 3, 5, 7, 11]), a in proptest::array::uniform5(-20i64..20)) {
        if let Ok(c) = CurveSpec::weierstrass(p, a) {
            prop_assert_eq!(parse_curve(&curve_to_json(&c)).unwrap(), c);
        }
    }
}

/// Documents on disk survive load/save up to key order and whitespace.
#[test]
fn documents_round_trip() {
    for entry in std::fs::read_dir(common::fixtures_dir()).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_str().unwrap().to_string();
        if path.extension().and_then(|e| e.to_str()) != Some("json") {
            continue;
        }
        let text = std::fs::read_to_string(&path).unwrap();
        let original: serde_json::Value = serde_json::from_str(&text).unwrap();
        let saved = if name.starts_with("curve") || name.starts_with("projective") {
            curve_to_json(&parse_curve(&text).unwrap())
        } else {
            graph_to_json(&parse_graph(&text).unwrap().graph)
        };
        let back: serde_json::Value = serde_json::from_str(&saved).unwrap();
        assert_eq!(back, original, "{name}");
    }
    // key order does not matter
    let shuffled = r#"{"funnels": [{"weight": "2/1", "vertex": 0}], "edges": [], "q": 2,
        "cusps": [{"weight": "1/1", "vertex": 0}], "vertices": [{"stab": "1/1", "id": 0}]}"#;
    let g = parse_graph(shuffled).unwrap().graph;
    let _: BTreeMap<String, serde_json::Value> = serde_json::from_str(&graph_to_json(&g)).unwrap();
    assert_eq!(g, gofres_core::fixtures::parabolic(2));
}
