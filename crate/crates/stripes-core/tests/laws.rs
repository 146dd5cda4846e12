//! Property tests for the algebraic laws of the groupoid engine, the
//! serializer round-trip, saturation, and the rank formulas.

use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use stripes_core::atlas::expand;
use stripes_core::dsl::{parse, serialize};
use stripes_core::foliation::{saturate, LevelRange};
use stripes_core::graph::{build_graph, graph_invariants, Graph};
use stripes_core::groupoid::{compose, dart_ends, inverse, reduce, subgroup_rank, BasedGroupoid, DirEdge, Word};
use stripes_core::rat::rat;
use stripes_core::suite::{random_syntax_atlas, random_valid_atlas};

fn named_graph(vertices: &[&str], edges: &[(&str, &str, &str)]) -> Graph {
    Graph::new(
        vertices.iter().map(|v| v.to_string()),
        edges.iter().map(|(id, a, b)| (id.to_string(), a.to_string(), b.to_string())),
    )
    .expect("pool graph is well-formed")
}

fn graph_pool() -> Vec<Graph> {
    vec![
        named_graph(&["p", "q"], &[("a", "p", "q"), ("b", "p", "q"), ("c", "p", "q")]),
        named_graph(&["p"], &[("x", "p", "p"), ("y", "p", "p")]),
        named_graph(&["a", "b", "c"], &[("e0", "a", "b"), ("e1", "b", "c")]),
        named_graph(&["r", "s", "t"], &[("c0", "r", "s"), ("c1", "s", "r"), ("tail", "s", "t")]),
    ]
}

/// All darts leaving `v`.
fn darts_from(graph: &Graph, v: usize) -> Vec<DirEdge> {
    let mut out = Vec::new();
    for e in graph.incident(v) {
        for forward in [true, false] {
            let d = DirEdge { edge: e, forward };
            if dart_ends(graph, d).0 == v {
                out.push(d);
            }
        }
    }
    out
}

/// Deterministic walk from byte picks: at each step choose among the darts
/// leaving the current vertex.
fn walk(graph: &Graph, start: usize, picks: &[u8]) -> Word {
    let mut steps = Vec::new();
    let mut at = start;
    for &p in picks {
        let darts = darts_from(graph, at);
        if darts.is_empty() {
            break;
        }
        let d = darts[p as usize % darts.len()];
        at = dart_ends(graph, d).1;
        steps.push(d);
    }
    Word::new(graph, start, steps).expect("walk is continuous")
}

/// Insert cancelling pairs `d · d⁻¹` at pick-chosen positions; the result
/// is freely equal to the input.
fn pad_with_cancelling_pairs(graph: &Graph, word: &Word, picks: &[(u8, u8)]) -> Word {
    let mut steps: Vec<DirEdge> = word.steps().to_vec();
    for &(pos_pick, dart_pick) in picks {
        let pos = pos_pick as usize % (steps.len() + 1);
        let at = Word::new(graph, word.start(), steps[..pos].to_vec()).unwrap().end();
        let darts = darts_from(graph, at);
        if darts.is_empty() {
            continue;
        }
        let d = darts[dart_pick as usize % darts.len()];
        steps.insert(pos, d.reversed());
        steps.insert(pos, d);
    }
    Word::new(graph, word.start(), steps).expect("padded walk is continuous")
}

proptest! {
    #[test]
    fn reduce_is_idempotent_and_terminal(
        g in 0usize..4,
        start_pick in any::<u8>(),
        picks in prop::collection::vec(any::<u8>(), 0..40),
    ) {
        let graph = &graph_pool()[g];
        let w = walk(graph, start_pick as usize % graph.vertex_count(), &picks);
        let r = reduce(&w);
        prop_assert!(r.is_reduced());
        let again = reduce(&r);
        prop_assert_eq!(again.steps(), r.steps());
        prop_assert_eq!((r.start(), r.end()), (w.start(), w.end()));
    }

    #[test]
    fn reduce_is_invariant_under_cancelling_insertions(
        g in 0usize..4,
        start_pick in any::<u8>(),
        picks in prop::collection::vec(any::<u8>(), 0..20),
        pads in prop::collection::vec((any::<u8>(), any::<u8>()), 0..8),
    ) {
        let graph = &graph_pool()[g];
        let w = walk(graph, start_pick as usize % graph.vertex_count(), &picks);
        let padded = pad_with_cancelling_pairs(graph, &w, &pads);
        let reduced_padded = reduce(&padded);
        let reduced_plain = reduce(&w);
        prop_assert_eq!(reduced_padded.steps(), reduced_plain.steps());
    }

    #[test]
    fn compose_is_associative(
        g in 0usize..4,
        start_pick in any::<u8>(),
        p1 in prop::collection::vec(any::<u8>(), 0..15),
        p2 in prop::collection::vec(any::<u8>(), 0..15),
        p3 in prop::collection::vec(any::<u8>(), 0..15),
    ) {
        let graph = &graph_pool()[g];
        let w1 = walk(graph, start_pick as usize % graph.vertex_count(), &p1);
        let w2 = walk(graph, w1.end(), &p2);
        let w3 = walk(graph, w2.end(), &p3);
        let left = compose(&compose(&w1, &w2).unwrap(), &w3).unwrap();
        let right = compose(&w1, &compose(&w2, &w3).unwrap()).unwrap();
        prop_assert_eq!(left.steps(), right.steps());
        prop_assert_eq!((left.start(), left.end()), (right.start(), right.end()));
    }

    #[test]
    fn inverses_cancel_and_identities_are_neutral(
        g in 0usize..4,
        start_pick in any::<u8>(),
        picks in prop::collection::vec(any::<u8>(), 0..25),
    ) {
        let graph = &graph_pool()[g];
        let w = walk(graph, start_pick as usize % graph.vertex_count(), &picks);
        let cancel = compose(&w, &inverse(&w)).unwrap();
        prop_assert!(cancel.is_empty());
        prop_assert_eq!(cancel.start(), w.start());
        let left_id = compose(&Word::identity(w.start()), &w).unwrap();
        let right_id = compose(&w, &Word::identity(w.end())).unwrap();
        let reduced = reduce(&w);
        prop_assert_eq!(left_id.steps(), reduced.steps());
        prop_assert_eq!(right_id.steps(), reduced.steps());
    }

    #[test]
    fn serializer_round_trips_random_atlases(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let atlas = random_syntax_atlas(&mut rng);
        let text = serialize(&atlas);
        let reparsed = parse(&text).map_err(|e| TestCaseError::fail(format!("{:?}", e)))?;
        prop_assert_eq!(reparsed, atlas);
    }

    #[test]
    fn saturation_is_idempotent(
        raw in prop::collection::vec((-9i64..=9, -9i64..=9, any::<bool>(), any::<bool>()), 0..6),
    ) {
        let ranges: Vec<LevelRange> = raw
            .iter()
            .map(|&(a, b, lc, hc)| LevelRange {
                lo: rat(a.min(b), 10),
                hi: rat(a.max(b), 10),
                lo_closed: lc,
                hi_closed: hc,
            })
            .collect();
        let once = saturate("A", &ranges).unwrap();
        let twice = saturate("A", &once.ranges).unwrap();
        prop_assert_eq!(&once, &twice);
        // Membership is preserved by normalization.
        for k in -10..=10 {
            let t = rat(k, 10);
            if t > rat(-1, 1) && t < rat(1, 1) {
                prop_assert_eq!(once.contains_level(&t), ranges.iter().any(|r| r.contains(&t)));
            }
        }
    }

    #[test]
    fn rank_formula_matches_components(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let atlas = random_valid_atlas(&mut rng, 8, 12);
        let graph = build_graph(&expand(&atlas, 0));
        let inv = graph_invariants(&graph);
        prop_assert_eq!(
            inv.euler_characteristic,
            inv.vertex_count as i64 - inv.edge_count as i64
        );
        let mut vertices_seen = 0;
        let mut edges_seen = 0;
        let mut total = 0;
        for c in &inv.components {
            prop_assert_eq!(
                c.free_rank as i64,
                c.edge_count as i64 - c.vertices.len() as i64 + 1
            );
            vertices_seen += c.vertices.len();
            edges_seen += c.edge_count;
            total += c.free_rank;
        }
        prop_assert_eq!(vertices_seen, inv.vertex_count);
        prop_assert_eq!(edges_seen, inv.edge_count);
        prop_assert_eq!(total, inv.total_rank);
        prop_assert_eq!(inv.components.len(), inv.component_count);
    }

    #[test]
    fn free_bases_fold_to_full_rank(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let atlas = random_valid_atlas(&mut rng, 6, 8);
        let graph = Arc::new(build_graph(&expand(&atlas, 0)));
        let basepoints: BTreeSet<usize> = (0..graph.vertex_count()).collect();
        let groupoid = BasedGroupoid::new(Arc::clone(&graph), basepoints).unwrap();
        for basis in groupoid.free_bases() {
            prop_assert_eq!(subgroup_rank(&basis.loops), basis.loops.len());
        }
    }
}
