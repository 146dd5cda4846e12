//! The gluing graph of an atlas and generic multigraph machinery.
//!
//! Vertices are strips; every instantiated gluing contributes one edge from
//! the strip carrying its X end to the strip carrying its Y end. Loops
//! (self-gluings of a strip) and parallel edges are ordinary citizens: edges
//! are identified by id, never by endpoint pair.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::atlas::ExpandedAtlas;
use crate::rat::{fmt_rat, rat_int, Rat};

/// An undirected edge with a stable orientation (`u` then `v`) used when
/// edges are traversed as generators of the fundamental groupoid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub id: String,
    pub u: usize,
    pub v: usize,
}

/// A finite multigraph with string-labelled vertices and edges, stored in a
/// canonical order (vertices and edges sorted by id).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Graph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),
    #[error("duplicate edge id `{0}`")]
    DuplicateEdge(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("bad subdivision marks on edge `{edge}`: {detail}")]
    BadMarks { edge: String, detail: String },
    #[error("graph too large for exhaustive search: {vertices} vertices / {edges} edges (limit {max_vertices}/{max_edges})")]
    TooLarge { vertices: usize, edges: usize, max_vertices: usize, max_edges: usize },
}

impl Graph {
    /// Build a graph from vertex ids and `(edge id, endpoint, endpoint)`
    /// triples. Ids are deduplicated by error, then everything is sorted.
    pub fn new<V, E>(vertices: V, edges: E) -> Result<Graph, GraphError>
    where
        V: IntoIterator<Item = String>,
        E: IntoIterator<Item = (String, String, String)>,
    {
        let mut vs: Vec<String> = vertices.into_iter().collect();
        vs.sort();
        for w in vs.windows(2) {
            if w[0] == w[1] {
                return Err(GraphError::DuplicateVertex(w[0].clone()));
            }
        }
        let index: BTreeMap<&str, usize> = vs.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
        let mut es = Vec::new();
        for (id, a, b) in edges {
            let u = *index.get(a.as_str()).ok_or_else(|| GraphError::UnknownVertex(a.clone()))?;
            let v = *index.get(b.as_str()).ok_or_else(|| GraphError::UnknownVertex(b.clone()))?;
            es.push(Edge { id, u, v });
        }
        es.sort_by(|a, b| a.id.cmp(&b.id));
        for w in es.windows(2) {
            if w[0].id == w[1].id {
                return Err(GraphError::DuplicateEdge(w[0].id.clone()));
            }
        }
        Ok(Graph { vertices: vs, edges: es })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_name(&self, i: usize) -> &str {
        &self.vertices[i]
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.binary_search_by(|v| v.as_str().cmp(name)).ok()
    }

    pub fn edge(&self, id: &str) -> Option<&Edge> {
        self.edges.binary_search_by(|e| e.id.as_str().cmp(id)).ok().map(|i| &self.edges[i])
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.binary_search_by(|e| e.id.as_str().cmp(id)).ok()
    }

    /// Degree with loops counted twice.
    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|e| (e.u == v) as usize + (e.v == v) as usize)
            .sum()
    }

    /// Edge indices incident to `v`, loops listed once.
    pub fn incident(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&i| self.edges[i].u == v || self.edges[i].v == v)
            .collect()
    }

    /// Component id per vertex (0-based, ordered by least member vertex).
    pub fn component_ids(&self) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        fn find(parent: &mut Vec<usize>, x: usize) -> usize {
            if parent[x] != x {
                let root = find(parent, parent[x]);
                parent[x] = root;
            }
            parent[x]
        }
        for e in &self.edges {
            let (ru, rv) = (find(&mut parent, e.u), find(&mut parent, e.v));
            if ru != rv {
                parent[ru.max(rv)] = ru.min(rv);
            }
        }
        let mut ids = vec![usize::MAX; self.vertices.len()];
        let mut next = 0;
        for v in 0..self.vertices.len() {
            let root = find(&mut parent, v);
            if ids[root] == usize::MAX {
                ids[root] = next;
                next += 1;
            }
            ids[v] = ids[root];
        }
        ids
    }
}

/// Invariants of one connected component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentInvariants {
    pub vertices: Vec<String>,
    pub edge_count: usize,
    /// Rank of the free fundamental group: `E - V + 1`.
    pub free_rank: usize,
}

/// Whole-graph invariants.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphInvariants {
    pub vertex_count: usize,
    pub edge_count: usize,
    /// `V - E`.
    pub euler_characteristic: i64,
    pub component_count: usize,
    pub components: Vec<ComponentInvariants>,
    /// Sum of the per-component free ranks.
    pub total_rank: usize,
}

/// Component structure, Euler characteristic, and free ranks.
pub fn graph_invariants(graph: &Graph) -> GraphInvariants {
    let ids = graph.component_ids();
    let count = ids.iter().copied().max().map_or(0, |m| m + 1);
    let mut components = Vec::new();
    for c in 0..count {
        let vertices: Vec<String> = (0..graph.vertex_count())
            .filter(|&v| ids[v] == c)
            .map(|v| graph.vertex_name(v).to_string())
            .collect();
        let edge_count = graph.edges().iter().filter(|e| ids[e.u] == c).count();
        let free_rank = edge_count + 1 - vertices.len();
        components.push(ComponentInvariants { vertices, edge_count, free_rank });
    }
    GraphInvariants {
        vertex_count: graph.vertex_count(),
        edge_count: graph.edge_count(),
        euler_characteristic: graph.vertex_count() as i64 - graph.edge_count() as i64,
        component_count: count,
        components: components.clone(),
        total_rank: components.iter().map(|c| c.free_rank).sum(),
    }
}

/// The gluing graph: one vertex per strip, one edge per instantiated
/// gluing, running from the strip of the X end to the strip of the Y end.
pub fn build_graph(expanded: &ExpandedAtlas) -> Graph {
    Graph::new(
        expanded.strips.iter().map(|s| s.id.clone()),
        expanded
            .gluings
            .iter()
            .map(|g| (g.id.to_string(), g.x.strip.clone(), g.y.strip.clone())),
    )
    .expect("strip and gluing ids are unique by atlas construction")
}

/// Replace each marked edge by a path. `marks[edge]` is a strictly
/// increasing list of parameters in the open interval `(-1, 1)`; the edge
/// `e : u → v` becomes vertices `e@t` and arcs `e#0 … e#k` ordered from `u`
/// to `v`. Edges without marks are kept unchanged, so an empty mark map
/// returns an identical graph.
pub fn subdivide(graph: &Graph, marks: &BTreeMap<String, Vec<Rat>>) -> Result<Graph, GraphError> {
    for (edge, ts) in marks {
        if graph.edge(edge).is_none() {
            return Err(GraphError::UnknownEdge(edge.clone()));
        }
        let one = rat_int(1);
        for t in ts {
            if t <= &-one.clone() || t >= &one {
                return Err(GraphError::BadMarks {
                    edge: edge.clone(),
                    detail: format!("mark {} outside (-1, 1)", fmt_rat(t)),
                });
            }
        }
        for w in ts.windows(2) {
            if w[0] >= w[1] {
                return Err(GraphError::BadMarks {
                    edge: edge.clone(),
                    detail: "marks not strictly increasing".to_string(),
                });
            }
        }
    }
    let mut vertices: Vec<String> = graph.vertices().to_vec();
    let mut edges: Vec<(String, String, String)> = Vec::new();
    for e in graph.edges() {
        match marks.get(&e.id).filter(|ts| !ts.is_empty()) {
            None => edges.push((e.id.clone(), graph.vertex_name(e.u).to_string(), graph.vertex_name(e.v).to_string())),
            Some(ts) => {
                let mut stops = vec![graph.vertex_name(e.u).to_string()];
                for t in ts {
                    let m = format!("{}@{}", e.id, fmt_rat(t));
                    vertices.push(m.clone());
                    stops.push(m);
                }
                stops.push(graph.vertex_name(e.v).to_string());
                for (i, pair) in stops.windows(2).enumerate() {
                    edges.push((format!("{}#{}", e.id, i), pair[0].clone(), pair[1].clone()));
                }
            }
        }
    }
    Graph::new(vertices, edges)
}

/// The orientation sign of one seam: `+1` when the transition matches an
/// orientation of the two bands that agree across the seam (opposite sides
/// joined without reversal, or equal sides joined with reversal), `-1`
/// otherwise.
pub fn seam_sign(x_side: crate::atlas::Side, y_side: crate::atlas::Side, reversed: bool) -> i8 {
    let opposite = x_side != y_side;
    if opposite != reversed {
        1
    } else {
        -1
    }
}

/// True iff the glued surface is orientable: every cycle of the gluing
/// graph must have positive sign product. Checked by 2-colouring each
/// component with signs.
pub fn orientable(expanded: &ExpandedAtlas) -> bool {
    let graph = build_graph(expanded);
    // Indexed by the graph's edge order, which can differ from the
    // expansion's seam order (string sort vs. numeric member index).
    let mut signs: Vec<i8> = vec![0; graph.edge_count()];
    for g in &expanded.gluings {
        let idx = graph.edge_index(&g.id.to_string()).expect("edge ids come from seam ids");
        signs[idx] = seam_sign(g.x.side, g.y.side, g.reversed);
    }
    let n = graph.vertex_count();
    let mut colour: Vec<Option<i8>> = vec![None; n];
    for start in 0..n {
        if colour[start].is_some() {
            continue;
        }
        colour[start] = Some(1);
        let mut queue = vec![start];
        while let Some(v) = queue.pop() {
            let cv = colour[v].unwrap();
            for i in graph.incident(v) {
                let e = &graph.edges()[i];
                let w = if e.u == v { e.v } else { e.u };
                let cw = cv * signs[i];
                if e.u == e.v {
                    if signs[i] == -1 {
                        return false;
                    }
                    continue;
                }
                match colour[w] {
                    None => {
                        colour[w] = Some(cw);
                        queue.push(w);
                    }
                    Some(c) if c != cw => return false,
                    Some(_) => {}
                }
            }
        }
    }
    true
}

/// A graph isomorphism: vertex and edge bijections, by name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Isomorphism {
    pub vertex_map: BTreeMap<String, String>,
    pub edge_map: BTreeMap<String, String>,
}

const MAX_ISO_VERTICES: usize = 10;
const MAX_ISO_EDGES: usize = 14;

fn check_size(g: &Graph) -> Result<(), GraphError> {
    if g.vertex_count() > MAX_ISO_VERTICES || g.edge_count() > MAX_ISO_EDGES {
        return Err(GraphError::TooLarge {
            vertices: g.vertex_count(),
            edges: g.edge_count(),
            max_vertices: MAX_ISO_VERTICES,
            max_edges: MAX_ISO_EDGES,
        });
    }
    Ok(())
}

/// Multiset of edge multiplicities between ordered index pairs (`u <= v`).
fn bundle_counts(g: &Graph) -> BTreeMap<(usize, usize), Vec<usize>> {
    let mut m: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (i, e) in g.edges().iter().enumerate() {
        let key = (e.u.min(e.v), e.u.max(e.v));
        m.entry(key).or_default().push(i);
    }
    m
}

/// Exhaustive isomorphism search. Both graphs must satisfy the size guard
/// (≤ 10 vertices, ≤ 14 edges); returns the first isomorphism in the
/// deterministic search order, or `None`.
pub fn isomorphic(g1: &Graph, g2: &Graph) -> Result<Option<Isomorphism>, GraphError> {
    check_size(g1)?;
    check_size(g2)?;
    if g1.vertex_count() != g2.vertex_count() || g1.edge_count() != g2.edge_count() {
        return Ok(None);
    }
    let b1 = bundle_counts(g1);
    let b2 = bundle_counts(g2);
    let n = g1.vertex_count();
    let mut assignment: Vec<Option<usize>> = vec![None; n];
    let mut used = vec![false; n];
    if search(g1, g2, &b1, &b2, &mut assignment, &mut used, 0) {
        let vertex_map: BTreeMap<String, String> = assignment
            .iter()
            .enumerate()
            .map(|(u, img)| (g1.vertex_name(u).to_string(), g2.vertex_name(img.unwrap()).to_string()))
            .collect();
        let mut edge_map = BTreeMap::new();
        for (key, bundle1) in &b1 {
            let img = (assignment[key.0].unwrap().min(assignment[key.1].unwrap()),
                       assignment[key.0].unwrap().max(assignment[key.1].unwrap()));
            let bundle2 = &b2[&img];
            // Pair the bundles in id order: any pairing works, id order is
            // the canonical one.
            for (a, b) in bundle1.iter().zip(bundle2.iter()) {
                edge_map.insert(g1.edges()[*a].id.clone(), g2.edges()[*b].id.clone());
            }
        }
        return Ok(Some(Isomorphism { vertex_map, edge_map }));
    }
    Ok(None)
}

fn compatible_so_far(
    b1: &BTreeMap<(usize, usize), Vec<usize>>,
    b2: &BTreeMap<(usize, usize), Vec<usize>>,
    assignment: &[Option<usize>],
    just_assigned: usize,
) -> bool {
    let img_of = |v: usize| assignment[v];
    for (&(u, v), bundle) in b1 {
        if u != just_assigned && v != just_assigned {
            continue;
        }
        if let (Some(iu), Some(iv)) = (img_of(u), img_of(v)) {
            let key = (iu.min(iv), iu.max(iv));
            if b2.get(&key).map_or(0, |b| b.len()) != bundle.len() {
                return false;
            }
        }
    }
    // Every bundle of b2 between assigned images must be matched from b1;
    // counting both directions once at the end is enough because sizes are
    // equal, so only the forward check is needed during the search.
    true
}

fn search(
    g1: &Graph,
    g2: &Graph,
    b1: &BTreeMap<(usize, usize), Vec<usize>>,
    b2: &BTreeMap<(usize, usize), Vec<usize>>,
    assignment: &mut Vec<Option<usize>>,
    used: &mut Vec<bool>,
    next: usize,
) -> bool {
    let n = g1.vertex_count();
    if next == n {
        // Sizes matched bundle-by-bundle along the way and edge totals are
        // equal, so the assignment is a genuine isomorphism.
        return true;
    }
    for candidate in 0..n {
        if used[candidate] || g1.degree(next) != g2.degree(candidate) {
            continue;
        }
        assignment[next] = Some(candidate);
        used[candidate] = true;
        if compatible_so_far(b1, b2, assignment, next) && search(g1, g2, b1, b2, assignment, used, next + 1) {
            return true;
        }
        assignment[next] = None;
        used[candidate] = false;
    }
    false
}

/// The number of automorphisms of `graph`, counted as pairs of a vertex
/// bijection and a compatible edge bijection (so a bundle of `m` parallel
/// edges fixed setwise contributes `m!`). Same size guard as
/// [`isomorphic`].
pub fn automorphism_count(graph: &Graph) -> Result<u64, GraphError> {
    check_size(graph)?;
    let bundles = bundle_counts(graph);
    let n = graph.vertex_count();
    let mut assignment: Vec<Option<usize>> = vec![None; n];
    let mut used = vec![false; n];
    let mut total = 0u64;
    count_autos(graph, &bundles, &mut assignment, &mut used, 0, &mut total);
    Ok(total)
}

fn count_autos(
    g: &Graph,
    bundles: &BTreeMap<(usize, usize), Vec<usize>>,
    assignment: &mut Vec<Option<usize>>,
    used: &mut Vec<bool>,
    next: usize,
    total: &mut u64,
) {
    let n = g.vertex_count();
    if next == n {
        let mut ways = 1u64;
        for bundle in bundles.values() {
            let mut f = 1u64;
            for k in 1..=(bundle.len() as u64) {
                f *= k;
            }
            ways *= f;
        }
        *total += ways;
        return;
    }
    for candidate in 0..n {
        if used[candidate] || g.degree(next) != g.degree(candidate) {
            continue;
        }
        assignment[next] = Some(candidate);
        used[candidate] = true;
        if compatible_so_far(bundles, bundles, assignment, next) {
            count_autos(g, bundles, assignment, used, next + 1, total);
        }
        assignment[next] = None;
        used[candidate] = false;
    }
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering: every vertex on its own line, then every edge with
/// its id as label, in canonical order.
pub fn to_dot(graph: &Graph) -> String {
    let mut out = String::from("graph stripes {\n");
    for v in graph.vertices() {
        let _ = writeln!(out, "  \"{}\";", dot_escape(v));
    }
    for e in graph.edges() {
        let _ = writeln!(
            out,
            "  \"{}\" -- \"{}\" [label=\"{}\"];",
            dot_escape(graph.vertex_name(e.u)),
            dot_escape(graph.vertex_name(e.v)),
            dot_escape(&e.id)
        );
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn cycle(n: usize) -> Graph {
        Graph::new(
            (0..n).map(|i| format!("v{}", i)),
            (0..n).map(|i| (format!("e{}", i), format!("v{}", i), format!("v{}", (i + 1) % n))),
        )
        .unwrap()
    }

    #[test]
    fn four_cycle_invariants() {
        let inv = graph_invariants(&cycle(4));
        assert_eq!(inv.vertex_count, 4);
        assert_eq!(inv.edge_count, 4);
        assert_eq!(inv.euler_characteristic, 0);
        assert_eq!(inv.component_count, 1);
        assert_eq!(inv.total_rank, 1);
    }

    #[test]
    fn loops_and_parallel_edges_count() {
        // One vertex with two loops: rank 2.
        let g = Graph::new(
            ["a".to_string()],
            [("l0".to_string(), "a".to_string(), "a".to_string()), ("l1".to_string(), "a".to_string(), "a".to_string())],
        )
        .unwrap();
        let inv = graph_invariants(&g);
        assert_eq!(inv.total_rank, 2);
        assert_eq!(g.degree(0), 4);

        // Two vertices with two parallel edges: rank 1.
        let g = Graph::new(
            ["a".to_string(), "b".to_string()],
            [("p0".to_string(), "a".to_string(), "b".to_string()), ("p1".to_string(), "a".to_string(), "b".to_string())],
        )
        .unwrap();
        assert_eq!(graph_invariants(&g).total_rank, 1);
    }

    #[test]
    fn forest_ranks_are_zero() {
        let g = Graph::new(
            ["a", "b", "c", "d", "e"].map(String::from),
            [
                ("e0".to_string(), "a".to_string(), "b".to_string()),
                ("e1".to_string(), "b".to_string(), "c".to_string()),
            ],
        )
        .unwrap();
        let inv = graph_invariants(&g);
        assert_eq!(inv.component_count, 3);
        assert_eq!(inv.total_rank, 0);
        assert_eq!(inv.euler_characteristic, 3);
    }

    #[test]
    fn subdivision_inserts_paths() {
        let g = cycle(3);
        let mut marks = BTreeMap::new();
        marks.insert("e0".to_string(), vec![rat(-1, 10), rat(1, 10)]);
        let s = subdivide(&g, &marks).unwrap();
        assert_eq!(s.vertex_count(), 5);
        assert_eq!(s.edge_count(), 5);
        assert!(s.vertex_index("e0@-1/10").is_some());
        assert!(s.vertex_index("e0@1/10").is_some());
        assert!(s.edge("e0#0").is_some());
        assert!(s.edge("e0#2").is_some());
        assert!(s.edge("e0").is_none());
        // Rank is a subdivision invariant.
        assert_eq!(graph_invariants(&s).total_rank, graph_invariants(&g).total_rank);

        assert_eq!(subdivide(&g, &BTreeMap::new()).unwrap(), g);
    }

    #[test]
    fn subdivision_rejects_bad_marks() {
        let g = cycle(3);
        let mut marks = BTreeMap::new();
        marks.insert("nope".to_string(), vec![rat(1, 2)]);
        assert!(matches!(subdivide(&g, &marks), Err(GraphError::UnknownEdge(_))));
        let mut marks = BTreeMap::new();
        marks.insert("e0".to_string(), vec![rat(3, 2)]);
        assert!(matches!(subdivide(&g, &marks), Err(GraphError::BadMarks { .. })));
        let mut marks = BTreeMap::new();
        marks.insert("e0".to_string(), vec![rat(1, 10), rat(1, 10)]);
        assert!(matches!(subdivide(&g, &marks), Err(GraphError::BadMarks { .. })));
    }

    #[test]
    fn cycle_automorphisms() {
        assert_eq!(automorphism_count(&cycle(4)).unwrap(), 8);
    }

    #[test]
    fn parallel_pair_automorphisms() {
        let g = Graph::new(
            ["a".to_string(), "b".to_string()],
            [("p0".to_string(), "a".to_string(), "b".to_string()), ("p1".to_string(), "a".to_string(), "b".to_string())],
        )
        .unwrap();
        assert_eq!(automorphism_count(&g).unwrap(), 4);
    }

    #[test]
    fn single_vertex_automorphisms() {
        let g = Graph::new(["a".to_string()], []).unwrap();
        assert_eq!(automorphism_count(&g).unwrap(), 1);
    }

    #[test]
    fn isomorphism_finds_relabellings() {
        let g1 = cycle(4);
        let g2 = Graph::new(
            ["w", "x", "y", "z"].map(String::from),
            [
                ("f0".to_string(), "z".to_string(), "x".to_string()),
                ("f1".to_string(), "x".to_string(), "w".to_string()),
                ("f2".to_string(), "w".to_string(), "y".to_string()),
                ("f3".to_string(), "y".to_string(), "z".to_string()),
            ],
        )
        .unwrap();
        let iso = isomorphic(&g1, &g2).unwrap().expect("4-cycles are isomorphic");
        assert_eq!(iso.vertex_map.len(), 4);
        assert_eq!(iso.edge_map.len(), 4);
        // The image really is a bijection.
        let images: std::collections::BTreeSet<_> = iso.vertex_map.values().collect();
        assert_eq!(images.len(), 4);

        let path = Graph::new(
            ["a", "b", "c", "d"].map(String::from),
            [
                ("e0".to_string(), "a".to_string(), "b".to_string()),
                ("e1".to_string(), "b".to_string(), "c".to_string()),
                ("e2".to_string(), "c".to_string(), "d".to_string()),
            ],
        )
        .unwrap();
        assert!(isomorphic(&g1, &path).unwrap().is_none());
    }

    #[test]
    fn isomorphism_distinguishes_loop_from_parallel() {
        // Same degree sequence in total (loop counts twice), different shape.
        let loop_graph = Graph::new(
            ["a".to_string(), "b".to_string()],
            [
                ("l".to_string(), "a".to_string(), "a".to_string()),
                ("e".to_string(), "a".to_string(), "b".to_string()),
            ],
        )
        .unwrap();
        let parallel = Graph::new(
            ["a".to_string(), "b".to_string()],
            [
                ("p0".to_string(), "a".to_string(), "b".to_string()),
                ("p1".to_string(), "a".to_string(), "b".to_string()),
            ],
        )
        .unwrap();
        assert!(isomorphic(&loop_graph, &parallel).unwrap().is_none());
    }

    #[test]
    fn size_guard_trips() {
        let big = Graph::new((0..11).map(|i| format!("v{}", i)), []).unwrap();
        assert!(matches!(automorphism_count(&big), Err(GraphError::TooLarge { .. })));
        assert!(matches!(isomorphic(&big, &big), Err(GraphError::TooLarge { .. })));
    }

    #[test]
    fn dot_output_is_canonical() {
        let g = Graph::new(
            ["b".to_string(), "a".to_string()],
            [("e".to_string(), "b".to_string(), "a".to_string())],
        )
        .unwrap();
        // Edges keep their declared orientation (u then v).
        assert_eq!(to_dot(&g), "graph stripes {\n  \"a\";\n  \"b\";\n  \"b\" -- \"a\" [label=\"e\"];\n}\n");
    }

    /// Independent rank oracle: dimension of the GF(2) cycle space computed
    /// by Gaussian elimination over the edge-vertex incidence matrix (loops
    /// contribute empty rows, i.e. free cycles).
    fn gf2_cycle_rank(g: &Graph) -> usize {
        let mut rows: Vec<Vec<bool>> = Vec::new();
        for e in g.edges() {
            let mut row = vec![false; g.vertex_count()];
            if e.u != e.v {
                row[e.u] = true;
                row[e.v] = true;
            }
            rows.push(row);
        }
        let mut rank = 0;
        let mut pivot_rows: Vec<Vec<bool>> = Vec::new();
        for mut row in rows {
            for p in &pivot_rows {
                if let Some(lead) = p.iter().position(|&b| b) {
                    if row[lead] {
                        for (r, q) in row.iter_mut().zip(p.iter()) {
                            *r ^= q;
                        }
                    }
                }
            }
            if row.iter().any(|&b| b) {
                pivot_rows.push(row);
                rank += 1;
            }
        }
        g.edge_count() - rank
    }

    #[test]
    fn rank_matches_gf2_cycle_space() {
        let mut samples = vec![cycle(3), cycle(6)];
        samples.push(Graph::new(["a".to_string()], [("l".to_string(), "a".to_string(), "a".to_string())]).unwrap());
        samples.push(
            Graph::new(
                ["a", "b", "c", "d", "e"].map(String::from),
                [
                    ("e0".to_string(), "a".to_string(), "b".to_string()),
                    ("e1".to_string(), "a".to_string(), "b".to_string()),
                    ("e2".to_string(), "b".to_string(), "c".to_string()),
                    ("e3".to_string(), "c".to_string(), "a".to_string()),
                    ("e4".to_string(), "d".to_string(), "d".to_string()),
                ],
            )
            .unwrap(),
        );
        for g in samples {
            assert_eq!(graph_invariants(&g).total_rank, gf2_cycle_rank(&g));
        }
    }
}
