//! The fundamental groupoid of a graph, computationally.
//!
//! For a graph `X` the fundamental groupoid on a set of basepoints `P` has
//! the points of `P` as objects and homotopy classes of paths as morphisms.
//! Combinatorially a morphism is a *reduced edge word*: a chain of directed
//! edges with no step immediately followed by its own reverse. Reduced words
//! are unique normal forms, so equality of morphisms is literal equality of
//! words.
//!
//! Everything here is deterministic: enumeration visits edges in index
//! order, spanning forests are chosen lexicographically, and presentations
//! list generators sorted by edge id.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::graph::Graph;

/// A directed traversal of one undirected edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct DirEdge {
    pub edge: usize,
    pub forward: bool,
}

impl DirEdge {
    pub fn reversed(self) -> DirEdge {
        DirEdge { edge: self.edge, forward: !self.forward }
    }
}

/// The endpoints of a directed edge in a graph: `(from, to)`.
pub fn dart_ends(graph: &Graph, d: DirEdge) -> (usize, usize) {
    let e = &graph.edges()[d.edge];
    if d.forward {
        (e.u, e.v)
    } else {
        (e.v, e.u)
    }
}

/// An edge word: a path in the graph from `start` to `end`, not necessarily
/// reduced. Words are only created through validating constructors, so the
/// chain condition (each step starts where the previous one ended) always
/// holds.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Word {
    start: usize,
    end: usize,
    steps: Vec<DirEdge>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupoidError {
    #[error("malformed word: step {position} starts at vertex {found} but the word is at {expected}")]
    MalformedWord { position: usize, expected: usize, found: usize },
    #[error("vertex index {0} out of range")]
    UnknownVertex(usize),
    #[error("edge index {0} out of range")]
    UnknownEdge(usize),
    #[error("cannot compose: first word ends at {f_end}, second starts at {g_start}")]
    EndpointMismatch { f_end: usize, g_start: usize },
    #[error("no basepoint in the component of vertex `{vertex}`")]
    BasepointsMissComponent { vertex: String },
    #[error("id `{0}` appears in more than one coproduct summand")]
    IdCollision(String),
    #[error("ill-formed graph map: {0}")]
    IllFormedMap(String),
    #[error("enumeration budget of {budget} nodes exceeded")]
    BudgetExceeded { budget: usize },
}

impl Word {
    /// The identity morphism at a vertex.
    pub fn identity(vertex: usize) -> Word {
        Word { start: vertex, end: vertex, steps: Vec::new() }
    }

    /// Validate a step chain against a graph.
    pub fn new(graph: &Graph, start: usize, steps: Vec<DirEdge>) -> Result<Word, GroupoidError> {
        if start >= graph.vertex_count() {
            return Err(GroupoidError::UnknownVertex(start));
        }
        let mut at = start;
        for (position, d) in steps.iter().enumerate() {
            if d.edge >= graph.edge_count() {
                return Err(GroupoidError::UnknownEdge(d.edge));
            }
            let (from, to) = dart_ends(graph, *d);
            if from != at {
                return Err(GroupoidError::MalformedWord { position, expected: at, found: from });
            }
            at = to;
        }
        Ok(Word { start, end: at, steps })
    }

    /// Convenience constructor from `(edge id, forward)` pairs.
    pub fn from_steps(graph: &Graph, start: &str, steps: &[(&str, bool)]) -> Result<Word, GroupoidError> {
        let s = graph
            .vertex_index(start)
            .ok_or(GroupoidError::UnknownVertex(usize::MAX))?;
        let mut darts = Vec::new();
        for (id, forward) in steps {
            let edge = graph.edge_index(id).ok_or(GroupoidError::UnknownEdge(usize::MAX))?;
            darts.push(DirEdge { edge, forward: *forward });
        }
        Word::new(graph, s, darts)
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn end(&self) -> usize {
        self.end
    }

    pub fn steps(&self) -> &[DirEdge] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// True when the word contains no step immediately followed by its
    /// reverse.
    pub fn is_reduced(&self) -> bool {
        self.steps.windows(2).all(|w| w[1] != w[0].reversed())
    }

    /// Human-readable form: `id@3` or `e0 e2^-1 e0`.
    pub fn display(&self, graph: &Graph) -> String {
        if self.steps.is_empty() {
            return format!("id@{}", graph.vertex_name(self.start));
        }
        let mut out = String::new();
        for (i, d) in self.steps.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{}", graph.edges()[d.edge].id);
            if !d.forward {
                out.push_str("^-1");
            }
        }
        out
    }
}

/// Source and target of a morphism.
pub fn ends(word: &Word) -> (usize, usize) {
    (word.start, word.end)
}

/// Free reduction: cancel adjacent inverse pairs until none remain. The
/// result is the unique normal form of the morphism.
pub fn reduce(word: &Word) -> Word {
    let mut stack: Vec<DirEdge> = Vec::with_capacity(word.steps.len());
    for &d in &word.steps {
        if stack.last() == Some(&d.reversed()) {
            stack.pop();
        } else {
            stack.push(d);
        }
    }
    Word { start: word.start, end: word.end, steps: stack }
}

/// `f` followed by `g` (diagrammatic order), reduced.
pub fn compose(f: &Word, g: &Word) -> Result<Word, GroupoidError> {
    if f.end != g.start {
        return Err(GroupoidError::EndpointMismatch { f_end: f.end, g_start: g.start });
    }
    let mut steps = f.steps.clone();
    steps.extend_from_slice(&g.steps);
    Ok(reduce(&Word { start: f.start, end: g.end, steps }))
}

/// The inverse morphism, reduced iff the input was.
pub fn inverse(word: &Word) -> Word {
    Word {
        start: word.end,
        end: word.start,
        steps: word.steps.iter().rev().map(|d| d.reversed()).collect(),
    }
}

/// The fundamental groupoid of a graph restricted to a set of basepoints.
/// Construction requires the basepoints to meet every path component, so
/// the restriction is an equivalence onto the full groupoid.
#[derive(Debug, Clone)]
pub struct BasedGroupoid {
    graph: Arc<Graph>,
    basepoints: BTreeSet<usize>,
}

/// One component of a groupoid presentation: a spanning tree of the
/// component turns the non-tree edges into a free basis of the vertex
/// group at the root.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentPresentation {
    /// Least basepoint of the component — the canonical root.
    pub root: String,
    pub objects: Vec<String>,
    pub vertex_count: usize,
    pub edge_count: usize,
    pub tree_edges: Vec<String>,
    /// Non-tree edges: a free basis of the vertex group.
    pub generators: Vec<String>,
    pub rank: usize,
}

/// A presentation of the based groupoid: free product of its components.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Presentation {
    pub components: Vec<ComponentPresentation>,
    pub total_rank: usize,
}

/// A free basis of the vertex group of one component, as explicit loops.
#[derive(Debug, Clone)]
pub struct ComponentBasis {
    /// Root vertex index (least basepoint of the component).
    pub root: usize,
    /// One reduced loop at the root per non-tree edge, in edge-id order.
    pub loops: Vec<Word>,
}

impl BasedGroupoid {
    pub fn new(graph: Arc<Graph>, basepoints: BTreeSet<usize>) -> Result<Self, GroupoidError> {
        for &p in &basepoints {
            if p >= graph.vertex_count() {
                return Err(GroupoidError::UnknownVertex(p));
            }
        }
        let ids = graph.component_ids();
        let covered: BTreeSet<usize> = basepoints.iter().map(|&p| ids[p]).collect();
        for v in 0..graph.vertex_count() {
            if !covered.contains(&ids[v]) {
                return Err(GroupoidError::BasepointsMissComponent {
                    vertex: graph.vertex_name(v).to_string(),
                });
            }
        }
        Ok(BasedGroupoid { graph, basepoints })
    }

    pub fn graph(&self) -> &Arc<Graph> {
        &self.graph
    }

    pub fn basepoints(&self) -> &BTreeSet<usize> {
        &self.basepoints
    }

    pub fn object_names(&self) -> Vec<String> {
        self.basepoints.iter().map(|&p| self.graph.vertex_name(p).to_string()).collect()
    }

    /// All reduced words from `p` to `q` of length at most `max_len`,
    /// breadth-first (so sorted by length, then by step sequence). The
    /// search aborts once more than `budget` words have been expanded —
    /// reduced-word counts grow exponentially with length.
    pub fn hom(&self, p: usize, q: usize, max_len: usize, budget: usize) -> Result<Vec<Word>, GroupoidError> {
        if p >= self.graph.vertex_count() {
            return Err(GroupoidError::UnknownVertex(p));
        }
        if q >= self.graph.vertex_count() {
            return Err(GroupoidError::UnknownVertex(q));
        }
        let mut out = Vec::new();
        let mut frontier: Vec<Word> = vec![Word::identity(p)];
        let mut expanded = 0usize;
        for _ in 0..=max_len {
            let mut next = Vec::new();
            for w in &frontier {
                if w.end == q {
                    out.push(w.clone());
                }
                if w.len() == max_len {
                    continue;
                }
                for i in self.graph.incident(w.end) {
                    for forward in [true, false] {
                        let d = DirEdge { edge: i, forward };
                        let (from, _) = dart_ends(&self.graph, d);
                        if from != w.end {
                            continue;
                        }
                        if w.steps.last() == Some(&d.reversed()) {
                            continue;
                        }
                        expanded += 1;
                        if expanded > budget {
                            return Err(GroupoidError::BudgetExceeded { budget });
                        }
                        let mut steps = w.steps.clone();
                        steps.push(d);
                        next.push(Word { start: p, end: dart_ends(&self.graph, d).1, steps });
                    }
                }
            }
            frontier = next;
            if frontier.is_empty() {
                break;
            }
        }
        Ok(out)
    }

    /// Reduced loops at `p` up to `max_len`.
    pub fn loops_at(&self, p: usize, max_len: usize, budget: usize) -> Result<Vec<Word>, GroupoidError> {
        self.hom(p, p, max_len, budget)
    }

    /// Lexicographic BFS spanning forest: for each component, the tree
    /// grown from its least vertex taking incident edges in index order.
    /// Returns `parent_dart[v]`: the dart leading from the parent to `v`.
    fn spanning_forest(&self) -> Vec<Option<DirEdge>> {
        let n = self.graph.vertex_count();
        let mut parent: Vec<Option<DirEdge>> = vec![None; n];
        let mut seen = vec![false; n];
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for i in self.graph.incident(v) {
                    for forward in [true, false] {
                        let d = DirEdge { edge: i, forward };
                        let (from, to) = dart_ends(&self.graph, d);
                        if from == v && !seen[to] {
                            seen[to] = true;
                            parent[to] = Some(d);
                            queue.push_back(to);
                        }
                    }
                }
            }
        }
        parent
    }

    /// The reduced tree path from `root` to `v` (both in the same tree of
    /// the forest).
    fn tree_path(&self, parent: &[Option<DirEdge>], v: usize) -> Word {
        let mut steps = Vec::new();
        let mut at = v;
        while let Some(d) = parent[at] {
            steps.push(d);
            at = dart_ends(&self.graph, d).0;
        }
        steps.reverse();
        Word { start: at, end: v, steps }
    }

    /// Spanning-forest presentation: per component the non-tree edges are a
    /// free basis, so the component's vertex group is free of rank
    /// `E - V + 1`.
    pub fn presentation(&self) -> Presentation {
        let parent = self.spanning_forest();
        let ids = self.graph.component_ids();
        let count = ids.iter().copied().max().map_or(0, |m| m + 1);
        let tree_edge_set: BTreeSet<usize> = parent.iter().flatten().map(|d| d.edge).collect();
        let mut components = Vec::new();
        for c in 0..count {
            let vertices: Vec<usize> = (0..self.graph.vertex_count()).filter(|&v| ids[v] == c).collect();
            let edges: Vec<usize> = (0..self.graph.edge_count())
                .filter(|&e| ids[self.graph.edges()[e].u] == c)
                .collect();
            let objects: Vec<String> = self
                .basepoints
                .iter()
                .filter(|&&p| ids[p] == c)
                .map(|&p| self.graph.vertex_name(p).to_string())
                .collect();
            let root = self.component_root(c);
            let tree_edges: Vec<String> = edges
                .iter()
                .filter(|e| tree_edge_set.contains(e))
                .map(|&e| self.graph.edges()[e].id.clone())
                .collect();
            let generators: Vec<String> = edges
                .iter()
                .filter(|e| !tree_edge_set.contains(e))
                .map(|&e| self.graph.edges()[e].id.clone())
                .collect();
            components.push(ComponentPresentation {
                root: self.graph.vertex_name(root).to_string(),
                objects,
                vertex_count: vertices.len(),
                edge_count: edges.len(),
                rank: generators.len(),
                tree_edges,
                generators,
            });
        }
        let total_rank = components.iter().map(|c| c.rank).sum();
        Presentation { components, total_rank }
    }

    /// The least basepoint in component `c`.
    pub fn component_root(&self, c: usize) -> usize {
        let ids = self.graph.component_ids();
        *self
            .basepoints
            .iter()
            .find(|&&p| ids[p] == c)
            .expect("construction guarantees a basepoint per component")
    }

    /// Explicit free bases: for every component, one reduced loop at the
    /// root per non-tree edge (`path(root→u) · e · path(v→root)`).
    pub fn free_bases(&self) -> Vec<ComponentBasis> {
        let parent = self.spanning_forest();
        let ids = self.graph.component_ids();
        let count = ids.iter().copied().max().map_or(0, |m| m + 1);
        let tree_edge_set: BTreeSet<usize> = parent.iter().flatten().map(|d| d.edge).collect();
        let mut out = Vec::new();
        for c in 0..count {
            let root = self.component_root(c);
            // The tree of this component is rooted at the forest root of
            // the component (the least vertex), which need not equal the
            // root basepoint; conjugate tree paths through it.
            let to_root = inverse(&self.tree_path(&parent, root));
            let mut loops = Vec::new();
            for (e, edge) in self.graph.edges().iter().enumerate() {
                if ids[edge.u] != c || tree_edge_set.contains(&e) {
                    continue;
                }
                let to_u = self.tree_path(&parent, edge.u);
                let from_v = inverse(&self.tree_path(&parent, edge.v));
                let mut steps = to_root.steps.clone();
                steps.extend(to_u.steps.iter());
                steps.push(DirEdge { edge: e, forward: true });
                steps.extend(from_v.steps.iter());
                steps.extend(inverse(&to_root).steps.iter());
                loops.push(reduce(&Word { start: root, end: root, steps }));
            }
            out.push(ComponentBasis { root, loops });
        }
        out
    }
}

/// Disjoint union of based groupoids. Vertex and edge ids must be globally
/// distinct across the summands.
pub fn coproduct(parts: &[&BasedGroupoid]) -> Result<BasedGroupoid, GroupoidError> {
    let mut vertices: Vec<String> = Vec::new();
    let mut edges: Vec<(String, String, String)> = Vec::new();
    let mut names: BTreeSet<String> = BTreeSet::new();
    let mut edge_names: BTreeSet<String> = BTreeSet::new();
    let mut basepoint_names: Vec<String> = Vec::new();
    for part in parts {
        for v in part.graph.vertices() {
            if !names.insert(v.clone()) {
                return Err(GroupoidError::IdCollision(v.clone()));
            }
            vertices.push(v.clone());
        }
        for e in part.graph.edges() {
            if !edge_names.insert(e.id.clone()) {
                return Err(GroupoidError::IdCollision(e.id.clone()));
            }
            edges.push((
                e.id.clone(),
                part.graph.vertex_name(e.u).to_string(),
                part.graph.vertex_name(e.v).to_string(),
            ));
        }
        basepoint_names.extend(part.object_names());
    }
    let graph = Arc::new(Graph::new(vertices, edges).expect("ids checked distinct"));
    let basepoints = basepoint_names
        .iter()
        .map(|n| graph.vertex_index(n).expect("all summand vertices present"))
        .collect();
    BasedGroupoid::new(graph, basepoints)
}

/// The pair groupoid on a finite object set: exactly one morphism between
/// every ordered pair of objects. The `ends` projection of a graph's
/// fundamental groupoid lands here.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairGroupoid {
    pub objects: Vec<String>,
}

impl PairGroupoid {
    pub fn new(mut objects: Vec<String>) -> Self {
        objects.sort();
        objects.dedup();
        PairGroupoid { objects }
    }

    /// Hom-sets are singletons: the count is 1 for known objects.
    pub fn hom_count(&self, a: &str, b: &str) -> usize {
        usize::from(self.objects.iter().any(|o| o == a) && self.objects.iter().any(|o| o == b))
    }
}

/// A map of graphs inducing a functor of fundamental groupoids: vertices go
/// to vertices, each edge goes to a word between the images of its
/// endpoints.
#[derive(Debug, Clone)]
pub struct GraphMap {
    from: Arc<Graph>,
    to: Arc<Graph>,
    vertex_map: Vec<usize>,
    edge_words: Vec<Word>,
}

impl GraphMap {
    pub fn new(
        from: Arc<Graph>,
        to: Arc<Graph>,
        vertex_map: Vec<usize>,
        edge_words: Vec<Word>,
    ) -> Result<Self, GroupoidError> {
        if vertex_map.len() != from.vertex_count() {
            return Err(GroupoidError::IllFormedMap(format!(
                "vertex map covers {} of {} vertices",
                vertex_map.len(),
                from.vertex_count()
            )));
        }
        if edge_words.len() != from.edge_count() {
            return Err(GroupoidError::IllFormedMap(format!(
                "edge map covers {} of {} edges",
                edge_words.len(),
                from.edge_count()
            )));
        }
        for &img in &vertex_map {
            if img >= to.vertex_count() {
                return Err(GroupoidError::IllFormedMap(format!("vertex image {} out of range", img)));
            }
        }
        for (e, word) in edge_words.iter().enumerate() {
            let edge = &from.edges()[e];
            if word.start() != vertex_map[edge.u] || word.end() != vertex_map[edge.v] {
                return Err(GroupoidError::IllFormedMap(format!(
                    "edge `{}` maps to a word from {} to {}, expected {} to {}",
                    edge.id,
                    word.start(),
                    word.end(),
                    vertex_map[edge.u],
                    vertex_map[edge.v]
                )));
            }
        }
        Ok(GraphMap { from, to, vertex_map, edge_words })
    }

    pub fn from_graph(&self) -> &Arc<Graph> {
        &self.from
    }

    pub fn to_graph(&self) -> &Arc<Graph> {
        &self.to
    }

    pub fn vertex_image(&self, v: usize) -> usize {
        self.vertex_map[v]
    }

    pub fn edge_word(&self, e: usize) -> &Word {
        &self.edge_words[e]
    }

    /// The induced functor on morphisms: translate step by step, then
    /// reduce.
    pub fn apply(&self, word: &Word) -> Word {
        let start = self.vertex_map[word.start()];
        let mut steps = Vec::new();
        for d in word.steps() {
            let w = &self.edge_words[d.edge];
            if d.forward {
                steps.extend(w.steps().iter().copied());
            } else {
                steps.extend(inverse(w).steps().iter().copied());
            }
        }
        let end = self.vertex_map[word.end()];
        reduce(&Word { start, end, steps })
    }
}

/// Evidence that a graph map really induces a functor: identities go to
/// identities and composition is preserved on the supplied pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FunctorReport {
    pub identities_checked: usize,
    pub pairs_checked: usize,
    pub violations: Vec<String>,
}

impl FunctorReport {
    pub fn is_functorial(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check the functor laws for `map` on every identity and on each supplied
/// composable pair.
pub fn induced_functor_check(map: &GraphMap, pairs: &[(Word, Word)]) -> FunctorReport {
    let mut violations = Vec::new();
    let mut identities_checked = 0;
    for v in 0..map.from.vertex_count() {
        identities_checked += 1;
        let img = map.apply(&Word::identity(v));
        if !img.is_empty() {
            violations.push(format!(
                "identity at `{}` maps to a non-identity word",
                map.from.vertex_name(v)
            ));
        }
    }
    let mut pairs_checked = 0;
    for (f, g) in pairs {
        pairs_checked += 1;
        match compose(f, g) {
            Err(_) => violations.push("sample pair is not composable".to_string()),
            Ok(fg) => {
                let lhs = map.apply(&fg);
                let rhs = compose(&map.apply(f), &map.apply(g)).expect("images of composable words compose");
                if lhs != rhs {
                    violations.push(format!(
                        "F(f·g) ≠ F(f)·F(g) for f = {}, g = {}",
                        f.display(&map.from),
                        g.display(&map.from)
                    ));
                }
            }
        }
    }
    FunctorReport { identities_checked, pairs_checked, violations }
}

/// The rank of the subgroup of a graph's fundamental group generated by the
/// given loops (all based at the same vertex), computed by Stallings
/// folding. The generators freely generate — equivalently, the induced map
/// from the free group on them is injective — iff the returned rank equals
/// the number of (non-identity) generators.
pub fn subgroup_rank(generators: &[Word]) -> usize {
    // Vertices of the wedge-of-loops graph: 0 is the base; each generator
    // word of length k contributes k-1 interior vertices.
    let mut next_vertex = 1usize;
    // Directed labelled edges (tail, head, label); a backward step is the
    // same label with tail and head swapped.
    let mut arrows: Vec<(usize, usize, usize)> = Vec::new();
    for word in generators {
        if word.is_empty() {
            continue;
        }
        let k = word.len();
        let vertex_at = |i: usize, next: usize| -> usize {
            if i == 0 || i == k {
                0
            } else {
                next + i - 1
            }
        };
        for (i, d) in word.steps().iter().enumerate() {
            let a = vertex_at(i, next_vertex);
            let b = vertex_at(i + 1, next_vertex);
            if d.forward {
                arrows.push((a, b, d.edge));
            } else {
                arrows.push((b, a, d.edge));
            }
        }
        next_vertex += k - 1;
    }

    // Union-find over wedge vertices.
    let mut parent: Vec<usize> = (0..next_vertex).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let r = find(parent, parent[x]);
            parent[x] = r;
        }
        parent[x]
    }

    // Fold: whenever two arrows with the same label share a tail (or share
    // a head), merge the other endpoints, until stable.
    loop {
        let mut changed = false;
        let mut by_tail: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut by_head: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for &(a, b, label) in &arrows {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if let Some(&prev) = by_tail.get(&(ra, label)) {
                if prev != rb {
                    parent[prev.max(rb)] = prev.min(rb);
                    changed = true;
                    break;
                }
            } else {
                by_tail.insert((ra, label), rb);
            }
            if let Some(&prev) = by_head.get(&(rb, label)) {
                if prev != ra {
                    parent[prev.max(ra)] = prev.min(ra);
                    changed = true;
                    break;
                }
            } else {
                by_head.insert((rb, label), ra);
            }
        }
        if !changed {
            break;
        }
    }

    // Count the folded graph: distinct vertices and distinct labelled
    // arrows between representative pairs.
    let mut vertices: BTreeSet<usize> = BTreeSet::new();
    let mut edges: BTreeSet<(usize, usize, usize)> = BTreeSet::new();
    vertices.insert(find(&mut parent, 0));
    for &(a, b, label) in &arrows {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        vertices.insert(ra);
        vertices.insert(rb);
        edges.insert((ra, rb, label));
    }
    edges.len() + 1 - vertices.len()
}
