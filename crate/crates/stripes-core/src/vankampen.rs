//! The cover, the cut set, the canonical injection, and the isomorphism
//! verifier.
//!
//! For a valid expanded atlas this module builds the standard open cover of
//! the glued surface `Z` — one interior element `N_α` per strip and one seam
//! neighborhood `N_β` per seam, the latter a pair of boundary rectangles at
//! levels beyond `4/5` joined along the seam — together with its pullback
//! cover of the gluing graph `G` under the canonical injection `φ`.  A
//! deterministic cut set is chosen: two points `d_β = φ_β(-1/10)` and
//! `d′_β = φ_β(1/10)` per seam plus the origin of every isolated strip.
//! Collapsing each cover element to its cut points yields a finite graph `H`
//! whose free groupoid is the fundamental groupoid of `Z` based at the cut
//! set, because every pairwise intersection of cover elements is simply
//! connected and carries exactly one cut point — all of which is checked,
//! not assumed.
//!
//! [`verify_phi_iso`] then proves mechanically that `φ` induces an
//! isomorphism from the fundamental groupoid of `G` (based at the cut
//! preimages) onto that of `Z`: it realizes the induced functor as a graph
//! map from the subdivided gluing graph to `H` and certifies
//!
//! * a bijection on objects, found by evaluating `φ` exactly;
//! * matching component structure and per-component ranks;
//! * functoriality on identities and on sampled composable pairs;
//! * fullness, by exhibiting an explicit preimage word for every edge of
//!   `H`; and
//! * faithfulness, by Stallings folding: the images of a free basis of each
//!   vertex group generate a subgroup whose folded rank equals the basis
//!   size, so the basis maps to a basis.
//!
//! A nerve oracle cross-checks the cover combinatorics against an
//! independently built subdivision of `G`, and a bounded loop-enumeration
//! crosscheck re-verifies injectivity on small instances by brute force.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::atlas::{
    seams, validate, AtlasError, ExpandedAtlas, Interval, Seam, SeamId, Side,
};
use crate::graph::{build_graph, graph_invariants, subdivide, Graph};
use crate::groupoid::{
    compose, induced_functor_check, inverse, subgroup_rank, BasedGroupoid, DirEdge, GraphMap,
    GroupoidError, Word,
};
use crate::rat::{fmt_rat, rat, rat_int, Rat};

/// An exact point of the glued surface, written in the coordinates of one
/// strip. Points on a seam are normalized to the X-side representative.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Point {
    pub strip: String,
    #[serde(serialize_with = "crate::rat::serialize_rat")]
    pub x: Rat,
    #[serde(serialize_with = "crate::rat::serialize_rat")]
    pub level: Rat,
}

impl Point {
    pub fn new(strip: &str, x: Rat, level: Rat) -> Self {
        Point { strip: strip.to_string(), x, level }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.strip, fmt_rat(&self.x), fmt_rat(&self.level))
    }
}

/// The level threshold of seam neighborhoods: the rectangle of a top seam
/// spans levels in `(4/5, 1]`, of a bottom seam `[-1, -4/5)`.
pub fn nbhd_threshold() -> Rat {
    rat(4, 5)
}

/// One boundary rectangle of a seam neighborhood: the glued interval times
/// the level range beyond the threshold on its side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rect {
    pub strip: String,
    pub side: Side,
    pub interval: Interval,
}

impl Rect {
    /// Membership in the open rectangle minus the seam, i.e. levels strictly
    /// between the threshold and the boundary.
    pub fn contains_interior(&self, p: &Point) -> bool {
        if p.strip != self.strip {
            return false;
        }
        let toward_boundary = &p.level * self.side.level();
        toward_boundary > nbhd_threshold()
            && toward_boundary < rat_int(1)
            && self.interval.contains(&p.x)
    }
}

impl fmt::Display for Rect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{} × {}", self.strip, self.side, self.interval)
    }
}

/// One element of the standard cover of the glued surface.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum CoverElement {
    /// `N_α`: the strip minus its glued boundary intervals.
    StripInterior { strip: String },
    /// `N_β`: two boundary rectangles joined along the seam.
    SeamNbhd { seam: SeamId, x_rect: Rect, y_rect: Rect },
}

impl CoverElement {
    pub fn name(&self) -> String {
        match self {
            CoverElement::StripInterior { strip } => format!("int:{}", strip),
            CoverElement::SeamNbhd { seam, .. } => format!("nb:{}", seam),
        }
    }
}

/// The pullback of one cover element along the canonical injection: a seam
/// neighborhood pulls back to an open arc of its edge around the midpoint,
/// a strip interior to the open star of its vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum PullbackShape {
    VertexStar { strip: String },
    EdgeArc {
        seam: SeamId,
        #[serde(serialize_with = "crate::rat::serialize_rat")]
        lo: Rat,
        #[serde(serialize_with = "crate::rat::serialize_rat")]
        hi: Rat,
    },
}

/// The cover of the surface together with the pullback cover of the graph.
#[derive(Debug, Clone, Serialize)]
pub struct Cover {
    pub elements: Vec<CoverElement>,
    pub pullbacks: Vec<PullbackShape>,
    pub seams: Vec<Seam>,
}

/// Everything that can stop the verifier before it produces a report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("the expanded atlas has {0} validation violation(s); verification requires a valid atlas")]
    InvalidAtlas(usize),
    #[error("curve parameter {0} lies outside [-1, 1]")]
    BadParameter(String),
    #[error("unsupported cover configuration: {0}")]
    UnsupportedConfiguration(String),
    #[error("internal construction failure: {0}")]
    Construction(#[from] GroupoidError),
    #[error(transparent)]
    Atlas(#[from] AtlasError),
}

fn require_valid(expanded: &ExpandedAtlas) -> Result<(), VerifyError> {
    let report = validate(expanded);
    if report.is_valid() {
        Ok(())
    } else {
        Err(VerifyError::InvalidAtlas(report.violations.len()))
    }
}

/// Build the standard cover: one interior element per strip, one seam
/// neighborhood per seam, plus the combinatorial pullbacks on the graph.
pub fn build_cover(expanded: &ExpandedAtlas) -> Result<Cover, VerifyError> {
    require_valid(expanded)?;
    let seams = seams(expanded)?;
    let mut elements = Vec::new();
    let mut pullbacks = Vec::new();
    for strip in &expanded.strips {
        elements.push(CoverElement::StripInterior { strip: strip.id.clone() });
        pullbacks.push(PullbackShape::VertexStar { strip: strip.id.clone() });
    }
    for seam in &seams {
        elements.push(CoverElement::SeamNbhd {
            seam: seam.id.clone(),
            x_rect: Rect {
                strip: seam.strip_x().to_string(),
                side: seam.x.side,
                interval: seam.x_interval.clone(),
            },
            y_rect: Rect {
                strip: seam.strip_y().to_string(),
                side: seam.y.side,
                interval: seam.y_interval.clone(),
            },
        });
        // The injection sends parameter t to level (1+t)ε for t < 0 and
        // (1-t)ε′ for t > 0, so the neighborhood pulls back to |t| < 1/5.
        pullbacks.push(PullbackShape::EdgeArc { seam: seam.id.clone(), lo: rat(-1, 5), hi: rat(1, 5) });
    }
    Ok(Cover { elements, pullbacks, seams })
}

/// The role of a cut point. The order is the root-selection order within a
/// strip: X-side points before Y-side points, seam points before origins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum CutRole {
    XEnd,
    YEnd,
    Origin,
}

/// One point of the cut set, with its exact coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CutPoint {
    pub id: String,
    pub role: CutRole,
    pub seam: Option<SeamId>,
    pub point: Point,
}

impl CutPoint {
    fn sort_key(&self) -> (Option<&SeamId>, CutRole, &str) {
        (self.seam.as_ref(), self.role, &self.point.strip)
    }
}

/// The chosen cut set of the surface.
#[derive(Debug, Clone, Serialize)]
pub struct CutSet {
    pub points: Vec<CutPoint>,
}

impl CutSet {
    pub fn by_id(&self, id: &str) -> Option<&CutPoint> {
        self.points.iter().find(|p| p.id == id)
    }

    /// The cut points lying in one strip, in root-selection order.
    pub fn in_strip(&self, strip: &str) -> Vec<&CutPoint> {
        let mut points: Vec<&CutPoint> =
            self.points.iter().filter(|p| p.point.strip == strip).collect();
        points.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        points
    }

    /// The deterministic star root of a strip: its least cut point.
    pub fn root_of(&self, strip: &str) -> Option<&CutPoint> {
        self.in_strip(strip).into_iter().next()
    }
}

/// The chosen abscissa over the X interval of a seam: the interval anchor.
pub fn seam_abscissa(seam: &Seam) -> Rat {
    seam.x_interval.anchor().expect("a seam of a valid atlas glues a nonempty interval")
}

/// The corresponding abscissa on the Y side: `γ⁻¹` of the X abscissa.
pub fn seam_abscissa_y(seam: &Seam) -> Rat {
    seam.gamma.invert().apply(&seam_abscissa(seam))
}

/// The chosen seam point `z_β`, in X-side coordinates.
pub fn seam_point(seam: &Seam) -> Point {
    Point::new(seam.strip_x(), seam_abscissa(seam), seam.x.side.level())
}

/// Evaluate the canonical injection on the edge of `seam` at parameter
/// `t ∈ [-1, 1]`, exactly. The four pieces travel from the X-side strip
/// origin up to the seam and back down to the Y-side strip origin:
///
/// * `t ∈ [-1, -1/2]`: `(2(1+t)·x_β, (1+t)·ε)` in the X strip,
/// * `t ∈ [-1/2, 0]`: `(x_β, (1+t)·ε)` in the X strip,
/// * `t ∈ [0, 1/2]`: `(y_β, (1-t)·ε′)` in the Y strip,
/// * `t ∈ [1/2, 1]`: `(2(1-t)·y_β, (1-t)·ε′)` in the Y strip.
///
/// At `t = 0` the two middle pieces meet on the seam; the returned
/// representative is the X-side one. `φ(-1)` and `φ(1)` are the origins of
/// the two strips, and `φ(∓1/10)` are the cut points of the seam.
pub fn phi_eval(seam: &Seam, t: &Rat) -> Result<Point, VerifyError> {
    if t < &rat_int(-1) || t > &rat_int(1) {
        return Err(VerifyError::BadParameter(fmt_rat(t)));
    }
    let x_abscissa = seam_abscissa(seam);
    let eps = seam.x.side.level();
    if t <= &Rat::zero() {
        let height = (rat_int(1) + t) * eps;
        let x = if t <= &rat(-1, 2) {
            (rat_int(1) + t) * rat_int(2) * &x_abscissa
        } else {
            x_abscissa
        };
        return Ok(Point::new(seam.strip_x(), x, height));
    }
    let y_abscissa = seam_abscissa_y(seam);
    let eps = seam.y.side.level();
    let height = (rat_int(1) - t) * eps;
    let x = if t < &rat(1, 2) { y_abscissa } else { (rat_int(1) - t) * rat_int(2) * &y_abscissa };
    Ok(Point::new(seam.strip_y(), x, height))
}

/// Choose the deterministic cut set: `d_β = φ_β(-1/10)` and
/// `d′_β = φ_β(1/10)` for every seam, plus the origin of every isolated
/// strip.
pub fn choose_cut_set(expanded: &ExpandedAtlas) -> Result<CutSet, VerifyError> {
    require_valid(expanded)?;
    let seams = seams(expanded)?;
    let graph = build_graph(expanded);
    let mut points = Vec::new();
    for seam in &seams {
        points.push(CutPoint {
            id: format!("d:{}", seam.id),
            role: CutRole::XEnd,
            seam: Some(seam.id.clone()),
            point: phi_eval(seam, &rat(-1, 10))?,
        });
        points.push(CutPoint {
            id: format!("d':{}", seam.id),
            role: CutRole::YEnd,
            seam: Some(seam.id.clone()),
            point: phi_eval(seam, &rat(1, 10))?,
        });
    }
    for (v, name) in graph.vertices().iter().enumerate() {
        if graph.degree(v) == 0 {
            points.push(CutPoint {
                id: format!("s:{}", name),
                role: CutRole::Origin,
                seam: None,
                point: Point::new(name, Rat::zero(), Rat::zero()),
            });
        }
    }
    points.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()).then_with(|| a.id.cmp(&b.id)));
    Ok(CutSet { points })
}

/// One path component of a pairwise intersection on the surface: a seam
/// rectangle minus the seam, lying inside one strip interior.
#[derive(Debug, Clone, Serialize)]
pub struct IntersectionComponent {
    pub strip_element: String,
    pub seam_element: String,
    pub rect: Rect,
    /// Ids of the cut points the component contains.
    pub cut_points: Vec<String>,
}

/// One path component of a pairwise intersection on the graph: an open
/// sub-arc of an edge between a strip's star and a seam's arc.
#[derive(Debug, Clone, Serialize)]
pub struct ArcComponent {
    pub strip: String,
    pub seam: SeamId,
    #[serde(serialize_with = "crate::rat::serialize_rat")]
    pub lo: Rat,
    #[serde(serialize_with = "crate::rat::serialize_rat")]
    pub hi: Rat,
    /// The cut-preimage parameters the component contains.
    pub marks: Vec<String>,
}

/// All pairwise and triple intersection data for both covers.
#[derive(Debug, Clone, Serialize)]
pub struct IntersectionReport {
    /// Surface side: components of `N_α ∩ N_β`.
    pub components: Vec<IntersectionComponent>,
    /// Graph side: components of `star(α) ∩ arc(β)`.
    pub arc_components: Vec<ArcComponent>,
    /// Pairs of distinct seam neighborhoods that overlap (must be empty).
    pub seam_overlaps: Vec<(String, String)>,
    /// Every triple intersection is empty.
    pub triples_empty: bool,
}

/// Enumerate the pairwise-intersection components of both covers and the
/// cut points each contains, and check that distinct seam neighborhoods
/// (hence all triple intersections) are disjoint.
pub fn intersections(cover: &Cover, cuts: &CutSet) -> IntersectionReport {
    let mut components = Vec::new();
    for seam in &cover.seams {
        for (strip, side, interval) in [
            (seam.strip_x(), seam.x.side, &seam.x_interval),
            (seam.strip_y(), seam.y.side, &seam.y_interval),
        ] {
            let rect = Rect { strip: strip.to_string(), side, interval: interval.clone() };
            let cut_points = cuts
                .points
                .iter()
                .filter(|c| rect.contains_interior(&c.point))
                .map(|c| c.id.clone())
                .collect();
            components.push(IntersectionComponent {
                strip_element: format!("int:{}", strip),
                seam_element: format!("nb:{}", seam.id),
                rect,
                cut_points,
            });
        }
    }

    let mut arc_components = Vec::new();
    for seam in &cover.seams {
        // The star of the X-end vertex meets the edge arc in parameters
        // (-1/5, 0); the Y-end star in (0, 1/5). A self-gluing contributes
        // both components between the same pair of cover elements.
        for (strip, lo, hi, mark) in [
            (seam.strip_x(), rat(-1, 5), Rat::zero(), rat(-1, 10)),
            (seam.strip_y(), Rat::zero(), rat(1, 5), rat(1, 10)),
        ] {
            let marks = if lo < mark && mark < hi {
                vec![format!("{}@{}", seam.id, fmt_rat(&mark))]
            } else {
                vec![]
            };
            arc_components.push(ArcComponent { strip: strip.to_string(), seam: seam.id.clone(), lo, hi, marks });
        }
    }

    // Distinct seam neighborhoods are disjoint exactly when their
    // rectangles on every common boundary line are disjoint; and since each
    // rectangle lies in a single strip interior, a nonempty triple
    // intersection would force two rectangles of distinct seams to overlap.
    let mut seam_overlaps = Vec::new();
    let rects_of = |seam: &Seam| {
        [
            Rect { strip: seam.strip_x().to_string(), side: seam.x.side, interval: seam.x_interval.clone() },
            Rect { strip: seam.strip_y().to_string(), side: seam.y.side, interval: seam.y_interval.clone() },
        ]
    };
    for i in 0..cover.seams.len() {
        for j in (i + 1)..cover.seams.len() {
            let a = &cover.seams[i];
            let b = &cover.seams[j];
            let clash = rects_of(a).iter().any(|ra| {
                rects_of(b).iter().any(|rb| {
                    ra.strip == rb.strip && ra.side == rb.side && ra.interval.overlaps(&rb.interval)
                })
            });
            if clash {
                seam_overlaps.push((a.id.to_string(), b.id.to_string()));
            }
        }
    }
    let triples_empty = seam_overlaps.is_empty();
    IntersectionReport { components, arc_components, seam_overlaps, triples_empty }
}

/// One named pass/fail result with supporting detail.
#[derive(Debug, Clone, Serialize)]
pub struct CheckItem {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckItem {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        CheckItem { name: name.to_string(), passed, detail }
    }
}

/// The hypothesis report for the cover pair and cut set.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub items: Vec<CheckItem>,
    pub passed: bool,
}

/// Check every hypothesis the coequalizer construction relies on:
/// simply connected cover elements, the cut bijection under the injection,
/// exactly one cut point per pairwise-intersection component, empty triple
/// intersections, and a cut point in every path component.
pub fn check_conditions(cover: &Cover, cuts: &CutSet, expanded: &ExpandedAtlas) -> ConditionReport {
    let mut items = Vec::new();
    let report = intersections(cover, cuts);

    // (i) Every cover element is simply connected by its shape: a strip
    // minus boundary intervals retracts to its axis; a seam neighborhood is
    // two disjoint rectangles joined along one arc; stars and arcs are
    // trees. This is structural, so the certificate records the shapes.
    let shapes = format!(
        "{} strip interior(s) (retract to the axis), {} seam neighborhood(s) (two rectangles joined along the seam); pullbacks: vertex stars and edge arcs (trees)",
        cover.elements.iter().filter(|e| matches!(e, CoverElement::StripInterior { .. })).count(),
        cover.seams.len(),
    );
    items.push(CheckItem::new("simply-connected-elements", true, shapes));

    // (ii) The injection restricts to a bijection from the cut preimages
    // onto the cut set: φ(∓1/10) reproduces each seam's cut coordinates,
    // origins match, and no two cut points share coordinates.
    let mut bijective = true;
    let mut detail = Vec::new();
    for seam in &cover.seams {
        for (t, id) in [(rat(-1, 10), format!("d:{}", seam.id)), (rat(1, 10), format!("d':{}", seam.id))] {
            let image = phi_eval(seam, &t).expect("parameter is inside [-1, 1]");
            match cuts.by_id(&id) {
                Some(cut) if cut.point == image => {}
                Some(cut) => {
                    bijective = false;
                    detail.push(format!("{} is {} but φ gives {}", id, cut.point, image));
                }
                None => {
                    bijective = false;
                    detail.push(format!("missing cut point {}", id));
                }
            }
        }
    }
    let mut seen = BTreeSet::new();
    for cut in &cuts.points {
        if !seen.insert(cut.point.clone()) {
            bijective = false;
            detail.push(format!("two cut points share coordinates {}", cut.point));
        }
    }
    if detail.is_empty() {
        detail.push(format!("{} cut points, pairwise distinct, all reproduced by φ", cuts.points.len()));
    }
    items.push(CheckItem::new("cut-bijection", bijective, detail.join("; ")));

    // (iii) Every pairwise-intersection component of both covers contains
    // exactly one cut point.
    let mut one_each = true;
    let mut detail = Vec::new();
    for component in &report.components {
        if component.cut_points.len() != 1 {
            one_each = false;
            detail.push(format!(
                "component {} ∩ {} ({}) holds {:?}",
                component.strip_element, component.seam_element, component.rect, component.cut_points
            ));
        }
    }
    for arc in &report.arc_components {
        if arc.marks.len() != 1 {
            one_each = false;
            detail.push(format!(
                "arc component of {} over ({}, {}) holds {:?}",
                arc.seam,
                fmt_rat(&arc.lo),
                fmt_rat(&arc.hi),
                arc.marks
            ));
        }
    }
    if detail.is_empty() {
        detail.push(format!(
            "{} surface components and {} graph components, one cut point each",
            report.components.len(),
            report.arc_components.len()
        ));
    }
    items.push(CheckItem::new("one-cut-per-intersection", one_each, detail.join("; ")));

    // (iv) Triple intersections are empty: strip interiors are pairwise
    // disjoint, so a triple needs two seam neighborhoods meeting inside one
    // strip, i.e. overlapping rectangles.
    let detail = if report.seam_overlaps.is_empty() {
        "strip interiors pairwise disjoint; seam neighborhoods pairwise disjoint".to_string()
    } else {
        format!("overlapping seam neighborhoods: {:?}", report.seam_overlaps)
    };
    items.push(CheckItem::new("triple-intersections-empty", report.triples_empty, detail));

    // (v) The cut set meets every path component: every component of the
    // graph contains a seam end (giving d_β) or is an isolated vertex
    // (giving s_α).
    let graph = build_graph(expanded);
    let component_ids = graph.component_ids();
    let mut met: BTreeMap<usize, bool> = BTreeMap::new();
    for &c in &component_ids {
        met.entry(c).or_insert(false);
    }
    for cut in &cuts.points {
        let vertex = match &cut.seam {
            Some(id) => {
                let seam = cover.seams.iter().find(|s| &s.id == id).expect("cut point's seam is in the cover");
                match cut.role {
                    CutRole::XEnd => seam.strip_x().to_string(),
                    _ => seam.strip_y().to_string(),
                }
            }
            None => cut.point.strip.clone(),
        };
        if let Some(v) = graph.vertex_index(&vertex) {
            met.insert(component_ids[v], true);
        }
    }
    let missed = met.values().filter(|&&m| !m).count();
    items.push(CheckItem::new(
        "cuts-meet-every-component",
        missed == 0,
        format!("{} component(s), {} without a cut point", met.len(), missed),
    ));

    let passed = items.iter().all(|i| i.passed);
    ConditionReport { items, passed }
}

/// Collapse the cover to the finite graph `H`: one vertex per cut point,
/// one seam edge `d_β — d′_β` per seam, and a star from each strip's root
/// cut point to every other cut point in that strip. Fails if some
/// pairwise-intersection component does not carry exactly one cut point,
/// since then the collapse would not be a coequalizer presentation.
pub fn cover_graph(cover: &Cover, cuts: &CutSet) -> Result<Graph, VerifyError> {
    let report = intersections(cover, cuts);
    for component in &report.components {
        if component.cut_points.len() != 1 {
            return Err(VerifyError::UnsupportedConfiguration(format!(
                "intersection component {} ∩ {} holds {} cut points",
                component.strip_element,
                component.seam_element,
                component.cut_points.len()
            )));
        }
    }
    if !report.triples_empty {
        return Err(VerifyError::UnsupportedConfiguration(
            "seam neighborhoods overlap".to_string(),
        ));
    }
    let vertices: Vec<String> = cuts.points.iter().map(|c| c.id.clone()).collect();
    let mut edges = Vec::new();
    for seam in &cover.seams {
        edges.push((format!("seam:{}", seam.id), format!("d:{}", seam.id), format!("d':{}", seam.id)));
    }
    let strips: BTreeSet<&str> = cuts.points.iter().map(|c| c.point.strip.as_str()).collect();
    for strip in strips {
        let in_strip = cuts.in_strip(strip);
        let root = in_strip[0];
        for cut in &in_strip[1..] {
            edges.push((format!("star:{}:{}", strip, cut.id), root.id.clone(), cut.id.clone()));
        }
    }
    Graph::new(vertices, edges).map_err(|e| VerifyError::UnsupportedConfiguration(e.to_string()))
}

/// Build the nerve of the cover at path-component level — one vertex per
/// cover element, one edge per pairwise-intersection component — and check
/// it coincides with the gluing graph subdivided once per edge.
pub fn nerve_oracle(cover: &Cover, expanded: &ExpandedAtlas) -> Result<(Graph, bool), VerifyError> {
    let mut vertices = Vec::new();
    for element in &cover.elements {
        vertices.push(match element {
            CoverElement::StripInterior { strip } => strip.clone(),
            CoverElement::SeamNbhd { seam, .. } => format!("{}@0", seam),
        });
    }
    let mut edges = Vec::new();
    for seam in &cover.seams {
        edges.push((format!("{}#0", seam.id), seam.strip_x().to_string(), format!("{}@0", seam.id)));
        edges.push((format!("{}#1", seam.id), format!("{}@0", seam.id), seam.strip_y().to_string()));
    }
    let nerve = Graph::new(vertices, edges).map_err(|e| VerifyError::UnsupportedConfiguration(e.to_string()))?;

    let graph = build_graph(expanded);
    let marks: BTreeMap<String, Vec<Rat>> =
        graph.edges().iter().map(|e| (e.id.clone(), vec![Rat::zero()])).collect();
    let subdivided = subdivide(&graph, &marks).expect("one interior mark per edge is well formed");
    Ok((nerve.clone(), nerve == subdivided))
}

/// The full verdict of the isomorphism verification.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub verified: bool,
    /// Number of objects on each side (they are checked to agree).
    pub objects: usize,
    pub components: usize,
    /// Total free rank of the graph-side groupoid.
    pub graph_rank: usize,
    /// Total free rank of the surface-side groupoid.
    pub cover_rank: usize,
    pub checks: Vec<CheckItem>,
}

impl VerificationReport {
    pub fn failed_checks(&self) -> Vec<&CheckItem> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

struct Setup {
    subdivided: Arc<Graph>,
    cover_graph: Arc<Graph>,
    /// Basepoints of the graph side: mark vertices plus isolated vertices.
    basepoints: BTreeSet<usize>,
    /// Graph-side basepoint -> cover-side vertex, found by evaluating φ.
    object_map: BTreeMap<usize, usize>,
    functor: GraphMap,
}

/// Index the cut points by exact coordinates.
fn cuts_by_point(cuts: &CutSet) -> BTreeMap<Point, String> {
    cuts.points.iter().map(|c| (c.point.clone(), c.id.clone())).collect()
}

/// The graph-side arc that runs from the strip vertex to the mark of a cut
/// point: `β#0` forward for an X end, `β#2` backward for a Y end.
fn arc_to_mark(subdivided: &Graph, cut: &CutPoint) -> (usize, bool) {
    let seam = cut.seam.as_ref().expect("seam cut points only");
    match cut.role {
        CutRole::XEnd => (subdivided.edge_index(&format!("{}#0", seam)).expect("subdivision arc exists"), true),
        _ => (subdivided.edge_index(&format!("{}#2", seam)).expect("subdivision arc exists"), false),
    }
}

fn mark_vertex_name(cut: &CutPoint) -> String {
    let seam = cut.seam.as_ref().expect("seam cut points only");
    match cut.role {
        CutRole::XEnd => format!("{}@-1/10", seam),
        _ => format!("{}@1/10", seam),
    }
}

fn build_setup(
    expanded: &ExpandedAtlas,
    cover: &Cover,
    cuts: &CutSet,
    h: Graph,
    checks: &mut Vec<CheckItem>,
) -> Result<Setup, VerifyError> {
    let graph = build_graph(expanded);
    let marks: BTreeMap<String, Vec<Rat>> =
        graph.edges().iter().map(|e| (e.id.clone(), vec![rat(-1, 10), rat(1, 10)])).collect();
    let subdivided = Arc::new(subdivide(&graph, &marks).expect("two interior marks per edge are well formed"));
    let h = Arc::new(h);

    // Objects: the marks of the subdivided graph plus isolated vertices,
    // mapped through φ by exact coordinates.
    let by_point = cuts_by_point(cuts);
    let mut object_map: BTreeMap<usize, usize> = BTreeMap::new();
    let mut basepoints: BTreeSet<usize> = BTreeSet::new();
    let mut failures = Vec::new();
    for seam in &cover.seams {
        for t in [rat(-1, 10), rat(1, 10)] {
            let vertex = format!("{}@{}", seam.id, fmt_rat(&t));
            let v = subdivided.vertex_index(&vertex).expect("mark vertex exists in the subdivision");
            basepoints.insert(v);
            let image = phi_eval(seam, &t)?;
            match by_point.get(&image).and_then(|id| h.vertex_index(id)) {
                Some(w) => {
                    object_map.insert(v, w);
                }
                None => failures.push(format!("φ sends {} to {}, which is not a cut point", vertex, image)),
            }
        }
    }
    for (v, name) in graph.vertices().iter().enumerate() {
        if graph.degree(v) == 0 {
            let sv = subdivided.vertex_index(name).expect("strip vertices survive subdivision");
            basepoints.insert(sv);
            let image = Point::new(name, Rat::zero(), Rat::zero());
            match by_point.get(&image).and_then(|id| h.vertex_index(id)) {
                Some(w) => {
                    object_map.insert(sv, w);
                }
                None => failures.push(format!("origin of isolated strip {} is not a cut point", name)),
            }
        }
    }
    let hit: BTreeSet<usize> = object_map.values().copied().collect();
    let bijective =
        failures.is_empty() && hit.len() == object_map.len() && object_map.len() == h.vertex_count();
    if !bijective && failures.is_empty() {
        failures.push(format!(
            "{} basepoints map onto {} of {} cut points",
            object_map.len(),
            hit.len(),
            h.vertex_count()
        ));
    }
    checks.push(CheckItem::new(
        "object-bijection",
        bijective,
        if failures.is_empty() {
            format!("{} objects matched by exact φ-coordinates", object_map.len())
        } else {
            failures.join("; ")
        },
    ));

    // The functor on the whole subdivided graph: strip vertices go to their
    // star roots, marks to their cut points; the three arcs of each edge go
    // to the star edge into d, the seam edge, and the star edge out of d′.
    let mut vertex_map = vec![usize::MAX; subdivided.vertex_count()];
    for (&v, &w) in &object_map {
        vertex_map[v] = w;
    }
    for (v, name) in graph.vertices().iter().enumerate() {
        if graph.degree(v) > 0 {
            let sv = subdivided.vertex_index(name).expect("strip vertices survive subdivision");
            let root = cuts.root_of(name).expect("a non-isolated strip holds seam cut points");
            vertex_map[sv] = h.vertex_index(&root.id).expect("roots are cover-graph vertices");
        }
    }

    let mut edge_words = Vec::with_capacity(subdivided.edge_count());
    for edge in subdivided.edges() {
        let (seam_name, piece) = edge.id.rsplit_once('#').expect("subdivision arcs are named edge#piece");
        let seam = cover.seams.iter().find(|s| s.id.to_string() == seam_name).expect("arc names a seam");
        let word = match piece {
            "1" => Word::from_steps(&h, &format!("d:{}", seam.id), &[(&format!("seam:{}", seam.id), true)])?,
            piece => {
                let (strip, cut_id) = if piece == "0" {
                    (seam.strip_x().to_string(), format!("d:{}", seam.id))
                } else {
                    (seam.strip_y().to_string(), format!("d':{}", seam.id))
                };
                let root = cuts.root_of(&strip).expect("a glued strip holds cut points");
                let star = format!("star:{}:{}", strip, cut_id);
                let to_cut = if root.id == cut_id {
                    Word::identity(h.vertex_index(&cut_id).expect("cut points are vertices"))
                } else {
                    Word::from_steps(&h, &root.id, &[(&star, true)])?
                };
                // Arc #0 runs from the strip into the mark; arc #2 runs
                // from the mark out to the strip, so it maps to the
                // reversed star path.
                if piece == "0" {
                    to_cut
                } else {
                    inverse(&to_cut)
                }
            }
        };
        edge_words.push(word);
    }
    let functor = GraphMap::new(Arc::clone(&subdivided), Arc::clone(&h), vertex_map, edge_words)?;
    Ok(Setup { subdivided, cover_graph: h, basepoints, object_map, functor })
}

/// Verify that the canonical injection induces an isomorphism from the
/// fundamental groupoid of the gluing graph (based at the cut preimages)
/// onto the fundamental groupoid of the surface (based at the cut set).
/// `max_len` bounds the sampled-word and brute-force phases; the structural
/// certificates (object bijection, fullness on generators, folding rank)
/// are exact and independent of it.
pub fn verify_phi_iso(expanded: &ExpandedAtlas, max_len: usize) -> Result<VerificationReport, VerifyError> {
    require_valid(expanded)?;
    let cover = build_cover(expanded)?;
    let cuts = choose_cut_set(expanded)?;

    let mut checks = Vec::new();
    let conditions = check_conditions(&cover, &cuts, expanded);
    checks.extend(conditions.items.iter().cloned());

    let h = cover_graph(&cover, &cuts)?;

    let (_nerve, nerve_ok) = nerve_oracle(&cover, expanded)?;
    checks.push(CheckItem::new(
        "nerve-matches-subdivision",
        nerve_ok,
        "nerve of the cover vs the gluing graph subdivided once per edge".to_string(),
    ));

    let graph = build_graph(expanded);
    let graph_inv = graph_invariants(&graph);
    let h_inv = graph_invariants(&h);
    checks.push(CheckItem::new(
        "euler-characteristic",
        graph_inv.euler_characteristic == h_inv.euler_characteristic
            && graph_inv.component_count == h_inv.component_count,
        format!(
            "graph: χ = {}, {} component(s); cover graph: χ = {}, {} component(s)",
            graph_inv.euler_characteristic,
            graph_inv.component_count,
            h_inv.euler_characteristic,
            h_inv.component_count
        ),
    ));

    let setup = build_setup(expanded, &cover, &cuts, h, &mut checks)?;
    let based = BasedGroupoid::new(Arc::clone(&setup.subdivided), setup.basepoints.clone())?;

    // Component correspondence: basepoints lie in the same graph component
    // exactly when their images lie in the same cover-graph component, and
    // every cover-graph component is reached.
    let g_components = setup.subdivided.component_ids();
    let h_components = setup.cover_graph.component_ids();
    let mut corresponds = true;
    let mut witness = String::new();
    let points: Vec<usize> = setup.basepoints.iter().copied().collect();
    for (i, &p) in points.iter().enumerate() {
        for &q in &points[i + 1..] {
            let same_g = g_components[p] == g_components[q];
            let same_h = h_components[setup.object_map[&p]] == h_components[setup.object_map[&q]];
            if same_g != same_h {
                corresponds = false;
                witness = format!(
                    "objects {} and {} are {} on the graph side but {} on the surface side",
                    setup.subdivided.vertex_name(p),
                    setup.subdivided.vertex_name(q),
                    if same_g { "connected" } else { "separated" },
                    if same_h { "connected" } else { "separated" }
                );
            }
        }
    }
    let reached: BTreeSet<usize> = points.iter().map(|p| h_components[setup.object_map[p]]).collect();
    let h_component_set: BTreeSet<usize> = h_components.iter().copied().collect();
    if reached != h_component_set {
        corresponds = false;
        witness = format!("{} of {} surface components reached", reached.len(), h_component_set.len());
    }
    checks.push(CheckItem::new(
        "component-correspondence",
        corresponds,
        if corresponds { format!("{} component(s) matched", h_component_set.len()) } else { witness },
    ));

    // Rank equality, component by component.
    let mut ranks_equal = true;
    let mut rank_details = Vec::new();
    let sub_inv = graph_invariants(&setup.subdivided);
    for component in &sub_inv.components {
        let Some(&p) = points
            .iter()
            .find(|p| component.vertices.iter().any(|n| n == setup.subdivided.vertex_name(**p)))
        else {
            // A component without basepoints would already have failed the
            // coverage checks; skip rather than panic.
            continue;
        };
        let h_comp = h_components[setup.object_map[&p]];
        let h_component = h_inv
            .components
            .iter()
            .find(|c| {
                c.vertices
                    .first()
                    .and_then(|name| setup.cover_graph.vertex_index(name))
                    .map(|v| h_components[v] == h_comp)
                    .unwrap_or(false)
            })
            .expect("every cover-graph component appears in its invariants");
        if component.free_rank != h_component.free_rank {
            ranks_equal = false;
        }
        rank_details.push(format!("{} vs {}", component.free_rank, h_component.free_rank));
    }
    checks.push(CheckItem::new(
        "rank-equality",
        ranks_equal,
        format!("per-component free ranks (graph vs surface): {}", rank_details.join(", ")),
    ));

    // Functoriality: identities at every object, plus composable pairs of
    // short based words harvested deterministically.
    let mut pairs: Vec<(Word, Word)> = Vec::new();
    let sample_len = max_len.min(4).max(1);
    'collect: for &p in &points {
        for &q in &points {
            if g_components[p] != g_components[q] {
                continue;
            }
            let Ok(first_legs) = based.hom(p, q, sample_len, 20_000) else { continue };
            for w1 in first_legs.iter().take(4) {
                let Ok(second_legs) = based.hom(q, p, sample_len, 20_000) else { continue };
                for w2 in second_legs.iter().take(4) {
                    pairs.push((w1.clone(), w2.clone()));
                    if pairs.len() >= 64 {
                        break 'collect;
                    }
                }
            }
        }
    }
    let functor_report = induced_functor_check(&setup.functor, &pairs);
    checks.push(CheckItem::new(
        "functor-law-samples",
        functor_report.is_functorial(),
        if functor_report.is_functorial() {
            format!(
                "{} identities and {} composable pairs preserved",
                functor_report.identities_checked, functor_report.pairs_checked
            )
        } else {
            functor_report.violations.join("; ")
        },
    ));

    // Fullness: every edge of the cover graph is the image of an explicit
    // based word — the middle arc for a seam edge, and (root arc)⁻¹ · (cut
    // arc) for a star edge, whose root factor maps to an identity.
    let mut full = true;
    let mut full_witness = Vec::new();
    for (e, edge) in setup.cover_graph.edges().iter().enumerate() {
        let expected = Word::new(&setup.cover_graph, edge.u, vec![DirEdge { edge: e, forward: true }])
            .expect("single-edge words are well formed");
        let preimage = if let Some(seam_name) = edge.id.strip_prefix("seam:") {
            Word::from_steps(&setup.subdivided, &format!("{}@-1/10", seam_name), &[(&format!("{}#1", seam_name), true)])?
        } else {
            let cut_id = edge.id.splitn(3, ':').nth(2).map(|rest| rest.to_string());
            let strip = edge.id.splitn(3, ':').nth(1).unwrap_or_default().to_string();
            let Some(cut_id) = cut_id else {
                full = false;
                full_witness.push(format!("unrecognized edge id {}", edge.id));
                continue;
            };
            let root = cuts.root_of(&strip).expect("star edges live in glued strips");
            let cut = cuts.by_id(&cut_id).expect("star edges end at cut points");
            let root_arc = arc_to_mark(&setup.subdivided, root);
            let cut_arc = arc_to_mark(&setup.subdivided, cut);
            let start = setup
                .subdivided
                .vertex_index(&mark_vertex_name(root))
                .expect("mark vertices exist");
            let back_to_strip = Word::new(
                &setup.subdivided,
                start,
                vec![DirEdge { edge: root_arc.0, forward: !root_arc.1 }],
            )
            .expect("reversed root arc starts at the root mark");
            let onward = Word::new(
                &setup.subdivided,
                back_to_strip.end(),
                vec![DirEdge { edge: cut_arc.0, forward: cut_arc.1 }],
            )
            .expect("cut arc starts at the strip vertex");
            compose(&back_to_strip, &onward)?
        };
        let image = setup.functor.apply(&preimage);
        if image != expected {
            full = false;
            full_witness.push(format!(
                "edge {} expected image {} but preimage maps to {}",
                edge.id,
                expected.display(&setup.cover_graph),
                image.display(&setup.cover_graph)
            ));
        }
    }
    checks.push(CheckItem::new(
        "generator-surjectivity",
        full,
        if full {
            format!("all {} cover-graph edges realized by explicit preimage words", setup.cover_graph.edge_count())
        } else {
            full_witness.join("; ")
        },
    ));

    // Faithfulness: per component, push a free basis of the vertex group
    // through the functor and fold. The images generate a subgroup whose
    // rank equals the number of generators exactly when the map is
    // injective there; with fullness and the object bijection this upgrades
    // to an isomorphism of based groupoids.
    let mut injective = true;
    let mut fold_details = Vec::new();
    for basis in based.free_bases() {
        let images: Vec<Word> = basis.loops.iter().map(|w| setup.functor.apply(w)).collect();
        for (lp, img) in basis.loops.iter().zip(&images) {
            if img.start() != setup.object_map[&basis.root] || img.end() != img.start() {
                injective = false;
                fold_details.push(format!(
                    "image of {} is not a loop at the image basepoint",
                    lp.display(&setup.subdivided)
                ));
            }
        }
        let folded = subgroup_rank(&images);
        if folded != basis.loops.len() {
            injective = false;
            if let Some(trivial) = basis.loops.iter().find(|w| setup.functor.apply(w).is_empty()) {
                fold_details.push(format!(
                    "basis loop {} maps to an identity",
                    trivial.display(&setup.subdivided)
                ));
            } else {
                fold_details.push(format!(
                    "{} basis loops fold to rank {}",
                    basis.loops.len(),
                    folded
                ));
            }
        } else {
            fold_details.push(format!(
                "component of {}: {} basis loops fold to rank {}",
                setup.subdivided.vertex_name(basis.root),
                basis.loops.len(),
                folded
            ));
        }
    }
    checks.push(CheckItem::new("vertex-group-injectivity", injective, fold_details.join("; ")));

    // Brute-force crosscheck on small instances: enumerate reduced loops up
    // to the length bound and confirm their images stay pairwise distinct.
    let mut crosscheck = true;
    let mut cross_detail = Vec::new();
    for basis in based.free_bases() {
        match based.loops_at(basis.root, max_len.min(8), 200_000) {
            Ok(loops) => {
                let mut images = BTreeSet::new();
                for lp in &loops {
                    let img = setup.functor.apply(lp);
                    if !images.insert((img.start(), img.steps().to_vec())) {
                        crosscheck = false;
                        cross_detail.push(format!(
                            "loops at {} collide in the image: {}",
                            setup.subdivided.vertex_name(basis.root),
                            lp.display(&setup.subdivided)
                        ));
                        break;
                    }
                }
                if crosscheck {
                    cross_detail.push(format!(
                        "{} loops at {} map injectively",
                        loops.len(),
                        setup.subdivided.vertex_name(basis.root)
                    ));
                }
            }
            Err(GroupoidError::BudgetExceeded { .. }) => {
                cross_detail.push(format!(
                    "skipped at {}: enumeration budget exceeded (folding certificate covers it)",
                    setup.subdivided.vertex_name(basis.root)
                ));
            }
            Err(e) => return Err(VerifyError::Construction(e)),
        }
    }
    checks.push(CheckItem::new("loop-distinctness-crosscheck", crosscheck, cross_detail.join("; ")));

    let verified = checks.iter().all(|c| c.passed);
    Ok(VerificationReport {
        verified,
        objects: cuts.points.len(),
        components: h_inv.component_count,
        graph_rank: graph_inv.total_rank,
        cover_rank: h_inv.total_rank,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::{expand, StripedAtlas};
    use crate::dsl::parse;

    fn expanded(source: &str, window: u32) -> ExpandedAtlas {
        let atlas = parse(source).expect("test atlas parses");
        expand(&atlas, window)
    }

    fn plane() -> ExpandedAtlas {
        expanded("strip A { top: none; bottom: none; }", 0)
    }

    fn xy() -> ExpandedAtlas {
        expanded(
            "strip Q0 { top: (-inf, +inf); bottom: (-inf, +inf); }\n\
             strip Q1 { top: (-inf, +inf); bottom: (-inf, +inf); }\n\
             strip Q2 { top: (-inf, +inf); bottom: (-inf, +inf); }\n\
             strip Q3 { top: (-inf, +inf); bottom: (-inf, +inf); }\n\
             glue g0: Q0.top[0] ~ Q1.bottom[0];\n\
             glue g1: Q1.top[0] ~ Q2.bottom[0];\n\
             glue g2: Q2.top[0] ~ Q3.bottom[0];\n\
             glue g3: Q3.top[0] ~ Q0.bottom[0];",
            0,
        )
    }

    fn mobius() -> ExpandedAtlas {
        expanded(
            "strip A { top: (0, 1); bottom: (0, 1); }\nglue g: A.top[0] ~ A.bottom[0] reversed;",
            0,
        )
    }

    fn ladder(window: u32) -> ExpandedAtlas {
        expanded(
            "strip S0 { top: none; bottom: none; }\nstrip S1 { top: none; bottom: none; }\n\
             family F in Z {\n  S0.top: (n, n + 1);\n  S1.bottom: (n, n + 1);\n  glue s: S0.top[n] ~ S1.bottom[n];\n}",
            window,
        )
    }

    #[test]
    fn cover_counts_match_the_examples() {
        // Four strips and four seams give eight elements; the plane has a
        // single interior element; a self-gluing keeps both rectangles in
        // one strip.
        let cover = build_cover(&xy()).unwrap();
        assert_eq!(cover.elements.len(), 8);
        assert_eq!(cover.pullbacks.len(), 8);

        let cover = build_cover(&plane()).unwrap();
        assert_eq!(cover.elements.len(), 1);
        assert!(matches!(cover.elements[0], CoverElement::StripInterior { .. }));

        let cover = build_cover(&mobius()).unwrap();
        assert_eq!(cover.elements.len(), 2);
        match &cover.elements[1] {
            CoverElement::SeamNbhd { x_rect, y_rect, .. } => {
                assert_eq!(x_rect.strip, "A");
                assert_eq!(y_rect.strip, "A");
            }
            other => panic!("expected a seam neighborhood, got {:?}", other),
        }
    }

    #[test]
    fn phi_eval_matches_the_piecewise_formula() {
        let ex = expanded(
            "strip A { top: (0, 1); bottom: none; }\nstrip B { top: none; bottom: (2, 4); }\nglue g: A.top[0] ~ B.bottom[0];",
            0,
        );
        let seam = &seams(&ex).unwrap()[0];
        // x_β = 1/2, γ(y) maps (2,4) onto (0,1), so y_β = γ⁻¹(1/2) = 3.
        assert_eq!(phi_eval(seam, &rat_int(-1)).unwrap(), Point::new("A", rat_int(0), rat_int(0)));
        assert_eq!(phi_eval(seam, &rat(-1, 2)).unwrap(), Point::new("A", rat(1, 2), rat(1, 2)));
        assert_eq!(phi_eval(seam, &rat(-1, 10)).unwrap(), Point::new("A", rat(1, 2), rat(9, 10)));
        assert_eq!(phi_eval(seam, &Rat::zero()).unwrap(), Point::new("A", rat(1, 2), rat_int(1)));
        assert_eq!(phi_eval(seam, &rat(1, 10)).unwrap(), Point::new("B", rat_int(3), rat(-9, 10)));
        assert_eq!(phi_eval(seam, &rat(1, 2)).unwrap(), Point::new("B", rat_int(3), rat(-1, 2)));
        assert_eq!(phi_eval(seam, &rat(3, 4)).unwrap(), Point::new("B", rat(3, 2), rat(-1, 4)));
        assert_eq!(phi_eval(seam, &rat_int(1)).unwrap(), Point::new("B", rat_int(0), rat_int(0)));
        assert_eq!(seam_point(seam), Point::new("A", rat(1, 2), rat_int(1)));
        assert!(matches!(phi_eval(seam, &rat_int(2)), Err(VerifyError::BadParameter(_))));
        assert!(matches!(phi_eval(seam, &rat(-3, 2)), Err(VerifyError::BadParameter(_))));
    }

    #[test]
    fn cut_sets_are_deterministic_and_exact() {
        let cuts = choose_cut_set(&plane()).unwrap();
        assert_eq!(cuts.points.len(), 1);
        assert_eq!(cuts.points[0].id, "s:A");
        assert_eq!(cuts.points[0].point, Point::new("A", rat_int(0), rat_int(0)));

        let cuts = choose_cut_set(&xy()).unwrap();
        assert_eq!(cuts.points.len(), 8);
        assert!(cuts.points.iter().all(|c| c.role != CutRole::Origin));
        // d of g0 sits over the top of Q0 at level 9/10; d' at the bottom
        // of Q1 at level -9/10, both over abscissa 0 (the anchor of ℝ).
        assert_eq!(cuts.by_id("d:g0").unwrap().point, Point::new("Q0", rat_int(0), rat(9, 10)));
        assert_eq!(cuts.by_id("d':g0").unwrap().point, Point::new("Q1", rat_int(0), rat(-9, 10)));

        let cuts = choose_cut_set(&mobius()).unwrap();
        // γ is the reversal of (0,1) onto itself, so both cut points sit
        // over 1/2 on opposite boundary lines of the same strip.
        assert_eq!(cuts.by_id("d:g").unwrap().point, Point::new("A", rat(1, 2), rat(9, 10)));
        assert_eq!(cuts.by_id("d':g").unwrap().point, Point::new("A", rat(1, 2), rat(-9, 10)));
        assert_eq!(cuts.root_of("A").unwrap().id, "d:g");
    }

    #[test]
    fn intersection_components_hold_exactly_one_cut_point() {
        let ex = xy();
        let cover = build_cover(&ex).unwrap();
        let cuts = choose_cut_set(&ex).unwrap();
        let report = intersections(&cover, &cuts);
        assert_eq!(report.components.len(), 8);
        assert!(report.components.iter().all(|c| c.cut_points.len() == 1));
        assert!(report.arc_components.iter().all(|c| c.marks.len() == 1));
        assert!(report.triples_empty);
        assert!(report.seam_overlaps.is_empty());

        let ex = mobius();
        let report = intersections(&build_cover(&ex).unwrap(), &choose_cut_set(&ex).unwrap());
        // The single seam neighborhood meets its strip interior in two
        // components, one per rectangle.
        assert_eq!(report.components.len(), 2);
        assert!(report.components.iter().all(|c| c.strip_element == "int:A"));
    }

    #[test]
    fn conditions_pass_on_the_canonical_atlases() {
        for ex in [plane(), xy(), mobius(), ladder(1), ladder(3)] {
            let cover = build_cover(&ex).unwrap();
            let cuts = choose_cut_set(&ex).unwrap();
            let report = check_conditions(&cover, &cuts, &ex);
            assert!(report.passed, "conditions failed: {:?}", report.items);
        }
    }

    #[test]
    fn cover_graph_matches_the_counted_examples() {
        let ex = xy();
        let h = cover_graph(&build_cover(&ex).unwrap(), &choose_cut_set(&ex).unwrap()).unwrap();
        assert_eq!(h.vertex_count(), 8);
        assert_eq!(h.edge_count(), 8);
        let inv = graph_invariants(&h);
        assert_eq!(inv.euler_characteristic, 0);
        assert_eq!(inv.total_rank, 1);

        let ex = plane();
        let h = cover_graph(&build_cover(&ex).unwrap(), &choose_cut_set(&ex).unwrap()).unwrap();
        assert_eq!((h.vertex_count(), h.edge_count()), (1, 0));

        let ex = mobius();
        let h = cover_graph(&build_cover(&ex).unwrap(), &choose_cut_set(&ex).unwrap()).unwrap();
        assert_eq!((h.vertex_count(), h.edge_count()), (2, 2));
        assert_eq!(graph_invariants(&h).total_rank, 1);
    }

    #[test]
    fn nerve_agrees_with_the_subdivided_graph() {
        for ex in [plane(), xy(), mobius(), ladder(2)] {
            let cover = build_cover(&ex).unwrap();
            let (_nerve, ok) = nerve_oracle(&cover, &ex).unwrap();
            assert!(ok);
        }
        let (nerve, _) = nerve_oracle(&build_cover(&xy()).unwrap(), &xy()).unwrap();
        // Subdividing the 4-cycle once per edge gives the 8-cycle.
        assert_eq!(nerve.vertex_count(), 8);
        assert_eq!(nerve.edge_count(), 8);
        assert!((0..nerve.vertex_count()).all(|v| nerve.degree(v) == 2));
    }

    #[test]
    fn verifies_the_plane() {
        let report = verify_phi_iso(&plane(), 8).unwrap();
        assert!(report.verified, "failed checks: {:?}", report.failed_checks());
        assert_eq!(report.objects, 1);
        assert_eq!(report.graph_rank, 0);
        assert_eq!(report.cover_rank, 0);
    }

    #[test]
    fn verifies_the_coordinate_cross() {
        let report = verify_phi_iso(&xy(), 8).unwrap();
        assert!(report.verified, "failed checks: {:?}", report.failed_checks());
        assert_eq!(report.objects, 8);
        assert_eq!(report.components, 1);
        assert_eq!(report.graph_rank, 1);
        assert_eq!(report.cover_rank, 1);
    }

    #[test]
    fn verifies_self_gluings() {
        let report = verify_phi_iso(&mobius(), 8).unwrap();
        assert!(report.verified, "failed checks: {:?}", report.failed_checks());
        assert_eq!(report.objects, 2);
        assert_eq!(report.graph_rank, 1);
    }

    #[test]
    fn verifies_the_ladder_ranks() {
        let report = verify_phi_iso(&ladder(2), 8).unwrap();
        assert!(report.verified, "failed checks: {:?}", report.failed_checks());
        assert_eq!(report.objects, 8);
        assert_eq!(report.graph_rank, 3);
        assert_eq!(report.cover_rank, 3);

        let report = verify_phi_iso(&ladder(1), 6).unwrap();
        assert!(report.verified);
        assert_eq!(report.graph_rank, 1);
    }

    #[test]
    fn rejects_invalid_atlases() {
        let ex = expanded("strip A { top: (0, 2), (1, 3); bottom: none; }", 0);
        assert!(matches!(verify_phi_iso(&ex, 4), Err(VerifyError::InvalidAtlas(_))));
        assert!(matches!(build_cover(&ex), Err(VerifyError::InvalidAtlas(_))));
        assert!(matches!(choose_cut_set(&ex), Err(VerifyError::InvalidAtlas(_))));
    }

    #[test]
    fn reports_serialize_to_json() {
        let report = verify_phi_iso(&mobius(), 6).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"verified\":true"));
        assert!(json.contains("vertex-group-injectivity"));
    }

    #[test]
    fn verifies_a_mixed_atlas_with_isolated_strips() {
        let ex = expanded(
            "strip A { top: (0, 1), (2, 3); bottom: none; }\n\
             strip B { top: (0, 1); bottom: (0, 1); }\n\
             strip C { top: (-inf, 0); bottom: (-2, -1), (5, 7); }\n\
             strip D { top: none; bottom: none; }\n\
             glue g0: A.top[0] ~ B.bottom[0];\n\
             glue g1: A.top[1] ~ C.bottom[0];\n\
             glue g2: B.top[0] ~ C.bottom[1] reversed;",
            0,
        );
        let report = verify_phi_iso(&ex, 8).unwrap();
        assert!(report.verified, "failed checks: {:?}", report.failed_checks());
        // Three glued strips in a triangle plus one isolated strip:
        // 6 seam cut points + 1 origin.
        assert_eq!(report.objects, 7);
        assert_eq!(report.components, 2);
        assert_eq!(report.graph_rank, 1);
        assert_eq!(report.cover_rank, 1);
    }

    #[test]
    fn star_roots_follow_seam_then_role_order() {
        let ex = expanded(
            "strip A { top: (0, 1); bottom: (0, 1), (2, 3); }\nstrip B { top: (0, 1), (2, 3); bottom: none; }\n\
             glue g0: A.top[0] ~ B.top[0];\nglue g1: B.top[1] ~ A.bottom[0];",
            0,
        );
        let cuts = choose_cut_set(&ex).unwrap();
        // In strip B: d':g0 (role YEnd, seam g0) and d:g1 (XEnd, seam g1).
        // Seam order precedes role order, so the root is d':g0.
        assert_eq!(cuts.root_of("B").unwrap().id, "d':g0");
        assert_eq!(cuts.root_of("A").unwrap().id, "d:g0");
        let report = verify_phi_iso(&ex, 8).unwrap();
        assert!(report.verified, "failed checks: {:?}", report.failed_checks());
    }

    #[test]
    fn unused_atlas_parses_cleanly() {
        // Guard: StripedAtlas equality derives are exercised via parse.
        let a: StripedAtlas = parse("strip A { top: none; bottom: none; }").unwrap();
        assert_eq!(a.strips().len(), 1);
    }
}
