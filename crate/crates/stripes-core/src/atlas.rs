//! The striped-atlas model: strips, boundary intervals, interval families,
//! gluings, windowed expansion, validation, and the affine gluing maps.
//!
//! A model strip lives in `ℝ × [-1, 1]`: an open band plus disjoint open
//! intervals on the two boundary lines. An atlas glues such strips along
//! pairs of boundary intervals; each gluing is realized by the unique affine
//! bijection between the two intervals that either respects or reverses
//! orientation. Countable families of intervals and gluings (indexed by
//! `n ∈ ℤ`) are expanded to a finite window before anything is computed.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::rat::{fmt_rat, pow_i, rat_int, ExtRat, Rat};

/// Which boundary line of a strip: `Top` is the level `y = +1`, `Bottom` is
/// `y = -1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Side {
    Top,
    Bottom,
}

impl Side {
    /// The sign `ε` of the boundary line: `+1` for top, `-1` for bottom.
    pub fn epsilon(self) -> i64 {
        match self {
            Side::Top => 1,
            Side::Bottom => -1,
        }
    }

    /// The level `y = ε` as a rational.
    pub fn level(self) -> Rat {
        rat_int(self.epsilon())
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::Top => "top",
            Side::Bottom => "bottom",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An open interval on the extended line. `lo < hi` is required for the
/// interval to be nonempty; emptiness is a validation violation, not a
/// construction error.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Interval {
    pub lo: ExtRat,
    pub hi: ExtRat,
}

impl Interval {
    pub fn new(lo: ExtRat, hi: ExtRat) -> Self {
        Interval { lo, hi }
    }

    pub fn finite(lo: Rat, hi: Rat) -> Self {
        Interval { lo: ExtRat::Fin(lo), hi: ExtRat::Fin(hi) }
    }

    pub fn is_empty(&self) -> bool {
        self.lo >= self.hi
    }

    /// Strict containment of a finite point in the open interval.
    pub fn contains(&self, x: &Rat) -> bool {
        crate::rat::strictly_between(&self.lo, x, &self.hi)
    }

    /// Open intervals intersect iff `max(lo) < min(hi)`; touching endpoints
    /// do not count.
    pub fn overlaps(&self, other: &Interval) -> bool {
        let lo = self.lo.clone().max(other.lo.clone());
        let hi = self.hi.clone().min(other.hi.clone());
        lo < hi
    }

    /// The canonical interior anchor point:
    /// midpoint for finite intervals, `a + 1` for `(a, +inf)`, `b - 1` for
    /// `(-inf, b)`, `0` for the full line. `None` for empty shapes.
    pub fn anchor(&self) -> Option<Rat> {
        match (&self.lo, &self.hi) {
            (ExtRat::Fin(a), ExtRat::Fin(b)) if a < b => Some((a + b) / rat_int(2)),
            (ExtRat::Fin(a), ExtRat::PosInf) => Some(a + rat_int(1)),
            (ExtRat::NegInf, ExtRat::Fin(b)) => Some(b - rat_int(1)),
            (ExtRat::NegInf, ExtRat::PosInf) => Some(Rat::zero()),
            _ => None,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

/// One endpoint of an interval family: `base + coeff · t` where `t` is `n`
/// (affine families) or `rⁿ` (geometric families).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct EndpointForm {
    #[serde(serialize_with = "crate::rat::serialize_rat")]
    pub base: Rat,
    #[serde(serialize_with = "crate::rat::serialize_rat")]
    pub coeff: Rat,
}

impl EndpointForm {
    pub fn new(base: Rat, coeff: Rat) -> Self {
        EndpointForm { base, coeff }
    }

    pub fn constant(base: Rat) -> Self {
        EndpointForm { base, coeff: Rat::zero() }
    }
}

/// The shape of an interval family indexed by `n ∈ ℤ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum FamilyForm {
    /// `(a₀ + a₁n, b₀ + b₁n)`.
    Affine { lo: EndpointForm, hi: EndpointForm },
    /// `(a₀ + a₁rⁿ, b₀ + b₁rⁿ)` with a shared ratio `r`, `0 < |r| < 1`.
    Geometric {
        lo: EndpointForm,
        hi: EndpointForm,
        #[serde(serialize_with = "crate::rat::serialize_rat")]
        ratio: Rat,
    },
}

impl FamilyForm {
    /// The member interval at index `n`. Total: a geometric family with a
    /// zero ratio and `n < 0` yields a degenerate empty interval, which
    /// validation then flags (alongside the bad ratio itself).
    pub fn member(&self, n: i64) -> Interval {
        match self {
            FamilyForm::Affine { lo, hi } => {
                let t = rat_int(n);
                Interval::finite(&lo.base + &lo.coeff * &t, &hi.base + &hi.coeff * &t)
            }
            FamilyForm::Geometric { lo, hi, ratio } => {
                if ratio.is_zero() && n < 0 {
                    return Interval::finite(Rat::zero(), Rat::zero());
                }
                let t = pow_i(ratio, n);
                Interval::finite(&lo.base + &lo.coeff * &t, &hi.base + &hi.coeff * &t)
            }
        }
    }
}

/// An interval family attached to one side of one strip, named after the
/// family block that declared it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntervalFamily {
    pub family: String,
    pub form: FamilyForm,
}

/// The boundary data of one side of a strip: explicitly listed intervals
/// (order is significant — gluings index into it) plus attached families.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SideSpec {
    pub intervals: Vec<Interval>,
    pub families: Vec<IntervalFamily>,
}

impl SideSpec {
    pub fn is_none(&self) -> bool {
        self.intervals.is_empty() && self.families.is_empty()
    }

    pub fn family(&self, id: &str) -> Option<&IntervalFamily> {
        self.families.iter().find(|f| f.family == id)
    }
}

/// A model strip: an identifier and the boundary data of its two sides.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModelStrip {
    pub id: String,
    pub top: SideSpec,
    pub bottom: SideSpec,
}

impl ModelStrip {
    pub fn bare(id: &str) -> Self {
        ModelStrip { id: id.to_string(), top: SideSpec::default(), bottom: SideSpec::default() }
    }

    pub fn side(&self, side: Side) -> &SideSpec {
        match side {
            Side::Top => &self.top,
            Side::Bottom => &self.bottom,
        }
    }

    pub fn side_mut(&mut self, side: Side) -> &mut SideSpec {
        match side {
            Side::Top => &mut self.top,
            Side::Bottom => &mut self.bottom,
        }
    }
}

/// Which interval of a side a gluing end refers to.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum WhichInterval {
    /// Position in the side's explicit interval list.
    Explicit(usize),
    /// Member of an attached family. With `uses_n`, the member index is
    /// `n + offset` where `n` is the running index of the enclosing gluing
    /// family; otherwise it is the fixed index `offset`.
    Member { family: String, offset: i64, uses_n: bool },
}

/// A reference to one boundary interval of one strip.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct BoundaryRef {
    pub strip: String,
    pub side: Side,
    pub which: WhichInterval,
}

impl BoundaryRef {
    pub fn explicit(strip: &str, side: Side, index: usize) -> Self {
        BoundaryRef { strip: strip.to_string(), side, which: WhichInterval::Explicit(index) }
    }

    pub fn member(strip: &str, side: Side, family: &str, index: i64) -> Self {
        BoundaryRef {
            strip: strip.to_string(),
            side,
            which: WhichInterval::Member { family: family.to_string(), offset: index, uses_n: false },
        }
    }

    pub fn indexed(strip: &str, side: Side, family: &str, offset: i64) -> Self {
        BoundaryRef {
            strip: strip.to_string(),
            side,
            which: WhichInterval::Member { family: family.to_string(), offset, uses_n: true },
        }
    }
}

/// A gluing: identify the interval referenced by `x` with the one referenced
/// by `y` through the orientation-respecting (`reversed = false`) or
/// orientation-reversing affine bijection. `family` is set when the gluing
/// was declared inside a family block, in which case it is instantiated once
/// per window index and its ends may use `n`-relative references.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Gluing {
    pub id: String,
    pub x: BoundaryRef,
    pub y: BoundaryRef,
    pub reversed: bool,
    pub family: Option<String>,
}

/// A finite description of a (possibly countably infinite) striped atlas.
/// Strips and gluings are kept sorted by id; construction enforces
/// referential integrity (every gluing end names an existing strip, side,
/// and interval or family).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StripedAtlas {
    strips: Vec<ModelStrip>,
    gluings: Vec<Gluing>,
}

/// Structural problems that make an atlas description unusable (as opposed
/// to geometric problems, which are reported by validation).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("duplicate strip id `{0}`")]
    DuplicateStrip(String),
    #[error("duplicate gluing id `{0}`")]
    DuplicateGluing(String),
    #[error("strip `{strip}` attaches family `{family}` to its {side} side twice")]
    DuplicateFamilyOnSide { strip: String, side: Side, family: String },
    #[error("gluing `{gluing}` refers to unknown strip `{strip}`")]
    UnknownStrip { gluing: String, strip: String },
    #[error("gluing `{gluing}` refers to interval {index} of `{strip}.{side}`, which has {len}")]
    ExplicitIndexOutOfRange { gluing: String, strip: String, side: Side, index: usize, len: usize },
    #[error("gluing `{gluing}` refers to family `{family}` which is not attached to `{strip}.{side}`")]
    UnknownFamily { gluing: String, strip: String, side: Side, family: String },
    #[error("gluing `{gluing}` uses an n-relative index outside a family block")]
    NIndexOutsideFamily { gluing: String },
}

impl StripedAtlas {
    pub fn new(mut strips: Vec<ModelStrip>, mut gluings: Vec<Gluing>) -> Result<Self, BuildError> {
        strips.sort_by(|a, b| a.id.cmp(&b.id));
        for w in strips.windows(2) {
            if w[0].id == w[1].id {
                return Err(BuildError::DuplicateStrip(w[0].id.clone()));
            }
        }
        for strip in &strips {
            for side in [Side::Top, Side::Bottom] {
                let fams = &strip.side(side).families;
                for (i, f) in fams.iter().enumerate() {
                    if fams[..i].iter().any(|g| g.family == f.family) {
                        return Err(BuildError::DuplicateFamilyOnSide {
                            strip: strip.id.clone(),
                            side,
                            family: f.family.clone(),
                        });
                    }
                }
            }
        }
        gluings.sort_by(|a, b| a.id.cmp(&b.id));
        for w in gluings.windows(2) {
            if w[0].id == w[1].id {
                return Err(BuildError::DuplicateGluing(w[0].id.clone()));
            }
        }
        let atlas = StripedAtlas { strips, gluings };
        for gluing in &atlas.gluings {
            for end in [&gluing.x, &gluing.y] {
                let strip = atlas.strip(&end.strip).ok_or_else(|| BuildError::UnknownStrip {
                    gluing: gluing.id.clone(),
                    strip: end.strip.clone(),
                })?;
                let spec = strip.side(end.side);
                match &end.which {
                    WhichInterval::Explicit(i) => {
                        if *i >= spec.intervals.len() {
                            return Err(BuildError::ExplicitIndexOutOfRange {
                                gluing: gluing.id.clone(),
                                strip: end.strip.clone(),
                                side: end.side,
                                index: *i,
                                len: spec.intervals.len(),
                            });
                        }
                    }
                    WhichInterval::Member { family, uses_n, .. } => {
                        if *uses_n && gluing.family.is_none() {
                            return Err(BuildError::NIndexOutsideFamily { gluing: gluing.id.clone() });
                        }
                        if spec.family(family).is_none() {
                            return Err(BuildError::UnknownFamily {
                                gluing: gluing.id.clone(),
                                strip: end.strip.clone(),
                                side: end.side,
                                family: family.clone(),
                            });
                        }
                    }
                }
            }
        }
        Ok(atlas)
    }

    pub fn strips(&self) -> &[ModelStrip] {
        &self.strips
    }

    pub fn gluings(&self) -> &[Gluing] {
        &self.gluings
    }

    pub fn strip(&self, id: &str) -> Option<&ModelStrip> {
        self.strips.iter().find(|s| s.id == id)
    }

    /// All family-block ids mentioned anywhere, sorted.
    pub fn family_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = Vec::new();
        for strip in &self.strips {
            for side in [Side::Top, Side::Bottom] {
                for fam in &strip.side(side).families {
                    ids.push(fam.family.clone());
                }
            }
        }
        for gluing in &self.gluings {
            if let Some(f) = &gluing.family {
                ids.push(f.clone());
            }
        }
        ids.sort();
        ids.dedup();
        ids
    }
}

/// Identifier of one instantiated gluing: the declared id plus the family
/// index for members of gluing families.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SeamId {
    pub base: String,
    pub index: Option<i64>,
}

impl SeamId {
    pub fn plain(base: &str) -> Self {
        SeamId { base: base.to_string(), index: None }
    }

    pub fn member(base: &str, n: i64) -> Self {
        SeamId { base: base.to_string(), index: Some(n) }
    }
}

impl fmt::Display for SeamId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index {
            None => write!(f, "{}", self.base),
            Some(n) => write!(f, "{}[{}]", self.base, n),
        }
    }
}

/// Where a resolved interval came from: an explicit list position or a
/// family member.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Provenance {
    Explicit(usize),
    Member { family: String, index: i64 },
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Explicit(i) => write!(f, "[{}]", i),
            Provenance::Member { family, index } => write!(f, "[{}:{}]", family, index),
        }
    }
}

/// An interval of the expanded atlas together with its provenance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResolvedInterval {
    pub provenance: Provenance,
    pub interval: Interval,
}

/// A strip of the expanded atlas: every boundary interval is concrete.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExpandedStrip {
    pub id: String,
    pub top: Vec<ResolvedInterval>,
    pub bottom: Vec<ResolvedInterval>,
}

impl ExpandedStrip {
    pub fn side(&self, side: Side) -> &[ResolvedInterval] {
        match side {
            Side::Top => &self.top,
            Side::Bottom => &self.bottom,
        }
    }
}

/// A fully resolved gluing end.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResolvedRef {
    pub strip: String,
    pub side: Side,
    pub provenance: Provenance,
}

impl fmt::Display for ResolvedRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}{}", self.strip, self.side, self.provenance)
    }
}

/// A gluing of the expanded atlas.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResolvedGluing {
    pub id: SeamId,
    pub x: ResolvedRef,
    pub y: ResolvedRef,
    pub reversed: bool,
}

/// Why a gluing member was not instantiated: exactly one of its ends
/// resolved to a family index outside the window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DroppedGluing {
    pub id: SeamId,
    /// `true` if the x end was the missing one, `false` for the y end.
    pub missing_x: bool,
}

/// A striped atlas with all families instantiated over a finite window:
/// family members exist for `n ∈ {-W, …, W-1}` (so `2W` members, none at
/// `W = 0`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExpandedAtlas {
    pub source: StripedAtlas,
    pub window: u32,
    pub strips: Vec<ExpandedStrip>,
    pub gluings: Vec<ResolvedGluing>,
    pub dropped: Vec<DroppedGluing>,
}

/// The window index range: `-W ..= W-1`.
pub fn window_range(window: u32) -> std::ops::Range<i64> {
    -(window as i64)..(window as i64)
}

/// Instantiate every interval family and gluing family of `atlas` over the
/// window. Gluing members whose two ends do not both resolve inside the
/// window are dropped; members missing exactly one end are reported in
/// `dropped`.
pub fn expand(atlas: &StripedAtlas, window: u32) -> ExpandedAtlas {
    let range = window_range(window);
    let resolve_side = |spec: &SideSpec| -> Vec<ResolvedInterval> {
        let mut out = Vec::new();
        for (i, iv) in spec.intervals.iter().enumerate() {
            out.push(ResolvedInterval { provenance: Provenance::Explicit(i), interval: iv.clone() });
        }
        for fam in &spec.families {
            for n in range.clone() {
                out.push(ResolvedInterval {
                    provenance: Provenance::Member { family: fam.family.clone(), index: n },
                    interval: fam.form.member(n),
                });
            }
        }
        out
    };
    let strips: Vec<ExpandedStrip> = atlas
        .strips()
        .iter()
        .map(|s| ExpandedStrip { id: s.id.clone(), top: resolve_side(&s.top), bottom: resolve_side(&s.bottom) })
        .collect();

    // Resolve one gluing end at running index `n` (ignored for non-family
    // gluings). `None` means the referenced family member is outside the
    // window.
    let resolve_end = |end: &BoundaryRef, n: i64| -> Option<ResolvedRef> {
        let provenance = match &end.which {
            WhichInterval::Explicit(i) => Provenance::Explicit(*i),
            WhichInterval::Member { family, offset, uses_n } => {
                let index = if *uses_n { n + offset } else { *offset };
                if !range.contains(&index) {
                    return None;
                }
                Provenance::Member { family: family.clone(), index }
            }
        };
        Some(ResolvedRef { strip: end.strip.clone(), side: end.side, provenance })
    };

    let mut gluings = Vec::new();
    let mut dropped = Vec::new();
    for gluing in atlas.gluings() {
        let instances: Vec<(SeamId, i64)> = match &gluing.family {
            None => vec![(SeamId::plain(&gluing.id), 0)],
            Some(_) => range.clone().map(|n| (SeamId::member(&gluing.id, n), n)).collect(),
        };
        for (id, n) in instances {
            match (resolve_end(&gluing.x, n), resolve_end(&gluing.y, n)) {
                (Some(x), Some(y)) => {
                    gluings.push(ResolvedGluing { id, x, y, reversed: gluing.reversed });
                }
                (None, Some(_)) => dropped.push(DroppedGluing { id, missing_x: true }),
                (Some(_), None) => dropped.push(DroppedGluing { id, missing_x: false }),
                (None, None) => {}
            }
        }
    }
    gluings.sort_by(|a, b| a.id.cmp(&b.id));
    dropped.sort_by(|a, b| a.id.cmp(&b.id));

    ExpandedAtlas { source: atlas.clone(), window, strips, gluings, dropped }
}

impl ExpandedAtlas {
    pub fn strip(&self, id: &str) -> Option<&ExpandedStrip> {
        self.strips.iter().find(|s| s.id == id)
    }

    /// The concrete interval a resolved reference points at.
    pub fn interval(&self, r: &ResolvedRef) -> Option<&Interval> {
        self.strip(&r.strip)?
            .side(r.side)
            .iter()
            .find(|ri| ri.provenance == r.provenance)
            .map(|ri| &ri.interval)
    }

    pub fn gluing(&self, id: &SeamId) -> Option<&ResolvedGluing> {
        self.gluings.iter().find(|g| &g.id == id)
    }

    /// Strip ids (sorted, as stored).
    pub fn strip_ids(&self) -> Vec<String> {
        self.strips.iter().map(|s| s.id.clone()).collect()
    }
}

/// One geometric defect found by validation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Violation {
    /// An instantiated interval is empty (`lo >= hi`).
    EmptyInterval { strip: String, side: Side, which: String },
    /// Two intervals on the same side intersect.
    OverlapWithinSide { strip: String, side: Side, first: String, second: String },
    /// An affine family fails the symbolic all-`n` disjointness test.
    AffineFamilyInvalid { strip: String, side: Side, family: String, reason: String },
    /// A geometric family's ratio is not in `0 < |r| < 1`.
    GeometricRatioInvalid { strip: String, side: Side, family: String, ratio: String },
    /// An interval is used by more than one gluing end.
    RoleReuse { reference: String, gluings: Vec<String> },
    /// A gluing end does not resolve to an interval of the expansion.
    DanglingEnd { gluing: String, end: String },
    /// No affine bijection of the requested orientation exists between the
    /// two interval shapes.
    ShapeMismatch { gluing: String, x: String, y: String, reversed: bool },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyInterval { strip, side, which } => {
                write!(f, "{}.{}{}: interval is empty", strip, side, which)
            }
            Violation::OverlapWithinSide { strip, side, first, second } => {
                write!(f, "{}.{}: intervals {} and {} overlap", strip, side, first, second)
            }
            Violation::AffineFamilyInvalid { strip, side, family, reason } => {
                write!(f, "{}.{}: affine family `{}` invalid: {}", strip, side, family, reason)
            }
            Violation::GeometricRatioInvalid { strip, side, family, ratio } => {
                write!(f, "{}.{}: geometric family `{}` has ratio {} outside 0 < |r| < 1", strip, side, family, ratio)
            }
            Violation::RoleReuse { reference, gluings } => {
                write!(f, "interval {} is used by more than one gluing end: {}", reference, gluings.join(", "))
            }
            Violation::DanglingEnd { gluing, end } => {
                write!(f, "gluing {}: end {} does not resolve to an interval", gluing, end)
            }
            Violation::ShapeMismatch { gluing, x, y, reversed } => {
                let orientation = if *reversed { "orientation-reversing" } else { "orientation-respecting" };
                write!(f, "gluing {}: no {} affine bijection from {} onto {}", gluing, orientation, y, x)
            }
        }
    }
}

/// The outcome of validating an expanded atlas.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub window: u32,
    pub violations: Vec<Violation>,
    /// Gluing members skipped because one end fell outside the window.
    pub dropped: Vec<DroppedGluing>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Errors raised by operations that require specific geometric situations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AtlasError {
    #[error("atlas is invalid: {0} violation(s); validate for details")]
    InvalidAtlas(usize),
    #[error("point {point} is not interior to interval {interval}")]
    OutOfInterval { point: String, interval: String },
    #[error("no gluing named `{0}` in the expansion")]
    UnknownGluing(String),
}

/// Check every geometric requirement on an expanded atlas: instantiated
/// intervals nonempty and pairwise disjoint per side, affine families valid
/// for *all* `n` (symbolically), geometric ratios in range, every interval
/// used by at most one gluing end, and every gluing's interval pair
/// admitting an affine bijection of the declared orientation.
pub fn validate(expanded: &ExpandedAtlas) -> ValidationReport {
    let mut violations = Vec::new();

    for strip in &expanded.strips {
        for side in [Side::Top, Side::Bottom] {
            let resolved = strip.side(side);
            for ri in resolved {
                if ri.interval.is_empty() {
                    violations.push(Violation::EmptyInterval {
                        strip: strip.id.clone(),
                        side,
                        which: ri.provenance.to_string(),
                    });
                }
            }
            for i in 0..resolved.len() {
                for j in (i + 1)..resolved.len() {
                    if resolved[i].interval.overlaps(&resolved[j].interval) {
                        violations.push(Violation::OverlapWithinSide {
                            strip: strip.id.clone(),
                            side,
                            first: resolved[i].provenance.to_string(),
                            second: resolved[j].provenance.to_string(),
                        });
                    }
                }
            }
        }
    }

    // Symbolic family checks on the source description.
    for strip in expanded.source.strips() {
        for side in [Side::Top, Side::Bottom] {
            for fam in &strip.side(side).families {
                match &fam.form {
                    FamilyForm::Affine { lo, hi } => {
                        // Members are (a₀+sn, b₀+sn); for every pair to be
                        // nonempty and disjoint for all n ∈ ℤ we need equal
                        // slopes s ≠ 0, a₀ < b₀, and b₀ - a₀ ≤ |s|.
                        let reason = if lo.coeff != hi.coeff {
                            Some("endpoint slopes differ, so members change length and collide".to_string())
                        } else if lo.coeff.is_zero() {
                            Some("zero slope, so all members coincide".to_string())
                        } else if lo.base >= hi.base {
                            Some("members are empty".to_string())
                        } else if &hi.base - &lo.base > lo.coeff.abs() {
                            Some(format!(
                                "member length {} exceeds step {}",
                                fmt_rat(&(&hi.base - &lo.base)),
                                fmt_rat(&lo.coeff.abs())
                            ))
                        } else {
                            None
                        };
                        if let Some(reason) = reason {
                            violations.push(Violation::AffineFamilyInvalid {
                                strip: strip.id.clone(),
                                side,
                                family: fam.family.clone(),
                                reason,
                            });
                        }
                    }
                    FamilyForm::Geometric { ratio, .. } => {
                        if ratio.is_zero() || ratio.abs() >= rat_int(1) {
                            violations.push(Violation::GeometricRatioInvalid {
                                strip: strip.id.clone(),
                                side,
                                family: fam.family.clone(),
                                ratio: fmt_rat(ratio),
                            });
                        }
                    }
                }
            }
        }
    }

    // Role disjointness: each resolved interval carries at most one gluing
    // end across the whole atlas.
    let mut users: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for gluing in &expanded.gluings {
        for end in [&gluing.x, &gluing.y] {
            users.entry(end.to_string()).or_default().push(gluing.id.to_string());
        }
    }
    for (reference, mut gluings) in users {
        if gluings.len() > 1 {
            gluings.sort();
            violations.push(Violation::RoleReuse { reference, gluings });
        }
    }

    // Resolvability and shape compatibility of every instantiated gluing.
    for gluing in &expanded.gluings {
        let x = expanded.interval(&gluing.x);
        let y = expanded.interval(&gluing.y);
        match (x, y) {
            (Some(x), Some(y)) => {
                if !x.is_empty() && !y.is_empty() && affine_between(y, x, gluing.reversed).is_none() {
                    violations.push(Violation::ShapeMismatch {
                        gluing: gluing.id.to_string(),
                        x: x.to_string(),
                        y: y.to_string(),
                        reversed: gluing.reversed,
                    });
                }
            }
            _ => {
                let end = if x.is_none() { &gluing.x } else { &gluing.y };
                violations.push(Violation::DanglingEnd {
                    gluing: gluing.id.to_string(),
                    end: end.to_string(),
                });
            }
        }
    }

    violations.sort_by_key(|v| format!("{:?}", v));
    ValidationReport { window: expanded.window, violations, dropped: expanded.dropped.clone() }
}

/// The affine map `x = slope · y + offset`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AffineMap {
    #[serde(serialize_with = "crate::rat::serialize_rat")]
    pub slope: Rat,
    #[serde(serialize_with = "crate::rat::serialize_rat")]
    pub offset: Rat,
}

impl AffineMap {
    pub fn apply(&self, y: &Rat) -> Rat {
        &self.slope * y + &self.offset
    }

    pub fn invert(&self) -> AffineMap {
        // y = (x - offset) / slope
        let inv = self.slope.recip();
        AffineMap { slope: inv.clone(), offset: -(&self.offset * inv) }
    }
}

impl fmt::Display for AffineMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "y ↦ {}·y + {}", fmt_rat(&self.slope), fmt_rat(&self.offset))
    }
}

/// The unique affine bijection from `y` onto `x` of the requested
/// orientation, or `None` when the interval shapes do not admit one
/// (for example a finite interval against a half-line, or an
/// orientation-respecting map between half-lines of opposite direction).
pub fn affine_between(y: &Interval, x: &Interval, reversed: bool) -> Option<AffineMap> {
    use ExtRat::*;
    match (&y.lo, &y.hi, &x.lo, &x.hi) {
        (Fin(a), Fin(b), Fin(c), Fin(d)) => {
            if a >= b || c >= d {
                return None;
            }
            let stretch = (d - c) / (b - a);
            if reversed {
                let slope = -stretch;
                let offset = d - &slope * a;
                Some(AffineMap { slope, offset })
            } else {
                let offset = c - &stretch * a;
                Some(AffineMap { slope: stretch, offset })
            }
        }
        (Fin(a), PosInf, Fin(c), PosInf) if !reversed => {
            Some(AffineMap { slope: rat_int(1), offset: c - a })
        }
        (Fin(a), PosInf, NegInf, Fin(d)) if reversed => {
            Some(AffineMap { slope: rat_int(-1), offset: d + a })
        }
        (NegInf, Fin(b), NegInf, Fin(d)) if !reversed => {
            Some(AffineMap { slope: rat_int(1), offset: d - b })
        }
        (NegInf, Fin(b), Fin(c), PosInf) if reversed => {
            Some(AffineMap { slope: rat_int(-1), offset: b + c })
        }
        (NegInf, PosInf, NegInf, PosInf) => {
            let slope = rat_int(if reversed { -1 } else { 1 });
            Some(AffineMap { slope, offset: Rat::zero() })
        }
        _ => None,
    }
}

/// One seam of a valid expanded atlas: the identified pair of boundary
/// intervals together with the concrete gluing map `γ : Y → X`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Seam {
    pub id: SeamId,
    pub x: ResolvedRef,
    pub y: ResolvedRef,
    pub x_interval: Interval,
    pub y_interval: Interval,
    pub reversed: bool,
    /// `γ : Y → X`, as an affine map.
    pub gamma: AffineMap,
}

impl Seam {
    /// The strip carrying the X end (`χ(-1)` in the gluing-graph sense).
    pub fn strip_x(&self) -> &str {
        &self.x.strip
    }

    /// The strip carrying the Y end (`χ(+1)`).
    pub fn strip_y(&self) -> &str {
        &self.y.strip
    }

    /// Evaluate `γ` at an interior point of Y.
    pub fn gamma_at(&self, y: &Rat) -> Result<Rat, AtlasError> {
        if !self.y_interval.contains(y) {
            return Err(AtlasError::OutOfInterval {
                point: fmt_rat(y),
                interval: self.y_interval.to_string(),
            });
        }
        Ok(self.gamma.apply(y))
    }

    /// Evaluate `γ⁻¹` at an interior point of X.
    pub fn gamma_inv_at(&self, x: &Rat) -> Result<Rat, AtlasError> {
        if !self.x_interval.contains(x) {
            return Err(AtlasError::OutOfInterval {
                point: fmt_rat(x),
                interval: self.x_interval.to_string(),
            });
        }
        Ok(self.gamma.invert().apply(x))
    }
}

/// The seams of a valid expanded atlas, sorted by id. Fails if validation
/// reports any violation.
pub fn seams(expanded: &ExpandedAtlas) -> Result<Vec<Seam>, AtlasError> {
    let report = validate(expanded);
    if !report.is_valid() {
        return Err(AtlasError::InvalidAtlas(report.violations.len()));
    }
    let mut out = Vec::new();
    for gluing in &expanded.gluings {
        let x_interval = expanded.interval(&gluing.x).expect("validated").clone();
        let y_interval = expanded.interval(&gluing.y).expect("validated").clone();
        let gamma = affine_between(&y_interval, &x_interval, gluing.reversed).expect("validated");
        out.push(Seam {
            id: gluing.id.clone(),
            x: gluing.x.clone(),
            y: gluing.y.clone(),
            x_interval,
            y_interval,
            reversed: gluing.reversed,
            gamma,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn strip_with(id: &str, top: Vec<Interval>, bottom: Vec<Interval>) -> ModelStrip {
        ModelStrip {
            id: id.to_string(),
            top: SideSpec { intervals: top, families: vec![] },
            bottom: SideSpec { intervals: bottom, families: vec![] },
        }
    }

    fn unit(a: i64, b: i64) -> Interval {
        Interval::finite(rat_int(a), rat_int(b))
    }

    /// Two strips, one gluing `X = A.top[0] = (0,1)`, `Y = B.bottom[0] = (2,3)`.
    fn two_strip_atlas(reversed: bool) -> StripedAtlas {
        StripedAtlas::new(
            vec![strip_with("A", vec![unit(0, 1)], vec![]), strip_with("B", vec![], vec![unit(2, 3)])],
            vec![Gluing {
                id: "g".into(),
                x: BoundaryRef::explicit("A", Side::Top, 0),
                y: BoundaryRef::explicit("B", Side::Bottom, 0),
                reversed,
                family: None,
            }],
        )
        .unwrap()
    }

    #[test]
    fn gamma_finite_orientations() {
        // Oracle: γ maps (2,3) onto (0,1); forward sends 2→0, reversed 2→1.
        for (reversed, image) in [(false, rat(1, 4)), (true, rat(3, 4))] {
            let expanded = expand(&two_strip_atlas(reversed), 3);
            let seams = seams(&expanded).unwrap();
            assert_eq!(seams.len(), 1);
            assert_eq!(seams[0].gamma_at(&rat(9, 4)).unwrap(), image);
        }
    }

    #[test]
    fn gamma_rejects_boundary_and_exterior_points() {
        let expanded = expand(&two_strip_atlas(false), 1);
        let seam = &seams(&expanded).unwrap()[0];
        assert!(seam.gamma_at(&rat_int(2)).is_err());
        assert!(seam.gamma_at(&rat_int(5)).is_err());
        assert_eq!(seam.gamma_inv_at(&rat(1, 4)).unwrap(), rat(9, 4));
    }

    #[test]
    fn gamma_half_infinite_shapes() {
        let y = Interval::new(ExtRat::Fin(rat_int(0)), ExtRat::PosInf);
        let x_same = Interval::new(ExtRat::Fin(rat_int(5)), ExtRat::PosInf);
        let x_flip = Interval::new(ExtRat::NegInf, ExtRat::Fin(rat_int(1)));
        let m = affine_between(&y, &x_same, false).unwrap();
        assert_eq!(m.apply(&rat_int(2)), rat_int(7));
        assert!(affine_between(&y, &x_same, true).is_none());
        let m = affine_between(&y, &x_flip, true).unwrap();
        assert_eq!(m.apply(&rat_int(2)), rat_int(-1));
        assert!(affine_between(&y, &x_flip, false).is_none());
        // Finite against half-infinite never works.
        assert!(affine_between(&unit(0, 1), &x_same, false).is_none());
        assert!(affine_between(&unit(0, 1), &x_same, true).is_none());
    }

    #[test]
    fn full_line_gluings() {
        let line = Interval::new(ExtRat::NegInf, ExtRat::PosInf);
        let forward = affine_between(&line, &line, false).unwrap();
        assert_eq!(forward.apply(&rat(7, 3)), rat(7, 3));
        let backward = affine_between(&line, &line, true).unwrap();
        assert_eq!(backward.apply(&rat(7, 3)), rat(-7, 3));
    }

    #[test]
    fn anchors_follow_the_midpoint_rule() {
        assert_eq!(unit(0, 1).anchor().unwrap(), rat(1, 2));
        assert_eq!(Interval::new(ExtRat::Fin(rat_int(3)), ExtRat::PosInf).anchor().unwrap(), rat_int(4));
        assert_eq!(Interval::new(ExtRat::NegInf, ExtRat::Fin(rat_int(3))).anchor().unwrap(), rat_int(2));
        assert_eq!(Interval::new(ExtRat::NegInf, ExtRat::PosInf).anchor().unwrap(), rat_int(0));
        assert!(unit(1, 1).anchor().is_none());
    }

    fn ladder() -> StripedAtlas {
        // Two strips; top of S0 glued to bottom of S1 along the unit
        // intervals (n, n+1) for every n.
        let fam = |_: &str| IntervalFamily {
            family: "F".into(),
            form: FamilyForm::Affine {
                lo: EndpointForm::new(rat_int(0), rat_int(1)),
                hi: EndpointForm::new(rat_int(1), rat_int(1)),
            },
        };
        let mut s0 = ModelStrip::bare("S0");
        s0.top.families.push(fam("S0"));
        let mut s1 = ModelStrip::bare("S1");
        s1.bottom.families.push(fam("S1"));
        StripedAtlas::new(
            vec![s0, s1],
            vec![Gluing {
                id: "s".into(),
                x: BoundaryRef::indexed("S0", Side::Top, "F", 0),
                y: BoundaryRef::indexed("S1", Side::Bottom, "F", 0),
                reversed: false,
                family: Some("F".into()),
            }],
        )
        .unwrap()
    }

    #[test]
    fn ladder_expansion_counts() {
        // Window W instantiates members n ∈ {-W..W-1}: 2W intervals per
        // side and 2W gluings; W = 0 gives an edgeless atlas.
        for (window, members) in [(0u32, 0usize), (1, 2), (2, 4), (5, 10)] {
            let expanded = expand(&ladder(), window);
            assert_eq!(expanded.strips[0].top.len(), members);
            assert_eq!(expanded.strips[1].bottom.len(), members);
            assert_eq!(expanded.gluings.len(), members);
            assert!(expanded.dropped.is_empty());
            assert!(validate(&expanded).is_valid());
        }
    }

    #[test]
    fn ladder_member_intervals_are_exact() {
        let expanded = expand(&ladder(), 2);
        let intervals: Vec<Interval> = expanded.strips[0].top.iter().map(|ri| ri.interval.clone()).collect();
        assert_eq!(intervals, vec![unit(-2, -1), unit(-1, 0), unit(0, 1), unit(1, 2)]);
    }

    #[test]
    fn shifted_family_gluing_drops_boundary_members() {
        // Gluing members reference S1.bottom at n+1: the member at
        // n = W-1 has its y end outside the window and is dropped.
        let mut atlas = ladder();
        let shifted = Gluing {
            id: "s".into(),
            x: BoundaryRef::indexed("S0", Side::Top, "F", 0),
            y: BoundaryRef::indexed("S1", Side::Bottom, "F", 1),
            reversed: false,
            family: Some("F".into()),
        };
        atlas = StripedAtlas::new(atlas.strips().to_vec(), vec![shifted]).unwrap();
        let expanded = expand(&atlas, 2);
        assert_eq!(expanded.gluings.len(), 3);
        assert_eq!(expanded.dropped.len(), 1);
        assert_eq!(expanded.dropped[0].id, SeamId::member("s", 1));
        assert!(!expanded.dropped[0].missing_x);
    }

    #[test]
    fn geometric_members_are_exact() {
        let form = FamilyForm::Geometric {
            lo: EndpointForm::new(rat_int(0), rat(1, 2)),
            hi: EndpointForm::new(rat_int(0), rat_int(1)),
            ratio: rat(1, 2),
        };
        assert_eq!(form.member(0), Interval::finite(rat(1, 2), rat_int(1)));
        assert_eq!(form.member(2), Interval::finite(rat(1, 8), rat(1, 4)));
        assert_eq!(form.member(-1), Interval::finite(rat_int(1), rat_int(2)));
    }

    #[test]
    fn validation_catches_overlap_but_allows_touching() {
        let touching = strip_with("A", vec![unit(0, 1), unit(1, 2)], vec![]);
        let atlas = StripedAtlas::new(vec![touching], vec![]).unwrap();
        assert!(validate(&expand(&atlas, 1)).is_valid());

        let overlapping = strip_with("A", vec![unit(0, 2), unit(1, 3)], vec![]);
        let atlas = StripedAtlas::new(vec![overlapping], vec![]).unwrap();
        let report = validate(&expand(&atlas, 1));
        assert_eq!(report.violations.len(), 1);
        assert!(matches!(report.violations[0], Violation::OverlapWithinSide { .. }));
    }

    #[test]
    fn validation_catches_role_reuse_and_shape_mismatch() {
        let a = strip_with("A", vec![unit(0, 1)], vec![unit(0, 1), unit(2, 3)]);
        let mk = |id: &str, y_index: usize| Gluing {
            id: id.into(),
            x: BoundaryRef::explicit("A", Side::Top, 0),
            y: BoundaryRef::explicit("A", Side::Bottom, y_index),
            reversed: false,
            family: None,
        };
        let atlas = StripedAtlas::new(vec![a.clone()], vec![mk("g0", 0), mk("g1", 1)]).unwrap();
        let report = validate(&expand(&atlas, 1));
        assert_eq!(report.violations.len(), 1);
        assert!(matches!(&report.violations[0], Violation::RoleReuse { gluings, .. } if gluings == &vec!["g0".to_string(), "g1".to_string()]));

        let b = strip_with("B", vec![unit(0, 1)], vec![]);
        let half = ModelStrip {
            id: "C".into(),
            top: SideSpec::default(),
            bottom: SideSpec {
                intervals: vec![Interval::new(ExtRat::Fin(rat_int(0)), ExtRat::PosInf)],
                families: vec![],
            },
        };
        let atlas = StripedAtlas::new(
            vec![b, half],
            vec![Gluing {
                id: "g".into(),
                x: BoundaryRef::explicit("B", Side::Top, 0),
                y: BoundaryRef::explicit("C", Side::Bottom, 0),
                reversed: false,
                family: None,
            }],
        )
        .unwrap();
        let report = validate(&expand(&atlas, 1));
        assert!(report.violations.iter().any(|v| matches!(v, Violation::ShapeMismatch { .. })));
    }

    #[test]
    fn validation_checks_affine_families_symbolically() {
        let bad = |lo: EndpointForm, hi: EndpointForm| {
            let mut s = ModelStrip::bare("A");
            s.top.families.push(IntervalFamily { family: "F".into(), form: FamilyForm::Affine { lo, hi } });
            StripedAtlas::new(vec![s], vec![]).unwrap()
        };
        // Zero slope: members coincide.
        let atlas = bad(EndpointForm::constant(rat_int(0)), EndpointForm::constant(rat_int(1)));
        assert!(!validate(&expand(&atlas, 1)).is_valid());
        // Length 2 with step 1: consecutive members overlap for every n,
        // caught without instantiating them.
        let atlas = bad(EndpointForm::new(rat_int(0), rat_int(1)), EndpointForm::new(rat_int(2), rat_int(1)));
        let report = validate(&expand(&atlas, 0));
        assert!(report.violations.iter().any(|v| matches!(v, Violation::AffineFamilyInvalid { .. })));
        // Step exactly the length: touching members, fine.
        let atlas = bad(EndpointForm::new(rat_int(0), rat_int(1)), EndpointForm::new(rat_int(1), rat_int(1)));
        assert!(validate(&expand(&atlas, 4)).is_valid());
    }

    #[test]
    fn validation_checks_geometric_ratio() {
        let mut s = ModelStrip::bare("A");
        s.top.families.push(IntervalFamily {
            family: "F".into(),
            form: FamilyForm::Geometric {
                lo: EndpointForm::new(rat_int(0), rat_int(1)),
                hi: EndpointForm::new(rat_int(0), rat_int(2)),
                ratio: rat_int(2),
            },
        });
        let atlas = StripedAtlas::new(vec![s], vec![]).unwrap();
        let report = validate(&expand(&atlas, 1));
        assert!(report.violations.iter().any(|v| matches!(v, Violation::GeometricRatioInvalid { .. })));
    }

    #[test]
    fn construction_rejects_structural_defects() {
        let a = strip_with("A", vec![unit(0, 1)], vec![]);
        let dup = StripedAtlas::new(vec![a.clone(), a.clone()], vec![]);
        assert!(matches!(dup, Err(BuildError::DuplicateStrip(_))));

        let out_of_range = StripedAtlas::new(
            vec![a.clone()],
            vec![Gluing {
                id: "g".into(),
                x: BoundaryRef::explicit("A", Side::Top, 1),
                y: BoundaryRef::explicit("A", Side::Top, 0),
                reversed: false,
                family: None,
            }],
        );
        assert!(matches!(out_of_range, Err(BuildError::ExplicitIndexOutOfRange { .. })));

        let n_outside = StripedAtlas::new(
            vec![a],
            vec![Gluing {
                id: "g".into(),
                x: BoundaryRef::indexed("A", Side::Top, "F", 0),
                y: BoundaryRef::explicit("A", Side::Top, 0),
                reversed: false,
                family: None,
            }],
        );
        assert!(matches!(n_outside, Err(BuildError::NIndexOutsideFamily { .. })));
    }

    #[test]
    fn self_gluing_of_one_interval_is_role_reuse() {
        let a = strip_with("A", vec![unit(0, 1)], vec![]);
        let atlas = StripedAtlas::new(
            vec![a],
            vec![Gluing {
                id: "g".into(),
                x: BoundaryRef::explicit("A", Side::Top, 0),
                y: BoundaryRef::explicit("A", Side::Top, 0),
                reversed: false,
                family: None,
            }],
        )
        .unwrap();
        let report = validate(&expand(&atlas, 1));
        assert!(report.violations.iter().any(|v| matches!(v, Violation::RoleReuse { .. })));
    }
}
