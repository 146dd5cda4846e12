//! The canonical foliation of a striped surface: leaves, saturation, the
//! regular/singular classification, and the local-finiteness certificate.
//!
//! Interior leaves are the horizontal lines `ℝ × {t}` of one strip at levels
//! `t ∈ (-1, 1)`; boundary leaves are the images of the boundary intervals.
//! A boundary leaf is singular when it is a seam or when its side carries
//! other boundary intervals; interior leaves are always regular, and a sole
//! unglued interval on its side is regular too.
//!
//! The singular-leaf family of a striped surface is locally finite, and
//! [`singular_report`] certifies that executably: interval endpoints of an
//! affine family diverge, so they have no finite accumulation point, while
//! those of a geometric family accumulate exactly at the endpoint bases.
//! The certificate fails precisely when such an accumulation point lies
//! inside a boundary interval of the same side — the configuration that can
//! never arise from a model strip, which is why the report deliberately
//! runs on invalid descriptions as well and exhibits the exact offending
//! point.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::atlas::{ExpandedAtlas, FamilyForm, Provenance, Side};
use crate::rat::{fmt_rat, rat_int, Rat};

/// One leaf of the canonical foliation. Boundary leaves are named by the
/// resolved interval they come from; a glued pair is one leaf, canonically
/// represented by its X-side interval.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Leaf {
    Interior {
        strip: String,
        #[serde(serialize_with = "crate::rat::serialize_rat")]
        level: Rat,
    },
    Boundary {
        strip: String,
        side: Side,
        provenance: Provenance,
    },
}

impl Leaf {
    pub fn interior(strip: &str, level: Rat) -> Self {
        Leaf::Interior { strip: strip.to_string(), level }
    }

    pub fn boundary(strip: &str, side: Side, provenance: Provenance) -> Self {
        Leaf::Boundary { strip: strip.to_string(), side, provenance }
    }
}

impl fmt::Display for Leaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Leaf::Interior { strip, level } => write!(f, "{} × {{{}}}", strip, fmt_rat(level)),
            Leaf::Boundary { strip, side, provenance } => write!(f, "{}.{}{}", strip, side, provenance),
        }
    }
}

/// Why a leaf is singular. Both reasons can hold at once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum SingularReason {
    IsSeam,
    SharesSide,
}

/// The classification of one leaf.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum LeafClass {
    Regular,
    Singular { reasons: Vec<SingularReason> },
}

impl LeafClass {
    pub fn is_singular(&self) -> bool {
        matches!(self, LeafClass::Singular { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FoliationError {
    #[error("level set {0} is not contained in the open interval (-1, 1)")]
    BadLevel(String),
    #[error("unknown leaf: {0}")]
    UnknownLeaf(String),
}

/// One range of levels, with independently open or closed ends.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelRange {
    #[serde(serialize_with = "crate::rat::serialize_rat")]
    pub lo: Rat,
    #[serde(serialize_with = "crate::rat::serialize_rat")]
    pub hi: Rat,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl LevelRange {
    pub fn open(lo: Rat, hi: Rat) -> Self {
        LevelRange { lo, hi, lo_closed: false, hi_closed: false }
    }

    pub fn point(at: Rat) -> Self {
        LevelRange { lo: at.clone(), hi: at, lo_closed: true, hi_closed: true }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }

    pub fn contains(&self, t: &Rat) -> bool {
        let above = if self.lo_closed { t >= &self.lo } else { t > &self.lo };
        let below = if self.hi_closed { t <= &self.hi } else { t < &self.hi };
        above && below
    }
}

impl fmt::Display for LevelRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            fmt_rat(&self.lo),
            fmt_rat(&self.hi),
            if self.hi_closed { ']' } else { ')' },
        )
    }
}

/// A saturated union of interior leaves of one strip: the set of all leaves
/// at levels in `ranges`, normalized (sorted, merged, empties dropped).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SaturatedSet {
    pub strip: String,
    pub ranges: Vec<LevelRange>,
}

impl SaturatedSet {
    /// Whether the interior leaf at `level` belongs to the set.
    pub fn contains_level(&self, level: &Rat) -> bool {
        self.ranges.iter().any(|r| r.contains(level))
    }

    pub fn contains(&self, leaf: &Leaf) -> bool {
        match leaf {
            Leaf::Interior { strip, level } => strip == &self.strip && self.contains_level(level),
            Leaf::Boundary { .. } => false,
        }
    }
}

/// The union of all leaves meeting the given level set of one strip. Since
/// interior leaves are exactly the level lines, this is the level set
/// itself, normalized; saturating the result again is the identity.
pub fn saturate(strip: &str, ranges: &[LevelRange]) -> Result<SaturatedSet, FoliationError> {
    let one = rat_int(1);
    let minus_one = rat_int(-1);
    for range in ranges {
        if range.is_empty() {
            continue;
        }
        let low_ok = range.lo > minus_one || (range.lo == minus_one && !range.lo_closed);
        let high_ok = range.hi < one || (range.hi == one && !range.hi_closed);
        if !low_ok || !high_ok {
            return Err(FoliationError::BadLevel(range.to_string()));
        }
    }
    let mut sorted: Vec<LevelRange> = ranges.iter().filter(|r| !r.is_empty()).cloned().collect();
    sorted.sort_by(|a, b| (&a.lo, !a.lo_closed, &a.hi, a.hi_closed).cmp(&(&b.lo, !b.lo_closed, &b.hi, b.hi_closed)));
    let mut merged: Vec<LevelRange> = Vec::new();
    for range in sorted {
        match merged.last_mut() {
            Some(last) if range.lo < last.hi || (range.lo == last.hi && (range.lo_closed || last.hi_closed)) => {
                if range.hi > last.hi || (range.hi == last.hi && range.hi_closed) {
                    last.hi = range.hi;
                    last.hi_closed = range.hi_closed;
                }
            }
            _ => merged.push(range),
        }
    }
    Ok(SaturatedSet { strip: strip.to_string(), ranges: merged })
}

/// Classify one leaf of the expanded atlas: interior leaves are regular;
/// a boundary leaf is singular when its interval is glued (a seam) or when
/// its side carries at least one other boundary interval.
pub fn classify_leaf(expanded: &ExpandedAtlas, leaf: &Leaf) -> Result<LeafClass, FoliationError> {
    match leaf {
        Leaf::Interior { strip, level } => {
            if expanded.strip(strip).is_none() {
                return Err(FoliationError::UnknownLeaf(leaf.to_string()));
            }
            if level <= &rat_int(-1) || level >= &rat_int(1) {
                return Err(FoliationError::UnknownLeaf(leaf.to_string()));
            }
            Ok(LeafClass::Regular)
        }
        Leaf::Boundary { strip, side, provenance } => {
            let Some(expanded_strip) = expanded.strip(strip) else {
                return Err(FoliationError::UnknownLeaf(leaf.to_string()));
            };
            let intervals = expanded_strip.side(*side);
            if !intervals.iter().any(|ri| &ri.provenance == provenance) {
                return Err(FoliationError::UnknownLeaf(leaf.to_string()));
            }
            let mut reasons = Vec::new();
            let glued = expanded.gluings.iter().any(|g| {
                [&g.x, &g.y].into_iter().any(|end| {
                    end.strip == *strip && end.side == *side && &end.provenance == provenance
                })
            });
            if glued {
                reasons.push(SingularReason::IsSeam);
            }
            if intervals.len() >= 2 {
                reasons.push(SingularReason::SharesSide);
            }
            if reasons.is_empty() {
                Ok(LeafClass::Regular)
            } else {
                Ok(LeafClass::Singular { reasons })
            }
        }
    }
}

/// One singular leaf of the report. Glued pairs appear once, under their
/// X-side interval, with the seam recorded.
#[derive(Debug, Clone, Serialize)]
pub struct SingularLeaf {
    pub leaf: Leaf,
    pub seam: Option<String>,
    pub reasons: Vec<SingularReason>,
}

/// A failed local-finiteness certificate: an accumulation point of a
/// geometric family's endpoints lies inside a boundary interval of the
/// same side.
#[derive(Debug, Clone, Serialize)]
pub struct AccumulationFailure {
    pub strip: String,
    pub side: Side,
    pub family: String,
    #[serde(serialize_with = "crate::rat::serialize_rat")]
    pub point: Rat,
    /// The interval the accumulation point lies in.
    pub container: String,
}

/// The singular leaves of the surface together with the local-finiteness
/// certificate.
#[derive(Debug, Clone, Serialize)]
pub struct SingularReport {
    pub window: u32,
    pub singular: Vec<SingularLeaf>,
    pub locally_finite: bool,
    /// `false` when a solver cap was reached, making the certificate
    /// inconclusive; never the case for families with moderate parameters.
    pub complete: bool,
    pub failures: Vec<AccumulationFailure>,
    pub notes: Vec<String>,
}

/// The integers `n` with `lo(n) < c < hi(n)` for an affine member pair,
/// capped. Returns the hits, whether the search was complete, and whether
/// the solution set is infinite.
fn affine_hits(lo: (&Rat, &Rat), hi: (&Rat, &Rat), c: &Rat, cap: usize) -> (Vec<BigInt>, bool, bool) {
    // lo.0 + lo.1·n < c  and  hi.0 + hi.1·n > c: each is a half-line or a
    // constant truth value in n.
    let mut lower: Option<Rat> = None; // n > lower
    let mut upper: Option<Rat> = None; // n < upper
    let mut tighten = |coeff: &Rat, bound: Rat, greater: bool| -> bool {
        // coeff·n compared against bound; `greater` means coeff·n > bound.
        if coeff.is_zero() {
            return if greater { Rat::zero() > bound } else { Rat::zero() < bound };
        }
        let edge = bound / coeff.clone();
        let wants_larger = greater == coeff.is_positive();
        if wants_larger {
            if lower.as_ref().map(|l| edge > *l).unwrap_or(true) {
                lower = Some(edge);
            }
        } else if upper.as_ref().map(|u| edge < *u).unwrap_or(true) {
            upper = Some(edge);
        }
        true
    };
    if !tighten(lo.1, c - lo.0, false) {
        return (vec![], true, false);
    }
    if !tighten(hi.1, c - hi.0, true) {
        return (vec![], true, false);
    }
    match (&lower, &upper) {
        (Some(l), Some(u)) => {
            if l >= u {
                return (vec![], true, false);
            }
            let mut hits = Vec::new();
            let mut n: BigInt = l.floor().to_integer() + 1;
            let limit = u.ceil().to_integer();
            let mut complete = true;
            while n < limit {
                let nr = Rat::from_integer(n.clone());
                if &nr > l && &nr < u {
                    hits.push(n.clone());
                    if hits.len() >= cap {
                        complete = false;
                        break;
                    }
                }
                n += 1;
            }
            (hits, complete, false)
        }
        // A half-line or all of ℤ: infinitely many members contain c.
        _ => (vec![], true, true),
    }
}

/// The integers `k` with `s·qᵏ` strictly inside the given bounds, for
/// `0 < q < 1` and `s ≠ 0`, by exact walking in both directions.
fn scaled_power_hits(
    s: &Rat,
    q: &Rat,
    lower: Option<&Rat>,
    upper: Option<&Rat>,
    cap: usize,
) -> (Vec<i64>, bool, bool) {
    let inside = |x: &Rat| -> bool {
        lower.map(|l| x > l).unwrap_or(true) && upper.map(|u| x < u).unwrap_or(true)
    };
    // As k → +∞ the value tends to 0; as k → -∞ it diverges with the sign
    // of s. Infinitely many solutions appear exactly when 0 or the signed
    // infinity is an interior "limit" of the bound interval.
    let zero_inside = lower.map(|l| l < &Rat::zero()).unwrap_or(true)
        && upper.map(|u| u > &Rat::zero()).unwrap_or(true);
    let diverges_inside = if s.is_positive() { upper.is_none() } else { lower.is_none() };
    if zero_inside || diverges_inside {
        return (vec![], true, true);
    }
    let mut hits = Vec::new();
    let mut complete = true;
    // Walk k = 0, 1, 2, …: |x| shrinks; stop once |x| is at or below every
    // bound magnitude that could still admit a hit.
    let min_magnitude = [lower, upper]
        .into_iter()
        .flatten()
        .map(|b| b.abs())
        .filter(|m| !m.is_zero())
        .min();
    let mut x = s.clone();
    for k in 0..cap as i64 {
        if inside(&x) {
            hits.push(k);
        }
        match &min_magnitude {
            Some(m) if &x.abs() < m => break,
            None => break, // bounds are (0-sided and) already excluded above
            _ => {}
        }
        if k == cap as i64 - 1 {
            complete = false;
        }
        x *= q;
    }
    // Walk k = -1, -2, …: |x| grows; stop once it exceeds every bound
    // magnitude.
    let max_magnitude = [lower, upper].into_iter().flatten().map(|b| b.abs()).max();
    let mut x = s / q;
    for k in 1..=cap as i64 {
        if inside(&x) {
            hits.push(-k);
        }
        match &max_magnitude {
            Some(m) if &x.abs() > m => break,
            None => break,
            _ => {}
        }
        if k == cap as i64 {
            complete = false;
        }
        x /= q;
    }
    hits.sort_unstable();
    (hits, complete, false)
}

/// The integers `n` with `lo(n) < c < hi(n)` for a geometric member pair
/// with ratio `r`, `0 < |r| < 1`.
fn geometric_hits(
    lo: (&Rat, &Rat),
    hi: (&Rat, &Rat),
    ratio: &Rat,
    c: &Rat,
    cap: usize,
) -> (Vec<BigInt>, bool, bool) {
    // Solve for x = rⁿ: lo.1·x < c - lo.0 and hi.1·x > c - hi.0.
    let mut lower: Option<Rat> = None;
    let mut upper: Option<Rat> = None;
    let mut feasible = true;
    let mut tighten = |coeff: &Rat, bound: Rat, greater: bool| -> bool {
        if coeff.is_zero() {
            return if greater { Rat::zero() > bound } else { Rat::zero() < bound };
        }
        let edge = bound / coeff.clone();
        let wants_larger = greater == coeff.is_positive();
        if wants_larger {
            if lower.as_ref().map(|l| edge > *l).unwrap_or(true) {
                lower = Some(edge);
            }
        } else if upper.as_ref().map(|u| edge < *u).unwrap_or(true) {
            upper = Some(edge);
        }
        true
    };
    feasible &= tighten(lo.1, c - lo.0, false);
    feasible &= tighten(hi.1, c - hi.0, true);
    if !feasible {
        return (vec![], true, false);
    }
    if let (Some(l), Some(u)) = (&lower, &upper) {
        if l >= u {
            return (vec![], true, false);
        }
    }
    let mut all_hits = Vec::new();
    let mut complete = true;
    let mut infinite = false;
    if ratio.is_positive() {
        let (ks, ok, inf) = scaled_power_hits(&rat_int(1), ratio, lower.as_ref(), upper.as_ref(), cap);
        all_hits.extend(ks.into_iter().map(BigInt::from));
        complete &= ok;
        infinite |= inf;
    } else {
        // rⁿ splits into the positive even powers and the negative odd
        // powers of |r|², scaled by 1 and r.
        let q = ratio * ratio;
        let (ks, ok, inf) = scaled_power_hits(&rat_int(1), &q, lower.as_ref(), upper.as_ref(), cap);
        all_hits.extend(ks.into_iter().map(|k| BigInt::from(2 * k)));
        complete &= ok;
        infinite |= inf;
        let (ks, ok, inf) = scaled_power_hits(ratio, &q, lower.as_ref(), upper.as_ref(), cap);
        all_hits.extend(ks.into_iter().map(|k| BigInt::from(2 * k + 1)));
        complete &= ok;
        infinite |= inf;
    }
    all_hits.sort();
    (all_hits, complete, infinite)
}

/// Where the endpoints of a family accumulate: nowhere for an affine
/// family, at the endpoint bases for a geometric one.
fn accumulation_points(form: &FamilyForm) -> Vec<Rat> {
    match form {
        FamilyForm::Affine { .. } => vec![],
        FamilyForm::Geometric { lo, hi, .. } => {
            let mut points = vec![lo.base.clone(), hi.base.clone()];
            points.sort();
            points.dedup();
            points
        }
    }
}

const SOLVER_CAP: usize = 4096;

/// Enumerate the singular leaves and certify local finiteness of the
/// singular family. The certificate analyzes the symbolic families, so it
/// judges the whole countable atlas, not just the expanded window; it runs
/// on invalid descriptions too, where its failures exhibit exactly the
/// accumulation obstruction that keeps such data from being a model strip.
pub fn singular_report(expanded: &ExpandedAtlas) -> SingularReport {
    let mut singular = Vec::new();
    let mut glued: BTreeSet<(String, Side, Provenance)> = BTreeSet::new();
    for gluing in &expanded.gluings {
        for end in [&gluing.x, &gluing.y] {
            glued.insert((end.strip.clone(), end.side, end.provenance.clone()));
        }
    }
    for gluing in &expanded.gluings {
        let leaf = Leaf::boundary(&gluing.x.strip, gluing.x.side, gluing.x.provenance.clone());
        let mut reasons = vec![SingularReason::IsSeam];
        let shares = [&gluing.x, &gluing.y].into_iter().any(|end| {
            expanded.strip(&end.strip).map(|s| s.side(end.side).len() >= 2).unwrap_or(false)
        });
        if shares {
            reasons.push(SingularReason::SharesSide);
        }
        singular.push(SingularLeaf { leaf, seam: Some(gluing.id.to_string()), reasons });
    }
    for strip in &expanded.strips {
        for side in [Side::Top, Side::Bottom] {
            let intervals = strip.side(side);
            if intervals.len() < 2 {
                continue;
            }
            for ri in intervals {
                let key = (strip.id.clone(), side, ri.provenance.clone());
                if glued.contains(&key) {
                    continue; // already listed under its seam
                }
                singular.push(SingularLeaf {
                    leaf: Leaf::boundary(&strip.id, side, ri.provenance.clone()),
                    seam: None,
                    reasons: vec![SingularReason::SharesSide],
                });
            }
        }
    }
    singular.sort_by(|a, b| a.leaf.cmp(&b.leaf));

    // Local finiteness: no accumulation point of a geometric family's
    // endpoints may lie strictly inside an interval of the same side.
    let mut failures = Vec::new();
    let mut notes = Vec::new();
    let mut complete = true;
    for strip in expanded.source.strips() {
        for side in [Side::Top, Side::Bottom] {
            let spec = strip.side(side);
            for fam in &spec.families {
                let points = accumulation_points(&fam.form);
                if points.is_empty() {
                    notes.push(format!(
                        "{}.{} family {}: affine endpoints diverge, no finite accumulation",
                        strip.id, side, fam.family
                    ));
                    continue;
                }
                if let FamilyForm::Geometric { ratio, .. } = &fam.form {
                    if ratio.is_zero() || ratio.abs() >= rat_int(1) {
                        notes.push(format!(
                            "{}.{} family {}: ratio {} outside (0, 1) in magnitude; certificate limited to the endpoint bases",
                            strip.id, side, fam.family, fmt_rat(ratio)
                        ));
                        continue;
                    }
                }
                notes.push(format!(
                    "{}.{} family {}: geometric endpoints accumulate at {}",
                    strip.id,
                    side,
                    fam.family,
                    points.iter().map(fmt_rat).collect::<Vec<_>>().join(", ")
                ));
                for c in &points {
                    // Against the explicit intervals of the side.
                    for (i, iv) in spec.intervals.iter().enumerate() {
                        if iv.contains(c) {
                            failures.push(AccumulationFailure {
                                strip: strip.id.clone(),
                                side,
                                family: fam.family.clone(),
                                point: c.clone(),
                                container: format!("explicit interval {} {}", Provenance::Explicit(i), iv),
                            });
                        }
                    }
                    // Against every family on the side, symbolically.
                    for other in &spec.families {
                        let (hits, ok, infinite) = match &other.form {
                            FamilyForm::Affine { lo, hi } => {
                                affine_hits((&lo.base, &lo.coeff), (&hi.base, &hi.coeff), c, SOLVER_CAP)
                            }
                            FamilyForm::Geometric { lo, hi, ratio } => geometric_hits(
                                (&lo.base, &lo.coeff),
                                (&hi.base, &hi.coeff),
                                ratio,
                                c,
                                SOLVER_CAP,
                            ),
                        };
                        complete &= ok;
                        if infinite {
                            failures.push(AccumulationFailure {
                                strip: strip.id.clone(),
                                side,
                                family: fam.family.clone(),
                                point: c.clone(),
                                container: format!("infinitely many members of family {}", other.family),
                            });
                        }
                        for n in hits {
                            failures.push(AccumulationFailure {
                                strip: strip.id.clone(),
                                side,
                                family: fam.family.clone(),
                                point: c.clone(),
                                container: format!("member n={} of family {}", n, other.family),
                            });
                        }
                    }
                }
            }
        }
    }
    let locally_finite = failures.is_empty() && complete;
    SingularReport { window: expanded.window, singular, locally_finite, complete, failures, notes }
}
