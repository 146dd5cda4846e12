//! Randomized verification suite: generate striped atlases, run the full
//! pipeline (expand → validate → verify the induced groupoid isomorphism)
//! on each, and report per-case outcomes.
//!
//! Two generators are provided. [`random_valid_atlas`] produces atlases that
//! are valid by construction — finite unit-spaced boundary intervals, a
//! fresh interval for every gluing end — while still exercising loops,
//! parallel seams, orientation reversal, self-gluings, unglued intervals,
//! and isolated strips. [`random_syntax_atlas`] additionally covers interval
//! families and infinite endpoints, without caring about geometric validity;
//! it feeds the serializer round-trip property.
//!
//! Case results are deterministic: each case derives its own seed from the
//! suite seed and its index, so [`run`] (data-parallel when the `parallel`
//! feature is enabled) and [`run_sequential`] produce identical reports.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::Serialize;

use crate::atlas::{
    expand, validate, BoundaryRef, EndpointForm, FamilyForm, Gluing, Interval, IntervalFamily,
    ModelStrip, Side, StripedAtlas,
};
use crate::rat::{rat, rat_int, ExtRat, Rat};
use crate::vankampen::verify_phi_iso;

/// Parameters of a suite run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteConfig {
    pub cases: usize,
    pub seed: u64,
    pub max_strips: usize,
    pub max_seams: usize,
    pub window: u32,
    pub max_word_len: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { cases: 500, seed: 2026, max_strips: 8, max_seams: 12, window: 3, max_word_len: 8 }
    }
}

/// The outcome of one generated case.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CaseReport {
    pub index: usize,
    pub case_seed: u64,
    pub strips: usize,
    pub seams: usize,
    pub passed: bool,
    pub failures: Vec<String>,
}

/// The outcome of a whole run. Reports carry no timing, so parallel and
/// sequential runs over the same config compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub passed: usize,
    pub results: Vec<CaseReport>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.passed == self.results.len()
    }

    pub fn failures(&self) -> Vec<&CaseReport> {
        self.results.iter().filter(|r| !r.passed).collect()
    }
}

/// The per-case seed: a fixed-point mix of the suite seed and the index, so
/// cases are decorrelated but reproducible in isolation.
pub fn case_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// A random atlas that is geometrically valid by construction. Boundary
/// intervals are finite and unit-spaced: slot `k` of a side is the interval
/// `(3k, 3k + len)` with `len ∈ {1, 2}`, so intervals on one side never
/// touch. Every gluing end takes a fresh slot, so no interval is glued
/// twice; strips, sides, and orientation are chosen uniformly, which yields
/// loops, parallel seams, same-side self-gluings, and isolated strips.
pub fn random_valid_atlas(rng: &mut impl Rng, max_strips: usize, max_seams: usize) -> StripedAtlas {
    let n_strips = rng.gen_range(1..=max_strips.max(1));
    let mut strips: Vec<ModelStrip> =
        (0..n_strips).map(|i| ModelStrip::bare(&format!("S{}", i))).collect();
    let mut slots = vec![[0i64; 2]; n_strips];
    let take_slot = |strips: &mut Vec<ModelStrip>, slots: &mut Vec<[i64; 2]>, rng: &mut dyn rand::RngCore, strip: usize, side: Side| -> usize {
        let slot = &mut slots[strip][(side == Side::Bottom) as usize];
        let k = *slot;
        *slot += 1;
        let len = if rng.gen_bool(0.5) { 1 } else { 2 };
        let lo = rat_int(3 * k);
        let hi = rat_int(3 * k + len);
        let spec = strips[strip].side_mut(side);
        spec.intervals.push(Interval::finite(lo, hi));
        spec.intervals.len() - 1
    };
    let n_seams = rng.gen_range(0..=max_seams);
    let mut gluings = Vec::new();
    for g in 0..n_seams {
        let sx = rng.gen_range(0..n_strips);
        let sy = rng.gen_range(0..n_strips);
        let side_x = if rng.gen_bool(0.5) { Side::Top } else { Side::Bottom };
        let side_y = if rng.gen_bool(0.5) { Side::Top } else { Side::Bottom };
        let ix = take_slot(&mut strips, &mut slots, rng, sx, side_x);
        let iy = take_slot(&mut strips, &mut slots, rng, sy, side_y);
        gluings.push(Gluing {
            id: format!("g{:02}", g),
            x: BoundaryRef::explicit(&format!("S{}", sx), side_x, ix),
            y: BoundaryRef::explicit(&format!("S{}", sy), side_y, iy),
            reversed: rng.gen_bool(0.5),
            family: None,
        });
    }
    // Unglued extras, so sides with both glued and free intervals occur.
    for strip in 0..n_strips {
        for side in [Side::Top, Side::Bottom] {
            if rng.gen_bool(0.35) {
                take_slot(&mut strips, &mut slots, rng, strip, side);
            }
        }
    }
    StripedAtlas::new(strips, gluings).expect("construction is well-formed")
}

fn random_rat(rng: &mut impl Rng) -> Rat {
    rat(rng.gen_range(-6..=6), rng.gen_range(1..=4))
}

fn random_nonzero_rat(rng: &mut impl Rng) -> Rat {
    loop {
        let r = random_rat(rng);
        if !num_traits::Zero::is_zero(&r) {
            return r;
        }
    }
}

/// A random atlas exercising the whole surface syntax: infinite endpoints,
/// affine and geometric families, family-block gluings with `n`-relative
/// references, fixed member references, and reversal. Geometric validity is
/// not attempted; the output is well-formed (builds a [`StripedAtlas`]) and
/// exists to exercise the serializer round-trip.
pub fn random_syntax_atlas(rng: &mut impl Rng) -> StripedAtlas {
    let n_strips = rng.gen_range(1..=5);
    let mut strips: Vec<ModelStrip> =
        (0..n_strips).map(|i| ModelStrip::bare(&format!("S{}", i))).collect();
    // Explicit intervals, possibly unbounded.
    let mut explicit_counts = vec![[0usize; 2]; n_strips];
    for (i, strip) in strips.iter_mut().enumerate() {
        for side in [Side::Top, Side::Bottom] {
            let n_intervals = rng.gen_range(0..=3);
            let spec = strip.side_mut(side);
            for k in 0..n_intervals {
                let base = rat_int(10 * k as i64);
                let interval = match rng.gen_range(0..6) {
                    0 => Interval::new(ExtRat::NegInf, ExtRat::PosInf),
                    1 => Interval::new(ExtRat::NegInf, ExtRat::Fin(base + random_rat(rng))),
                    2 => Interval::new(ExtRat::Fin(base + random_rat(rng)), ExtRat::PosInf),
                    _ => {
                        let lo = base + random_rat(rng);
                        let hi = &lo + rat(rng.gen_range(1..=5), rng.gen_range(1..=3));
                        Interval::finite(lo, hi)
                    }
                };
                spec.intervals.push(interval);
            }
            explicit_counts[i][(side == Side::Bottom) as usize] = n_intervals;
        }
    }
    // Families, attached to one or two strip sides each.
    let n_families = rng.gen_range(0..=2);
    let mut attachments: Vec<(String, Vec<(usize, Side)>)> = Vec::new();
    for f in 0..n_families {
        let name = format!("F{}", f);
        let form = if rng.gen_bool(0.5) {
            let lo = EndpointForm::new(random_rat(rng), random_nonzero_rat(rng));
            let hi = EndpointForm::new(random_rat(rng), random_nonzero_rat(rng));
            FamilyForm::Affine { lo, hi }
        } else {
            let ratio = [rat(1, 2), rat(1, 3), rat(2, 3), rat(3, 4), rat(-1, 2)]
                [rng.gen_range(0..5)]
            .clone();
            let lo = EndpointForm::new(random_rat(rng), random_nonzero_rat(rng));
            let hi = EndpointForm::new(random_rat(rng), random_nonzero_rat(rng));
            FamilyForm::Geometric { lo, hi, ratio }
        };
        let mut sites = Vec::new();
        for _ in 0..rng.gen_range(1..=2) {
            let strip = rng.gen_range(0..n_strips);
            let side = if rng.gen_bool(0.5) { Side::Top } else { Side::Bottom };
            if sites.contains(&(strip, side)) {
                continue;
            }
            strips[strip]
                .side_mut(side)
                .families
                .push(IntervalFamily { family: name.clone(), form: form.clone() });
            sites.push((strip, side));
        }
        attachments.push((name, sites));
    }
    // Gluings: explicit-to-explicit, fixed family members, and family-block
    // gluings with n-relative ends.
    let mut gluings = Vec::new();
    let mut next_id = 0;
    let mut fresh_id = move || {
        next_id += 1;
        format!("g{:02}", next_id - 1)
    };
    let explicit_ref = |rng: &mut dyn rand::RngCore, counts: &[[usize; 2]]| -> Option<BoundaryRef> {
        let candidates: Vec<(usize, Side, usize)> = counts
            .iter()
            .enumerate()
            .flat_map(|(i, c)| {
                [(i, Side::Top, c[0]), (i, Side::Bottom, c[1])]
            })
            .filter(|(_, _, n)| *n > 0)
            .collect();
        if candidates.is_empty() {
            return None;
        }
        let (strip, side, n) = candidates[rng.gen_range(0..candidates.len())];
        Some(BoundaryRef::explicit(&format!("S{}", strip), side, rng.gen_range(0..n)))
    };
    for _ in 0..rng.gen_range(0..=3) {
        let (Some(x), Some(y)) =
            (explicit_ref(rng, &explicit_counts), explicit_ref(rng, &explicit_counts))
        else {
            break;
        };
        gluings.push(Gluing { id: fresh_id(), x, y, reversed: rng.gen_bool(0.5), family: None });
    }
    for (name, sites) in &attachments {
        if sites.is_empty() {
            continue;
        }
        // A fixed-member gluing against an explicit interval, sometimes.
        if rng.gen_bool(0.5) {
            if let Some(x) = explicit_ref(rng, &explicit_counts) {
                let (strip, side) = sites[rng.gen_range(0..sites.len())];
                let y = BoundaryRef::member(
                    &format!("S{}", strip),
                    side,
                    name,
                    rng.gen_range(-2..=2),
                );
                gluings.push(Gluing { id: fresh_id(), x, y, reversed: rng.gen_bool(0.5), family: None });
            }
        }
        // A family-block gluing between two attachment sites, n-relative.
        if sites.len() >= 2 && rng.gen_bool(0.8) {
            let (sx, side_x) = sites[0];
            let (sy, side_y) = sites[1];
            gluings.push(Gluing {
                id: fresh_id(),
                x: BoundaryRef::indexed(&format!("S{}", sx), side_x, name, 0),
                y: BoundaryRef::indexed(&format!("S{}", sy), side_y, name, rng.gen_range(-1..=1)),
                reversed: rng.gen_bool(0.5),
                family: Some(name.clone()),
            });
        }
    }
    StripedAtlas::new(strips, gluings).expect("construction is well-formed")
}

/// Run the full pipeline on one atlas: expansion, validation, and the
/// groupoid-isomorphism verification. Returns the failure descriptions
/// (empty means the case passed).
pub fn check_case(atlas: &StripedAtlas, window: u32, max_word_len: usize) -> Vec<String> {
    let expanded = expand(atlas, window);
    let validation = validate(&expanded);
    if !validation.is_valid() {
        return validation.violations.iter().map(|v| format!("validation: {}", v)).collect();
    }
    match verify_phi_iso(&expanded, max_word_len) {
        Ok(report) => report
            .failed_checks()
            .iter()
            .map(|c| format!("{}: {}", c.name, c.detail))
            .collect(),
        Err(e) => vec![format!("verifier error: {}", e)],
    }
}

fn run_one(config: &SuiteConfig, index: usize) -> CaseReport {
    let seed = case_seed(config.seed, index);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let atlas = random_valid_atlas(&mut rng, config.max_strips, config.max_seams);
    let failures = check_case(&atlas, config.window, config.max_word_len);
    CaseReport {
        index,
        case_seed: seed,
        strips: atlas.strips().len(),
        seams: atlas.gluings().len(),
        passed: failures.is_empty(),
        failures,
    }
}

/// Run the suite, data-parallel across cases when the `parallel` feature is
/// enabled. The report equals [`run_sequential`]'s for the same config.
pub fn run(config: &SuiteConfig) -> SuiteReport {
    #[cfg(feature = "parallel")]
    let results: Vec<CaseReport> =
        (0..config.cases).into_par_iter().map(|i| run_one(config, i)).collect();
    #[cfg(not(feature = "parallel"))]
    let results: Vec<CaseReport> = (0..config.cases).map(|i| run_one(config, i)).collect();
    let passed = results.iter().filter(|r| r.passed).count();
    SuiteReport { config: config.clone(), passed, results }
}

/// Run the suite on the current thread regardless of features.
pub fn run_sequential(config: &SuiteConfig) -> SuiteReport {
    let results: Vec<CaseReport> = (0..config.cases).map(|i| run_one(config, i)).collect();
    let passed = results.iter().filter(|r| r.passed).count();
    SuiteReport { config: config.clone(), passed, results }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{parse, serialize};

    #[test]
    fn generated_valid_atlases_validate_and_cover_the_shapes() {
        let mut saw_loop = false;
        let mut saw_reversed = false;
        let mut saw_parallel = false;
        let mut saw_isolated = false;
        for seed in 0..60 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let atlas = random_valid_atlas(&mut rng, 8, 12);
            let expanded = expand(&atlas, 0);
            let validation = validate(&expanded);
            assert!(validation.is_valid(), "seed {}: {:?}", seed, validation.violations);
            for g in atlas.gluings() {
                if g.x.strip == g.y.strip {
                    saw_loop = true;
                }
                if g.reversed {
                    saw_reversed = true;
                }
            }
            for (i, a) in atlas.gluings().iter().enumerate() {
                for b in &atlas.gluings()[i + 1..] {
                    let pair = |g: &Gluing| {
                        let mut p = [g.x.strip.clone(), g.y.strip.clone()];
                        p.sort();
                        p
                    };
                    if pair(a) == pair(b) {
                        saw_parallel = true;
                    }
                }
            }
            let glued: std::collections::BTreeSet<&str> = atlas
                .gluings()
                .iter()
                .flat_map(|g| [g.x.strip.as_str(), g.y.strip.as_str()])
                .collect();
            if atlas.strips().iter().any(|s| !glued.contains(s.id.as_str())) {
                saw_isolated = true;
            }
        }
        assert!(saw_loop && saw_reversed && saw_parallel && saw_isolated);
    }

    #[test]
    fn small_run_is_fully_green() {
        let config = SuiteConfig { cases: 25, seed: 7, ..SuiteConfig::default() };
        let report = run_sequential(&config);
        assert!(report.all_passed(), "failures: {:#?}", report.failures());
        assert_eq!(report.passed, 25);
    }

    #[test]
    fn parallel_and_sequential_reports_agree() {
        let config = SuiteConfig { cases: 12, seed: 99, ..SuiteConfig::default() };
        assert_eq!(run(&config), run_sequential(&config));
    }

    #[test]
    fn syntax_atlases_round_trip_through_the_dsl() {
        for seed in 0..200 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let atlas = random_syntax_atlas(&mut rng);
            let text = serialize(&atlas);
            let reparsed = parse(&text).unwrap_or_else(|e| {
                panic!("seed {}: serialized atlas fails to parse: {:?}\n{}", seed, e, text)
            });
            assert_eq!(reparsed, atlas, "seed {}:\n{}", seed, text);
        }
    }

    #[test]
    fn report_json_is_deterministic() {
        let config = SuiteConfig { cases: 6, seed: 3, ..SuiteConfig::default() };
        let a = serde_json::to_string(&run(&config)).unwrap();
        let b = serde_json::to_string(&run(&config)).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("\"passed\":true"));
    }
}
