//! Combinatorial striped surfaces.
//!
//! A *striped surface* is a surface assembled from countably many model
//! strips `S ⊂ ℝ × [-1, 1]` — each an open horizontal band together with a
//! family of disjoint open intervals on the boundary lines `y = ±1` — glued
//! along those boundary intervals by orientation-controlled affine
//! homeomorphisms. This crate provides:
//!
//! * an exact-arithmetic atlas model ([`atlas`]) with windowed expansion of
//!   countable interval/gluing families,
//! * a small text format for atlases ([`dsl`]) with a total parser and a
//!   canonical serializer,
//! * the gluing graph of an atlas and its invariants ([`graph`]),
//! * a computational fundamental groupoid: reduced edge words, based
//!   groupoids, presentations, coproducts ([`groupoid`]),
//! * a mechanical Seifert-van Kampen verifier ([`vankampen`]) that builds the
//!   canonical open cover of the glued surface, checks the hypotheses of the
//!   van Kampen theorem for covers, and certifies that the embedding of the
//!   gluing graph induces an isomorphism of fundamental groupoids,
//! * analysis of the horizontal foliation ([`foliation`]): leaf
//!   classification and an exact local-finiteness certificate,
//! * a randomized verification suite ([`suite`]) over generated atlases,
//!   data-parallel when the `parallel` feature (default) is enabled.
//!
//! All coordinates are `BigRational`; there are no floating-point values and
//! no tolerances anywhere in the crate.

pub mod atlas;
pub mod dsl;
pub mod foliation;
pub mod graph;
pub mod groupoid;
pub mod rat;
pub mod suite;
pub mod vankampen;
