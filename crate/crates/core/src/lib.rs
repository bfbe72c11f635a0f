//! Exact-arithmetic engine for substitution tilings with dense tile
//! orientations and n-fold rotational symmetry (n = 3, 4, 5, 6, 8).
//!
//! Everything is exact end to end: tile motions live in the cyclotomic
//! field Q(xi_2n), optionally extended by the inflation scale lambda,
//! and every geometric predicate reduces to a certified sign decision.

pub mod analysis;
pub mod engine;
pub mod geometry;
pub mod numberfield;
pub mod render;
pub mod ruleset;

pub use numberfield::{
    imag_sign, imag_sign_cyc, parse_rat, rat_string, real_sign, real_sign_cyc, CycNum, ExtScalar,
    Field, FieldError, GScalar, Rat,
};
