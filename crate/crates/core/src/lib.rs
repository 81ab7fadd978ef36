//! Exact symbolic engine for the strong homotopy Lie-Rinehart algebra of a
//! foliation on a polynomial chart.
//!
//! The crate builds, from a chart with a distinguished involutive leaf
//! distribution and a chosen complementary splitting, the full homotopy
//! Lie-Rinehart structure on leafwise forms together with its form-valued
//! vector-field calculus, and verifies every structural identity in exact
//! rational arithmetic. No identity is checked numerically: each one reduces
//! to structural equality of canonical sparse polynomials.

pub mod chart;
pub mod fixtures;
pub mod fnc;
pub mod foliation;
pub mod linfty;
pub mod form;
pub mod poly;
pub mod presym;
pub mod signs;
pub mod splitting;
