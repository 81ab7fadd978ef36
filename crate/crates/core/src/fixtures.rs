//! Canonical chart fixtures used by tests and randomized suites.

use crate::chart::{Chart, Splitting};
use crate::poly::parse_expression;

/// The smallest curved fixture: one leaf coordinate `x`, transverse
/// `u1,u2`, frame `V_1 = d/du1`, `V_2 = d/du2 + u1 d/dx`. Its curvature is
/// `du1 ^ du2 (x) d/dx`.
pub fn s1() -> Splitting {
    let chart = Chart::new(vec!["x".into()], vec!["u1".into(), "u2".into()]).unwrap();
    let names = chart.names().to_vec();
    let p = |s: &str| parse_expression(s, &names).unwrap();
    Splitting::new(chart, vec![vec![p("0")], vec![p("u1")]]).unwrap()
}

/// The flat splitting on the S1 chart (`V_alpha = d/du^alpha`).
pub fn s1_flat() -> Splitting {
    Splitting::flat(s1().chart().clone())
}

/// A richer fixture with two leaf and two transverse coordinates and
/// nonlinear splitting coefficients; its leafwise algebra reaches form
/// degree 2, which the S1 chart cannot.
pub fn s2() -> Splitting {
    let chart = Chart::new(
        vec!["x1".into(), "x2".into()],
        vec!["u1".into(), "u2".into()],
    )
    .unwrap();
    let names = chart.names().to_vec();
    let p = |s: &str| parse_expression(s, &names).unwrap();
    Splitting::new(
        chart,
        vec![vec![p("u2"), p("x1")], vec![p("u1^2"), p("x2 + u1")]],
    )
    .unwrap()
}

/// The flat splitting on the S2 chart.
pub fn s2_flat() -> Splitting {
    Splitting::flat(s2().chart().clone())
}
