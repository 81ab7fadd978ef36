//! Oracle and property tests for the Frölicher–Nijenhuis calculus.

use lr_core::chart::{Chart, Splitting};
use lr_core::fnc::*;
use lr_core::form::{Form, VectorField};
use lr_core::poly::{parse_expression, rat, Polynomial};
use proptest::prelude::*;

fn s1() -> Splitting {
    let chart = Chart::new(vec!["x".into()], vec!["u1".into(), "u2".into()]).unwrap();
    let names = chart.names().to_vec();
    let p = |s: &str| parse_expression(s, &names).unwrap();
    Splitting::new(chart, vec![vec![p("0")], vec![p("u1")]]).unwrap()
}

fn s2() -> Splitting {
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

#[test]
fn insertion_oracle() {
    // Z = du1 (x) d/dx in the S1 frame: i_Z(dCx) = du1, i_Z(du^alpha) = 0.
    let f = s1();
    let z = FormVector::tensor(&Form::du(&f, 0), &VectorField::coordinate(f.chart().clone(), 0));
    assert_eq!(insertion(&z, &Form::dcx(&f, 0)), Form::du(&f, 0));
    assert_eq!(insertion(&z, &Form::du(&f, 0)), Form::zero(&f));
    assert_eq!(insertion(&z, &Form::du(&f, 1)), Form::zero(&f));
    // i_Z vanishes on scalars
    let names = f.chart().names().to_vec();
    let x = Form::scalar(&f, parse_expression("x*u1", &names).unwrap());
    assert_eq!(insertion(&z, &x), Form::zero(&f));
}

#[test]
fn lie_derivative_on_functions_is_z_of_f() {
    let f = s2();
    let names = f.chart().names().to_vec();
    let p = |s: &str| parse_expression(s, &names).unwrap();
    let z = FormVector::tensor(
        &Form::du(&f, 1),
        &VectorField::new(
            f.chart().clone(),
            vec![p("x1"), p("0"), p("u2"), p("0")],
        ),
    );
    let g = Form::scalar(&f, p("x1^2 + u1"));
    // L_Z g = Z(g) = du2 * (x1 * 2 x1 + u2 * 0 ... ) = du2 * (2 x1^2 + u2)
    let expect = Form::du(&f, 1).scale_poly(&p("2*x1^2 + u2"));
    assert_eq!(lie_derivative(&z, &g), expect);
}

// strategies -----------------------------------------------------------------

fn small_poly() -> impl Strategy<Value = Polynomial> {
    (prop::collection::vec(0u32..=1, 4), -2i64..=2).prop_map(|(exps, c)| {
        let mut p = Polynomial::constant(4, rat(c));
        for (i, &e) in exps.iter().enumerate() {
            p = p.mul(&Polynomial::var(4, i).pow(e));
        }
        p
    })
}

/// Homogeneous form-valued vector field of the given form degree on S2.
fn arb_fv(deg: u32) -> impl Strategy<Value = FormVector> {
    let masks: Vec<(u32, u32)> = (0u32..4)
        .flat_map(|c| (0u32..4).map(move |t| (c, t)))
        .filter(|(c, t)| c.count_ones() + t.count_ones() == deg)
        .collect();
    prop::collection::vec((0..masks.len(), 0usize..4, small_poly()), 1..3).prop_map(
        move |terms| {
            let f = s2();
            let mut out = FormVector::zero(&f);
            for (mi, coord, p) in terms {
                let (c, t) = masks[mi];
                let x = {
                    let mut comps = vec![Polynomial::zero(4); 4];
                    comps[coord] = p;
                    VectorField::new(f.chart().clone(), comps)
                };
                out = out.add(&FormVector::tensor(&Form::basis(&f, c, t), &x));
            }
            out
        },
    )
}

fn arb_homog_form(deg: u32) -> impl Strategy<Value = Form> {
    let masks: Vec<(u32, u32)> = (0u32..4)
        .flat_map(|c| (0u32..4).map(move |t| (c, t)))
        .filter(|(c, t)| c.count_ones() + t.count_ones() == deg)
        .collect();
    prop::collection::vec((0..masks.len(), small_poly()), 1..3).prop_map(move |terms| {
        let f = s2();
        let mut out = Form::zero(&f);
        for (mi, p) in terms {
            let (c, t) = masks[mi];
            out = out.add(&Form::basis(&f, c, t).scale_poly(&p));
        }
        out
    })
}

/// Homogeneous field of random degree 0..=2.
fn arb_fv_any() -> impl Strategy<Value = FormVector> {
    (0u32..=2).prop_flat_map(arb_fv)
}

fn arb_form_any() -> impl Strategy<Value = Form> {
    (0u32..=2).prop_flat_map(arb_homog_form)
}

fn deg(z: &FormVector) -> i64 {
    z.homogeneous_degree().unwrap_or(0) as i64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn nr_bracket_controls_insertions(
        z1 in arb_fv_any(), z2 in arb_fv_any(), lam in arb_form_any(),
    ) {
        // [i_{Z1}, i_{Z2}] = i_{[Z1,Z2]_nr} on a test form
        let (d1, d2) = (deg(&z1), deg(&z2));
        let s = if ((d1 - 1) * (d2 - 1)).rem_euclid(2) == 1 { -1 } else { 1 };
        let mut swapped = insertion(&z2, &insertion(&z1, &lam));
        if s < 0 { swapped = swapped.neg(); }
        let lhs = insertion(&z1, &insertion(&z2, &lam)).sub(&swapped);
        prop_assert_eq!(lhs, insertion(&nr_bracket(&z1, &z2), &lam));
    }

    #[test]
    fn fn_bracket_controls_lie_derivatives(
        z1 in arb_fv_any(), z2 in arb_fv_any(), lam in arb_form_any(),
    ) {
        // [L_{Z1}, L_{Z2}] = L_{[[Z1,Z2]]} on all forms, not just on the
        // coordinate functions used to reconstruct the bracket
        let (d1, d2) = (deg(&z1), deg(&z2));
        let s = if (d1 * d2).rem_euclid(2) == 1 { -1 } else { 1 };
        let mut swapped = lie_derivative(&z2, &lie_derivative(&z1, &lam));
        if s < 0 { swapped = swapped.neg(); }
        let lhs = lie_derivative(&z1, &lie_derivative(&z2, &lam)).sub(&swapped);
        prop_assert_eq!(lhs, lie_derivative(&fn_bracket(&z1, &z2), &lam));
    }

    #[test]
    fn module_identity_defects_vanish(
        omega in (0u32..=1).prop_flat_map(arb_homog_form),
        z in arb_fv_any(), y in arb_fv_any(), lam in arb_form_any(),
    ) {
        prop_assert!(defect_insertion_module(&omega, &z, &lam).is_zero());
        prop_assert!(defect_lie_module(&omega, &z, &lam).is_zero());
        prop_assert!(defect_insertion_lie_commutator(&z, &y, &lam).is_zero());
        prop_assert!(defect_nr_module(&omega, &z, &y).is_zero());
        prop_assert!(defect_fn_module(&omega, &z, &y).is_zero());
    }

    #[test]
    fn triple_identity_defects_vanish(
        x in arb_fv_any(), z in arb_fv_any(), y in arb_fv_any(),
    ) {
        prop_assert!(defect_insertion_of_fn(&x, &z, &y).is_zero());
        prop_assert!(defect_fn_of_nr(&x, &z, &y).is_zero());
    }

    #[test]
    fn derivation_decomposition_round_trips(
        z in (1u32..=2).prop_flat_map(arb_fv), y in arb_fv_any(),
    ) {
        let f = s2();
        let delta = |omega: &Form| insertion(&z, omega).add(&lie_derivative(&y, omega));
        let (z2, y2) = decompose_derivation(&f, &delta);
        prop_assert_eq!(&z2, &z);
        prop_assert_eq!(&y2, &y);
    }
}
