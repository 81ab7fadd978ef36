//! Jacobiator, module-Jacobiator, Lie-Rinehart, morphism, mutation, and
//! degree-shift tests for the generic homotopy machinery.

use std::collections::BTreeMap;

use lr_core::fixtures::{s1, s1_flat, s2};
use lr_core::foliation::{ABarElement, FoliationStructure, QElement};
use lr_core::form::Form;
use lr_core::linfty::*;
use lr_core::poly::{rat, ratio, Polynomial, Rat};
use proptest::prelude::*;

fn s1_oracle() -> FoliationOracle {
    FoliationOracle::new(FoliationStructure::build_splitting(s1()))
}

fn small_poly_s1() -> impl Strategy<Value = Polynomial> {
    (
        prop::collection::vec(0u32..=1, 3),
        prop_oneof![-2i64..=-1, 1i64..=2],
    )
        .prop_map(|(exps, c)| {
            let mut p = Polynomial::constant(3, rat(c));
            for (i, &e) in exps.iter().enumerate() {
                p = p.mul(&Polynomial::var(3, i).pow(e));
            }
            p
        })
}

/// Homogeneous Q-element on S1 of leafwise degree `s` (0 or 1).
fn arb_q_s1(s: u32) -> impl Strategy<Value = QElement> {
    prop::collection::vec((0usize..2, small_poly_s1()), 1..3).prop_map(move |terms| {
        let frame = s1();
        let tmask = if s == 0 { 0u32 } else { 1u32 };
        let mut out = QElement::zero(&frame);
        for (alpha, p) in terms {
            let l = ABarElement::new(Form::basis(&frame, 0, tmask).scale_poly(&p)).unwrap();
            out = out.add(&QElement::from_component(alpha, &l));
        }
        out
    })
}

fn arb_q_any_s1() -> impl Strategy<Value = QElement> {
    (0u32..=1).prop_flat_map(arb_q_s1)
}

fn arb_abar_s1() -> impl Strategy<Value = ABarElement> {
    ((0u32..=1), small_poly_s1()).prop_map(|(s, p)| {
        let frame = s1();
        let tmask = if s == 0 { 0u32 } else { 1u32 };
        ABarElement::new(Form::basis(&frame, 0, tmask).scale_poly(&p)).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn jacobiators_vanish(
        k in 1usize..=5,
        zs in prop::collection::vec(arb_q_any_s1(), 5..=5),
    ) {
        let o = s1_oracle();
        let j = jacobiator(&o, &zs[..k]).unwrap();
        prop_assert!(o.is_zero(&j), "J^{} nonzero", k);
    }

    #[test]
    fn module_jacobiators_vanish(
        k in 1usize..=5,
        zs in prop::collection::vec(arb_q_any_s1(), 4..=4),
        lam in arb_abar_s1(),
    ) {
        let o = s1_oracle();
        let j = module_jacobiator(&o, &zs[..k - 1], &lam).unwrap();
        prop_assert!(o.mod_is_zero(&j), "module J^{} nonzero", k);
    }

    #[test]
    fn lie_rinehart_identity_holds(
        k in 1usize..=3,
        zs in prop::collection::vec(arb_q_any_s1(), 3..=3),
        lam in arb_abar_s1(),
    ) {
        let o = s1_oracle();
        let d = lie_rinehart_defect(&o, &zs[..k - 1], &lam, &zs[k - 1]).unwrap();
        prop_assert!(o.is_zero(&d), "LRP defect nonzero at k={}", k);
    }

    #[test]
    fn identity_morphism_has_no_defect(
        k in 1usize..=4,
        zs in prop::collection::vec(arb_q_any_s1(), 4..=4),
    ) {
        let o = s1_oracle();
        let d = morphism_defect(&IdentityMorphism, &o, &o, &zs[..k]).unwrap();
        prop_assert!(o.is_zero(&d));
    }

    #[test]
    fn identity_anchored_family_has_no_defect(
        k in 0usize..=3,
        zs in prop::collection::vec(arb_q_any_s1(), 3..=3),
        lam in arb_abar_s1(),
    ) {
        let o = s1_oracle();
        let d = anchored_morphism_defect(&IdentityAnchored, &o, &o, &zs[..k], &lam).unwrap();
        prop_assert!(o.mod_is_zero(&d));
    }
}

#[test]
fn flat_case_jacobiators_vanish() {
    // deterministic smoke check in the flat case: frame classes with
    // polynomial coefficients
    let o = FoliationOracle::new(FoliationStructure::build_splitting(s1_flat()));
    let frame = s1_flat();
    let x = Polynomial::var(3, 0);
    let l = ABarElement::new(Form::scalar(&frame, x.clone())).unwrap();
    let z1 = QElement::frame_class(&frame, 0);
    let z2 = QElement::from_component(1, &l);
    for k in 1..=4usize {
        let args: Vec<QElement> = (0..k)
            .map(|i| if i % 2 == 0 { z1.clone() } else { z2.clone() })
            .collect();
        assert!(o.is_zero(&jacobiator(&o, &args).unwrap()));
    }
}

#[test]
fn mutations_break_the_jacobi_identity() {
    // every single-sign corruption of the binary bracket must surface as a
    // nonzero Jacobiator at arity 2 or 3 on the curved fixture
    let frame = s1();
    let x = Polynomial::var(3, 0);
    let u1 = Polynomial::var(3, 1);
    let lx = ABarElement::new(Form::scalar(&frame, x.clone())).unwrap();
    let lu1 = ABarElement::new(Form::scalar(&frame, u1.clone())).unwrap();
    let lu = ABarElement::new(Form::dcx(&frame, 0).scale_poly(&u1)).unwrap();
    let pool = [
        QElement::frame_class(&frame, 0),
        QElement::frame_class(&frame, 1),
        QElement::from_component(0, &lx),
        QElement::from_component(1, &lx),
        QElement::from_component(0, &lu1),
        QElement::from_component(1, &lu1),
        QElement::from_component(0, &lu),
        QElement::from_component(1, &lu),
    ];
    // elements with odd form degree on a second pool: the antisymmetry slip
    // only flips brackets of two odd-form-degree arguments, and those need
    // two leaf coordinates to survive the normal projection
    let frame2 = s2();
    let y1 = Polynomial::var(4, 0);
    let w1 = Polynomial::var(4, 2);
    let m1 = ABarElement::new(Form::dcx(&frame2, 0).scale_poly(&w1)).unwrap();
    let m2 = ABarElement::new(Form::dcx(&frame2, 1).scale_poly(&y1)).unwrap();
    let m3 = ABarElement::new(Form::scalar(&frame2, y1.clone())).unwrap();
    let pool2 = [
        QElement::from_component(0, &m1),
        QElement::from_component(1, &m1),
        QElement::from_component(0, &m2),
        QElement::from_component(1, &m2),
        QElement::frame_class(&frame2, 0),
        QElement::frame_class(&frame2, 1),
        QElement::from_component(0, &m3),
        QElement::from_component(1, &m3),
    ];
    for (mutation, pool) in [
        (Mutation::SwappedArguments, &pool[..]),
        (Mutation::WrongDegreeExponent, &pool[..]),
        (Mutation::AntisymmetryKoszul, &pool2[..]),
    ] {
        let chart = pool[0].frame().clone();
        let o = FoliationOracle::mutated(FoliationStructure::build_splitting(chart), mutation);
        let mut witness = false;
        'search: for a in pool {
            for b in pool {
                let j2 = jacobiator(&o, &[a.clone(), b.clone()]).unwrap();
                if !o.is_zero(&j2) {
                    witness = true;
                    break 'search;
                }
                for c in pool {
                    let j3 = jacobiator(&o, &[a.clone(), b.clone(), c.clone()]).unwrap();
                    if !o.is_zero(&j3) {
                        witness = true;
                        break 'search;
                    }
                }
            }
        }
        assert!(witness, "mutation {mutation:?} went undetected");
    }
}

// composition ---------------------------------------------------------------

#[test]
fn composition_identities() {
    let o = s1_oracle();
    let frame = s1();
    let u1 = Polynomial::var(3, 1);
    let lam = ABarElement::new(Form::scalar(&frame, u1.clone())).unwrap();
    // g: scale by 2 at arity 1 plus a symmetric binary component
    let lam_b = lam.clone();
    let g: ClosureMorphism<FoliationOracle, FoliationOracle> = ClosureMorphism {
        components: vec![
            Box::new(|args: &[QElement]| args[0].scale(&rat(2))),
            Box::new(move |args: &[QElement]| {
                args[0].add(&args[1]).wedge_abar(&lam_b)
            }),
        ],
    };
    // f: scale by 3 at arity 1
    let f: ClosureMorphism<FoliationOracle, FoliationOracle> = ClosureMorphism {
        components: vec![Box::new(|args: &[QElement]| args[0].scale(&rat(3)))],
    };
    let z1 = QElement::frame_class(&frame, 0);
    let z2 = QElement::from_component(1, &lam);

    // (g o I) = g at arities 1 and 2
    for args in [vec![z1.clone()], vec![z1.clone(), z2.clone()]] {
        let lhs =
            compose_morphisms_component(&g, &IdentityMorphism, &o, &o, &o, &args).unwrap();
        let rhs = g.component(&o, &o, args.len(), &args);
        assert_eq!(lhs, rhs);
    }

    // (g o f)_1 = g_1 o f_1
    let lhs = compose_morphisms_component(&g, &f, &o, &o, &o, &[z1.clone()]).unwrap();
    assert_eq!(lhs, z1.scale(&rat(6)));

    // (g o f)_2 = g_1(f_2(.,.)) + g_2(f_1, f_1) with f_2 = 0
    let args = vec![z1.clone(), z2.clone()];
    let lhs = compose_morphisms_component(&g, &f, &o, &o, &o, &args).unwrap();
    let rhs = g.component(&o, &o, 2, &[z1.scale(&rat(3)), z2.scale(&rat(3))]);
    assert_eq!(lhs, rhs);
}

// abstract tables and the degree shift --------------------------------------

/// A three-dimensional skew table that is a genuine differential graded Lie
/// algebra: basis e0 (degree 0), e1 (degree 0), e2 (degree 1) with
/// `[e2]_1 = e0`, `[e0,e1] = -e0`, `[e1,e2] = e2`, everything else zero.
/// The signs make the unary map a derivation of the binary bracket
/// (`d[e1,e2] = e0 = [e1, de2]`), so all skew Jacobiators vanish.
fn dgla_table() -> TableOracle {
    let mut entries: BTreeMap<Vec<usize>, Vec<Rat>> = BTreeMap::new();
    let e = |i: usize| -> Vec<Rat> {
        let mut v = vec![rat(0); 3];
        v[i] = rat(1);
        v
    };
    entries.insert(vec![2], e(0));
    entries.insert(vec![0, 1], e(0).iter().map(|v| v * rat(-1)).collect());
    entries.insert(vec![1, 2], e(2));
    TableOracle {
        degrees: vec![0, 0, 1],
        entries,
        skew: true,
        max_arity: 2,
    }
}

fn basis_elt(n: usize, i: usize) -> Vec<Rat> {
    let mut v = vec![rat(0); n];
    v[i] = rat(1);
    v
}

#[test]
fn decalage_round_trip_is_identity() {
    let t = dgla_table();
    assert_eq!(decalage_to_symmetric(&decalage_to_skew(&decalage_to_symmetric(&t))), decalage_to_symmetric(&t));
    assert_eq!(decalage_to_skew(&decalage_to_symmetric(&t)), t);
}

#[test]
fn decalage_binary_sign_oracle() {
    // at arity 2 the shift sign is (-1)^{v1} in the unshifted degree; on the
    // [e1,e2] entry with e1 of degree 0 the sign is +1, while a degree-1
    // leading argument flips
    let t = dgla_table();
    let s = decalage_to_symmetric(&t);
    assert_eq!(
        s.bracket(&[basis_elt(3, 1), basis_elt(3, 2)]),
        t.bracket(&[basis_elt(3, 1), basis_elt(3, 2)])
    );
    // and the unary component is untouched
    assert_eq!(s.bracket(&[basis_elt(3, 2)]), t.bracket(&[basis_elt(3, 2)]));
}

#[test]
fn skew_and_symmetric_jacobiators_vanish_together() {
    let t = dgla_table();
    let s = decalage_to_symmetric(&t);
    let tuples: Vec<Vec<usize>> = vec![
        vec![0],
        vec![2],
        vec![0, 1],
        vec![1, 2],
        vec![0, 1, 2],
        vec![1, 2, 2],
        vec![0, 0, 1],
    ];
    for idxs in &tuples {
        let args_t: Vec<Vec<Rat>> = idxs.iter().map(|&i| basis_elt(3, i)).collect();
        let jt = skew_jacobiator(&t, &args_t).unwrap();
        let js = jacobiator(&s, &args_t).unwrap();
        assert!(t.is_zero(&jt), "skew Jacobiator nonzero on {idxs:?}: {jt:?}");
        assert!(s.is_zero(&js), "symmetric Jacobiator nonzero on {idxs:?}: {js:?}");
    }
    // corrupting one entry breaks both flavors on a common witness tuple
    let mut bad = dgla_table();
    bad.entries.insert(vec![1, 2], basis_elt(3, 2).iter().map(|v| v * rat(-1)).collect());
    let bad_s = decalage_to_symmetric(&bad);
    let mut any_skew = false;
    let mut any_sym = false;
    for idxs in &tuples {
        let args: Vec<Vec<Rat>> = idxs.iter().map(|&i| basis_elt(3, i)).collect();
        any_skew |= !bad.is_zero(&skew_jacobiator(&bad, &args).unwrap());
        any_sym |= !bad_s.is_zero(&jacobiator(&bad_s, &args).unwrap());
    }
    assert!(any_skew && any_sym);
}

#[test]
fn table_oracle_respects_symmetry() {
    let t = dgla_table();
    // skew: [e2,e1] = -(-1)^{1*0}[e1,e2] = -[e1,e2]
    let fwd = t.bracket(&[basis_elt(3, 1), basis_elt(3, 2)]);
    let bwd = t.bracket(&[basis_elt(3, 2), basis_elt(3, 1)]);
    assert_eq!(bwd, t.scale(&fwd, &ratio(-1, 1)));
    // symmetric flavor: {e2', e1'} = (-1)^{0*(-1)}{e1',e2'} with shifted
    // degrees 0-1 = -1 and 1-1 = 0
    let s = decalage_to_symmetric(&t);
    let sf = s.bracket(&[basis_elt(3, 1), basis_elt(3, 2)]);
    let sb = s.bracket(&[basis_elt(3, 2), basis_elt(3, 1)]);
    assert_eq!(sf, sb);
}
