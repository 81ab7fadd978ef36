//! Presymplectic structure: validation, musical maps, Oh-Park brackets,
//! the Hamiltonian tower, and their compatibility with the foliation
//! algebra.

use proptest::prelude::*;

use lr_core::fixtures::{s1, s1_flat};
use lr_core::foliation::{ABarElement, FoliationStructure, QElement};
use lr_core::form::Form;
use lr_core::linfty::{jacobiator, morphism_defect, FoliationOracle};
use lr_core::poly::{rat, Polynomial, Rat};
use lr_core::presym::{
    HamiltonianMorphism, OpBracketOracle, PresymplecticData, PresymplecticError,
};
use lr_core::signs::{koszul_sign, unshuffles};

fn omega_s1() -> Form {
    Form::du(&s1(), 0).wedge(&Form::du(&s1(), 1))
}

fn data_s1() -> PresymplecticData {
    PresymplecticData::validate(FoliationStructure::build_splitting(s1()), &omega_s1()).unwrap()
}

fn data_s1_flat() -> PresymplecticData {
    let om = Form::du(&s1_flat(), 0).wedge(&Form::du(&s1_flat(), 1));
    PresymplecticData::validate(FoliationStructure::build_splitting(s1_flat()), &om).unwrap()
}

// small random scalars and leafwise forms over the S1 chart
fn small_poly() -> impl Strategy<Value = Polynomial> {
    (
        -2i64..=2,
        -2i64..=2,
        -2i64..=2,
        -2i64..=2,
    )
        .prop_map(|(c, a, b, d)| {
            Polynomial::constant(3, rat(c))
                .add(&Polynomial::var(3, 0).scale(&rat(a)))
                .add(&Polynomial::var(3, 1).scale(&rat(b)))
                .add(&Polynomial::var(3, 1).mul(&Polynomial::var(3, 2)).scale(&rat(d)))
        })
}

fn arb_even(frame_fn: fn() -> lr_core::chart::Splitting) -> impl Strategy<Value = ABarElement> {
    // even in the shifted grading: odd form degree, i.e. a dCx-multiple
    small_poly().prop_map(move |p| {
        ABarElement::new(Form::dcx(&frame_fn(), 0).scale_poly(&p)).unwrap()
    })
}

fn arb_odd(frame_fn: fn() -> lr_core::chart::Splitting) -> impl Strategy<Value = ABarElement> {
    small_poly().prop_map(move |p| ABarElement::scalar(&frame_fn(), p))
}

fn arb_abar(frame_fn: fn() -> lr_core::chart::Splitting) -> impl Strategy<Value = ABarElement> {
    prop_oneof![arb_even(frame_fn), arb_odd(frame_fn)]
}

// validation --------------------------------------------------------------

#[test]
fn validation_examples() {
    // Omega = du1 ^ du2: P^{12} = -1, P^{21} = +1, zero diagonal
    let d = data_s1();
    let inv = d.inverse();
    assert!(inv[0][0].is_zero() && inv[1][1].is_zero());
    assert!(inv[0][1].sub(&Polynomial::constant(3, rat(-1))).is_zero());
    assert!(inv[1][0].sub(&Polynomial::constant(3, rat(1))).is_zero());

    // scaling Omega by 2 scales the inverse by 1/2
    let d2 = PresymplecticData::validate(
        FoliationStructure::build_splitting(s1()),
        &omega_s1().scale(&rat(2)),
    )
    .unwrap();
    assert!(d2.inverse()[0][1]
        .sub(&Polynomial::constant(3, Rat::new(
            num_bigint::BigInt::from(-1),
            num_bigint::BigInt::from(2)
        )))
        .is_zero());

    // leaf-dependent coefficient: not closed (the dbar component survives)
    let bad = omega_s1().scale_poly(&Polynomial::var(3, 0));
    let err = PresymplecticData::validate(FoliationStructure::build_splitting(s1()), &bad)
        .err()
        .unwrap();
    assert!(matches!(err, PresymplecticError::NotClosed { component: 0 }));

    // transverse-dependent coefficient: closed but degenerate over polynomials
    let degen = omega_s1().scale_poly(&Polynomial::var(3, 1));
    let err = PresymplecticData::validate(FoliationStructure::build_splitting(s1()), &degen)
        .err()
        .unwrap();
    assert!(matches!(err, PresymplecticError::BadDeterminant));

    // wrong bidegree
    let mixed = Form::du(&s1(), 0).wedge(&Form::dcx(&s1(), 0));
    let err = PresymplecticData::validate(FoliationStructure::build_splitting(s1()), &mixed)
        .err()
        .unwrap();
    assert!(matches!(err, PresymplecticError::NotBidegreeTwoZero { .. }));
}

#[test]
fn bivector_coefficients_are_dbar_closed() {
    assert!(data_s1().bivector_is_dbar_closed());
}

// musical maps ------------------------------------------------------------

#[test]
fn sharp_oracles() {
    let d = data_s1();
    // frozen index convention: sharp(du^alpha) = P^{alpha beta} Vbar_beta
    let s1f = d.sharp(&Form::du(&s1(), 0)).unwrap();
    assert!(s1f
        .sub(&QElement::frame_class(&s1(), 1).scale(&rat(-1)))
        .is_zero());
    let s2f = d.sharp(&Form::du(&s1(), 1)).unwrap();
    assert!(s2f.sub(&QElement::frame_class(&s1(), 0)).is_zero());

    // full-pipeline pairing of coordinate differentials
    let u1 = ABarElement::scalar(&s1(), Polynomial::var(3, 1));
    let u2 = ABarElement::scalar(&s1(), Polynomial::var(3, 2));
    let p = d.omega_pairing(&d.d1(&u1), &d.d1(&u2)).unwrap();
    assert!(p.sub(&ABarElement::scalar(&s1(), Polynomial::one(3))).is_zero());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    // sharp and flat are mutually inverse
    #[test]
    fn sharp_flat_roundtrip(l in arb_abar(s1), alpha in 0usize..2) {
        let d = data_s1();
        let w = Form::du(&s1(), alpha).wedge(l.form());
        let z = d.sharp(&w).unwrap();
        prop_assert!(d.sharp(&d.flat(&z)).unwrap().sub(&z).is_zero());
        prop_assert!(d.flat(&d.sharp(&d.flat(&z)).unwrap()).sub(&d.flat(&z)).is_zero());
    }
}

// op brackets -------------------------------------------------------------

#[test]
fn op_bracket_oracles() {
    let d = data_s1();
    // unary bracket is dbar
    let l = ABarElement::new(
        Form::dcx(&s1(), 0).scale_poly(&Polynomial::var(3, 1)),
    )
    .unwrap();
    assert!(d.op_bracket(&[l.clone()]).unwrap().sub(&l.dbar()).is_zero());

    // frozen binary value: {u1, u2} = 2 (both orderings of the full
    // symmetrization contribute +<d1 u1|d1 u2>_Omega = +1)
    let u1 = ABarElement::scalar(&s1(), Polynomial::var(3, 1));
    let u2 = ABarElement::scalar(&s1(), Polynomial::var(3, 2));
    let b = d.op_bracket(&[u1.clone(), u2.clone()]).unwrap();
    assert!(b
        .sub(&ABarElement::scalar(&s1(), Polynomial::constant(3, rat(2))))
        .is_zero());

    // flat case: every bracket of arity >= 3 contains an R-sharp factor
    let df = data_s1_flat();
    let x = ABarElement::scalar(&s1_flat(), Polynomial::var(3, 0));
    let e = ABarElement::new(Form::dcx(&s1_flat(), 0)).unwrap();
    assert!(df.op_bracket(&[x.clone(), e.clone(), x.clone()]).unwrap().is_zero());
    assert!(df
        .op_bracket(&[e.clone(), e.clone(), x.clone(), x.clone()])
        .unwrap()
        .is_zero());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    // graded symmetry of the brackets in the shifted grading
    #[test]
    fn op_bracket_is_graded_symmetric(
        k in 2usize..=3,
        ls in prop::collection::vec(arb_abar(s1), 3..=3),
        seed in 0usize..6,
    ) {
        let d = data_s1();
        let args = &ls[..k];
        let degs: Vec<i64> = args
            .iter()
            .map(|l| l.degree().map(|x| x as i64 - 1).unwrap_or(0))
            .collect();
        let perms = lr_core::signs::all_permutations(k);
        let perm = &perms[seed % perms.len()];
        let permuted: Vec<ABarElement> =
            perm.iter().map(|&i| args[i].clone()).collect();
        let alpha = koszul_sign(perm, &degs);
        let lhs = d.op_bracket(&permuted).unwrap();
        let rhs = d.op_bracket(args).unwrap().scale(&rat(alpha));
        prop_assert!(lhs.sub(&rhs).is_zero());
    }

    // the Oh-Park tower is an L-infinity[1] structure: Jacobiators vanish
    #[test]
    fn op_jacobiators_vanish(
        k in 1usize..=5,
        ls in prop::collection::vec(arb_abar(s1), 5..=5),
    ) {
        let d = data_s1();
        let o = OpBracketOracle { data: &d, max_arity: 6 };
        let j = jacobiator(&o, &ls[..k]).unwrap();
        prop_assert!(j.is_zero(), "op Jacobiator nonzero at k={}", k);
    }

    // flat (Poisson) limit: the binary bracket satisfies strict graded
    // Jacobi, with no homotopy corrections
    #[test]
    fn flat_binary_strict_jacobi(ls in prop::collection::vec(arb_abar(s1_flat), 3..=3)) {
        let d = data_s1_flat();
        let degs: Vec<i64> = ls
            .iter()
            .map(|l| l.degree().map(|x| x as i64 - 1).unwrap_or(0))
            .collect();
        let mut acc = ABarElement::zero(&s1_flat());
        for sigma in unshuffles(2, 1) {
            let alpha = koszul_sign(&sigma, &degs);
            let inner = d
                .op_bracket(&[ls[sigma[0]].clone(), ls[sigma[1]].clone()])
                .unwrap();
            if inner.is_zero() {
                continue;
            }
            let outer = d.op_bracket(&[inner, ls[sigma[2]].clone()]).unwrap();
            acc = acc.add(&outer.scale(&rat(alpha)));
        }
        prop_assert!(acc.is_zero());
    }
}

// the Hamiltonian tower ---------------------------------------------------

#[test]
fn hamiltonian_tower_oracles() {
    let d = data_s1();
    // frozen k = 1 value on a coordinate: X_1(u1) = {u1, u2} Vbar_2 = 2 Vbar_2
    let u1 = ABarElement::scalar(&s1(), Polynomial::var(3, 1));
    let x1 = d.hamiltonian_tower(&[u1]).unwrap();
    assert!(x1
        .sub(&QElement::frame_class(&s1(), 1).scale(&rat(2)))
        .is_zero());

    // constants are in the kernel
    let c = ABarElement::scalar(&s1(), Polynomial::constant(3, rat(5)));
    assert!(d.hamiltonian_tower(&[c]).unwrap().is_zero());

    // flat case: the higher tower vanishes
    let df = data_s1_flat();
    let e = ABarElement::new(Form::dcx(&s1_flat(), 0)).unwrap();
    assert!(df.hamiltonian_tower(&[e.clone(), e.clone()]).unwrap().is_zero());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    // Lemma (22): the tower of an even element is anchored compatibly with
    // the op bracket, up to the curvature double-insertion correction
    #[test]
    fn lemma22_residual_vanishes(
        k in 1usize..=3,
        l in arb_even(s1),
        lp in arb_abar(s1),
        f in small_poly(),
    ) {
        let d = data_s1();
        // on generators: functions (trivial by construction), dbar-exact
        // one-forms (the substantive case), and then random elements
        let fs = ABarElement::scalar(&s1(), f);
        prop_assert!(d.lemma22_defect(k, &l, &fs).unwrap().is_zero());
        prop_assert!(d.lemma22_defect(k, &l, &fs.dbar()).unwrap().is_zero(),
            "lemma-22 residual nonzero on dbar-exact forms at k={}", k);
        prop_assert!(d.lemma22_defect(k, &l, &lp).unwrap().is_zero(),
            "lemma-22 residual nonzero at k={}", k);
    }

    // the tower is a morphism of homotopy algebras: its defect vanishes
    #[test]
    fn tower_morphism_defect_vanishes(
        m in 1usize..=3,
        ls in prop::collection::vec(arb_abar(s1), 3..=3),
    ) {
        let d = data_s1();
        let src = OpBracketOracle { data: &d, max_arity: 6 };
        let tgt = FoliationOracle::new(FoliationStructure::build_splitting(s1()));
        let fam = HamiltonianMorphism { data: &d };
        let k = morphism_defect(&fam, &src, &tgt, &ls[..m]).unwrap();
        prop_assert!(k.is_zero(), "tower morphism defect nonzero at m={}", m);
    }
}
