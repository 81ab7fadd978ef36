//! Frölicher–Nijenhuis calculus of form-valued vector fields.
//!
//! A form-valued vector field `Z = sum omega_a (x) d/dz^a` acts on forms in
//! two ways: the insertion `i_Z` (an algebraic derivation of degree `|Z|-1`)
//! and the Lie derivative `L_Z = [i_Z, d]` (degree `|Z|`). Two brackets make
//! the space a calculus:
//! - the Nijenhuis–Richardson bracket `[Z1,Z2]_nr`, controlling insertions:
//!   `[i_{Z1}, i_{Z2}] = i_{[Z1,Z2]_nr}`;
//! - the Frölicher–Nijenhuis bracket `[[Z1,Z2]]`, controlling Lie
//!   derivatives: `[L_{Z1}, L_{Z2}] = L_{[[Z1,Z2]]}`.
//!
//! # Design notes
//! - The FN bracket is *reconstructed* from the commutator of Lie
//!   derivatives acting on coordinate functions: a form-valued vector field
//!   `W` is recovered from `L_W` via `omega_a = L_W(z^a)`. That keeps the
//!   implementation independent of any closed component formula, so the
//!   closed-form identities in the test suite are genuine cross-checks.
//! - Brackets are defined degree-by-degree on homogeneous components and
//!   extended bilinearly, so inhomogeneous arguments are fine.

use crate::chart::Splitting;
use crate::form::{Form, VectorField};
use crate::poly::{Polynomial, Rat};
use std::collections::BTreeMap;

/// A polynomial form-valued vector field in the adapted coframe of a fixed
/// splitting. Keys are `(du-mask, dCx-mask, coordinate index)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormVector {
    frame: Splitting,
    terms: BTreeMap<(u32, u32, usize), Polynomial>,
}

impl FormVector {
    pub fn zero(frame: &Splitting) -> FormVector {
        FormVector {
            frame: frame.clone(),
            terms: BTreeMap::new(),
        }
    }

    /// `omega (x) X` for a form and a plain vector field.
    pub fn tensor(omega: &Form, x: &VectorField) -> FormVector {
        assert_eq!(omega.chart(), x.chart(), "tensor factors on different charts");
        let mut out = FormVector::zero(omega.frame());
        for a in 0..x.chart().n_coords() {
            for (&(c, t), p) in omega.terms() {
                out.push((c, t, a), p.mul(x.comp(a)));
            }
        }
        out
    }

    /// Degree-zero embedding of a plain vector field.
    pub fn from_vector(frame: &Splitting, x: &VectorField) -> FormVector {
        FormVector::tensor(&Form::scalar(frame, Polynomial::one(x.chart().n_coords())), x)
    }

    pub fn frame(&self) -> &Splitting {
        &self.frame
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32, usize), &Polynomial)> {
        self.terms.iter()
    }

    pub(crate) fn push(&mut self, key: (u32, u32, usize), p: Polynomial) {
        if p.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(p);
            }
            std::collections::btree_map::Entry::Occupied(e) => {
                let s = e.get().add(&p);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.into_mut() = s;
                }
            }
        }
    }

    fn assert_same_frame(&self, other: &FormVector) {
        assert_eq!(
            self.frame, other.frame,
            "form-valued vector fields in different adapted coframes"
        );
    }

    pub fn add(&self, other: &FormVector) -> FormVector {
        self.assert_same_frame(other);
        let mut out = self.clone();
        for (k, p) in &other.terms {
            out.push(*k, p.clone());
        }
        out
    }

    pub fn neg(&self) -> FormVector {
        let mut out = FormVector::zero(&self.frame);
        for (k, p) in &self.terms {
            out.terms.insert(*k, p.neg());
        }
        out
    }

    pub fn sub(&self, other: &FormVector) -> FormVector {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rat) -> FormVector {
        let mut out = FormVector::zero(&self.frame);
        for (k, p) in &self.terms {
            out.push(*k, p.scale(c));
        }
        out
    }

    /// Left wedge by a form: `omega ^ (lambda (x) X) = (omega ^ lambda) (x) X`.
    pub fn wedge_form(&self, omega: &Form) -> FormVector {
        assert_eq!(omega.frame(), &self.frame, "wedge factor in different frame");
        let mut out = FormVector::zero(&self.frame);
        for a in 0..self.frame.chart().n_coords() {
            let coeff = omega.wedge(&self.coeff_form(a));
            for (&(c, t), p) in coeff.terms() {
                out.push((c, t, a), p.clone());
            }
        }
        out
    }

    /// The form coefficient of `d/dz^a`.
    pub fn coeff_form(&self, a: usize) -> Form {
        let mut out = Form::zero(&self.frame);
        for (&(c, t, b), p) in &self.terms {
            if b == a {
                out.push((c, t), p.clone());
            }
        }
        out
    }

    /// Build from per-coordinate form coefficients.
    pub fn from_coeff_forms(frame: &Splitting, coeffs: &[Form]) -> FormVector {
        assert_eq!(coeffs.len(), frame.chart().n_coords());
        let mut out = FormVector::zero(frame);
        for (a, omega) in coeffs.iter().enumerate() {
            assert_eq!(omega.frame(), frame, "coefficient in different frame");
            for (&(c, t), p) in omega.terms() {
                out.push((c, t, a), p.clone());
            }
        }
        out
    }

    /// Projection onto the component of form degree `k`.
    pub fn degree_project(&self, k: u32) -> FormVector {
        let mut out = FormVector::zero(&self.frame);
        for (key, p) in &self.terms {
            if key.0.count_ones() + key.1.count_ones() == k {
                out.terms.insert(*key, p.clone());
            }
        }
        out
    }

    /// Form degrees present, ascending.
    pub fn degrees(&self) -> Vec<u32> {
        let mut degs: Vec<u32> = self
            .terms
            .keys()
            .map(|k| k.0.count_ones() + k.1.count_ones())
            .collect();
        degs.sort_unstable();
        degs.dedup();
        degs
    }

    /// Form degree if homogeneous (`None` for zero or mixed).
    pub fn homogeneous_degree(&self) -> Option<u32> {
        match self.degrees().as_slice() {
            [d] => Some(*d),
            _ => None,
        }
    }

    /// `Z(f)` for a scalar: the form `sum omega_a d_a f`.
    pub fn apply_scalar(&self, f: &Polynomial) -> Form {
        let mut out = Form::zero(&self.frame);
        for (&(c, t, a), p) in &self.terms {
            out.push((c, t), p.mul(&f.differentiate(a)));
        }
        out
    }

    /// Rewrite in the adapted coframe of another splitting of the same chart.
    pub fn reframe(&self, target: &Splitting) -> FormVector {
        let n = self.frame.chart().n_coords();
        let coeffs: Vec<Form> = (0..n).map(|a| self.coeff_form(a).reframe(target)).collect();
        FormVector::from_coeff_forms(target, &coeffs)
    }

    /// Keep only terms with a leafwise form part (no `du`) and a leaf-tangent
    /// vector part (`d/dx^i`). This is a raw truncation used by tests; the
    /// foliation layer's quotient map is different (it rewrites `d/du^alpha`
    /// through the frame fields).
    pub fn leaf_project(&self) -> FormVector {
        let n_leaf = self.frame.chart().n_leaf();
        let mut out = FormVector::zero(&self.frame);
        for (&(c, t, a), p) in &self.terms {
            if c == 0 && a < n_leaf {
                out.terms.insert((c, t, a), p.clone());
            }
        }
        out
    }
}

/// Insertion `i_Z omega`: for homogeneous `Z` of form degree `z` this is the
/// algebraic derivation of degree `z - 1` with `i_Z f = 0` and
/// `i_Z(d g) = Z(g)`; inhomogeneous `Z` is handled componentwise.
pub fn insertion(z: &FormVector, omega: &Form) -> Form {
    assert_eq!(z.frame(), omega.frame(), "insertion across frames");
    let frame = z.frame().clone();
    let chart = frame.chart().clone();
    let mut out = Form::zero(&frame);
    for deg in z.degrees() {
        let zk = z.degree_project(deg);
        let odd = (deg as i64 - 1).rem_euclid(2) == 1;
        // images of the coframe generators: i_Z(du^alpha) = Z(u^alpha) and
        // i_Z(dCx^i) = Z(x^i) - V_alpha^i Z(u^alpha)
        let img_du: Vec<Form> = (0..chart.n_trans())
            .map(|alpha| zk.coeff_form(chart.trans_index(alpha)))
            .collect();
        let img_dcx: Vec<Form> = (0..chart.n_leaf())
            .map(|i| {
                let mut f = zk.coeff_form(i);
                for alpha in 0..chart.n_trans() {
                    f = f.sub(
                        &zk.coeff_form(chart.trans_index(alpha))
                            .scale_poly(frame.v(alpha, i)),
                    );
                }
                f
            })
            .collect();
        let contrib = omega.extend_derivation(
            &frame,
            odd,
            |_p| Form::zero(&frame),
            |alpha| img_du[alpha].clone(),
            |i| img_dcx[i].clone(),
        );
        out = out.add(&contrib);
    }
    out
}

/// Insertion acting on a form-valued vector field (on its form part only).
pub fn insertion_vec(z: &FormVector, w: &FormVector) -> FormVector {
    let frame = w.frame().clone();
    let n = frame.chart().n_coords();
    let coeffs: Vec<Form> = (0..n).map(|a| insertion(z, &w.coeff_form(a))).collect();
    FormVector::from_coeff_forms(&frame, &coeffs)
}

/// Nijenhuis–Richardson bracket
/// `[Z1,Z2]_nr = i_{Z1} Z2 - (-1)^{(z1-1)(z2-1)} i_{Z2} Z1`
/// (degrees of homogeneous components; bilinear in general).
pub fn nr_bracket(z1: &FormVector, z2: &FormVector) -> FormVector {
    let frame = z1.frame().clone();
    let mut out = FormVector::zero(&frame);
    for d1 in z1.degrees() {
        for d2 in z2.degrees() {
            let a = z1.degree_project(d1);
            let b = z2.degree_project(d2);
            let first = insertion_vec(&a, &b);
            let mut second = insertion_vec(&b, &a);
            if ((d1 as i64 - 1) * (d2 as i64 - 1)).rem_euclid(2) == 1 {
                second = second.neg();
            }
            out = out.add(&first.sub(&second));
        }
    }
    out
}

/// Lie derivative `L_Z = [i_Z, d] = i_Z d - (-1)^{z-1} d i_Z`.
pub fn lie_derivative(z: &FormVector, omega: &Form) -> Form {
    let mut out = Form::zero(omega.frame());
    for deg in z.degrees() {
        let zk = z.degree_project(deg);
        let first = insertion(&zk, &omega.exterior_d());
        let mut second = insertion(&zk, omega).exterior_d();
        if (deg as i64 - 1).rem_euclid(2) == 0 {
            second = second.neg();
        }
        out = out.add(&first.add(&second));
    }
    out
}

/// Form degree of a homogeneous form-valued vector field (0 for the zero
/// field). Panics on mixed-degree input: the identity defects below are only
/// meaningful for homogeneous arguments.
fn homog_degree(z: &FormVector) -> i64 {
    if z.is_zero() {
        return 0;
    }
    z.homogeneous_degree()
        .expect("identity defect requires homogeneous input") as i64
}

fn homog_form_degree(omega: &Form) -> i64 {
    if omega.is_zero() {
        return 0;
    }
    omega
        .homogeneous_degree()
        .expect("identity defect requires homogeneous input") as i64
}

fn sign(e: i64) -> Rat {
    if e.rem_euclid(2) == 0 {
        crate::poly::rat(1)
    } else {
        crate::poly::rat(-1)
    }
}

/// Defect of `i_{omega Z} = omega i_Z` applied to a test form.
pub fn defect_insertion_module(omega: &Form, z: &FormVector, lambda: &Form) -> Form {
    let wz = z.wedge_form(omega);
    insertion(&wz, lambda).sub(&omega.wedge(&insertion(z, lambda)))
}

/// Defect of `L_{omega Z} = omega L_Z + (-)^{omega+Z} d omega i_Z` applied to
/// a test form.
pub fn defect_lie_module(omega: &Form, z: &FormVector, lambda: &Form) -> Form {
    let w = homog_form_degree(omega);
    let zd = homog_degree(z);
    let wz = z.wedge_form(omega);
    lie_derivative(&wz, lambda)
        .sub(&omega.wedge(&lie_derivative(z, lambda)))
        .sub(
            &omega
                .exterior_d()
                .wedge(&insertion(z, lambda))
                .scale(&sign(w + zd)),
        )
}

/// Defect of `[i_Z, L_Y] = L_{i_Z Y} - (-)^{Y-1} i_{[[Z,Y]]}` applied to a
/// test form (the commutator is graded with `|i_Z| = z - 1`, `|L_Y| = y`).
/// The exponent on the last term is the *shifted* degree of `Y`: with the
/// plain degree the identity already fails for ordinary vector fields, where
/// it must reduce to the Cartan formula `[i_X, L_Y] = i_{[X,Y]}`.
pub fn defect_insertion_lie_commutator(z: &FormVector, y: &FormVector, lambda: &Form) -> Form {
    let zd = homog_degree(z);
    let yd = homog_degree(y);
    let lhs = insertion(z, &lie_derivative(y, lambda)).sub(
        &lie_derivative(y, &insertion(z, lambda)).scale(&sign((zd - 1) * yd)),
    );
    let rhs = lie_derivative(&insertion_vec(z, y), lambda)
        .sub(&insertion(&fn_bracket(z, y), lambda).scale(&sign(yd - 1)));
    lhs.sub(&rhs)
}

/// Defect of
/// `[omega Z, Y]_nr = omega [Z,Y]_nr - (-)^{(omega+Z-1)(Y-1)} (i_Y omega) Z`.
pub fn defect_nr_module(omega: &Form, z: &FormVector, y: &FormVector) -> FormVector {
    let w = homog_form_degree(omega);
    let zd = homog_degree(z);
    let yd = homog_degree(y);
    let wz = z.wedge_form(omega);
    nr_bracket(&wz, y)
        .sub(&nr_bracket(z, y).wedge_form(omega))
        .add(
            &z.wedge_form(&insertion(y, omega))
                .scale(&sign((w + zd - 1) * (yd - 1))),
        )
}

/// Defect of
/// `[[omega Z, Y]] = omega [[Z,Y]] - (-)^{(omega+Z)Y} (L_Y omega) Z
///                 + (-)^{omega+Z} d omega i_Z Y`.
pub fn defect_fn_module(omega: &Form, z: &FormVector, y: &FormVector) -> FormVector {
    let w = homog_form_degree(omega);
    let zd = homog_degree(z);
    let yd = homog_degree(y);
    let wz = z.wedge_form(omega);
    fn_bracket(&wz, y)
        .sub(&fn_bracket(z, y).wedge_form(omega))
        .add(
            &z.wedge_form(&lie_derivative(y, omega))
                .scale(&sign((w + zd) * yd)),
        )
        .sub(
            &insertion_vec(z, y)
                .wedge_form(&omega.exterior_d())
                .scale(&sign(w + zd)),
        )
}

/// Defect of
/// `i_X [[Z,Y]] = [[i_X Z, Y]] + (-)^{(X-1)Z} [[Z, i_X Y]]
///             + (-)^Z i_{[[X,Z]]} Y - (-)^{Y(Z-1)} i_{[[X,Y]]} Z`.
pub fn defect_insertion_of_fn(x: &FormVector, z: &FormVector, y: &FormVector) -> FormVector {
    let xd = homog_degree(x);
    let zd = homog_degree(z);
    let yd = homog_degree(y);
    insertion_vec(x, &fn_bracket(z, y))
        .sub(&fn_bracket(&insertion_vec(x, z), y))
        .sub(&fn_bracket(z, &insertion_vec(x, y)).scale(&sign((xd - 1) * zd)))
        .sub(&insertion_vec(&fn_bracket(x, z), y).scale(&sign(zd)))
        .add(&insertion_vec(&fn_bracket(x, y), z).scale(&sign(yd * (zd - 1))))
}

/// Defect of
/// `[[X, [Z,Y]_nr]] = [[[X,Z]], Y]_nr
///   + (-)^{X(Z-1)} ([Z, [[X,Y]]]_nr - [[i_Z X, Y]])
///   + (-)^{(X+Z-1)(Y-1)} [[i_Y X, Z]]`.
pub fn defect_fn_of_nr(x: &FormVector, z: &FormVector, y: &FormVector) -> FormVector {
    let xd = homog_degree(x);
    let zd = homog_degree(z);
    let yd = homog_degree(y);
    fn_bracket(x, &nr_bracket(z, y))
        .sub(&nr_bracket(&fn_bracket(x, z), y))
        .sub(
            &nr_bracket(z, &fn_bracket(x, y))
                .sub(&fn_bracket(&insertion_vec(z, x), y))
                .scale(&sign(xd * (zd - 1))),
        )
        .sub(&fn_bracket(&insertion_vec(y, x), z).scale(&sign((xd + zd - 1) * (yd - 1))))
}

/// Recover the unique `(Z, Y)` with `Delta = i_Z + L_Y` from a homogeneous
/// graded derivation of degree `ell` given by its action on forms:
/// `Y` is read off functions (`L_Y f = Delta f`), then `Z` off differentials
/// of functions (`i_Z df = (Delta - L_Y)(df)`).
pub fn decompose_derivation(
    frame: &Splitting,
    delta: &dyn Fn(&Form) -> Form,
) -> (FormVector, FormVector) {
    let n = frame.chart().n_coords();
    let y_coeffs: Vec<Form> = (0..n)
        .map(|a| delta(&Form::scalar(frame, Polynomial::var(n, a))))
        .collect();
    let y = FormVector::from_coeff_forms(frame, &y_coeffs);
    let z_coeffs: Vec<Form> = (0..n)
        .map(|a| {
            let dza = Form::scalar(frame, Polynomial::var(n, a)).exterior_d();
            delta(&dza).sub(&lie_derivative(&y, &dza))
        })
        .collect();
    let z = FormVector::from_coeff_forms(frame, &z_coeffs);
    (z, y)
}

/// Frölicher–Nijenhuis bracket, reconstructed from
/// `L_{[[Z1,Z2]]} = [L_{Z1}, L_{Z2}]` by reading off coordinate functions:
/// the coefficient form of `d/dz^a` in `W` is `L_W(z^a)`.
pub fn fn_bracket(z1: &FormVector, z2: &FormVector) -> FormVector {
    let frame = z1.frame().clone();
    let chart = frame.chart().clone();
    let n = chart.n_coords();
    let mut out = FormVector::zero(&frame);
    for d1 in z1.degrees() {
        for d2 in z2.degrees() {
            let a = z1.degree_project(d1);
            let b = z2.degree_project(d2);
            let sign = if (d1 * d2) % 2 == 1 { -1 } else { 1 };
            let coeffs: Vec<Form> = (0..n)
                .map(|idx| {
                    let f = Form::scalar(&frame, Polynomial::var(n, idx));
                    let fwd = lie_derivative(&a, &lie_derivative(&b, &f));
                    let mut bwd = lie_derivative(&b, &lie_derivative(&a, &f));
                    if sign < 0 {
                        bwd = bwd.neg();
                    }
                    fwd.sub(&bwd)
                })
                .collect();
            out = out.add(&FormVector::from_coeff_forms(&frame, &coeffs));
        }
    }
    out
}
