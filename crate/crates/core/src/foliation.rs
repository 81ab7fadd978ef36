//! The homotopy Lie-Rinehart structure of a foliation with a chosen
//! splitting.
//!
//! Fix a chart with involutive leaf distribution `C` (spanned by the
//! `d/dx^i`) and a complementary distribution `V` (spanned by the frame
//! fields `V_alpha`). This module builds:
//! - the projectors `P^C = dCx^i (x) d/dx^i` and `P^V = du^alpha (x)
//!   V_alpha` and the curvature `R = 1/2 [[P^C, P^C]]`;
//! - the splitting `d = d0 + d1 + d2` of the de Rham differential by
//!   `du`-count, with `d0 = dbar = d^C - i_R`, `d1 = d^V + 2 i_R`,
//!   `d2 = -i_R`;
//! - the anchors and brackets of the homotopy Lie-Rinehart algebra on
//!   `A = leafwise forms` and `Q = (leafwise forms) (x) (transverse
//!   classes)[1]`, together with the evaluation pairing identifying forms
//!   with `du`-count `r` with `r`-ary symmetric `A`-multilinear maps on `Q`.
//!
//! # Design notes
//! - `Q`-elements are stored in the frame basis `V_alpha`-classes with
//!   leafwise form coefficients; the *shifted* degree (form degree minus
//!   one) is the degree every Koszul sign in anchors and brackets consumes.
//!   The shift happens here and only here.
//! - Each identity has two independent computational routes (e.g. the
//!   componentwise Bott differential vs. the FN-bracket formulas for `dbar`;
//!   the closed bracket formulas vs. the pairing/`d_k` evaluation) and the
//!   check functions compare them exactly.

use crate::chart::Splitting;
use crate::fnc::{fn_bracket, insertion, lie_derivative, nr_bracket, FormVector};
use crate::form::{Form, VectorField};
use crate::poly::{rat, Polynomial, Rat};
use std::collections::BTreeMap;

use thiserror::Error;

/// Errors raised by the foliation layer.
#[derive(Debug, Error)]
pub enum FoliationError {
    #[error("form has du-components and is not leafwise")]
    NotLeafwise,
    #[error("pairing arity mismatch: form has du-count {form}, got {args} arguments")]
    ArityMismatch { form: u32, args: usize },
    #[error("argument must be homogeneous")]
    Inhomogeneous,
}

/// An element of `A`: a leafwise form (no `du` factors).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ABarElement(Form);

impl ABarElement {
    pub fn new(form: Form) -> Result<ABarElement, FoliationError> {
        if form.terms().any(|(&(c, _), _)| c != 0) {
            return Err(FoliationError::NotLeafwise);
        }
        Ok(ABarElement(form))
    }

    /// Leafwise projection of an arbitrary form (kills all `du`-terms).
    pub fn project(form: &Form) -> ABarElement {
        ABarElement(form.project_leafwise())
    }

    pub fn zero(frame: &Splitting) -> ABarElement {
        ABarElement(Form::zero(frame))
    }

    pub fn scalar(frame: &Splitting, p: Polynomial) -> ABarElement {
        ABarElement(Form::scalar(frame, p))
    }

    pub fn form(&self) -> &Form {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn add(&self, other: &ABarElement) -> ABarElement {
        ABarElement(self.0.add(&other.0))
    }

    pub fn neg(&self) -> ABarElement {
        ABarElement(self.0.neg())
    }

    pub fn sub(&self, other: &ABarElement) -> ABarElement {
        ABarElement(self.0.sub(&other.0))
    }

    pub fn scale(&self, c: &Rat) -> ABarElement {
        ABarElement(self.0.scale(c))
    }

    pub fn wedge(&self, other: &ABarElement) -> ABarElement {
        ABarElement(self.0.wedge(&other.0))
    }

    /// Form degree if homogeneous (`None` for zero or mixed).
    pub fn degree(&self) -> Option<u32> {
        self.0.homogeneous_degree()
    }

    /// Leafwise exterior differential `dbar`: in adapted coordinates the
    /// Chevalley-Eilenberg differential of the leaf algebroid is the
    /// fiberwise de Rham differential in the `x`-directions.
    pub fn dbar(&self) -> ABarElement {
        let frame = self.0.frame().clone();
        let n = frame.chart().n_leaf();
        let mut out = Form::zero(&frame);
        for (&(_, tmask), p) in self.0.terms() {
            for i in 0..n {
                let df = p.differentiate(i);
                if df.is_zero() {
                    continue;
                }
                let contrib = Form::dcx(&frame, i).wedge(&Form::basis(&frame, 0, tmask));
                out = out.add(&contrib.scale_poly(&df));
            }
        }
        ABarElement(out)
    }
}

/// An element of `Q`: leafwise form coefficients against the classes of the
/// frame fields `V_alpha`. Key is `(dCx-mask, alpha)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QElement {
    frame: Splitting,
    terms: BTreeMap<(u32, usize), Polynomial>,
}

impl QElement {
    pub fn zero(frame: &Splitting) -> QElement {
        QElement {
            frame: frame.clone(),
            terms: BTreeMap::new(),
        }
    }

    /// The class of the frame field `V_alpha`.
    pub fn frame_class(frame: &Splitting, alpha: usize) -> QElement {
        let mut q = QElement::zero(frame);
        q.push((0, alpha), Polynomial::one(frame.chart().n_coords()));
        q
    }

    /// `lambda (x) V_alpha-class`.
    pub fn from_component(alpha: usize, lambda: &ABarElement) -> QElement {
        let mut q = QElement::zero(lambda.form().frame());
        for (&(_, t), p) in lambda.form().terms() {
            q.push((t, alpha), p.clone());
        }
        q
    }

    pub fn frame(&self) -> &Splitting {
        &self.frame
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn push(&mut self, key: (u32, usize), p: Polynomial) {
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

    pub fn add(&self, other: &QElement) -> QElement {
        assert_eq!(self.frame, other.frame, "Q-elements in different frames");
        let mut out = self.clone();
        for (k, p) in &other.terms {
            out.push(*k, p.clone());
        }
        out
    }

    pub fn neg(&self) -> QElement {
        let mut out = QElement::zero(&self.frame);
        for (k, p) in &self.terms {
            out.terms.insert(*k, p.neg());
        }
        out
    }

    pub fn sub(&self, other: &QElement) -> QElement {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rat) -> QElement {
        let mut out = QElement::zero(&self.frame);
        for (k, p) in &self.terms {
            out.push(*k, p.scale(c));
        }
        out
    }

    /// Left module action `lambda . Z` of a leafwise form.
    pub fn wedge_abar(&self, lambda: &ABarElement) -> QElement {
        let mut out = QElement::zero(&self.frame);
        for alpha in 0..self.frame.chart().n_trans() {
            let comp = lambda.form().wedge(self.component(alpha).form());
            for (&(_, t), p) in comp.terms() {
                out.push((t, alpha), p.clone());
            }
        }
        out
    }

    /// The leafwise form coefficient of the `V_alpha` class.
    pub fn component(&self, alpha: usize) -> ABarElement {
        let mut f = Form::zero(&self.frame);
        for (&(t, a), p) in &self.terms {
            if a == alpha {
                f.push((0, t), p.clone());
            }
        }
        ABarElement(f)
    }

    /// Form degree of the coefficients, if homogeneous.
    pub fn form_degree(&self) -> Option<u32> {
        let mut deg = None;
        for k in self.terms.keys() {
            let d = k.0.count_ones();
            match deg {
                None => deg = Some(d),
                Some(p) if p != d => return None,
                _ => {}
            }
        }
        deg
    }

    /// Shifted degree (form degree minus one); this is the degree all Koszul
    /// signs of the structure operations consume. `None` for zero or mixed.
    pub fn shifted_degree(&self) -> Option<i64> {
        self.form_degree().map(|d| d as i64 - 1)
    }

    /// Embed into form-valued vector fields via the splitting:
    /// the class of `V_alpha` goes to the actual frame field `V_alpha`.
    pub fn embed(&self) -> FormVector {
        let mut out = FormVector::zero(&self.frame);
        for alpha in 0..self.frame.chart().n_trans() {
            let comp = self.component(alpha);
            if comp.is_zero() {
                continue;
            }
            let va = VectorField::frame_field(&self.frame, alpha);
            out = out.add(&FormVector::tensor(comp.form(), &va));
        }
        out
    }

    /// The componentwise Bott-connection differential: the frame classes are
    /// flat for the Bott connection in adapted coordinates, so `dbar` acts on
    /// the leafwise coefficients only.
    pub fn dbar(&self) -> QElement {
        let mut out = QElement::zero(&self.frame);
        for alpha in 0..self.frame.chart().n_trans() {
            let d = self.component(alpha).dbar();
            out = out.add(&QElement::from_component(alpha, &d));
        }
        out
    }
}

/// Quotient map `Lambda (x) X -> Q`: kill `du`-factors of the form part, send
/// `d/dx^i` to zero and `d/du^alpha` to the class of `V_alpha` (they agree
/// modulo the leaf distribution).
pub fn overline(z: &FormVector) -> QElement {
    let frame = z.frame().clone();
    let n = frame.chart().n_leaf();
    let mut out = QElement::zero(&frame);
    for (&(c, t, a), p) in z.terms() {
        if c != 0 || a < n {
            continue;
        }
        out.push((t, a - n), p.clone());
    }
    out
}

fn sign(e: i64) -> Rat {
    if e.rem_euclid(2) == 0 {
        rat(1)
    } else {
        rat(-1)
    }
}

/// The geometric structure: projectors and curvature of a splitting.
#[derive(Clone, Debug)]
pub struct FoliationStructure {
    splitting: Splitting,
    p_c: FormVector,
    p_v: FormVector,
    curvature: FormVector,
}

impl FoliationStructure {
    /// Build projectors and curvature; validates the structural invariants
    /// (complementarity and the bidegree location of the curvature).
    pub fn build_splitting(splitting: Splitting) -> FoliationStructure {
        let chart = splitting.chart().clone();
        let mut p_c = FormVector::zero(&splitting);
        for i in 0..chart.n_leaf() {
            p_c = p_c.add(&FormVector::tensor(
                &Form::dcx(&splitting, i),
                &VectorField::coordinate(chart.clone(), i),
            ));
        }
        let mut p_v = FormVector::zero(&splitting);
        for alpha in 0..chart.n_trans() {
            p_v = p_v.add(&FormVector::tensor(
                &Form::du(&splitting, alpha),
                &VectorField::frame_field(&splitting, alpha),
            ));
        }
        let curvature = fn_bracket(&p_c, &p_c).scale(&crate::poly::ratio(1, 2));
        let f = FoliationStructure {
            splitting,
            p_c,
            p_v,
            curvature,
        };
        f.validate();
        f
    }

    fn validate(&self) {
        // P^C + P^V is the identity tensor dz^a (x) d/dz^a rewritten in the
        // adapted coframe.
        let chart = self.splitting.chart().clone();
        let mut identity = FormVector::zero(&self.splitting);
        for a in 0..chart.n_coords() {
            let dza = Form::scalar(&self.splitting, Polynomial::var(chart.n_coords(), a))
                .exterior_d();
            identity = identity.add(&FormVector::tensor(
                &dza,
                &VectorField::coordinate(chart.clone(), a),
            ));
        }
        assert_eq!(
            self.p_c.add(&self.p_v),
            identity,
            "projectors do not sum to the identity"
        );
        // curvature lies in CLambda^2 (x) CX: only du ^ du form parts, only
        // leaf vector parts
        let n = chart.n_leaf();
        for (&(c, t, a), _) in self.curvature.terms() {
            assert!(
                t == 0 && c.count_ones() == 2 && a < n,
                "curvature escapes CLambda^2 (x) CX"
            );
        }
    }

    pub fn splitting(&self) -> &Splitting {
        &self.splitting
    }

    pub fn pc(&self) -> &FormVector {
        &self.p_c
    }

    pub fn pv(&self) -> &FormVector {
        &self.p_v
    }

    pub fn curvature(&self) -> &FormVector {
        &self.curvature
    }

    /// `d^C = L_{P^C}`.
    pub fn d_c(&self, omega: &Form) -> Form {
        lie_derivative(&self.p_c, omega)
    }

    /// `d^V = L_{P^V}`.
    pub fn d_v(&self, omega: &Form) -> Form {
        lie_derivative(&self.p_v, omega)
    }

    /// The bidegree-`(k, -k+1)` component of the de Rham differential:
    /// raises `du`-count by `k`.
    pub fn d_component(&self, k: u32, omega: &Form) -> Form {
        let mut out = Form::zero(&self.splitting);
        let max_c = self.splitting.chart().n_trans() as u32;
        let max_t = self.splitting.chart().n_leaf() as u32;
        for r in 0..=max_c {
            for s in 0..=max_t {
                let piece = omega.bidegree_project(r, s);
                if piece.is_zero() {
                    continue;
                }
                if k > 0 && s + 1 < k {
                    continue;
                }
                out = out.add(&piece.exterior_d().bidegree_project(r + k, s + 1 - k));
            }
        }
        out
    }

    /// `dbar` on leafwise forms via the FN route `d^C - i_R` (the
    /// componentwise route is [`ABarElement::dbar`]).
    pub fn dbar_form_fn_route(&self, lambda: &ABarElement) -> Form {
        self.d_c(lambda.form())
            .sub(&insertion(&self.curvature, lambda.form()))
    }

    /// `dbar` on `Q` via the FN route `[[P^C, Z]] - [R, Z]_nr`, projected to
    /// `Q` (the componentwise Bott route is [`QElement::dbar`]).
    pub fn dbar_q_fn_route(&self, z: &QElement) -> QElement {
        let emb = z.embed();
        overline(&fn_bracket(&self.p_c, &emb).sub(&nr_bracket(&self.curvature, &emb)))
    }

    /// The evaluation pairing of a form with `du`-count `r` against `r`
    /// elements of `Q`:
    /// `<omega|Z_1..Z_r> = (-1)^chi i_{Z_1} ... i_{Z_r} omega` with
    /// `chi = r + w (r(r-1)/2 + sum shifted degrees)`, `w` the total form
    /// degree of (each homogeneous piece of) `omega`.
    pub fn evaluate_pairing(
        &self,
        omega: &Form,
        zs: &[QElement],
    ) -> Result<ABarElement, FoliationError> {
        let r = zs.len();
        for (&(c, _), _) in omega.terms() {
            if c.count_ones() != r as u32 {
                return Err(FoliationError::ArityMismatch {
                    form: c.count_ones(),
                    args: r,
                });
            }
        }
        let shifted: Vec<i64> = zs
            .iter()
            .map(|z| z.shifted_degree().ok_or(FoliationError::Inhomogeneous))
            .collect::<Result<_, _>>()?;
        let embedded: Vec<FormVector> = zs.iter().map(|z| z.embed()).collect();
        let mut out = Form::zero(&self.splitting);
        let max_deg = omega.max_degree();
        for w in 0..=max_deg {
            let piece = omega.degree_project(w);
            if piece.is_zero() {
                continue;
            }
            let mut acc = piece;
            // i_{Z_1} ... i_{Z_r} omega applies i_{Z_r} first
            for z in embedded.iter().rev() {
                acc = insertion(z, &acc);
            }
            let r_i = r as i64;
            let chi = r_i + (w as i64) * (r_i * (r_i - 1) / 2 + shifted.iter().sum::<i64>());
            out = out.add(&acc.scale(&sign(chi)));
        }
        // each insertion consumes one du-factor, so the result is leafwise
        ABarElement::new(out)
    }

    /// The anchors of the homotopy Lie-Rinehart structure:
    /// `{|l} = dbar l`, `{Z|l} = -(-1)^Z L_Z l + i_{[R,Z]_nr} l`,
    /// `{Z1,Z2|l} = -i_{[[R,Z1]_nr,Z2]_nr} l`, zero with three or more
    /// `Q`-arguments. Exponents consume shifted degrees; the result is
    /// projected to `A`.
    pub fn anchor(
        &self,
        zs: &[QElement],
        lambda: &ABarElement,
    ) -> Result<ABarElement, FoliationError> {
        match zs {
            [] => Ok(lambda.dbar()),
            [z] => {
                let zsh = z.shifted_degree().unwrap_or(0);
                let emb = z.embed();
                let first = lie_derivative(&emb, lambda.form()).scale(&sign(zsh + 1));
                let second = insertion(&nr_bracket(&self.curvature, &emb), lambda.form());
                Ok(ABarElement::project(&first.add(&second)))
            }
            [z1, z2] => {
                let r1 = nr_bracket(&self.curvature, &z1.embed());
                let r12 = nr_bracket(&r1, &z2.embed());
                Ok(ABarElement::project(
                    &insertion(&r12, lambda.form()).neg(),
                ))
            }
            _ => Ok(ABarElement::zero(&self.splitting)),
        }
    }

    /// The brackets: `{Z} = dbar Z`,
    /// `{Z1,Z2} = -(-1)^{Z1} [[Z1,Z2]] + [[R,Z1]_nr, Z2]_nr`,
    /// `{Z1,Z2,Z3} = -[[[R,Z1]_nr,Z2]_nr,Z3]_nr`, zero for arity > 3.
    /// Exponents consume shifted degrees; the result is projected to `Q`.
    pub fn bracket(&self, zs: &[QElement]) -> Result<QElement, FoliationError> {
        match zs {
            [] => Ok(QElement::zero(&self.splitting)),
            [z] => Ok(z.dbar()),
            [z1, z2] => {
                let z1sh = z1.shifted_degree().unwrap_or(0);
                let e1 = z1.embed();
                let e2 = z2.embed();
                let fnb = fn_bracket(&e1, &e2).scale(&sign(z1sh + 1));
                let nrr = nr_bracket(&nr_bracket(&self.curvature, &e1), &e2);
                Ok(overline(&fnb.add(&nrr)))
            }
            [z1, z2, z3] => {
                let r1 = nr_bracket(&self.curvature, &z1.embed());
                let r12 = nr_bracket(&r1, &z2.embed());
                let r123 = nr_bracket(&r12, &z3.embed());
                Ok(overline(&r123).neg())
            }
            _ => Ok(QElement::zero(&self.splitting)),
        }
    }

    /// Appendix route for the binary bracket:
    /// `{Z1,Z2} = -(-1)^{Z1} overline([[Z1,Z2]])` (curvature term absorbed by
    /// the projection).
    pub fn alt_binary_bracket(&self, z1: &QElement, z2: &QElement) -> QElement {
        let z1sh = z1.shifted_degree().unwrap_or(0);
        overline(&fn_bracket(&z1.embed(), &z2.embed())).scale(&sign(z1sh + 1))
    }

    /// Appendix route for the unary anchor:
    /// `{Z|l} = -(-1)^Z overline(L_Z l)`.
    pub fn alt_unary_anchor(&self, z: &QElement, lambda: &ABarElement) -> ABarElement {
        let zsh = z.shifted_degree().unwrap_or(0);
        ABarElement::project(&lie_derivative(&z.embed(), lambda.form())).scale(&sign(zsh + 1))
    }
}

/// Check the FN-bracket relations among `P^C`, `P^V`, `R` (including the
/// Bianchi identities). Returns the first failing relation name.
pub fn bracket_table_check(f: &FoliationStructure) -> Result<(), String> {
    let two_r = f.curvature().scale(&rat(2));
    let checks: Vec<(&str, FormVector, FormVector)> = vec![
        ("[[PC,PC]] = 2R", fn_bracket(f.pc(), f.pc()), two_r.clone()),
        (
            "[[PC,PV]] = -2R",
            fn_bracket(f.pc(), f.pv()),
            two_r.neg(),
        ),
        (
            "[[PV,PC]] = -2R",
            fn_bracket(f.pv(), f.pc()),
            two_r.neg(),
        ),
        ("[[PV,PV]] = 2R", fn_bracket(f.pv(), f.pv()), two_r.clone()),
        (
            "[[PC,R]] = 0 (Bianchi)",
            fn_bracket(f.pc(), f.curvature()),
            FormVector::zero(f.splitting()),
        ),
        (
            "[[PV,R]] = 0 (Bianchi)",
            fn_bracket(f.pv(), f.curvature()),
            FormVector::zero(f.splitting()),
        ),
        (
            "[[R,PC]] = 0",
            fn_bracket(f.curvature(), f.pc()),
            FormVector::zero(f.splitting()),
        ),
        (
            "[[R,PV]] = 0",
            fn_bracket(f.curvature(), f.pv()),
            FormVector::zero(f.splitting()),
        ),
        (
            "[[R,R]] = 0",
            fn_bracket(f.curvature(), f.curvature()),
            FormVector::zero(f.splitting()),
        ),
    ];
    for (name, got, want) in checks {
        if got != want {
            return Err(format!("relation failed: {name}"));
        }
    }
    Ok(())
}

/// Check the derived operator relations (`[d^C,d^C] = 2 L_R` etc.) on the
/// supplied test forms. All four generators are degree-1 odd operators except
/// `L_R` (degree 2, even), so every commutator below is the anticommutator.
pub fn operator_table_check(f: &FoliationStructure, samples: &[Form]) -> Result<(), String> {
    let r = f.curvature();
    for (idx, omega) in samples.iter().enumerate() {
        let dc = |w: &Form| f.d_c(w);
        let dv = |w: &Form| f.d_v(w);
        let ir = |w: &Form| insertion(r, w);
        let lr = |w: &Form| lie_derivative(r, w);
        let anti = |a: &dyn Fn(&Form) -> Form, b: &dyn Fn(&Form) -> Form, w: &Form| {
            a(&b(w)).add(&b(&a(w)))
        };
        let lr2 = lr(omega).scale(&rat(2));
        let checks: Vec<(&str, Form, Form)> = vec![
            ("[dC,dC] = 2LR", anti(&dc, &dc, omega), lr2.clone()),
            ("[dC,dV] = -2LR", anti(&dc, &dv, omega), lr2.neg()),
            ("[dV,dV] = 2LR", anti(&dv, &dv, omega), lr2.clone()),
            ("[dC,iR] = LR", anti(&dc, &ir, omega), lr(omega)),
            ("[dV,iR] = 0", anti(&dv, &ir, omega), Form::zero(f.splitting())),
            ("[iR,iR] = 0", anti(&ir, &ir, omega), Form::zero(f.splitting())),
            (
                "[dC,LR] = 0",
                dc(&lr(omega)).sub(&lr(&dc(omega))),
                Form::zero(f.splitting()),
            ),
            (
                "[dV,LR] = 0",
                dv(&lr(omega)).sub(&lr(&dv(omega))),
                Form::zero(f.splitting()),
            ),
            (
                "[iR,LR] = 0",
                ir(&lr(omega)).sub(&lr(&ir(omega))),
                Form::zero(f.splitting()),
            ),
            (
                "dC + dV = d",
                dc(omega).add(&dv(omega)),
                omega.exterior_d(),
            ),
        ];
        for (name, got, want) in checks {
            if got != want {
                return Err(format!("operator relation failed on sample {idx}: {name}"));
            }
        }
    }
    Ok(())
}

/// Check the `du`-count decomposition `d = d0 + d1 + d2` and the operator
/// identities among the components on the supplied test forms.
pub fn differential_components_check(
    f: &FoliationStructure,
    samples: &[Form],
) -> Result<(), String> {
    let r = f.curvature();
    for (idx, omega) in samples.iter().enumerate() {
        let d0 = |w: &Form| f.d_component(0, w);
        let d1 = |w: &Form| f.d_component(1, w);
        let d2 = |w: &Form| f.d_component(2, w);
        // the bidegree components must agree with the operator expressions
        let d0_expr = f.d_c(omega).sub(&insertion(r, omega));
        let d1_expr = f
            .d_v(omega)
            .add(&insertion(r, omega).scale(&rat(2)));
        let d2_expr = insertion(r, omega).neg();
        if d0(omega) != d0_expr {
            return Err(format!("d0 != dC - iR on sample {idx}"));
        }
        if d1(omega) != d1_expr {
            return Err(format!("d1 != dV + 2iR on sample {idx}"));
        }
        if d2(omega) != d2_expr {
            return Err(format!("d2 != -iR on sample {idx}"));
        }
        let total = d0(omega).add(&d1(omega)).add(&d2(omega));
        if total != omega.exterior_d() {
            return Err(format!("d0+d1+d2 != d on sample {idx}"));
        }
        // E_k = 0 identities and [d1,d1] = -2[d0,d2] = 2 L_R
        let anti = |a: &dyn Fn(&Form) -> Form, b: &dyn Fn(&Form) -> Form, w: &Form| {
            a(&b(w)).add(&b(&a(w)))
        };
        let zero = Form::zero(f.splitting());
        if anti(&d0, &d0, omega) != zero {
            return Err(format!("[d0,d0] != 0 on sample {idx}"));
        }
        if anti(&d0, &d1, omega) != zero {
            return Err(format!("[d0,d1] != 0 on sample {idx}"));
        }
        if anti(&d1, &d2, omega) != zero {
            return Err(format!("[d1,d2] != 0 on sample {idx}"));
        }
        if anti(&d2, &d2, omega) != zero {
            return Err(format!("[d2,d2] != 0 on sample {idx}"));
        }
        let lr2 = lie_derivative(r, omega).scale(&rat(2));
        if anti(&d1, &d1, omega) != lr2 {
            return Err(format!("[d1,d1] != 2LR on sample {idx}"));
        }
        if anti(&d0, &d2, omega).scale(&rat(-2)) != lr2 {
            return Err(format!("-2[d0,d2] != 2LR on sample {idx}"));
        }
    }
    Ok(())
}

/// Compare the closed binary formulas against their quotient-route
/// counterparts on the supplied samples.
pub fn alt_binary_check(
    f: &FoliationStructure,
    pairs: &[(QElement, QElement)],
    anchored: &[(QElement, ABarElement)],
) -> Result<(), String> {
    for (idx, (z1, z2)) in pairs.iter().enumerate() {
        let direct = f.bracket(&[z1.clone(), z2.clone()]).map_err(|e| e.to_string())?;
        if direct != f.alt_binary_bracket(z1, z2) {
            return Err(format!("binary bracket routes disagree on sample {idx}"));
        }
    }
    for (idx, (z, l)) in anchored.iter().enumerate() {
        let direct = f.anchor(std::slice::from_ref(z), l).map_err(|e| e.to_string())?;
        if direct != f.alt_unary_anchor(z, l) {
            return Err(format!("unary anchor routes disagree on sample {idx}"));
        }
    }
    Ok(())
}

/// Evaluate `d_k omega` on `Q`-arguments two ways and compare:
/// geometrically (bidegree component of the de Rham differential, then the
/// evaluation pairing) and algebraically (the higher Chevalley-Eilenberg
/// formula built from anchors and brackets). `omega` must be homogeneous in
/// both total degree and `du`-count `r`; the argument count determines
/// `k = qs.len() - r`.
pub fn ce_component_check(
    f: &FoliationStructure,
    omega: &Form,
    qs: &[QElement],
) -> Result<(), String> {
    use crate::signs::{koszul_sign, unshuffles};
    let r = omega
        .terms()
        .map(|(&(c, _), _)| c.count_ones())
        .max()
        .unwrap_or(0) as usize;
    if omega
        .terms()
        .any(|(&(c, _), _)| c.count_ones() as usize != r)
    {
        return Err("omega must have homogeneous du-count".into());
    }
    let w = omega.homogeneous_degree().unwrap_or(0) as i64;
    if qs.len() < r {
        return Err("not enough arguments".into());
    }
    let k = qs.len() - r;
    let shifted: Vec<i64> = qs
        .iter()
        .map(|q| q.shifted_degree().unwrap_or(0))
        .collect();

    // geometric route
    let lhs = f
        .evaluate_pairing(&f.d_component(k as u32, omega), qs)
        .map_err(|e| e.to_string())?;

    // algebraic route
    let mut rhs = ABarElement::zero(f.splitting());
    for sigma in unshuffles(k, r) {
        let alpha = koszul_sign(&sigma, &shifted);
        let front: Vec<QElement> = sigma[..k].iter().map(|&i| qs[i].clone()).collect();
        let back: Vec<QElement> = sigma[k..].iter().map(|&i| qs[i].clone()).collect();
        let e = w * sigma[..k].iter().map(|&i| shifted[i]).sum::<i64>();
        let inner = f.evaluate_pairing(omega, &back).map_err(|e| e.to_string())?;
        let term = f.anchor(&front, &inner).map_err(|e| e.to_string())?;
        let coeff = sign(e) * rat(alpha);
        rhs = rhs.add(&term.scale(&coeff));
    }
    if r >= 1 {
        for tau in unshuffles(k + 1, r - 1) {
            let alpha = koszul_sign(&tau, &shifted);
            let front: Vec<QElement> = tau[..k + 1].iter().map(|&i| qs[i].clone()).collect();
            let back: Vec<QElement> = tau[k + 1..].iter().map(|&i| qs[i].clone()).collect();
            let br = f.bracket(&front).map_err(|e| e.to_string())?;
            // a vanishing bracket contributes nothing, and the pairing cannot
            // assign it a homogeneous degree
            if br.is_zero() {
                continue;
            }
            let mut args = vec![br];
            args.extend(back);
            let term = f.evaluate_pairing(omega, &args).map_err(|e| e.to_string())?;
            let coeff = sign(w) * rat(alpha);
            rhs = rhs.sub(&term.scale(&coeff));
        }
    }
    if lhs != rhs {
        return Err(format!(
            "CE component mismatch (r={r}, k={k}): geometric {} vs algebraic {}",
            lhs.form().display(),
            rhs.form().display()
        ));
    }
    Ok(())
}

/// Compare the two computational routes for `dbar` on the supplied leafwise
/// forms and `Q`-elements.
pub fn dbar_route_check(
    f: &FoliationStructure,
    lambdas: &[ABarElement],
    zs: &[QElement],
) -> Result<(), String> {
    for (idx, l) in lambdas.iter().enumerate() {
        let direct = l.dbar();
        let fn_route = f.dbar_form_fn_route(l);
        // the FN route lands in the full form algebra but must already be
        // leafwise on leafwise input
        if fn_route.project_leafwise() != fn_route {
            return Err(format!("dC - iR not leafwise on leafwise sample {idx}"));
        }
        if direct.form() != &fn_route {
            return Err(format!("dbar routes disagree on form sample {idx}"));
        }
        // also the d0-component route
        if &f.d_component(0, l.form()) != direct.form() {
            return Err(format!("d0 route disagrees on form sample {idx}"));
        }
    }
    for (idx, z) in zs.iter().enumerate() {
        if z.dbar() != f.dbar_q_fn_route(z) {
            return Err(format!("dbar routes disagree on Q sample {idx}"));
        }
    }
    Ok(())
}
