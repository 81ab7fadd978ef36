//! Graded differential forms in the adapted coframe of a splitting.
//!
//! A form is stored as a sparse sum of terms `p * du^{A} ^ dCx^{I}` where `p`
//! is a polynomial, `A` is a set of transverse indices and `I` a set of leaf
//! indices, both encoded as bitmasks. The canonical generator order inside a
//! term is: all `du` factors in increasing index order, then all `dCx`
//! factors in increasing index order. All wedge/sign bookkeeping reduces to
//! merge counts on bitmasks.
//!
//! # Key operations
//! - [`Form::wedge`]: graded-commutative product.
//! - [`Form::exterior_d`]: the de Rham differential written in the adapted
//!   coframe (with the curvature terms from `d(dCx^i)`).
//! - [`Form::contract_vector`]: insertion of a polynomial vector field.
//! - [`Form::reframe`]: rewrite in the adapted coframe of another splitting
//!   of the same chart.
//! - [`Form::bidegree_project`]: projection onto the `(du-count, dCx-count)`
//!   bihomogeneous component.

use crate::chart::{Chart, Splitting};
use crate::poly::{Polynomial, Rat};
use std::collections::BTreeMap;
use std::fmt;

/// Sign for merging two disjoint ascending index sets `a`, `b` (as bitmasks)
/// into one ascending sequence; `None` if they overlap (wedge is zero).
pub(crate) fn merge_sign(a: u32, b: u32) -> Option<i64> {
    if a & b != 0 {
        return None;
    }
    let mut sign = 1i64;
    let mut bb = b;
    while bb != 0 {
        let j = bb.trailing_zeros();
        if (a >> (j + 1)).count_ones() % 2 == 1 {
            sign = -sign;
        }
        bb &= bb - 1;
    }
    Some(sign)
}

/// A polynomial vector field on a chart, with one component per coordinate
/// (leaf components first).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField {
    chart: Chart,
    comps: Vec<Polynomial>,
}

impl VectorField {
    pub fn new(chart: Chart, comps: Vec<Polynomial>) -> VectorField {
        assert_eq!(comps.len(), chart.n_coords(), "component count mismatch");
        for c in &comps {
            assert_eq!(c.n_vars(), chart.n_coords(), "component over wrong chart");
        }
        VectorField { chart, comps }
    }

    pub fn zero(chart: Chart) -> VectorField {
        let n = chart.n_coords();
        VectorField::new(chart, vec![Polynomial::zero(n); n])
    }

    /// The coordinate field `d/dx^i` resp. `d/du^alpha` for combined index.
    pub fn coordinate(chart: Chart, idx: usize) -> VectorField {
        let n = chart.n_coords();
        let mut comps = vec![Polynomial::zero(n); n];
        comps[idx] = Polynomial::one(n);
        VectorField::new(chart, comps)
    }

    /// The frame field `V_alpha = d/du^alpha + V_alpha^i d/dx^i` of a
    /// splitting.
    pub fn frame_field(splitting: &Splitting, alpha: usize) -> VectorField {
        let chart = splitting.chart().clone();
        let n = chart.n_coords();
        let mut comps = vec![Polynomial::zero(n); n];
        comps[chart.trans_index(alpha)] = Polynomial::one(n);
        for i in 0..chart.n_leaf() {
            comps[i] = splitting.v(alpha, i).clone();
        }
        VectorField::new(chart, comps)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    /// Component on the coordinate field with combined index `idx`.
    pub fn comp(&self, idx: usize) -> &Polynomial {
        &self.comps[idx]
    }

    /// Apply to a scalar: `X(f) = X^a d_a f`.
    pub fn apply(&self, f: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero(self.chart.n_coords());
        for (idx, c) in self.comps.iter().enumerate() {
            out = out.add(&c.mul(&f.differentiate(idx)));
        }
        out
    }

    pub fn add(&self, other: &VectorField) -> VectorField {
        assert_eq!(self.chart, other.chart, "vector fields on different charts");
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.add(b))
            .collect();
        VectorField::new(self.chart.clone(), comps)
    }

    pub fn scale_poly(&self, p: &Polynomial) -> VectorField {
        let comps = self.comps.iter().map(|c| c.mul(p)).collect();
        VectorField::new(self.chart.clone(), comps)
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }
}

/// A differential form in the adapted coframe of a fixed splitting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Form {
    frame: Splitting,
    /// `(du-mask, dCx-mask) -> polynomial coefficient`, zero values never
    /// stored.
    terms: BTreeMap<(u32, u32), Polynomial>,
}

impl Form {
    pub fn zero(frame: &Splitting) -> Form {
        Form {
            frame: frame.clone(),
            terms: BTreeMap::new(),
        }
    }

    /// A degree-zero form (scalar).
    pub fn scalar(frame: &Splitting, p: Polynomial) -> Form {
        let mut f = Form::zero(frame);
        f.push((0, 0), p);
        f
    }

    /// The basis one-form `du^alpha`.
    pub fn du(frame: &Splitting, alpha: usize) -> Form {
        let mut f = Form::zero(frame);
        f.push((1 << alpha, 0), Polynomial::one(frame.chart().n_coords()));
        f
    }

    /// The basis one-form `dCx^i`.
    pub fn dcx(frame: &Splitting, i: usize) -> Form {
        let mut f = Form::zero(frame);
        f.push((0, 1 << i), Polynomial::one(frame.chart().n_coords()));
        f
    }

    /// The basis monomial `du^{cmask} ^ dCx^{tmask}` with unit coefficient.
    pub fn basis(frame: &Splitting, cmask: u32, tmask: u32) -> Form {
        let mut f = Form::zero(frame);
        f.push((cmask, tmask), Polynomial::one(frame.chart().n_coords()));
        f
    }

    pub fn frame(&self) -> &Splitting {
        &self.frame
    }

    pub fn chart(&self) -> &Chart {
        self.frame.chart()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Iterate over `((du-mask, dCx-mask), coefficient)` in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Polynomial)> {
        self.terms.iter()
    }

    pub(crate) fn push(&mut self, key: (u32, u32), p: Polynomial) {
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

    pub(crate) fn from_terms(frame: &Splitting, terms: &BTreeMap<(u32, u32), Polynomial>) -> Form {
        let mut f = Form::zero(frame);
        for (k, p) in terms {
            f.push(*k, p.clone());
        }
        f
    }

    fn assert_same_frame(&self, other: &Form) {
        assert_eq!(
            self.frame, other.frame,
            "forms in different adapted coframes; reframe first"
        );
    }

    pub fn add(&self, other: &Form) -> Form {
        self.assert_same_frame(other);
        let mut out = self.clone();
        for (k, p) in &other.terms {
            out.push(*k, p.clone());
        }
        out
    }

    pub fn neg(&self) -> Form {
        let mut out = Form::zero(&self.frame);
        for (k, p) in &self.terms {
            out.terms.insert(*k, p.neg());
        }
        out
    }

    pub fn sub(&self, other: &Form) -> Form {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rat) -> Form {
        let mut out = Form::zero(&self.frame);
        for (k, p) in &self.terms {
            out.push(*k, p.scale(c));
        }
        out
    }

    pub fn scale_poly(&self, p: &Polynomial) -> Form {
        let mut out = Form::zero(&self.frame);
        for (k, c) in &self.terms {
            out.push(*k, c.mul(p));
        }
        out
    }

    /// Graded-commutative wedge product.
    pub fn wedge(&self, other: &Form) -> Form {
        self.assert_same_frame(other);
        let mut out = Form::zero(&self.frame);
        for ((c1, t1), p1) in &self.terms {
            for ((c2, t2), p2) in &other.terms {
                let (Some(sc), Some(st)) = (merge_sign(*c1, *c2), merge_sign(*t1, *t2)) else {
                    continue;
                };
                // moving the du factors of the right term past the dCx
                // factors of the left term
                let cross = if (t1.count_ones() * c2.count_ones()) % 2 == 1 {
                    -1
                } else {
                    1
                };
                let sign = sc * st * cross;
                let mut coeff = p1.mul(p2);
                if sign < 0 {
                    coeff = coeff.neg();
                }
                out.push((c1 | c2, t1 | t2), coeff);
            }
        }
        out
    }

    /// Projection onto the component with `r` factors of `du` and `s`
    /// factors of `dCx`.
    pub fn bidegree_project(&self, r: u32, s: u32) -> Form {
        let mut out = Form::zero(&self.frame);
        for (k, p) in &self.terms {
            if k.0.count_ones() == r && k.1.count_ones() == s {
                out.terms.insert(*k, p.clone());
            }
        }
        out
    }

    /// Projection onto leafwise forms (no `du` factor).
    pub fn project_leafwise(&self) -> Form {
        let mut out = Form::zero(&self.frame);
        for (k, p) in &self.terms {
            if k.0 == 0 {
                out.terms.insert(*k, p.clone());
            }
        }
        out
    }

    /// Total degree if homogeneous, `None` if mixed or zero.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut deg = None;
        for k in self.terms.keys() {
            let d = k.0.count_ones() + k.1.count_ones();
            match deg {
                None => deg = Some(d),
                Some(prev) if prev != d => return None,
                _ => {}
            }
        }
        deg
    }

    /// Largest total degree of any term (0 for the zero form).
    pub fn max_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|k| k.0.count_ones() + k.1.count_ones())
            .max()
            .unwrap_or(0)
    }

    /// Projection onto the total-degree-`d` component.
    pub fn degree_project(&self, d: u32) -> Form {
        let mut out = Form::zero(&self.frame);
        for (k, p) in &self.terms {
            if k.0.count_ones() + k.1.count_ones() == d {
                out.terms.insert(*k, p.clone());
            }
        }
        out
    }

    /// The de Rham differential, written in the adapted coframe:
    /// `d f = (d_i f) dCx^i + (V_alpha f) du^alpha`, `d(du^alpha) = 0`, and
    /// `d(dCx^i)` carries the curvature of the splitting.
    pub fn exterior_d(&self) -> Form {
        let frame = self.frame.clone();
        let chart = frame.chart().clone();
        let on_scalar = |p: &Polynomial| -> Form {
            let mut out = Form::zero(&frame);
            for i in 0..chart.n_leaf() {
                out.push((0, 1 << i), p.differentiate(i));
            }
            for alpha in 0..chart.n_trans() {
                out.push((1 << alpha, 0), frame.v_apply(alpha, p));
            }
            out
        };
        let img_du = |_alpha: usize| Form::zero(&frame);
        let img_dcx = |i: usize| Form::from_terms(&frame, frame.d_dcx_terms(i));
        self.extend_derivation(&self.frame, true, on_scalar, img_du, img_dcx)
    }

    /// Insertion (interior product) of a vector field; odd derivation of
    /// degree `-1` with `i_X(du^alpha) = X(u^alpha)` and
    /// `i_X(dCx^i) = X(x^i) - V_alpha^i X(u^alpha)`.
    pub fn contract_vector(&self, x: &VectorField) -> Form {
        assert_eq!(x.chart(), self.chart(), "vector field on different chart");
        let frame = self.frame.clone();
        let chart = frame.chart().clone();
        let img_du =
            |alpha: usize| Form::scalar(&frame, x.comp(chart.trans_index(alpha)).clone());
        let img_dcx = |i: usize| {
            let mut c = x.comp(i).clone();
            for alpha in 0..chart.n_trans() {
                c = c.sub(&frame.v(alpha, i).mul(x.comp(chart.trans_index(alpha))));
            }
            Form::scalar(&frame, c)
        };
        let on_scalar = |_p: &Polynomial| Form::zero(&frame);
        self.extend_derivation(&self.frame, true, on_scalar, img_du, img_dcx)
    }

    /// Rewrite in the adapted coframe of `target` (same chart, possibly a
    /// different splitting): `dCx^i = dC'x^i + (V'_alpha^i - V_alpha^i)
    /// du^alpha`, `du` unchanged.
    pub fn reframe(&self, target: &Splitting) -> Form {
        assert_eq!(
            self.chart(),
            target.chart(),
            "cannot reframe across charts"
        );
        if self.frame == *target {
            let mut out = self.clone();
            out.frame = target.clone();
            return out;
        }
        let chart = self.chart().clone();
        let mut out = Form::zero(target);
        for ((cmask, tmask), p) in &self.terms {
            let mut acc = Form::scalar(target, p.clone());
            let mut c = *cmask;
            while c != 0 {
                let alpha = c.trailing_zeros() as usize;
                acc = acc.wedge(&Form::du(target, alpha));
                c &= c - 1;
            }
            let mut t = *tmask;
            while t != 0 {
                let i = t.trailing_zeros() as usize;
                let mut repl = Form::dcx(target, i);
                for alpha in 0..chart.n_trans() {
                    let delta = target.v(alpha, i).sub(self.frame.v(alpha, i));
                    repl = repl.add(&Form::du(target, alpha).scale_poly(&delta));
                }
                acc = acc.wedge(&repl);
                t &= t - 1;
            }
            out = out.add(&acc);
        }
        out
    }

    /// Extend generator images to a derivation of the free graded-commutative
    /// algebra. `odd` selects the parity of the derivation (sign `(-1)^k`
    /// when jumping over `k` degree-one generators).
    pub fn extend_derivation(
        &self,
        out_frame: &Splitting,
        odd: bool,
        on_scalar: impl Fn(&Polynomial) -> Form,
        img_du: impl Fn(usize) -> Form,
        img_dcx: impl Fn(usize) -> Form,
    ) -> Form {
        let mut out = Form::zero(out_frame);
        for ((cmask, tmask), p) in &self.terms {
            // scalar part: D(p) ^ basis
            let db = on_scalar(p).wedge(&Form::basis(out_frame, *cmask, *tmask));
            out = out.add(&db);
            // generator part: walk generators in canonical order
            let mut ordinal: u32 = 0;
            let mut c = *cmask;
            while c != 0 {
                let alpha = c.trailing_zeros();
                c &= c - 1;
                let before_c = cmask & ((1u32 << alpha) - 1);
                let after_c = cmask & !((1u32 << (alpha + 1)) - 1);
                let prefix = Form::basis(out_frame, before_c, 0).scale_poly(p);
                let suffix = Form::basis(out_frame, after_c, *tmask);
                let mut contrib = prefix.wedge(&img_du(alpha as usize)).wedge(&suffix);
                if odd && ordinal % 2 == 1 {
                    contrib = contrib.neg();
                }
                out = out.add(&contrib);
                ordinal += 1;
            }
            let mut t = *tmask;
            while t != 0 {
                let i = t.trailing_zeros();
                t &= t - 1;
                let before_t = tmask & ((1u32 << i) - 1);
                let after_t = tmask & !((1u32 << (i + 1)) - 1);
                let prefix = Form::basis(out_frame, *cmask, before_t).scale_poly(p);
                let suffix = Form::basis(out_frame, 0, after_t);
                let mut contrib = prefix.wedge(&img_dcx(i as usize)).wedge(&suffix);
                if odd && ordinal % 2 == 1 {
                    contrib = contrib.neg();
                }
                out = out.add(&contrib);
                ordinal += 1;
            }
        }
        out
    }

    /// Render using the chart's coordinate names.
    pub fn display(&self) -> FormDisplay<'_> {
        FormDisplay { form: self }
    }
}

/// Pretty-printer for forms (used in check witnesses).
pub struct FormDisplay<'a> {
    form: &'a Form,
}

impl fmt::Display for FormDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.form.is_zero() {
            return write!(f, "0");
        }
        let chart = self.form.chart();
        let names = chart.names();
        let mut first = true;
        for ((cmask, tmask), p) in &self.form.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mut gens: Vec<String> = Vec::new();
            let mut c = *cmask;
            while c != 0 {
                let alpha = c.trailing_zeros() as usize;
                gens.push(format!("d{}", chart.trans_name(alpha)));
                c &= c - 1;
            }
            let mut t = *tmask;
            while t != 0 {
                let i = t.trailing_zeros() as usize;
                gens.push(format!("dC{}", chart.leaf_name(i)));
                t &= t - 1;
            }
            if gens.is_empty() {
                write!(f, "({})", p.display(names))?;
            } else {
                write!(f, "({})*{}", p.display(names), gens.join("^"))?;
            }
        }
        Ok(())
    }
}
