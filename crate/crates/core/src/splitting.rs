//! The canonical isomorphism between the homotopy Lie-Rinehart algebras of
//! two complementary distributions over the same chart.
//!
//! Given splittings `V` and `V'`, put `Delta := P^C - 'P^C`, a `du`-form
//! valued leafwise vector field with components `Delta_alpha^i =
//! 'V_alpha^i - V_alpha^i`. This module builds:
//! - the components `psi_k` and `Psi_k` of the coframe change on scalar
//!   forms and on `du`-linear forms, defined as reframe followed by
//!   `du`-count projection, together with their claimed closed forms
//!   `i_Delta^k` and `i_Delta^{k-1}` (tested, not trusted);
//! - the morphism components `phi_k(Z'_1..Z'_k|l) = (-1)^chi
//!   overline-id(i_{Z'_1} .. i_{Z'_k} i_Delta^k l)` with
//!   `chi = k + (l + 1)(sum Z'_i) + l k(k-1)/2` and `Phi_k` as
//!   `(-1)^{k-1}` times the closed permutation sum over
//!   `Delta Z' := -i_Delta Z'`, cross-checked against the implicit
//!   recursion that defines them;
//! - oracle adapters presenting the primed algebra over the unprimed
//!   module (through the `overline-id` identification), so the generic
//!   anchored-morphism defects certify `(phi, Phi)` as an isomorphism of
//!   homotopy Lie-Rinehart algebras.
//!
//! # Design notes
//! - `psi`/`cap_psi` are *defined* as reframe-then-project (the
//!   definitionally correct composite); the `i_Delta` powers are the tested
//!   claim, keeping the closed-form proposition falsifiable.
//! - `overline-id` transport between the two presentations is reframe
//!   followed by the normal projection; both directions compose to the
//!   identity because the projections kill exactly the coframe difference.
//! - Every map is also characterized a second way (closed form vs.
//!   recursion, transport lemma vs. direct pairing) and the check functions
//!   return exact defects.
//! - The orientation of `phi_k` and `Phi_k` is pinned by the defining
//!   recursion and by the anchored-morphism identity, not by the closed
//!   formulas alone: four independent identity families (the recursion,
//!   the transport lemma, and the bracket- and anchor-morphism defects)
//!   agree on the extra `(-1)^{k-1}` in `Phi_k` and the `sum Z'_i` term
//!   in `chi`, and all of them fail with either sign removed.

use crate::chart::Splitting;
use crate::fnc::{insertion, insertion_vec, FormVector};
use crate::foliation::{overline, ABarElement, FoliationError, FoliationStructure, QElement};
use crate::form::Form;
use crate::linfty::{
    AnchoredMorphism, BracketOracle, LieRinehartOracle, ModuleOracle, MorphismFamily,
};
use crate::poly::{rat, Rat};
use crate::signs::{all_permutations, block_permutations, koszul_sign, sorted_compositions, unshuffles};

fn sign(e: i64) -> Rat {
    if e.rem_euclid(2) == 0 {
        rat(1)
    } else {
        rat(-1)
    }
}

/// The terms of a form with exactly `k` transverse (`du`) coframe factors.
fn c_project(omega: &Form, k: u32) -> Form {
    let frame = omega.frame().clone();
    let mut out = Form::zero(&frame);
    for (&(c, t), p) in omega.terms() {
        if c.count_ones() == k {
            out = out.add(&Form::basis(&frame, c, t).scale_poly(p));
        }
    }
    out
}

/// Two splittings of the same chart with the difference tensor of their
/// leafwise projectors.
pub struct SplittingPair {
    base: FoliationStructure,
    prime: FoliationStructure,
    delta: FormVector,
    delta_prime: FormVector,
}

impl SplittingPair {
    /// Pair the foliation structures of two splittings and compute
    /// `Delta = P^C - 'P^C` (expressed in both coframes). Panics when the
    /// charts differ: pairing across charts is a programming error.
    pub fn new(base: FoliationStructure, prime: FoliationStructure) -> SplittingPair {
        assert_eq!(
            base.splitting().chart().names(),
            prime.splitting().chart().names(),
            "splitting pair across different charts"
        );
        let prime_pc = prime.pc().reframe(base.splitting());
        let delta = base.pc().sub(&prime_pc);
        let n_leaf = base.splitting().chart().n_leaf();
        for (&(c, t, a), _) in delta.terms() {
            assert!(
                t == 0 && c.count_ones() == 1 && a < n_leaf,
                "difference tensor must be a du-form valued leafwise field"
            );
        }
        let delta_prime = delta.reframe(prime.splitting());
        SplittingPair {
            base,
            prime,
            delta,
            delta_prime,
        }
    }

    pub fn base(&self) -> &FoliationStructure {
        &self.base
    }

    pub fn prime(&self) -> &FoliationStructure {
        &self.prime
    }

    /// `Delta` in the base coframe.
    pub fn delta(&self) -> &FormVector {
        &self.delta
    }

    /// `Delta` in the primed coframe (identical components: both its form
    /// and vector factors are coframe-independent).
    pub fn delta_prime(&self) -> &FormVector {
        &self.delta_prime
    }

    /// The reversed pair (swap the roles of the two splittings).
    pub fn reversed(&self) -> SplittingPair {
        SplittingPair::new(
            FoliationStructure::build_splitting(self.prime.splitting().clone()),
            FoliationStructure::build_splitting(self.base.splitting().clone()),
        )
    }

    /// `overline-id` on scalars, primed presentation to base presentation.
    pub fn abar_to_base(&self, l: &ABarElement) -> ABarElement {
        ABarElement::project(&l.form().reframe(self.base.splitting()))
    }

    /// `overline-id` on scalars, base presentation to primed presentation.
    pub fn abar_to_prime(&self, l: &ABarElement) -> ABarElement {
        ABarElement::project(&l.form().reframe(self.prime.splitting()))
    }

    /// `overline-id` on bracket-space elements, primed to base.
    pub fn q_to_base(&self, z: &QElement) -> QElement {
        overline(&z.embed().reframe(self.base.splitting()))
    }

    /// `overline-id` on bracket-space elements, base to primed.
    pub fn q_to_prime(&self, z: &QElement) -> QElement {
        overline(&z.embed().reframe(self.prime.splitting()))
    }

    /// `psi_k(l)`: the `du`-count-`k` component of `l` rewritten in the
    /// primed coframe.
    pub fn psi(&self, k: u32, l: &ABarElement) -> Form {
        c_project(&l.form().reframe(self.prime.splitting()), k)
    }

    /// The claimed closed form `psi_k = i_Delta^k`: iterated insertion in
    /// the base coframe, coefficients carried onto the primed coframe.
    pub fn psi_closed_form(&self, k: u32, l: &ABarElement) -> Form {
        let mut m = l.form().clone();
        for _ in 0..k {
            m = insertion(&self.delta, &m);
        }
        c_project(&m.reframe(self.prime.splitting()), k)
    }

    /// `Psi_k(w)` for `w` with one `du` factor: the `du`-count-`k`
    /// component of `w` in the primed coframe.
    pub fn cap_psi(&self, k: u32, w: &Form) -> Form {
        c_project(&w.reframe(self.prime.splitting()), k)
    }

    /// The claimed closed form `Psi_k = i_Delta^{k-1}`.
    pub fn cap_psi_closed_form(&self, k: u32, w: &Form) -> Form {
        let mut m = w.clone();
        for _ in 1..k {
            m = insertion(&self.delta, &m);
        }
        c_project(&m.reframe(self.prime.splitting()), k)
    }

    /// `phi_k(Z'_1,..,Z'_k|l) = (-1)^chi overline-id(i_{Z'_1} .. i_{Z'_k}
    /// i_Delta^k l)`, `chi = k + (l + 1)(sum Z'_i) + l k(k-1)/2`; degrees
    /// in the exponent are the scalar's form degree and the arguments'
    /// shifted degrees. The `sum Z'_i` contribution surviving at even `l`
    /// is required by the anchored-morphism identity (see the module design
    /// notes). Multilinear: zero arguments give zero.
    pub fn phi(&self, zs: &[QElement], l: &ABarElement) -> Result<ABarElement, FoliationError> {
        let k = zs.len();
        if l.is_zero() || zs.iter().any(|z| z.is_zero()) {
            return Ok(ABarElement::zero(self.base.splitting()));
        }
        let l_deg = l.degree().ok_or(FoliationError::Inhomogeneous)? as i64;
        let mut zsum = 0i64;
        for z in zs {
            zsum += z.shifted_degree().ok_or(FoliationError::Inhomogeneous)?;
        }
        let kk = k as i64;
        let chi = kk + l_deg * (kk * (kk - 1) / 2 + zsum) + zsum;
        let mut m = l.form().clone();
        for _ in 0..k {
            m = insertion(&self.delta, &m);
        }
        let mut mp = m.reframe(self.prime.splitting());
        for z in zs.iter().rev() {
            mp = insertion(&z.embed(), &mp);
        }
        Ok(ABarElement::project(&mp.reframe(self.base.splitting())).scale(&sign(chi)))
    }

    /// `Phi_k`: `Phi_1 = overline-id` and, for `k > 1`, `(-1)^{k-1}` times
    /// the closed permutation sum `overline-id sum_sigma alpha(sigma, Z')
    /// i_{Z'_sigma(1)} i_{Delta Z'_sigma(2)} .. Delta Z'_sigma(k)` with
    /// `Delta Z' := -i_Delta Z'`. The global `(-1)^{k-1}` is forced by the
    /// defining recursion (see [`SplittingPair::recursion_defect`] and the
    /// module design notes); [`SplittingPair::cap_phi_recursive`] rebuilds
    /// the same values from the recursion alone.
    pub fn cap_phi(&self, zs: &[QElement]) -> Result<QElement, FoliationError> {
        let k = zs.len();
        if k == 0 || zs.iter().any(|z| z.is_zero()) {
            return Ok(QElement::zero(self.base.splitting()));
        }
        if k == 1 {
            return Ok(self.q_to_base(&zs[0]));
        }
        let degs: Vec<i64> = zs
            .iter()
            .map(|z| z.shifted_degree().ok_or(FoliationError::Inhomogeneous))
            .collect::<Result<_, _>>()?;
        let embedded: Vec<FormVector> = zs.iter().map(|z| z.embed()).collect();
        let delta_z: Vec<FormVector> = embedded
            .iter()
            .map(|e| insertion_vec(&self.delta_prime, e).neg())
            .collect();
        let mut acc = FormVector::zero(self.prime.splitting());
        for perm in all_permutations(k) {
            let alpha = koszul_sign(&perm, &degs);
            let mut w = delta_z[perm[k - 1]].clone();
            for j in (1..k - 1).rev() {
                w = insertion_vec(&delta_z[perm[j]], &w);
            }
            w = insertion_vec(&embedded[perm[0]], &w);
            acc = acc.add(&w.scale(&rat(alpha)));
        }
        let global = sign(k as i64 - 1);
        Ok(overline(&acc.reframe(self.base.splitting())).scale(&global))
    }

    /// The right-hand side of the implicit recursion defining `Phi_k`:
    /// `Psi_k(w)(Z'_1..Z'_k) - sum_{i+j=k, j>0} sum_{(i,j)-unshuffles}
    /// alpha psi_j(w(Phi_i(lead)))(tail)`, transported to the base
    /// presentation. `w` is a base-coframe form with one `du` factor.
    pub fn recursion_rhs(
        &self,
        zs: &[QElement],
        w: &Form,
    ) -> Result<ABarElement, FoliationError> {
        let k = zs.len();
        let degs: Vec<i64> = zs
            .iter()
            .map(|z| z.shifted_degree().ok_or(FoliationError::Inhomogeneous))
            .collect::<Result<_, _>>()?;
        let psi_k = self.cap_psi(k as u32, w);
        let mut out = if psi_k.is_zero() {
            ABarElement::zero(self.base.splitting())
        } else {
            self.abar_to_base(&self.prime.evaluate_pairing(&psi_k, zs)?)
        };
        for i in 1..k {
            let j = k - i;
            for sigma in unshuffles(i, j) {
                let alpha = koszul_sign(&sigma, &degs);
                let lead: Vec<QElement> = sigma[..i].iter().map(|&s| zs[s].clone()).collect();
                let tail: Vec<QElement> = sigma[i..].iter().map(|&s| zs[s].clone()).collect();
                let inner_q = self.cap_phi(&lead)?;
                if inner_q.is_zero() {
                    continue;
                }
                let inner = self.base.evaluate_pairing(w, &[inner_q])?;
                let psi_j = self.psi(j as u32, &inner);
                if psi_j.is_zero() {
                    continue;
                }
                let term = self.abar_to_base(&self.prime.evaluate_pairing(&psi_j, &tail)?);
                out = out.sub(&term.scale(&rat(alpha)));
            }
        }
        Ok(out)
    }

    /// `Phi_k` reconstructed from the defining recursion alone: the
    /// recursion right-hand side against the transverse coframe recovers
    /// every component (the pairing of `du^alpha` with a degree-`d`
    /// coefficient on the `alpha`-th frame class is `(-1)^d` times the
    /// coefficient).
    pub fn cap_phi_recursive(&self, zs: &[QElement]) -> Result<QElement, FoliationError> {
        let k = zs.len();
        if k == 0 || zs.iter().any(|z| z.is_zero()) {
            return Ok(QElement::zero(self.base.splitting()));
        }
        if k == 1 {
            return Ok(self.q_to_base(&zs[0]));
        }
        let m = self.base.splitting().chart().n_trans();
        let mut out = QElement::zero(self.base.splitting());
        for alpha in 0..m {
            let w = Form::du(self.base.splitting(), alpha);
            let r = self.recursion_rhs(zs, &w)?;
            let mut comp = Form::zero(self.base.splitting());
            let f = r.form();
            for d in 0..=f.max_degree() {
                let piece = f.degree_project(d);
                if piece.is_zero() {
                    continue;
                }
                comp = comp.add(&piece.scale(&sign(d as i64)));
            }
            out = out.add(&QElement::from_component(
                alpha,
                &ABarElement::project(&comp),
            ));
        }
        Ok(out)
    }

    /// Left-minus-right of the recursion: `<w|Phi_k(Z')> - R_k(w)(Z')`;
    /// zero exactly when the closed form satisfies the defining recursion.
    pub fn recursion_defect(
        &self,
        zs: &[QElement],
        w: &Form,
    ) -> Result<ABarElement, FoliationError> {
        let phi_k = self.cap_phi(zs)?;
        let lhs = if phi_k.is_zero() {
            ABarElement::zero(self.base.splitting())
        } else {
            self.base.evaluate_pairing(w, &[phi_k])?
        };
        Ok(lhs.sub(&self.recursion_rhs(zs, w)?))
    }

    /// Left-minus-right of the transport lemma: the `du`-count-`k`
    /// component of `w` (a base-coframe form with `r` `du` factors)
    /// evaluated on `Z'_1..Z'_k`, against its expansion over
    /// block permutations,
    /// `sum (-1)^chi alpha(sigma, Z') phi_{l_0}(lead | w(Phi-blocks))`
    /// with `chi = w(Z'_sigma(1) + .. + Z'_sigma(l_0))`.
    pub fn transport_lemma_defect(
        &self,
        r: usize,
        w: &Form,
        zs: &[QElement],
    ) -> Result<ABarElement, FoliationError> {
        let k = zs.len();
        let degs: Vec<i64> = zs
            .iter()
            .map(|z| z.shifted_degree().ok_or(FoliationError::Inhomogeneous))
            .collect::<Result<_, _>>()?;
        let w_deg = if w.is_zero() {
            0
        } else {
            w.homogeneous_degree().ok_or(FoliationError::Inhomogeneous)? as i64
        };
        let projected = c_project(&w.reframe(self.prime.splitting()), k as u32);
        let mut out = if projected.is_zero() {
            ABarElement::zero(self.base.splitting())
        } else {
            self.abar_to_base(&self.prime.evaluate_pairing(&projected, zs)?)
        };
        if k < r {
            return Ok(out);
        }
        for l0 in 0..=(k - r) {
            for parts in sorted_compositions(k - l0, r) {
                let mut sizes = vec![l0];
                sizes.extend(parts.iter().copied());
                for sigma in block_permutations(sizes.clone(), 1) {
                    let alpha = koszul_sign(&sigma, &degs);
                    let lead_sum: i64 = sigma[..l0].iter().map(|&s| degs[s]).sum();
                    let chi = w_deg * lead_sum;
                    let lead: Vec<QElement> =
                        sigma[..l0].iter().map(|&s| zs[s].clone()).collect();
                    let mut blocks = Vec::with_capacity(r);
                    let mut start = l0;
                    let mut dead = false;
                    for &sz in &parts {
                        let block: Vec<QElement> = sigma[start..start + sz]
                            .iter()
                            .map(|&s| zs[s].clone())
                            .collect();
                        start += sz;
                        let b = self.cap_phi(&block)?;
                        if b.is_zero() {
                            dead = true;
                            break;
                        }
                        blocks.push(b);
                    }
                    if dead {
                        continue;
                    }
                    let inner = self.base.evaluate_pairing(w, &blocks)?;
                    let term = self.phi(&lead, &inner)?;
                    out = out.sub(&term.scale(&rat(alpha)).scale(&sign(chi)));
                }
            }
        }
        Ok(out)
    }
}

/// The primed foliation algebra presented over the base module: scalars are
/// transported through `overline-id` on the way in and out of the primed
/// anchors, so both oracles of a pair share one module representation.
pub struct PrimeSourceOracle {
    structure: FoliationStructure,
    base_splitting: Splitting,
}

impl PrimeSourceOracle {
    pub fn new(pair: &SplittingPair) -> PrimeSourceOracle {
        PrimeSourceOracle {
            structure: FoliationStructure::build_splitting(pair.prime().splitting().clone()),
            base_splitting: pair.base().splitting().clone(),
        }
    }

    fn to_prime(&self, l: &ABarElement) -> ABarElement {
        ABarElement::project(&l.form().reframe(self.structure.splitting()))
    }

    fn to_base(&self, l: &ABarElement) -> ABarElement {
        ABarElement::project(&l.form().reframe(&self.base_splitting))
    }
}

impl BracketOracle for PrimeSourceOracle {
    type Elt = QElement;

    fn zero(&self) -> QElement {
        QElement::zero(self.structure.splitting())
    }

    fn add(&self, a: &QElement, b: &QElement) -> QElement {
        a.add(b)
    }

    fn scale(&self, a: &QElement, c: &Rat) -> QElement {
        a.scale(c)
    }

    fn is_zero(&self, a: &QElement) -> bool {
        a.is_zero()
    }

    fn degree(&self, a: &QElement) -> Option<i64> {
        a.shifted_degree()
    }

    fn bracket(&self, args: &[QElement]) -> QElement {
        self.structure
            .bracket(args)
            .expect("foliation brackets are total")
    }

    fn max_bracket_arity(&self) -> usize {
        3
    }
}

impl ModuleOracle for PrimeSourceOracle {
    type Module = ABarElement;

    fn mod_zero(&self) -> ABarElement {
        ABarElement::zero(&self.base_splitting)
    }

    fn mod_add(&self, a: &ABarElement, b: &ABarElement) -> ABarElement {
        a.add(b)
    }

    fn mod_scale(&self, a: &ABarElement, c: &Rat) -> ABarElement {
        a.scale(c)
    }

    fn mod_is_zero(&self, a: &ABarElement) -> bool {
        a.is_zero()
    }

    fn mod_degree(&self, a: &ABarElement) -> Option<i64> {
        a.degree().map(|d| d as i64)
    }

    fn anchor(&self, qs: &[QElement], m: &ABarElement) -> ABarElement {
        let primed = self
            .structure
            .anchor(qs, &self.to_prime(m))
            .expect("foliation anchors are total");
        self.to_base(&primed)
    }

    fn max_anchor_arity(&self) -> usize {
        3
    }
}

impl LieRinehartOracle for PrimeSourceOracle {
    fn module_action(&self, a: &ABarElement, q: &QElement) -> QElement {
        q.wedge_abar(&self.to_prime(a))
    }
}

/// The change-of-splitting morphism `(phi, Phi)` seen through the generic
/// morphism interfaces. Components ignore the oracle handles: they are
/// fully determined by the pair.
pub struct SplittingMorphism<'a> {
    pub pair: &'a SplittingPair,
}

impl<'a, S, T> MorphismFamily<S, T> for SplittingMorphism<'a>
where
    S: BracketOracle<Elt = QElement>,
    T: BracketOracle<Elt = QElement>,
{
    fn component(&self, _src: &S, _tgt: &T, k: usize, args: &[QElement]) -> QElement {
        if k == 0 {
            return QElement::zero(self.pair.base().splitting());
        }
        self.pair
            .cap_phi(args)
            .expect("morphism components are total on homogeneous arguments")
    }

    fn max_component_arity(&self) -> usize {
        32
    }
}

impl<'a, S, T> AnchoredMorphism<S, T> for SplittingMorphism<'a>
where
    S: ModuleOracle<Elt = QElement, Module = ABarElement>,
    T: ModuleOracle<Elt = QElement, Module = ABarElement>,
{
    fn phi(&self, _src: &S, k: usize, ps: &[QElement], a: &ABarElement) -> ABarElement {
        if k == 0 {
            return a.clone();
        }
        self.pair
            .phi(ps, a)
            .expect("scalar components are total on homogeneous arguments")
    }

    fn cap_phi(&self, _src: &S, _tgt: &T, _k: usize, ps: &[QElement]) -> QElement {
        self.pair
            .cap_phi(ps)
            .expect("morphism components are total on homogeneous arguments")
    }

    fn max_component_arity(&self) -> usize {
        32
    }
}
