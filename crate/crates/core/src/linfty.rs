//! Structure-agnostic machinery for homotopy Lie algebras in the symmetric
//! (degree `+1` bracket) convention.
//!
//! The checkers here are parameterized by *oracles*: handles that expose the
//! k-ary brackets (and, for modules and Lie-Rinehart structures, the anchors
//! and the module action) together with the vector-space operations of the
//! argument spaces. This lets the same Jacobiator and morphism-defect code run
//! over the foliation brackets, the presymplectic brackets, the derived
//! brackets, and small abstract bracket tables used as mutation scaffolding.
//!
//! # Key operations
//! - [`jacobiator`]: the k-th Jacobiator of a symmetric bracket family, a sum
//!   over `(i, k-i)`-unshuffles of nested brackets with Koszul signs.
//! - [`module_jacobiator`]: the module Jacobiator, evaluated through the
//!   direct-sum extension of brackets and anchors (the extension vanishes as
//!   soon as two slots carry module elements).
//! - [`morphism_defect`]: the defect whose vanishing characterizes morphisms
//!   of symmetric homotopy structures; [`compose_morphisms_component`] builds
//!   the composite family from the partition sum.
//! - [`anchored_morphism_defect`]: the Lie-Rinehart refinement, matching the
//!   pushforward of anchors through a morphism family against the target
//!   anchors, summed over block permutations with a distinguished lead block.
//! - [`lie_rinehart_defect`]: the higher Leibniz identity tying brackets to
//!   anchors through the module action.
//! - [`TableOracle`] plus [`decalage_to_symmetric`]/[`decalage_to_skew`]: small
//!   explicit bracket tables over the rationals and the sign dictionary
//!   between the skew and symmetric conventions.
//!
//! # Design notes
//! - Koszul signs always consume the degrees reported by the oracle; for the
//!   foliation structure these are the shifted degrees of `Q`-elements.
//! - Brackets and anchors are total functions: oracles return zero above
//!   their maximal nonvanishing arity, and the checkers additionally skip
//!   such terms for speed.
//! - A zero argument makes every multilinear expression vanish, so checkers
//!   short-circuit to zero when an argument has no homogeneous degree but is
//!   zero; a genuinely inhomogeneous argument is an error.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::fnc::{fn_bracket, nr_bracket};
use crate::foliation::{overline, ABarElement, FoliationStructure, QElement};
use crate::poly::{rat, Rat};
use crate::signs::{
    antisymmetric_koszul_sign, block_permutations, decalage_sign, koszul_sign,
    sorted_compositions, strict_unshuffles, unshuffles,
};

/// Errors from the generic checkers.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinftyError {
    /// A nonzero argument without a homogeneous degree.
    #[error("argument {index} is not homogeneous")]
    Inhomogeneous { index: usize },
    /// An argument tuple of the wrong length.
    #[error("expected {expected} arguments, got {got}")]
    ArityMismatch { expected: usize, got: usize },
}

fn sign(e: i64) -> Rat {
    if e.rem_euclid(2) == 0 {
        rat(1)
    } else {
        rat(-1)
    }
}

/// A symmetric bracket family together with the vector-space structure of its
/// argument space.
pub trait BracketOracle {
    /// The argument (and value) space of the brackets.
    type Elt: Clone;

    fn zero(&self) -> Self::Elt;
    fn add(&self, a: &Self::Elt, b: &Self::Elt) -> Self::Elt;
    fn scale(&self, a: &Self::Elt, c: &Rat) -> Self::Elt;
    fn is_zero(&self, a: &Self::Elt) -> bool;
    /// Degree of a homogeneous element (`None` for zero or mixed).
    fn degree(&self, a: &Self::Elt) -> Option<i64>;
    /// The k-ary bracket, `k = args.len()`; total, zero above
    /// [`BracketOracle::max_bracket_arity`].
    fn bracket(&self, args: &[Self::Elt]) -> Self::Elt;
    /// Largest arity at which the bracket may be nonzero.
    fn max_bracket_arity(&self) -> usize;
}

/// A module over a [`BracketOracle`]: a second space acted on by anchors with
/// `k-1` algebra slots and one module slot.
pub trait ModuleOracle: BracketOracle {
    type Module: Clone;

    fn mod_zero(&self) -> Self::Module;
    fn mod_add(&self, a: &Self::Module, b: &Self::Module) -> Self::Module;
    fn mod_scale(&self, a: &Self::Module, c: &Rat) -> Self::Module;
    fn mod_is_zero(&self, a: &Self::Module) -> bool;
    fn mod_degree(&self, a: &Self::Module) -> Option<i64>;
    /// The anchor with `qs.len()` algebra slots acting on `m`; total, zero
    /// when `qs.len() + 1` exceeds [`ModuleOracle::max_anchor_arity`].
    fn anchor(&self, qs: &[Self::Elt], m: &Self::Module) -> Self::Module;
    /// Largest total arity (algebra slots plus the module slot) at which the
    /// anchor may be nonzero.
    fn max_anchor_arity(&self) -> usize;
}

/// A Lie-Rinehart oracle additionally knows the action of the base algebra on
/// the bracket space.
pub trait LieRinehartOracle: ModuleOracle {
    /// The product `a . q` of a base-algebra element with a bracket-space
    /// element.
    fn module_action(&self, a: &Self::Module, q: &Self::Elt) -> Self::Elt;
}

fn argument_degrees<O: BracketOracle>(
    o: &O,
    args: &[O::Elt],
) -> Result<Option<Vec<i64>>, LinftyError> {
    let mut out = Vec::with_capacity(args.len());
    for (index, a) in args.iter().enumerate() {
        match o.degree(a) {
            Some(d) => out.push(d),
            None if o.is_zero(a) => return Ok(None),
            None => return Err(LinftyError::Inhomogeneous { index }),
        }
    }
    Ok(Some(out))
}

/// The k-th Jacobiator of the oracle's bracket family:
/// the sum over `(i, k-i)`-unshuffles, `i >= 1`, of
/// `alpha(sigma) { { v_{sigma(1)}, ..., v_{sigma(i)} }, v_{sigma(i+1)}, ... }`.
pub fn jacobiator<O: BracketOracle>(o: &O, args: &[O::Elt]) -> Result<O::Elt, LinftyError> {
    let k = args.len();
    let degs = match argument_degrees(o, args)? {
        Some(d) => d,
        None => return Ok(o.zero()),
    };
    let mut out = o.zero();
    for i in 1..=k {
        let j = k - i;
        if i > o.max_bracket_arity() || j + 1 > o.max_bracket_arity() {
            continue;
        }
        for sigma in unshuffles(i, j) {
            let alpha = koszul_sign(&sigma, &degs);
            let inner_args: Vec<O::Elt> = sigma[..i].iter().map(|&x| args[x].clone()).collect();
            let inner = o.bracket(&inner_args);
            let mut outer = vec![inner];
            outer.extend(sigma[i..].iter().map(|&x| args[x].clone()));
            out = o.add(&out, &o.scale(&o.bracket(&outer), &rat(alpha)));
        }
    }
    Ok(out)
}

/// The skew-convention k-th Jacobiator (antisymmetric brackets of degree
/// `2-k`): the sum over unshuffles carries the extra `(-1)^{ij}` and the
/// antisymmetric Koszul sign.
pub fn skew_jacobiator<O: BracketOracle>(o: &O, args: &[O::Elt]) -> Result<O::Elt, LinftyError> {
    let k = args.len();
    let degs = match argument_degrees(o, args)? {
        Some(d) => d,
        None => return Ok(o.zero()),
    };
    let mut out = o.zero();
    for i in 1..=k {
        let j = k - i;
        if i > o.max_bracket_arity() || j + 1 > o.max_bracket_arity() {
            continue;
        }
        for sigma in unshuffles(i, j) {
            let chi = antisymmetric_koszul_sign(&sigma, &degs);
            let e = (i * j) as i64;
            let inner_args: Vec<O::Elt> = sigma[..i].iter().map(|&x| args[x].clone()).collect();
            let inner = o.bracket(&inner_args);
            let mut outer = vec![inner];
            outer.extend(sigma[i..].iter().map(|&x| args[x].clone()));
            let coeff = sign(e) * rat(chi);
            out = o.add(&out, &o.scale(&o.bracket(&outer), &coeff));
        }
    }
    Ok(out)
}

/// One slot of the direct sum `L (+) M`.
enum SumSlot<'a, O: ModuleOracle> {
    Algebra(&'a O::Elt, i64),
    Module(&'a O::Module, i64),
}

impl<'a, O: ModuleOracle> SumSlot<'a, O> {
    fn degree(&self) -> i64 {
        match self {
            SumSlot::Algebra(_, d) | SumSlot::Module(_, d) => *d,
        }
    }
}

/// The k-th module Jacobiator, evaluated through the direct-sum extension:
/// each inner/outer bracket resolves to the plain bracket when every slot is
/// from the algebra, to the anchor (after Koszul-moving the module slot to
/// the end) when exactly one slot is from the module, and to zero otherwise.
pub fn module_jacobiator<O: ModuleOracle>(
    o: &O,
    vs: &[O::Elt],
    m: &O::Module,
) -> Result<O::Module, LinftyError> {
    let k = vs.len() + 1;
    let degs = match argument_degrees(o, vs)? {
        Some(d) => d,
        None => return Ok(o.mod_zero()),
    };
    let m_deg = match o.mod_degree(m) {
        Some(d) => d,
        None if o.mod_is_zero(m) => return Ok(o.mod_zero()),
        None => return Err(LinftyError::Inhomogeneous { index: k - 1 }),
    };
    let mut all_degs = degs.clone();
    all_degs.push(m_deg);

    let mut out = o.mod_zero();
    for i in 1..=k {
        let j = k - i;
        for sigma in unshuffles(i, j) {
            let alpha = koszul_sign(&sigma, &all_degs);
            // evaluate {b_{sigma(1..i)}}^(+) first
            let inner_slots: Vec<SumSlot<O>> = sigma[..i]
                .iter()
                .map(|&x| {
                    if x == k - 1 {
                        SumSlot::Module(m, m_deg)
                    } else {
                        SumSlot::Algebra(&vs[x], all_degs[x])
                    }
                })
                .collect();
            let inner_deg: i64 = inner_slots.iter().map(|s| s.degree()).sum::<i64>() + 1;
            let inner = oplus_bracket(o, &inner_slots);
            // then the outer bracket on the inner value plus the rest
            let (inner_q, inner_m) = match inner {
                OplusValue::Algebra(q) => (Some(q), None),
                OplusValue::Module(mm) => (None, Some(mm)),
            };
            let mut outer_slots: Vec<SumSlot<O>> = Vec::with_capacity(j + 1);
            match (&inner_q, &inner_m) {
                (Some(q), _) => outer_slots.push(SumSlot::Algebra(q, inner_deg)),
                (_, Some(mm)) => outer_slots.push(SumSlot::Module(mm, inner_deg)),
                _ => unreachable!(),
            }
            for &x in &sigma[i..] {
                if x == k - 1 {
                    outer_slots.push(SumSlot::Module(m, m_deg));
                } else {
                    outer_slots.push(SumSlot::Algebra(&vs[x], all_degs[x]));
                }
            }
            let outer = oplus_bracket(o, &outer_slots);
            let term = match outer {
                OplusValue::Module(mm) => mm,
                // the module argument appears exactly once, so the total
                // value always lands in the module summand
                OplusValue::Algebra(_) => unreachable!(),
            };
            out = o.mod_add(&out, &o.mod_scale(&term, &rat(alpha)));
        }
    }
    Ok(out)
}

enum OplusValue<O: ModuleOracle> {
    Algebra(O::Elt),
    Module(O::Module),
}

/// The direct-sum bracket on slots: zero with two or more module slots,
/// anchor (with the sign from moving the module slot to the last position)
/// with exactly one, plain bracket with none.
fn oplus_bracket<O: ModuleOracle>(o: &O, slots: &[SumSlot<O>]) -> OplusValue<O> {
    let module_positions: Vec<usize> = slots
        .iter()
        .enumerate()
        .filter(|(_, s)| matches!(s, SumSlot::Module(..)))
        .map(|(p, _)| p)
        .collect();
    match module_positions.as_slice() {
        [] => {
            let qs: Vec<O::Elt> = slots
                .iter()
                .map(|s| match s {
                    SumSlot::Algebra(q, _) => (*q).clone(),
                    SumSlot::Module(..) => unreachable!(),
                })
                .collect();
            OplusValue::Algebra(o.bracket(&qs))
        }
        [p] => {
            let (mm, m_deg) = match &slots[*p] {
                SumSlot::Module(mm, d) => (*mm, *d),
                SumSlot::Algebra(..) => unreachable!(),
            };
            let trailing: i64 = slots[p + 1..].iter().map(|s| s.degree()).sum();
            let qs: Vec<O::Elt> = slots
                .iter()
                .filter_map(|s| match s {
                    SumSlot::Algebra(q, _) => Some((*q).clone()),
                    SumSlot::Module(..) => None,
                })
                .collect();
            let value = o.anchor(&qs, mm);
            OplusValue::Module(o.mod_scale(&value, &sign(m_deg * trailing)))
        }
        _ => OplusValue::Module(o.mod_zero()),
    }
}

/// A graded-symmetric family of degree-0 multilinear maps between two bracket
/// oracles' argument spaces, one component per arity.
pub trait MorphismFamily<S: BracketOracle, T: BracketOracle> {
    /// The k-ary component; total, zero above
    /// [`MorphismFamily::max_component_arity`].
    fn component(&self, src: &S, tgt: &T, k: usize, args: &[S::Elt]) -> T::Elt;
    fn max_component_arity(&self) -> usize;
}

/// The identity morphism: the unary component is the identity, all higher
/// components vanish.
pub struct IdentityMorphism;

impl<S: BracketOracle> MorphismFamily<S, S> for IdentityMorphism {
    fn component(&self, _src: &S, tgt: &S, k: usize, args: &[S::Elt]) -> S::Elt {
        if k == 1 {
            args[0].clone()
        } else {
            tgt.zero()
        }
    }

    fn max_component_arity(&self) -> usize {
        1
    }
}

/// A morphism family given by explicit closures, one per arity starting at 1.
pub struct ClosureMorphism<S: BracketOracle, T: BracketOracle> {
    #[allow(clippy::type_complexity)]
    pub components: Vec<Box<dyn Fn(&[S::Elt]) -> T::Elt + Sync>>,
}

impl<S: BracketOracle, T: BracketOracle> MorphismFamily<S, T> for ClosureMorphism<S, T> {
    fn component(&self, _src: &S, tgt: &T, k: usize, args: &[S::Elt]) -> T::Elt {
        match k.checked_sub(1).and_then(|i| self.components.get(i)) {
            Some(f) => f(args),
            None => tgt.zero(),
        }
    }

    fn max_component_arity(&self) -> usize {
        self.components.len()
    }
}

/// The morphism defect at arity `k = args.len()`: the unshuffle sum pushing a
/// source bracket through the family minus the partition sum of target
/// brackets of family components. Zero at every arity iff the family is a
/// morphism of symmetric homotopy structures.
pub fn morphism_defect<S, T, F>(
    fam: &F,
    src: &S,
    tgt: &T,
    args: &[S::Elt],
) -> Result<T::Elt, LinftyError>
where
    S: BracketOracle,
    T: BracketOracle,
    F: MorphismFamily<S, T>,
{
    let k = args.len();
    let degs = match argument_degrees(src, args)? {
        Some(d) => d,
        None => return Ok(tgt.zero()),
    };
    let mut out = tgt.zero();
    // bracket-then-map sum
    for i in 1..=k {
        let j = k - i;
        if i > src.max_bracket_arity() || j + 1 > fam.max_component_arity() {
            continue;
        }
        for sigma in unshuffles(i, j) {
            let alpha = koszul_sign(&sigma, &degs);
            let inner_args: Vec<S::Elt> = sigma[..i].iter().map(|&x| args[x].clone()).collect();
            let mut f_args = vec![src.bracket(&inner_args)];
            f_args.extend(sigma[i..].iter().map(|&x| args[x].clone()));
            let term = fam.component(src, tgt, j + 1, &f_args);
            out = tgt.add(&out, &tgt.scale(&term, &rat(alpha)));
        }
    }
    // map-then-bracket sum
    for ell in 1..=k {
        if ell > tgt.max_bracket_arity() {
            continue;
        }
        for parts in sorted_compositions(k, ell) {
            for sigma in strict_unshuffles(parts.clone()) {
                let alpha = koszul_sign(&sigma, &degs);
                let mut mapped = Vec::with_capacity(ell);
                let mut offset = 0;
                for &sz in &parts {
                    let block: Vec<S::Elt> = sigma[offset..offset + sz]
                        .iter()
                        .map(|&x| args[x].clone())
                        .collect();
                    mapped.push(fam.component(src, tgt, sz, &block));
                    offset += sz;
                }
                let term = tgt.bracket(&mapped);
                out = tgt.add(&out, &tgt.scale(&term, &rat(-alpha)));
            }
        }
    }
    Ok(out)
}

/// The k-ary component of the composite `g . f`: the partition sum applying
/// the components of `f` blockwise and feeding the results to a component of
/// `g`.
pub fn compose_morphisms_component<S, M, T, F, G>(
    g: &G,
    f: &F,
    src: &S,
    mid: &M,
    tgt: &T,
    args: &[S::Elt],
) -> Result<T::Elt, LinftyError>
where
    S: BracketOracle,
    M: BracketOracle,
    T: BracketOracle,
    F: MorphismFamily<S, M>,
    G: MorphismFamily<M, T>,
{
    let k = args.len();
    let degs = match argument_degrees(src, args)? {
        Some(d) => d,
        None => return Ok(tgt.zero()),
    };
    let mut out = tgt.zero();
    for ell in 1..=k {
        if ell > g.max_component_arity() {
            continue;
        }
        for parts in sorted_compositions(k, ell) {
            for sigma in strict_unshuffles(parts.clone()) {
                let alpha = koszul_sign(&sigma, &degs);
                let mut mapped = Vec::with_capacity(ell);
                let mut offset = 0;
                for &sz in &parts {
                    let block: Vec<S::Elt> = sigma[offset..offset + sz]
                        .iter()
                        .map(|&x| args[x].clone())
                        .collect();
                    mapped.push(f.component(src, mid, sz, &block));
                    offset += sz;
                }
                let term = g.component(mid, tgt, ell, &mapped);
                out = tgt.add(&out, &tgt.scale(&term, &rat(alpha)));
            }
        }
    }
    Ok(out)
}

/// A composite morphism family built lazily from the partition sum.
pub struct ComposedMorphism<'a, M, F, G> {
    pub f: &'a F,
    pub g: &'a G,
    pub mid: &'a M,
}

impl<'a, S, M, T, F, G> MorphismFamily<S, T> for ComposedMorphism<'a, M, F, G>
where
    S: BracketOracle,
    M: BracketOracle,
    T: BracketOracle,
    F: MorphismFamily<S, M>,
    G: MorphismFamily<M, T>,
{
    fn component(&self, src: &S, tgt: &T, k: usize, args: &[S::Elt]) -> T::Elt {
        debug_assert_eq!(k, args.len());
        compose_morphisms_component(self.g, self.f, src, self.mid, tgt, args)
            .unwrap_or_else(|_| tgt.zero())
    }

    fn max_component_arity(&self) -> usize {
        usize::MAX
    }
}

/// An anchored (Lie-Rinehart) morphism family between two module oracles
/// sharing the base module space: the `phi` components act on the base
/// algebra, the `cap_phi` components map argument tuples into the target
/// bracket space.
pub trait AnchoredMorphism<S, T>
where
    S: ModuleOracle,
    T: ModuleOracle<Module = S::Module>,
{
    /// The component with `k` bracket-space slots acting on a base element;
    /// `phi(0, [], a) = a`.
    fn phi(&self, src: &S, k: usize, ps: &[S::Elt], a: &S::Module) -> S::Module;
    /// The component mapping `k >= 1` source arguments into the target
    /// bracket space.
    fn cap_phi(&self, src: &S, tgt: &T, k: usize, ps: &[S::Elt]) -> T::Elt;
    fn max_component_arity(&self) -> usize;
}

/// The identity anchored family on a single module oracle: `phi_0` is the
/// identity on the base, `cap_phi_1` the identity on the bracket space, and
/// all other components vanish.
pub struct IdentityAnchored;

impl<S: ModuleOracle> AnchoredMorphism<S, S> for IdentityAnchored {
    fn phi(&self, src: &S, k: usize, _ps: &[S::Elt], a: &S::Module) -> S::Module {
        if k == 0 {
            a.clone()
        } else {
            src.mod_zero()
        }
    }

    fn cap_phi(&self, _src: &S, tgt: &S, k: usize, ps: &[S::Elt]) -> S::Elt {
        if k == 1 {
            ps[0].clone()
        } else {
            tgt.zero()
        }
    }

    fn max_component_arity(&self) -> usize {
        1
    }
}

/// The anchored-morphism defect at arity `k = args.len()`: the block
/// permutation sum feeding target anchors of `cap_phi` images through `phi`,
/// minus the source-anchor and bracket-shift sums. Zero at every arity iff
/// the family respects the anchors.
///
/// The lead block (the `phi` slots) is exempt from the strictness rule tying
/// equal-size blocks; the remaining blocks feed the `cap_phi` components in
/// weakly increasing sizes.
pub fn anchored_morphism_defect<S, T, F>(
    fam: &F,
    src: &S,
    tgt: &T,
    args: &[S::Elt],
    a: &S::Module,
) -> Result<S::Module, LinftyError>
where
    S: ModuleOracle,
    T: ModuleOracle<Module = S::Module>,
    F: AnchoredMorphism<S, T>,
{
    let k = args.len();
    let degs = match argument_degrees(src, args)? {
        Some(d) => d,
        None => return Ok(src.mod_zero()),
    };
    if src.mod_is_zero(a) {
        return Ok(src.mod_zero());
    }
    let mut out = src.mod_zero();

    // pushforward side: anchors of the target evaluated on cap_phi images
    for m in 0..=k {
        for ell0 in 0..=(k - m) {
            let parts = if m == 0 {
                if ell0 != k {
                    continue;
                }
                vec![Vec::new()]
            } else {
                sorted_compositions(k - ell0, m)
            };
            for part in parts {
                let mut sizes = Vec::with_capacity(m + 1);
                sizes.push(ell0);
                sizes.extend(part.iter().copied());
                for sigma in block_permutations(sizes.clone(), 1) {
                    let alpha = koszul_sign(&sigma, &degs);
                    let e: i64 = sigma[..ell0].iter().map(|&x| degs[x]).sum();
                    let lead: Vec<S::Elt> =
                        sigma[..ell0].iter().map(|&x| args[x].clone()).collect();
                    let mut phis = Vec::with_capacity(m);
                    let mut offset = ell0;
                    for &sz in &part {
                        let block: Vec<S::Elt> = sigma[offset..offset + sz]
                            .iter()
                            .map(|&x| args[x].clone())
                            .collect();
                        phis.push(fam.cap_phi(src, tgt, sz, &block));
                        offset += sz;
                    }
                    let inner = tgt.anchor(&phis, a);
                    let term = fam.phi(src, ell0, &lead, &inner);
                    let coeff = sign(e) * rat(alpha);
                    out = src.mod_add(&out, &src.mod_scale(&term, &coeff));
                }
            }
        }
    }

    // source-anchor side
    for ell in 0..=k {
        let m = k - ell;
        for sigma in unshuffles(ell, m) {
            let alpha = koszul_sign(&sigma, &degs);
            let lead: Vec<S::Elt> = sigma[..ell].iter().map(|&x| args[x].clone()).collect();
            let rest: Vec<S::Elt> = sigma[ell..].iter().map(|&x| args[x].clone()).collect();
            let inner = fam.phi(src, m, &rest, a);
            let term = src.anchor(&lead, &inner);
            out = src.mod_add(&out, &src.mod_scale(&term, &rat(-alpha)));
        }
    }

    // bracket-shift side
    for ell in 1..=k {
        let m = k - ell;
        if ell > src.max_bracket_arity() {
            continue;
        }
        for sigma in unshuffles(ell, m) {
            let alpha = koszul_sign(&sigma, &degs);
            let lead: Vec<S::Elt> = sigma[..ell].iter().map(|&x| args[x].clone()).collect();
            let mut phi_args = vec![src.bracket(&lead)];
            phi_args.extend(sigma[ell..].iter().map(|&x| args[x].clone()));
            let term = fam.phi(src, m + 1, &phi_args, a);
            out = src.mod_add(&out, &src.mod_scale(&term, &rat(alpha)));
        }
    }
    Ok(out)
}

/// The Lie-Rinehart (higher Leibniz) defect:
/// `{q_1, ..., q_{k-1}, a.q_k} - {q_1, ..., q_{k-1}|a}.q_k
///  - (-1)^{a(q_1+...+q_{k-1}+1)} a.{q_1, ..., q_k}`.
pub fn lie_rinehart_defect<O: LieRinehartOracle>(
    o: &O,
    qs: &[O::Elt],
    a: &O::Module,
    q_last: &O::Elt,
) -> Result<O::Elt, LinftyError> {
    let degs = match argument_degrees(o, qs)? {
        Some(d) => d,
        None => return Ok(o.zero()),
    };
    let a_deg = match o.mod_degree(a) {
        Some(d) => d,
        None if o.mod_is_zero(a) => return Ok(o.zero()),
        None => return Err(LinftyError::Inhomogeneous { index: qs.len() }),
    };
    let mut lhs_args: Vec<O::Elt> = qs.to_vec();
    lhs_args.push(o.module_action(a, q_last));
    let lhs = o.bracket(&lhs_args);

    let anchored = o.anchor(qs, a);
    let first = o.module_action(&anchored, q_last);

    let mut plain_args: Vec<O::Elt> = qs.to_vec();
    plain_args.push(q_last.clone());
    let plain = o.bracket(&plain_args);
    let e = a_deg * (degs.iter().sum::<i64>() + 1);
    let second = o.scale(&o.module_action(a, &plain), &sign(e));

    let rhs = o.add(&first, &second);
    Ok(o.add(&lhs, &o.scale(&rhs, &rat(-1))))
}

/// Which single Koszul sign inside the binary foliation bracket to corrupt;
/// used by the mutation-sensitivity checks to confirm the Jacobiator suite
/// detects any such slip.
///
/// Only degree-dependent sign slips in the Frolicher-Nijenhuis term qualify.
/// A global prefactor flip of the whole binary bracket is conjugation by
/// `Z -> -Z` and satisfies every Jacobi identity, and every single-flip
/// corruption of the curvature term still carries a `du` factor or a
/// leaf-direction value, both of which the normal projection annihilates
/// (the same mechanism that makes the Frolicher-Nijenhuis-only alternative
/// route compute the identical bracket). The corruptions below each flip one
/// degree-dependent Koszul sign that a careless transcription could get
/// wrong, and each is detectable at arity 2 or 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    /// The faithful brackets.
    None,
    /// Evaluate the bracket on the swapped pair without the Koszul sign that
    /// graded symmetry requires, i.e. `{Z1,Z2}' = {Z2,Z1}`.
    SwappedArguments,
    /// Read the prefactor exponent off the wrong argument: `(-1)^{Z2}`
    /// instead of `(-1)^{Z1}`.
    WrongDegreeExponent,
    /// Reorder the Frolicher-Nijenhuis bracket without the Koszul sign its
    /// graded antisymmetry requires: use `-[[Z2,Z1]]` for `[[Z1,Z2]]`.
    AntisymmetryKoszul,
}

/// The foliation Lie-Rinehart structure seen through the oracle interface,
/// with an optional sign mutation in the binary bracket.
pub struct FoliationOracle {
    pub structure: FoliationStructure,
    pub mutation: Mutation,
}

impl FoliationOracle {
    pub fn new(structure: FoliationStructure) -> FoliationOracle {
        FoliationOracle {
            structure,
            mutation: Mutation::None,
        }
    }

    pub fn mutated(structure: FoliationStructure, mutation: Mutation) -> FoliationOracle {
        FoliationOracle {
            structure,
            mutation,
        }
    }

    fn mutated_binary(&self, z1: &QElement, z2: &QElement) -> QElement {
        let (z1, z2) = match self.mutation {
            Mutation::SwappedArguments => (z2, z1),
            _ => (z1, z2),
        };
        let z1sh = z1.shifted_degree().unwrap_or(0);
        let z2sh = z2.shifted_degree().unwrap_or(0);
        let e1 = z1.embed();
        let e2 = z2.embed();
        let exp = match self.mutation {
            Mutation::WrongDegreeExponent => z2sh + 1,
            _ => z1sh + 1,
        };
        let fn_term = match self.mutation {
            Mutation::AntisymmetryKoszul => fn_bracket(&e2, &e1).neg().scale(&sign(exp)),
            _ => fn_bracket(&e1, &e2).scale(&sign(exp)),
        };
        let r = self.structure.curvature();
        let nr_term = nr_bracket(&nr_bracket(r, &e1), &e2);
        overline(&fn_term.add(&nr_term))
    }
}

impl BracketOracle for FoliationOracle {
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
        if args.len() == 2 && self.mutation != Mutation::None {
            return self.mutated_binary(&args[0], &args[1]);
        }
        self.structure
            .bracket(args)
            .expect("foliation brackets are total")
    }

    fn max_bracket_arity(&self) -> usize {
        3
    }
}

impl ModuleOracle for FoliationOracle {
    type Module = ABarElement;

    fn mod_zero(&self) -> ABarElement {
        ABarElement::zero(self.structure.splitting())
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
        self.structure
            .anchor(qs, m)
            .expect("foliation anchors are total")
    }

    fn max_anchor_arity(&self) -> usize {
        3
    }
}

impl LieRinehartOracle for FoliationOracle {
    fn module_action(&self, a: &ABarElement, q: &QElement) -> QElement {
        q.wedge_abar(a)
    }
}

/// A finite-dimensional bracket structure given by an explicit table over the
/// rationals; test scaffolding for the sign dictionary and mutation checks.
///
/// Elements are coefficient vectors over a fixed homogeneous basis. Bracket
/// values are stored for basis tuples in weakly increasing index order; other
/// orders are reduced to the canonical one with the Koszul sign of the
/// chosen flavor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableOracle {
    /// Degree of each basis vector.
    pub degrees: Vec<i64>,
    /// `sorted basis tuple -> result vector` per arity (the tuple length).
    pub entries: BTreeMap<Vec<usize>, Vec<Rat>>,
    /// `false` for the symmetric convention, `true` for the skew one.
    pub skew: bool,
    /// Declared maximal bracket arity.
    pub max_arity: usize,
}

impl TableOracle {
    /// Sort a basis tuple into weakly increasing order, accumulating the
    /// Koszul sign of the flavor; `None` when a repeated basis vector forces
    /// the term to vanish (odd degree under the symmetric convention, even
    /// degree under the skew one).
    fn canonicalize(&self, idxs: &[usize]) -> Option<(Vec<usize>, i64)> {
        let mut v = idxs.to_vec();
        let mut s = 1i64;
        // bubble sort tracks adjacent transpositions exactly
        for i in 0..v.len() {
            for j in 0..v.len().saturating_sub(1 + i) {
                if v[j] > v[j + 1] {
                    let d = self.degrees[v[j]] * self.degrees[v[j + 1]];
                    if d % 2 != 0 {
                        s = -s;
                    }
                    if self.skew {
                        s = -s;
                    }
                    v.swap(j, j + 1);
                }
            }
        }
        for w in v.windows(2) {
            if w[0] == w[1] {
                let odd = self.degrees[w[0]].rem_euclid(2) == 1;
                if odd != self.skew {
                    return None;
                }
            }
        }
        Some((v, s))
    }
}

impl BracketOracle for TableOracle {
    type Elt = Vec<Rat>;

    fn zero(&self) -> Vec<Rat> {
        vec![rat(0); self.degrees.len()]
    }

    fn add(&self, a: &Vec<Rat>, b: &Vec<Rat>) -> Vec<Rat> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    fn scale(&self, a: &Vec<Rat>, c: &Rat) -> Vec<Rat> {
        a.iter().map(|x| x * c).collect()
    }

    fn is_zero(&self, a: &Vec<Rat>) -> bool {
        a.iter().all(|x| x == &rat(0))
    }

    fn degree(&self, a: &Vec<Rat>) -> Option<i64> {
        let mut deg = None;
        for (i, c) in a.iter().enumerate() {
            if c == &rat(0) {
                continue;
            }
            match deg {
                None => deg = Some(self.degrees[i]),
                Some(d) if d != self.degrees[i] => return None,
                _ => {}
            }
        }
        deg
    }

    fn bracket(&self, args: &[Vec<Rat>]) -> Vec<Rat> {
        let mut out = self.zero();
        if args.is_empty() || args.len() > self.max_arity {
            return out;
        }
        // multilinear expansion over basis supports
        let supports: Vec<Vec<usize>> = args
            .iter()
            .map(|a| {
                a.iter()
                    .enumerate()
                    .filter(|(_, c)| *c != &rat(0))
                    .map(|(i, _)| i)
                    .collect()
            })
            .collect();
        if supports.iter().any(|s| s.is_empty()) {
            return out;
        }
        let mut pick = vec![0usize; args.len()];
        'outer: loop {
            let idxs: Vec<usize> = pick
                .iter()
                .enumerate()
                .map(|(slot, &p)| supports[slot][p])
                .collect();
            let coeff: Rat = pick
                .iter()
                .enumerate()
                .map(|(slot, &p)| args[slot][supports[slot][p]].clone())
                .fold(rat(1), |acc, c| acc * c);
            if let Some((key, s)) = self.canonicalize(&idxs) {
                if let Some(value) = self.entries.get(&key) {
                    let scaled: Vec<Rat> = value.iter().map(|v| v * &coeff * rat(s)).collect();
                    out = self.add(&out, &scaled);
                }
            }
            // advance the multi-index
            for slot in (0..pick.len()).rev() {
                if supports[slot].is_empty() {
                    break 'outer;
                }
                if pick[slot] + 1 < supports[slot].len() {
                    pick[slot] += 1;
                    for p in pick.iter_mut().skip(slot + 1) {
                        *p = 0;
                    }
                    continue 'outer;
                }
            }
            break;
        }
        out
    }

    fn max_bracket_arity(&self) -> usize {
        self.max_arity
    }
}

/// Convert a skew bracket table (degrees read in the unshifted space) into
/// the symmetric one on the suspension: basis degrees drop by one and each
/// canonical entry picks up the degree-shift sign computed from the unshifted
/// degrees of its tuple.
pub fn decalage_to_symmetric(skew: &TableOracle) -> TableOracle {
    assert!(skew.skew, "source table must be in the skew convention");
    let mut entries = BTreeMap::new();
    for (key, value) in &skew.entries {
        let unshifted: Vec<i64> = key.iter().map(|&i| skew.degrees[i]).collect();
        let s = decalage_sign(&unshifted);
        entries.insert(key.clone(), value.iter().map(|v| v * rat(s)).collect());
    }
    TableOracle {
        degrees: skew.degrees.iter().map(|d| d - 1).collect(),
        entries,
        skew: false,
        max_arity: skew.max_arity,
    }
}

/// Inverse of [`decalage_to_symmetric`]: basis degrees rise by one and each
/// entry is divided by (equivalently, multiplied by) the same sign, computed
/// from the unshifted degrees.
pub fn decalage_to_skew(symmetric: &TableOracle) -> TableOracle {
    assert!(
        !symmetric.skew,
        "source table must be in the symmetric convention"
    );
    let degrees: Vec<i64> = symmetric.degrees.iter().map(|d| d + 1).collect();
    let mut entries = BTreeMap::new();
    for (key, value) in &symmetric.entries {
        let unshifted: Vec<i64> = key.iter().map(|&i| degrees[i]).collect();
        let s = decalage_sign(&unshifted);
        entries.insert(key.clone(), value.iter().map(|v| v * rat(s)).collect());
    }
    TableOracle {
        degrees,
        entries,
        skew: true,
        max_arity: symmetric.max_arity,
    }
}
