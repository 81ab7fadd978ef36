//! Polynomial charts and splittings of the tangent bundle.
//!
//! A chart fixes leaf coordinates `x^1..x^n` (tangent to the foliation) and
//! transverse coordinates `u^1..u^m`. A splitting chooses a complement to the
//! leaf distribution, encoded by polynomial coefficients `V_alpha^i`: the
//! complementary frame fields are `V_alpha = d/du^alpha + V_alpha^i d/dx^i`,
//! and the dual adapted coframe is `{ dCx^i = dx^i - V_alpha^i du^alpha,
//! du^alpha }`.
//!
//! # Design notes
//! - Charts and splittings are immutable and `Arc`-shared; forms hold a
//!   handle to their splitting so that frame-mixing bugs are caught eagerly.
//! - Mixing frames in a binary operation is a programming error, not a data
//!   error, so it panics rather than returning `Err`.

use crate::poly::{Polynomial, Rat};
use num_traits::One;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

/// Errors raised while constructing charts and splittings.
#[derive(Debug, Error)]
pub enum ChartError {
    #[error("chart needs at least one leaf and one transverse coordinate")]
    Empty,
    #[error("too many coordinates (at most 32 of each kind are supported)")]
    TooLarge,
    #[error("duplicate coordinate name `{0}`")]
    DuplicateName(String),
    #[error("splitting coefficient matrix must be {expected_rows} x {expected_cols}, got {rows} x {cols}")]
    BadShape {
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },
    #[error("splitting coefficient for ({0},{1}) ranges over the wrong number of coordinates")]
    BadCoefficient(usize, usize),
}

#[derive(Debug, PartialEq, Eq)]
struct ChartData {
    leaf: Vec<String>,
    trans: Vec<String>,
    all: Vec<String>,
}

/// A polynomial chart with `n` leaf and `m` transverse coordinates.
///
/// Coordinate indices run `0..n` for leaf coordinates and `n..n+m` for
/// transverse ones; polynomials over the chart use this combined indexing.
#[derive(Clone, Debug)]
pub struct Chart(Arc<ChartData>);

impl PartialEq for Chart {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}
impl Eq for Chart {}

impl Chart {
    /// Build a chart from leaf and transverse coordinate names.
    pub fn new(leaf: Vec<String>, trans: Vec<String>) -> Result<Chart, ChartError> {
        if leaf.is_empty() || trans.is_empty() {
            return Err(ChartError::Empty);
        }
        if leaf.len() > 32 || trans.len() > 32 {
            return Err(ChartError::TooLarge);
        }
        let mut all: Vec<String> = leaf.clone();
        all.extend(trans.iter().cloned());
        for (i, name) in all.iter().enumerate() {
            if all[..i].contains(name) {
                return Err(ChartError::DuplicateName(name.clone()));
            }
        }
        Ok(Chart(Arc::new(ChartData { leaf, trans, all })))
    }

    /// Number of leaf coordinates `n`.
    pub fn n_leaf(&self) -> usize {
        self.0.leaf.len()
    }

    /// Number of transverse coordinates `m`.
    pub fn n_trans(&self) -> usize {
        self.0.trans.len()
    }

    /// Total number of coordinates `n + m`.
    pub fn n_coords(&self) -> usize {
        self.0.all.len()
    }

    /// All coordinate names, leaf first.
    pub fn names(&self) -> &[String] {
        &self.0.all
    }

    /// Name of leaf coordinate `i`.
    pub fn leaf_name(&self, i: usize) -> &str {
        &self.0.leaf[i]
    }

    /// Name of transverse coordinate `alpha`.
    pub fn trans_name(&self, alpha: usize) -> &str {
        &self.0.trans[alpha]
    }

    /// Combined coordinate index of transverse coordinate `alpha`.
    pub fn trans_index(&self, alpha: usize) -> usize {
        self.n_leaf() + alpha
    }
}

#[derive(Debug)]
struct SplittingData {
    chart: Chart,
    /// `v[alpha][i] = V_alpha^i`.
    v: Vec<Vec<Polynomial>>,
    /// Cached exterior differentials `d(dCx^i)` as raw term maps
    /// `(du-mask, dCx-mask) -> coefficient`.
    d_dcx: OnceLock<Vec<std::collections::BTreeMap<(u32, u32), Polynomial>>>,
}

/// A choice of complement to the leaf distribution on a chart.
#[derive(Clone, Debug)]
pub struct Splitting(Arc<SplittingData>);

impl PartialEq for Splitting {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.chart == other.0.chart && self.0.v == other.0.v)
    }
}
impl Eq for Splitting {}

impl Splitting {
    /// Build a splitting from its coefficient matrix `v[alpha][i] = V_alpha^i`.
    pub fn new(chart: Chart, v: Vec<Vec<Polynomial>>) -> Result<Splitting, ChartError> {
        let (m, n) = (chart.n_trans(), chart.n_leaf());
        if v.len() != m || v.iter().any(|row| row.len() != n) {
            return Err(ChartError::BadShape {
                expected_rows: m,
                expected_cols: n,
                rows: v.len(),
                cols: v.first().map_or(0, |r| r.len()),
            });
        }
        for (alpha, row) in v.iter().enumerate() {
            for (i, p) in row.iter().enumerate() {
                if p.n_vars() != chart.n_coords() {
                    return Err(ChartError::BadCoefficient(alpha, i));
                }
            }
        }
        Ok(Splitting(Arc::new(SplittingData {
            chart,
            v,
            d_dcx: OnceLock::new(),
        })))
    }

    /// The flat splitting (`V_alpha^i = 0`), whose complement is spanned by
    /// the plain `d/du^alpha`.
    pub fn flat(chart: Chart) -> Splitting {
        let n_coords = chart.n_coords();
        let v = vec![vec![Polynomial::zero(n_coords); chart.n_leaf()]; chart.n_trans()];
        Splitting::new(chart, v).expect("flat splitting is well-formed")
    }

    pub fn chart(&self) -> &Chart {
        &self.0.chart
    }

    /// Coefficient `V_alpha^i`.
    pub fn v(&self, alpha: usize, i: usize) -> &Polynomial {
        &self.0.v[alpha][i]
    }

    /// Apply the frame field `V_alpha = d/du^alpha + V_alpha^i d/dx^i` to a
    /// scalar.
    pub fn v_apply(&self, alpha: usize, f: &Polynomial) -> Polynomial {
        let chart = self.chart();
        let mut out = f.differentiate(chart.trans_index(alpha));
        for i in 0..chart.n_leaf() {
            out = out.add(&self.v(alpha, i).mul(&f.differentiate(i)));
        }
        out
    }

    /// The scalar `one` over this chart (handy for building coefficients).
    pub fn one(&self) -> Polynomial {
        Polynomial::constant(self.chart().n_coords(), Rat::one())
    }

    pub(crate) fn d_dcx_terms(
        &self,
        i: usize,
    ) -> &std::collections::BTreeMap<(u32, u32), Polynomial> {
        let cache = self.0.d_dcx.get_or_init(|| {
            let chart = self.chart();
            let (n, m) = (chart.n_leaf(), chart.n_trans());
            let mut all = Vec::with_capacity(n);
            for i in 0..n {
                // d(dCx^i) = -d(V_alpha^i) ^ du^alpha, with the scalar
                // differential expanded in the adapted coframe:
                // d f = (d_j f) dCx^j + (V_beta f) du^beta.
                let mut terms: std::collections::BTreeMap<(u32, u32), Polynomial> =
                    std::collections::BTreeMap::new();
                let mut push = |key: (u32, u32), p: Polynomial| {
                    if p.is_zero() {
                        return;
                    }
                    let e = terms.entry(key).or_insert_with(|| Polynomial::zero(p.n_vars()));
                    *e = e.add(&p);
                    if e.is_zero() {
                        terms.remove(&key);
                    }
                };
                for alpha in 0..m {
                    let va_i = self.v(alpha, i);
                    // -(d_j V_alpha^i) dCx^j ^ du^alpha
                    //   = +(d_j V_alpha^i) du^alpha ^ dCx^j
                    for j in 0..n {
                        push((1 << alpha, 1 << j), va_i.differentiate(j));
                    }
                    // -(V_beta V_alpha^i) du^beta ^ du^alpha; skip the
                    // diagonal and canonicalize beta < alpha.
                    for beta in 0..m {
                        if beta == alpha {
                            continue;
                        }
                        let coeff = self.v_apply(beta, va_i).neg();
                        if beta < alpha {
                            push(((1 << beta) | (1 << alpha), 0), coeff);
                        } else {
                            push(((1 << alpha) | (1 << beta), 0), coeff.neg());
                        }
                    }
                }
                all.push(terms);
            }
            all
        });
        &cache[i]
    }
}
