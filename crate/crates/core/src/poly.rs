//! Exact multivariate polynomial arithmetic over arbitrary-precision rationals.
//!
//! Polynomials are the coefficient ring of the whole engine: every form,
//! form-valued vector field and bracket below has polynomial components.
//! All arithmetic is exact; there is no floating point anywhere in this crate,
//! so every identity check is a structural equality of canonical forms.
//!
//! # Design notes
//! - Sparse representation: map from exponent multi-index to `BigRational`.
//! - Canonical graded-lexicographic term order, and no stored zero
//!   coefficients, so `==` is structural equality of canonical forms.
//! - A small recursive-descent parser implements the expression grammar used
//!   by scenario files (`expr := term (('+'|'-') term)*`, etc.).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Exact rational coefficient.
pub type Rat = BigRational;

/// Convenience constructor for an integer rational.
pub fn rat(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

/// Convenience constructor for a fraction.
pub fn ratio(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Exponent multi-index, one nonnegative entry per chart coordinate.
///
/// Ordered by graded-lexicographic order (total degree first, then
/// lexicographic on the exponent vector) so that polynomial term order is
/// canonical and reproducible.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    /// The constant monomial over `n_vars` coordinates.
    pub fn constant(n_vars: usize) -> Self {
        Monomial(vec![0; n_vars])
    }

    /// The monomial `coord^1`.
    pub fn var(n_vars: usize, idx: usize) -> Self {
        let mut e = vec![0; n_vars];
        e[idx] = 1;
        Monomial(e)
    }

    /// Total degree (sum of exponents).
    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Product of monomials (exponent sum).
    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

/// Error raised by polynomial construction and parsing.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown coordinate `{0}`")]
    UnknownCoordinate(String),
    #[error("coordinate count mismatch: {0} vs {1}")]
    VarMismatch(usize, usize),
}

/// Sparse multivariate polynomial with exact rational coefficients.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Polynomial {
    n_vars: usize,
    terms: BTreeMap<Monomial, Rat>,
}

impl Polynomial {
    /// Zero polynomial over `n_vars` coordinates.
    pub fn zero(n_vars: usize) -> Self {
        Polynomial {
            n_vars,
            terms: BTreeMap::new(),
        }
    }

    /// Constant polynomial.
    pub fn constant(n_vars: usize, c: Rat) -> Self {
        let mut p = Self::zero(n_vars);
        if !c.is_zero() {
            p.terms.insert(Monomial::constant(n_vars), c);
        }
        p
    }

    /// The unit polynomial.
    pub fn one(n_vars: usize) -> Self {
        Self::constant(n_vars, Rat::one())
    }

    /// The coordinate polynomial `x_idx`.
    pub fn var(n_vars: usize, idx: usize) -> Self {
        let mut p = Self::zero(n_vars);
        p.terms.insert(Monomial::var(n_vars, idx), Rat::one());
        p
    }

    /// Number of chart coordinates this polynomial ranges over.
    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    /// Iterator over (monomial, coefficient) pairs in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.total_degree()).max()
    }

    fn insert_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(e) => {
                let s = e.get().clone() + c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.into_mut() = s;
                }
            }
        }
    }

    fn assert_compatible(&self, other: &Polynomial) {
        assert_eq!(
            self.n_vars, other.n_vars,
            "polynomials over different charts"
        );
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        self.assert_compatible(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Polynomial {
        let mut out = Polynomial::zero(self.n_vars);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), -c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rat) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.n_vars);
        }
        let mut out = Polynomial::zero(self.n_vars);
        for (m, k) in &self.terms {
            out.terms.insert(m.clone(), k * c);
        }
        out
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        self.assert_compatible(other);
        let mut out = Polynomial::zero(self.n_vars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.insert_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Polynomial {
        let mut out = Polynomial::one(self.n_vars);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Formal partial derivative with respect to coordinate `idx`.
    pub fn differentiate(&self, idx: usize) -> Polynomial {
        assert!(idx < self.n_vars, "coordinate index out of range");
        let mut out = Polynomial::zero(self.n_vars);
        for (m, c) in &self.terms {
            let e = m.0[idx];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[idx] = e - 1;
            out.insert_term(Monomial(exps), c * rat(e as i64));
        }
        out
    }

    /// Render using the given coordinate names.
    pub fn display<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, names }
    }
}

/// Pretty-printer helper carrying coordinate names.
pub struct PolyDisplay<'a> {
    poly: &'a Polynomial,
    names: &'a [String],
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.poly.terms.iter().rev() {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || m.total_degree() == 0 {
                factors.push(mag.to_string());
            }
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.names[i].clone()),
                    _ => factors.push(format!("{}^{}", self.names[i], e)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

/// Parse a scalar expression over the given coordinate names.
///
/// Grammar: `expr := term (('+'|'-') term)*`, `term := factor ('*' factor)*`,
/// `factor := rational | coord | '(' expr ')' | factor '^' nonneg-int`,
/// `rational := int ('/' posint)?`. A single leading sign is also accepted.
pub fn parse_expression(text: &str, coords: &[String]) -> Result<Polynomial, PolyError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        coords,
    };
    p.skip_ws();
    let poly = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(PolyError::Syntax {
            pos: p.pos,
            msg: "trailing input".into(),
        });
    }
    Ok(poly)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    coords: &'a [String],
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Polynomial, PolyError> {
        self.skip_ws();
        let mut negate = false;
        if let Some(c @ (b'+' | b'-')) = self.peek() {
            negate = c == b'-';
            self.pos += 1;
        }
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.add(&t);
                }
                Some(b'-') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.sub(&t);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, PolyError> {
        let mut acc = self.factor()?;
        loop {
            self.skip_ws();
            if self.peek() == Some(b'*') {
                self.pos += 1;
                let f = self.factor()?;
                acc = acc.mul(&f);
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Polynomial, PolyError> {
        self.skip_ws();
        let mut base = match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.skip_ws();
                if self.peek() != Some(b')') {
                    return Err(PolyError::Syntax {
                        pos: self.pos,
                        msg: "expected `)`".into(),
                    });
                }
                self.pos += 1;
                inner
            }
            Some(c) if c.is_ascii_digit() => self.rational()?,
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.coordinate()?,
            _ => {
                return Err(PolyError::Syntax {
                    pos: self.pos,
                    msg: "expected factor".into(),
                })
            }
        };
        loop {
            self.skip_ws();
            if self.peek() == Some(b'^') {
                self.pos += 1;
                let n = self.uint()?;
                base = base.pow(n);
            } else {
                return Ok(base);
            }
        }
    }

    fn uint(&mut self) -> Result<u32, PolyError> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(PolyError::Syntax {
                pos: self.pos,
                msg: "expected integer".into(),
            });
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| PolyError::Syntax {
                pos: start,
                msg: "integer out of range".into(),
            })
    }

    fn rational(&mut self) -> Result<Polynomial, PolyError> {
        let num = self.uint()? as i64;
        if self.peek() == Some(b'/') {
            self.pos += 1;
            let den_pos = self.pos;
            let den = self.uint()? as i64;
            if den == 0 {
                return Err(PolyError::Syntax {
                    pos: den_pos,
                    msg: "zero denominator".into(),
                });
            }
            Ok(Polynomial::constant(self.coords.len(), ratio(num, den)))
        } else {
            Ok(Polynomial::constant(self.coords.len(), rat(num)))
        }
    }

    fn coordinate(&mut self) -> Result<Polynomial, PolyError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        match self.coords.iter().position(|c| c == name) {
            Some(idx) => Ok(Polynomial::var(self.coords.len(), idx)),
            None => Err(PolyError::UnknownCoordinate(name.into())),
        }
    }
}
