// SPDX-License-Identifier: Apache-2.0

//! Homogeneous bar-complex chains and cochains for the free abelian group Z^n.
//!
//! Chains are stored in coinvariant normal form: every simplex is translated so
//! that its first vertex is the origin. The boundary re-normalizes each face, so
//! identities that only hold modulo the diagonal Z^n-action (for instance that
//! the fundamental cycle is closed) become literal equalities of maps.
//!
//! All chain arithmetic is exact. Cochains may be rational-, real- or
//! circle-valued (the latter stored as a rational in `[0, 1)`).

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num::{BigInt, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{ChainError, ParseError};
use crate::rational::{format_q, frac, parse_q, to_f64, Q};

/// Largest dimension accepted by [`fundamental_cycle`] unless raised explicitly.
pub const DEFAULT_DIMENSION_CAP: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatticePoint(Vec<i64>);

impl LatticePoint {
    pub fn new(coords: Vec<i64>) -> Self {
        LatticePoint(coords)
    }

    pub fn origin(dim: usize) -> Self {
        LatticePoint(vec![0; dim])
    }

    /// The i-th canonical basis vector (0-based).
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut coords = vec![0; dim];
        coords[i] = 1;
        LatticePoint(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn add(&self, other: &LatticePoint) -> LatticePoint {
        LatticePoint(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &LatticePoint) -> LatticePoint {
        LatticePoint(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// An ordered tuple of lattice points with first vertex at the origin.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Simplex {
    vertices: Vec<LatticePoint>,
}

impl Simplex {
    /// Builds the normal form of the diagonal orbit of `vertices`.
    pub fn new(vertices: Vec<LatticePoint>) -> Result<Self, ChainError> {
        let first = vertices
            .first()
            .ok_or_else(|| ChainError::Degree("a simplex needs at least one vertex".into()))?
            .clone();
        let dim = first.dim();
        if dim == 0 {
            return Err(ChainError::EmptyDimension);
        }
        if let Some(bad) = vertices.iter().find(|v| v.dim() != dim) {
            return Err(ChainError::Dimension {
                expected: dim,
                found: bad.dim(),
            });
        }
        let vertices = vertices.iter().map(|v| v.sub(&first)).collect();
        Ok(Simplex { vertices })
    }

    pub fn vertices(&self) -> &[LatticePoint] {
        &self.vertices
    }

    pub fn degree(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].dim()
    }

    /// The face omitting vertex `i`, re-normalized.
    pub fn face(&self, i: usize) -> Simplex {
        let mut vertices = self.vertices.clone();
        vertices.remove(i);
        // Same dimension and non-empty by construction.
        Simplex::new(vertices).expect("face of a valid simplex")
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

/// Finite formal sum of simplices with nonzero rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeChain {
    dim: usize,
    degree: usize,
    terms: BTreeMap<Simplex, Q>,
}

impl LatticeChain {
    pub fn zero(dim: usize, degree: usize) -> Self {
        LatticeChain {
            dim,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms<I>(dim: usize, degree: usize, terms: I) -> Result<Self, ChainError>
    where
        I: IntoIterator<Item = (Q, Vec<LatticePoint>)>,
    {
        let mut chain = LatticeChain::zero(dim, degree);
        for (coeff, vertices) in terms {
            chain.add_term(coeff, Simplex::new(vertices)?)?;
        }
        Ok(chain)
    }

    pub fn add_term(&mut self, coeff: Q, simplex: Simplex) -> Result<(), ChainError> {
        if simplex.dim() != self.dim {
            return Err(ChainError::Dimension {
                expected: self.dim,
                found: simplex.dim(),
            });
        }
        if simplex.degree() != self.degree {
            return Err(ChainError::Degree(format!(
                "simplex of degree {} added to a degree-{} chain",
                simplex.degree(),
                self.degree
            )));
        }
        if coeff.is_zero() {
            return Ok(());
        }
        let entry = self.terms.entry(simplex);
        match entry {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                *slot.get_mut() += coeff;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Simplex, &Q)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, simplex: &Simplex) -> Q {
        self.terms.get(simplex).cloned().unwrap_or_else(Q::zero)
    }

    pub fn scale(&self, factor: &Q) -> LatticeChain {
        if factor.is_zero() {
            return LatticeChain::zero(self.dim, self.degree);
        }
        LatticeChain {
            dim: self.dim,
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|(s, c)| (s.clone(), c * factor))
                .collect(),
        }
    }

    pub fn add(&self, other: &LatticeChain) -> Result<LatticeChain, ChainError> {
        if other.dim != self.dim {
            return Err(ChainError::Dimension {
                expected: self.dim,
                found: other.dim,
            });
        }
        let mut out = self.clone();
        for (s, c) in &other.terms {
            out.add_term(c.clone(), s.clone())?;
        }
        Ok(out)
    }

    /// Alternating face sum with re-normalized faces.
    pub fn boundary(&self) -> Result<LatticeChain, ChainError> {
        if self.degree == 0 {
            return Err(ChainError::Degree(
                "boundary of a degree-0 chain is undefined".into(),
            ));
        }
        let mut out = LatticeChain::zero(self.dim, self.degree - 1);
        for (simplex, coeff) in &self.terms {
            for i in 0..=self.degree {
                let c = if i % 2 == 0 { coeff.clone() } else { -coeff };
                out.add_term(c, simplex.face(i))?;
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> ChainJson {
        ChainJson {
            dim: self.dim,
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|(s, c)| TermJson {
                    coeff: format_q(c),
                    vertices: s.vertices.iter().map(|v| v.0.clone()).collect(),
                })
                .collect(),
        }
    }

    pub fn from_json(json: &ChainJson) -> Result<Self, ParseError> {
        if json.dim == 0 {
            return Err(ParseError::Schema("dim must be at least 1".into()));
        }
        let mut chain = LatticeChain::zero(json.dim, json.degree);
        for (i, term) in json.terms.iter().enumerate() {
            let coeff = parse_q(&term.coeff)?;
            if term.vertices.len() != json.degree + 1 {
                return Err(ParseError::Schema(format!(
                    "term {i} has {} vertices, degree {} needs {}",
                    term.vertices.len(),
                    json.degree,
                    json.degree + 1
                )));
            }
            let vertices: Vec<LatticePoint> = term
                .vertices
                .iter()
                .map(|v| LatticePoint::new(v.clone()))
                .collect();
            if vertices.iter().any(|v| v.dim() != json.dim) {
                return Err(ParseError::Schema(format!(
                    "term {i} has a vertex outside Z^{}",
                    json.dim
                )));
            }
            let simplex =
                Simplex::new(vertices).map_err(|e| ParseError::Schema(e.to_string()))?;
            chain
                .add_term(coeff, simplex)
                .map_err(|e| ParseError::Schema(e.to_string()))?;
        }
        Ok(chain)
    }

    pub fn parse_json(text: &str) -> Result<Self, ParseError> {
        let json: ChainJson = serde_json::from_str(text)?;
        Self::from_json(&json)
    }
}

impl fmt::Display for LatticeChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (s, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            let magnitude = c.abs();
            match (i, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if magnitude != Q::from_integer(1.into()) {
                write!(f, "{magnitude}")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ChainJson {
    pub dim: usize,
    pub degree: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TermJson {
    pub coeff: String,
    pub vertices: Vec<Vec<i64>>,
}

/// All permutations of `0..n` with their signs, in lexicographic order.
pub fn signed_permutations(n: usize) -> Vec<(Vec<usize>, i32)> {
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        out.push((perm.clone(), permutation_sign(&perm)));
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| perm[i - 1] < perm[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| perm[j] > perm[i - 1]).unwrap();
        perm.swap(i - 1, j);
        perm[i..].reverse();
    }
    out
}

fn permutation_sign(perm: &[usize]) -> i32 {
    let mut inversions = 0;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// The signed sum over Sym(n) of the staircase simplices
/// `[0, e_s(1), e_s(1)+e_s(2), ..., e_s(1)+...+e_s(n)]`, a cycle representing
/// the fundamental class of Z^n.
pub fn fundamental_cycle(n: usize) -> Result<LatticeChain, ChainError> {
    fundamental_cycle_with_cap(n, DEFAULT_DIMENSION_CAP)
}

pub fn fundamental_cycle_with_cap(n: usize, cap: usize) -> Result<LatticeChain, ChainError> {
    if n == 0 {
        return Err(ChainError::EmptyDimension);
    }
    if n > cap {
        return Err(ChainError::SizeLimit { requested: n, cap });
    }
    let mut chain = LatticeChain::zero(n, n);
    for (perm, sign) in signed_permutations(n) {
        let mut vertices = Vec::with_capacity(n + 1);
        let mut current = LatticePoint::origin(n);
        vertices.push(current.clone());
        for &axis in &perm {
            current = current.add(&LatticePoint::basis(n, axis));
            vertices.push(current.clone());
        }
        chain.add_term(Q::from_integer(sign.into()), Simplex::new(vertices)?)?;
    }
    Ok(chain)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValueKind {
    Rational,
    Real,
    /// R/Z, stored as the representative in `[0, 1)`.
    Circle,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CochainValue {
    Rational(Q),
    Real(f64),
    Circle(Q),
}

impl CochainValue {
    pub fn zero(kind: ValueKind) -> Self {
        match kind {
            ValueKind::Rational => CochainValue::Rational(Q::zero()),
            ValueKind::Real => CochainValue::Real(0.0),
            ValueKind::Circle => CochainValue::Circle(Q::zero()),
        }
    }

    pub fn kind(&self) -> ValueKind {
        match self {
            CochainValue::Rational(_) => ValueKind::Rational,
            CochainValue::Real(_) => ValueKind::Real,
            CochainValue::Circle(_) => ValueKind::Circle,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            CochainValue::Rational(q) | CochainValue::Circle(q) => q.is_zero(),
            CochainValue::Real(x) => *x == 0.0,
        }
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            CochainValue::Rational(q) | CochainValue::Circle(q) => to_f64(q),
            CochainValue::Real(x) => *x,
        }
    }

    /// The exact value, for rational and circle values.
    pub fn as_rational(&self) -> Option<&Q> {
        match self {
            CochainValue::Rational(q) | CochainValue::Circle(q) => Some(q),
            CochainValue::Real(_) => None,
        }
    }

    fn add(self, other: CochainValue) -> CochainValue {
        match (self, other) {
            (CochainValue::Rational(a), CochainValue::Rational(b)) => CochainValue::Rational(a + b),
            (CochainValue::Circle(a), CochainValue::Circle(b)) => CochainValue::Circle(frac(&(a + b))),
            (a, b) => CochainValue::Real(a.as_f64() + b.as_f64()),
        }
    }

    /// Multiplies by a rational coefficient. Circle values are lifted to
    /// `[0, 1)` first and the product is reduced mod 1.
    pub fn scale(&self, factor: &Q) -> CochainValue {
        match self {
            CochainValue::Rational(a) => CochainValue::Rational(a * factor),
            CochainValue::Real(x) => CochainValue::Real(x * to_f64(factor)),
            CochainValue::Circle(a) => CochainValue::Circle(frac(&(a * factor))),
        }
    }

    fn product(&self, other: &CochainValue) -> CochainValue {
        match (self, other) {
            (CochainValue::Rational(a), CochainValue::Rational(b)) => CochainValue::Rational(a * b),
            (CochainValue::Rational(a), CochainValue::Circle(_)) => other.scale(a),
            (CochainValue::Circle(_), CochainValue::Rational(b)) => self.scale(b),
            (a, b) => CochainValue::Real(a.as_f64() * b.as_f64()),
        }
    }
}

impl fmt::Display for CochainValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CochainValue::Rational(q) | CochainValue::Circle(q) => write!(f, "{}", format_q(q)),
            CochainValue::Real(x) => write!(f, "{x}"),
        }
    }
}

fn product_kind(a: ValueKind, b: ValueKind) -> Result<ValueKind, ChainError> {
    use ValueKind::*;
    match (a, b) {
        (Rational, Rational) => Ok(Rational),
        (Rational, Circle) | (Circle, Rational) => Ok(Circle),
        (Real, Real) | (Real, Rational) | (Rational, Real) => Ok(Real),
        (Circle, Circle) => Err(ChainError::IncompatibleValues(
            "product of two R/Z-valued cochains".into(),
        )),
        (Circle, Real) | (Real, Circle) => Err(ChainError::IncompatibleValues(
            "product of an R/Z-valued and a real cochain".into(),
        )),
    }
}

type Evaluator = dyn Fn(&[LatticePoint]) -> CochainValue + Send + Sync;

/// A homogeneous cochain on Z^n: a function of `degree + 1` lattice points,
/// declared invariant under simultaneous translation.
#[derive(Clone)]
pub struct LatticeCochain {
    dim: usize,
    degree: usize,
    kind: ValueKind,
    eval: Arc<Evaluator>,
}

impl fmt::Debug for LatticeCochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LatticeCochain")
            .field("dim", &self.dim)
            .field("degree", &self.degree)
            .field("kind", &self.kind)
            .finish_non_exhaustive()
    }
}

impl LatticeCochain {
    /// Wraps an evaluator. The evaluator must return values of `kind`.
    pub fn new<F>(dim: usize, degree: usize, kind: ValueKind, eval: F) -> Self
    where
        F: Fn(&[LatticePoint]) -> CochainValue + Send + Sync + 'static,
    {
        LatticeCochain {
            dim,
            degree,
            kind,
            eval: Arc::new(eval),
        }
    }

    pub fn constant(dim: usize, degree: usize, value: CochainValue) -> Self {
        let kind = value.kind();
        LatticeCochain::new(dim, degree, kind, move |_| value.clone())
    }

    pub fn zero(dim: usize, degree: usize, kind: ValueKind) -> Self {
        LatticeCochain::constant(dim, degree, CochainValue::zero(kind))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn kind(&self) -> ValueKind {
        self.kind
    }

    pub fn value_at(&self, vertices: &[LatticePoint]) -> Result<CochainValue, ChainError> {
        if vertices.len() != self.degree + 1 {
            return Err(ChainError::Degree(format!(
                "cochain of degree {} evaluated on {} vertices",
                self.degree,
                vertices.len()
            )));
        }
        if let Some(bad) = vertices.iter().find(|v| v.dim() != self.dim) {
            return Err(ChainError::Dimension {
                expected: self.dim,
                found: bad.dim(),
            });
        }
        Ok((self.eval)(vertices))
    }

    /// Pairing with a chain: the sum of coefficient times value over all terms.
    pub fn evaluate(&self, chain: &LatticeChain) -> Result<CochainValue, ChainError> {
        if chain.degree() != self.degree {
            return Err(ChainError::Degree(format!(
                "cochain of degree {} paired with a chain of degree {}",
                self.degree,
                chain.degree()
            )));
        }
        if chain.dim() != self.dim {
            return Err(ChainError::Dimension {
                expected: self.dim,
                found: chain.dim(),
            });
        }
        let mut total = CochainValue::zero(self.kind);
        for (simplex, coeff) in chain.terms() {
            let value = (self.eval)(simplex.vertices());
            total = total.add(value.scale(coeff));
        }
        Ok(total)
    }

    /// Alternating sum over vertex omissions.
    pub fn coboundary(&self) -> LatticeCochain {
        let inner = self.clone();
        let kind = self.kind;
        LatticeCochain::new(self.dim, self.degree + 1, kind, move |vertices| {
            let mut total = CochainValue::zero(kind);
            let mut face = Vec::with_capacity(vertices.len() - 1);
            for i in 0..vertices.len() {
                face.clear();
                face.extend(
                    vertices
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != i)
                        .map(|(_, v)| v.clone()),
                );
                let value = (inner.eval)(&face);
                total = if i % 2 == 0 {
                    total.add(value)
                } else {
                    total.add(value.scale(&Q::from_integer((-1).into())))
                };
            }
            total
        })
    }

    /// Front-face / back-face product:
    /// `(a ⌣ b)(v_0..v_{p+q}) = a(v_0..v_p) · b(v_p..v_{p+q})`.
    pub fn cup(&self, other: &LatticeCochain) -> Result<LatticeCochain, ChainError> {
        if self.dim != other.dim {
            return Err(ChainError::Dimension {
                expected: self.dim,
                found: other.dim,
            });
        }
        let kind = product_kind(self.kind, other.kind)?;
        let (front, back) = (self.clone(), other.clone());
        let p = self.degree;
        Ok(LatticeCochain::new(
            self.dim,
            self.degree + other.degree,
            kind,
            move |vertices| {
                let a = (front.eval)(&vertices[..=p]);
                let b = (back.eval)(&vertices[p..]);
                a.product(&b)
            },
        ))
    }

    /// Spot-checks translation invariance on the given tuples and shifts.
    pub fn is_invariant_on(&self, tuples: &[Vec<LatticePoint>], shifts: &[LatticePoint]) -> bool {
        tuples.iter().all(|tuple| {
            let base = (self.eval)(tuple);
            shifts.iter().all(|w| {
                let moved: Vec<LatticePoint> = tuple.iter().map(|v| v.add(w)).collect();
                values_agree(&base, &(self.eval)(&moved))
            })
        })
    }
}

fn values_agree(a: &CochainValue, b: &CochainValue) -> bool {
    match (a, b) {
        (CochainValue::Real(x), CochainValue::Real(y)) => (x - y).abs() <= 1e-12 * (1.0 + x.abs()),
        _ => a == b,
    }
}

/// Exact determinant of an integer matrix (fraction-free Bareiss elimination).
pub fn integer_determinant(rows: &[Vec<i64>]) -> BigInt {
    let n = rows.len();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut sign = 1;
    let mut prev = BigInt::from(1);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let value = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = value;
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::from(1), |acc, k| acc * BigInt::from(k))
}

/// The signed Euclidean volume cocycle
/// `V(v_0..v_n) = det(v_1 - v_0, ..., v_n - v_0) / n!`.
pub fn euclidean_volume_cocycle(n: usize) -> LatticeCochain {
    let scale = Q::new(BigInt::from(1), factorial(n));
    LatticeCochain::new(n, n, ValueKind::Rational, move |vertices| {
        let base = &vertices[0];
        let rows: Vec<Vec<i64>> = vertices[1..].iter().map(|v| v.sub(base).0).collect();
        CochainValue::Rational(Q::from_integer(integer_determinant(&rows)) * &scale)
    })
}
