// SPDX-License-Identifier: Apache-2.0

//! Transfer of Z-invariant cochains to R through a fundamental domain.
//!
//! A fundamental domain is a finite union of half-open intervals `(a, b]`
//! with rational endpoints whose integer translates tile the line. All set
//! operations are exact; only the transfer integral is accumulated in
//! floating point.

use std::fmt;

use num::{BigInt, One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{ParseError, TransferError};
use crate::lattice::{LatticeCochain, LatticePoint};
use crate::rational::{format_q, frac, parse_q, to_f64, Q};

/// Finite union of half-open intervals `(a, b]`, kept sorted, disjoint and merged.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct IntervalSet {
    pieces: Vec<(Q, Q)>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { pieces: Vec::new() }
    }

    pub fn from_intervals<I: IntoIterator<Item = (Q, Q)>>(intervals: I) -> Self {
        let mut v: Vec<(Q, Q)> = intervals.into_iter().filter(|(a, b)| a < b).collect();
        v.sort();
        let mut pieces: Vec<(Q, Q)> = Vec::with_capacity(v.len());
        for (a, b) in v {
            match pieces.last_mut() {
                Some(last) if a <= last.1 => {
                    if b > last.1 {
                        last.1 = b;
                    }
                }
                _ => pieces.push((a, b)),
            }
        }
        IntervalSet { pieces }
    }

    pub fn pieces(&self) -> &[(Q, Q)] {
        &self.pieces
    }

    pub fn measure(&self) -> Q {
        self.pieces.iter().map(|(a, b)| b - a).sum()
    }

    pub fn contains(&self, x: &Q) -> bool {
        self.pieces.iter().any(|(a, b)| a < x && x <= b)
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        IntervalSet::from_intervals(self.pieces.iter().chain(&other.pieces).cloned())
    }

    pub fn intersection(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.pieces.len() && j < other.pieces.len() {
            let (a1, b1) = &self.pieces[i];
            let (a2, b2) = &other.pieces[j];
            let lo = a1.max(a2);
            let hi = b1.min(b2);
            if lo < hi {
                out.push((lo.clone(), hi.clone()));
            }
            if b1 < b2 {
                i += 1;
            } else {
                j += 1;
            }
        }
        IntervalSet { pieces: out }
    }

    pub fn difference(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        for (a, b) in &self.pieces {
            let mut start = a.clone();
            for (c, d) in &other.pieces {
                if d <= &start || c >= b {
                    continue;
                }
                if c > &start {
                    out.push((start.clone(), c.clone()));
                }
                start = start.max(d.clone());
                if &start >= b {
                    break;
                }
            }
            if &start < b {
                out.push((start, b.clone()));
            }
        }
        IntervalSet::from_intervals(out)
    }

    pub fn symmetric_difference(&self, other: &IntervalSet) -> IntervalSet {
        self.difference(other).union(&other.difference(self))
    }

    pub fn translate(&self, k: &Q) -> IntervalSet {
        IntervalSet {
            pieces: self.pieces.iter().map(|(a, b)| (a + k, b + k)).collect(),
        }
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pieces.is_empty() {
            return f.write_str("∅");
        }
        let parts: Vec<String> = self
            .pieces
            .iter()
            .map(|(a, b)| format!("({}, {}]", format_q(a), format_q(b)))
            .collect();
        f.write_str(&parts.join(" ∪ "))
    }
}

/// Fundamental domain for Z acting on R by translation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalDomain {
    intervals: Vec<(Q, Q)>,
}

impl IntervalDomain {
    /// Validates that the pieces are nonempty and that their translates
    /// reduced mod 1 tile `(0, 1]` exactly.
    pub fn new(intervals: Vec<(Q, Q)>) -> Result<Self, TransferError> {
        if intervals.is_empty() {
            return Err(TransferError::InvalidDomain("no intervals".into()));
        }
        let mut reduced: Vec<(Q, Q)> = Vec::new();
        for (a, b) in &intervals {
            if a >= b {
                return Err(TransferError::InvalidDomain(format!(
                    "empty interval ({}, {}]",
                    format_q(a),
                    format_q(b)
                )));
            }
            let len = b - a;
            if len > Q::one() {
                return Err(TransferError::InvalidDomain("interval longer than 1".into()));
            }
            let a0 = frac(a);
            let b0 = &a0 + &len;
            if b0 > Q::one() {
                reduced.push((a0, Q::one()));
                reduced.push((Q::zero(), b0 - Q::one()));
            } else {
                reduced.push((a0, b0));
            }
        }
        reduced.sort();
        let mut cursor = Q::zero();
        for (a, b) in &reduced {
            if *a < cursor {
                return Err(TransferError::InvalidDomain(format!(
                    "translates overlap near {}",
                    format_q(a)
                )));
            }
            if *a > cursor {
                return Err(TransferError::CoverageGap(format!(
                    "({}, {}] mod 1",
                    format_q(&cursor),
                    format_q(a)
                )));
            }
            cursor = b.clone();
        }
        if cursor != Q::one() {
            return Err(TransferError::CoverageGap(format!("({}, 1] mod 1", format_q(&cursor))));
        }
        Ok(IntervalDomain { intervals })
    }

    /// `(0, 1]`.
    pub fn standard() -> Self {
        IntervalDomain {
            intervals: vec![(Q::zero(), Q::one())],
        }
    }

    pub fn intervals(&self) -> &[(Q, Q)] {
        &self.intervals
    }

    pub fn as_set(&self) -> IntervalSet {
        IntervalSet::from_intervals(self.intervals.clone())
    }

    /// All interval endpoints.
    pub fn breakpoints(&self) -> Vec<Q> {
        self.intervals
            .iter()
            .flat_map(|(a, b)| [a.clone(), b.clone()])
            .collect()
    }

    pub fn to_json(&self) -> DomainJson {
        DomainJson {
            intervals: self
                .intervals
                .iter()
                .map(|(a, b)| [format_q(a), format_q(b)])
                .collect(),
        }
    }

    pub fn from_json(json: &DomainJson) -> Result<Self, ParseError> {
        let intervals = json
            .intervals
            .iter()
            .map(|[a, b]| Ok((parse_q(a)?, parse_q(b)?)))
            .collect::<Result<Vec<_>, ParseError>>()?;
        IntervalDomain::new(intervals).map_err(|e| ParseError::Schema(e.to_string()))
    }

    pub fn parse_json(text: &str) -> Result<Self, ParseError> {
        let json: DomainJson = serde_json::from_str(text)?;
        Self::from_json(&json)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct DomainJson {
    pub intervals: Vec<[String; 2]>,
}

fn pow2(n: u32) -> Q {
    Q::from_integer(BigInt::one() << n)
}

/// `⊔_{n=1}^{n_max} n + (1/2^n, 1/2^(n−1)]` together with the remainder
/// `(0, 1/2^n_max]`.
pub fn bad_domain(n_max: u32) -> Result<IntervalDomain, TransferError> {
    if n_max == 0 {
        return Err(TransferError::Argument("n_max must be at least 1".into()));
    }
    let mut intervals = vec![(Q::zero(), pow2(n_max).recip())];
    for n in 1..=n_max {
        let shift = Q::from_integer(BigInt::from(n));
        intervals.push((&shift + pow2(n).recip(), &shift + pow2(n - 1).recip()));
    }
    IntervalDomain::new(intervals)
}

fn ceil_int(x: &Q) -> BigInt {
    x.ceil().to_integer()
}

/// Unique `(k, s)` with `x = k + s` and `s ∈ D`.
pub fn retract(x: &Q, domain: &IntervalDomain) -> Result<(BigInt, Q), TransferError> {
    for (a, b) in domain.intervals() {
        let k = ceil_int(&(x - b));
        let s = x - Q::from_integer(k.clone());
        if &s > a {
            return Ok((k, s));
        }
    }
    Err(TransferError::CoverageGap(format_q(x)))
}

/// Number of `k ∈ [−N, N]` with `[c, d] ∩ (k + D) ≠ ∅`.
pub fn translate_overlap_count(
    domain: &IntervalDomain,
    k_interval: (&Q, &Q),
    n: u64,
) -> Result<usize, TransferError> {
    let (c, d) = k_interval;
    if c > d {
        return Err(TransferError::Argument("K = [c, d] needs c <= d".into()));
    }
    let n = BigInt::from(n);
    let lo_bound = -n.clone();
    let mut hits: Vec<BigInt> = Vec::new();
    for (a, b) in domain.intervals() {
        // k + b >= c and k + a < d
        let lo = ceil_int(&(c - b)).max(lo_bound.clone());
        let hi_q = d - a;
        let mut hi = hi_q.ceil().to_integer() - BigInt::one();
        if hi > n {
            hi = n.clone();
        }
        let mut k = lo;
        while k <= hi {
            hits.push(k.clone());
            k += BigInt::one();
        }
    }
    hits.sort();
    hits.dedup();
    Ok(hits.len())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quadrature {
    /// Midpoint rule on the uniform grid refined at every breakpoint; exact
    /// for the piecewise-constant integrand.
    Refined,
    /// Plain midpoint rule on the uniform grid, with a rigorous error bound
    /// from the cells that contain breakpoints.
    Uniform,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransferResult {
    pub value: f64,
    pub quadrature_error: f64,
    /// Set when a grid cell contains more than one breakpoint.
    pub flagged: bool,
}

/// Evaluator for `Tα(g_0, …, g_n) = ∫_0^1 α(r(g + g_0), …, r(g + g_n)) dg`.
pub struct TransferCochain<'a> {
    alpha: &'a LatticeCochain,
    domain: &'a IntervalDomain,
    samples: usize,
    mode: Quadrature,
}

pub fn transfer_cochain<'a>(
    alpha: &'a LatticeCochain,
    domain: &'a IntervalDomain,
    samples: usize,
    mode: Quadrature,
) -> Result<TransferCochain<'a>, TransferError> {
    if alpha.dim() != 1 {
        return Err(TransferError::Argument(format!(
            "cochain lives on Z^{}, expected Z",
            alpha.dim()
        )));
    }
    if samples < 2 {
        return Err(TransferError::Argument("samples must be at least 2".into()));
    }
    Ok(TransferCochain {
        alpha,
        domain,
        samples,
        mode,
    })
}

impl TransferCochain<'_> {
    fn integrand(&self, g: &Q, inputs: &[Q]) -> Result<f64, TransferError> {
        let points = inputs
            .iter()
            .map(|gi| {
                let (k, _) = retract(&(g + gi), self.domain)?;
                let k = i64::try_from(k).map_err(|_| TransferError::Argument("translate out of range".into()))?;
                Ok(LatticePoint::new(vec![k]))
            })
            .collect::<Result<Vec<_>, TransferError>>()?;
        Ok(self.alpha.value_at(&points)?.as_f64())
    }

    /// Points of `(0, 1)` where some `g + g_i` crosses a domain endpoint.
    fn breakpoints(&self, inputs: &[Q]) -> Vec<Q> {
        let mut out: Vec<Q> = inputs
            .iter()
            .flat_map(|gi| self.domain.breakpoints().into_iter().map(move |e| frac(&(e - gi))))
            .filter(|t| !t.is_zero())
            .collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn evaluate(&self, inputs: &[Q]) -> Result<TransferResult, TransferError> {
        if inputs.len() != self.alpha.degree() + 1 {
            return Err(TransferError::Argument(format!(
                "expected {} arguments, found {}",
                self.alpha.degree() + 1,
                inputs.len()
            )));
        }
        let h = Q::new(BigInt::one(), BigInt::from(self.samples));
        let breaks = self.breakpoints(inputs);
        let cell_of = |t: &Q| -> usize {
            let idx = (t / &h).floor().to_integer();
            usize::try_from(idx).unwrap_or(0).min(self.samples - 1)
        };
        let mut per_cell: Vec<Vec<Q>> = vec![Vec::new(); self.samples];
        for t in &breaks {
            // a breakpoint on a grid line does not split a cell
            if !(t / &h).denom().is_one() {
                per_cell[cell_of(t)].push(t.clone());
            }
        }
        let flagged = per_cell.iter().any(|c| c.len() > 1);
        let mut value = 0.0;
        let mut error = 0.0;
        for (i, inner) in per_cell.iter().enumerate() {
            let lo = &h * Q::from_integer(BigInt::from(i));
            let hi = &lo + &h;
            if inner.is_empty() {
                let mid = (&lo + &hi) / Q::from_integer(BigInt::from(2));
                value += self.integrand(&mid, inputs)? * to_f64(&h);
                continue;
            }
            let mut edges = vec![lo.clone()];
            edges.extend(inner.iter().cloned());
            edges.push(hi.clone());
            let mut exact = 0.0;
            let (mut vmin, mut vmax) = (f64::INFINITY, f64::NEG_INFINITY);
            for w in edges.windows(2) {
                let mid = (&w[0] + &w[1]) / Q::from_integer(BigInt::from(2));
                let v = self.integrand(&mid, inputs)?;
                exact += v * to_f64(&(&w[1] - &w[0]));
                vmin = vmin.min(v);
                vmax = vmax.max(v);
            }
            match self.mode {
                Quadrature::Refined => value += exact,
                Quadrature::Uniform => {
                    let mid = (&lo + &hi) / Q::from_integer(BigInt::from(2));
                    value += self.integrand(&mid, inputs)? * to_f64(&h);
                    error += (vmax - vmin) * to_f64(&h);
                }
            }
        }
        Ok(TransferResult {
            value,
            quadrature_error: error,
            flagged,
        })
    }
}
