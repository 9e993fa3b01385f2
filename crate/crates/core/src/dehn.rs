// SPDX-License-Identifier: Apache-2.0

//! Gluing equations of ideal triangulations and hyperbolic Dehn filling.
//!
//! Every equation has the logarithmic form
//! `Σ_j a_j·log z_j + Σ_j b_j·log(1 − z_j) = c·πi`. Edges carry their own
//! right-hand side; a cusp contributes the meridian and longitude
//! log-holonomies `H_m`, `H_l` (right-hand side 0 at the complete structure).
//! An unfilled cusp imposes `H_m = 0`, a cusp filled along `(p, q)` imposes
//! `p·H_m + q·H_l = 2πi`.
//!
//! Shapes stay in the upper half-plane, where the principal branch of the
//! logarithm is continuous, so no branch bookkeeping is needed.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num::complex::Complex64;
use num::integer::gcd;
use serde::{Deserialize, Serialize};

use crate::error::{DehnError, ParseError};
use crate::hypvol::vol3_ideal;
use crate::rational::Q;

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: usize = 100;
const MAX_HALVINGS: usize = 30;

/// Shapes with imaginary part below this carry a flatness warning.
const FLAT_IM: f64 = 1e-8;

pub const FIGURE_EIGHT_JSON: &str = include_str!("../data/figure_eight.json");

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct EquationRow {
    pub a: Vec<i64>,
    pub b: Vec<i64>,
    /// Constant multiple of πi subtracted from the log-holonomy.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub rhs_pi_i: i64,
}

fn is_zero(v: &i64) -> bool {
    *v == 0
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct EdgeRow {
    pub a: Vec<i64>,
    pub b: Vec<i64>,
    pub rhs_pi_i: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CuspRows {
    pub meridian: EquationRow,
    pub longitude: EquationRow,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GluingSystem {
    pub name: String,
    pub shapes: usize,
    pub edges: Vec<EdgeRow>,
    pub cusps: Vec<CuspRows>,
}

impl GluingSystem {
    pub fn validate(&self) -> Result<(), DehnError> {
        let n = self.shapes;
        if n == 0 {
            return Err(DehnError::Validation("system has no shapes".into()));
        }
        let check = |what: String, a: &[i64], b: &[i64]| {
            if a.len() != n || b.len() != n {
                Err(DehnError::Validation(format!(
                    "{what} has rows of length {}/{}, expected {n}",
                    a.len(),
                    b.len()
                )))
            } else {
                Ok(())
            }
        };
        for (i, e) in self.edges.iter().enumerate() {
            check(format!("edge {i}"), &e.a, &e.b)?;
        }
        for (i, c) in self.cusps.iter().enumerate() {
            check(format!("cusp {i} meridian"), &c.meridian.a, &c.meridian.b)?;
            check(format!("cusp {i} longitude"), &c.longitude.a, &c.longitude.b)?;
        }
        if self.edges.len() + self.cusps.len() < n {
            return Err(DehnError::Validation(format!(
                "{} equations cannot determine {n} shapes",
                self.edges.len() + self.cusps.len()
            )));
        }
        Ok(())
    }

    pub fn figure_eight() -> GluingSystem {
        load_gluing_system(FIGURE_EIGHT_JSON.as_bytes()).expect("bundled data is valid")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

/// Parses and validates a gluing system.
pub fn load_gluing_system(bytes: &[u8]) -> Result<GluingSystem, DehnError> {
    let gs: GluingSystem = serde_json::from_slice(bytes).map_err(ParseError::from)?;
    gs.validate()?;
    Ok(gs)
}

/// Per-cusp filling: `None` leaves the cusp complete.
pub type FillingSlope = Option<(i64, i64)>;

pub fn check_slope(p: i64, q: i64) -> Result<(), DehnError> {
    if gcd(p, q) != 1 {
        return Err(DehnError::NonCoprimeSlope(p, q));
    }
    Ok(())
}

fn log_holonomy(row_a: &[i64], row_b: &[i64], logs: &[(Complex64, Complex64)]) -> Complex64 {
    row_a
        .iter()
        .zip(row_b)
        .zip(logs)
        .map(|((&a, &b), (lz, l1z))| lz * a as f64 + l1z * b as f64)
        .sum()
}

fn row_gradient(row_a: &[i64], row_b: &[i64], z: &[Complex64]) -> Vec<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    row_a
        .iter()
        .zip(row_b)
        .zip(z)
        .map(|((&a, &b), &zj)| a as f64 / zj - b as f64 / (one - zj))
        .collect()
}

/// The equation set to solve: gluing system, slopes and homotopy parameter.
struct Equations<'a> {
    gs: &'a GluingSystem,
    slopes: &'a [FillingSlope],
    /// `s` in `(1 − s)·H_m + s·(p·H_m + q·H_l − 2πi) = 0`; 1 is the filling itself.
    s: f64,
}

impl Equations<'_> {
    fn count(&self) -> usize {
        self.gs.edges.len() + self.gs.cusps.len()
    }

    fn residual(&self, z: &[Complex64]) -> DVector<Complex64> {
        let one = Complex64::new(1.0, 0.0);
        let logs: Vec<_> = z.iter().map(|&zj| (zj.ln(), (one - zj).ln())).collect();
        let two_pi_i = Complex64::new(0.0, 2.0 * PI);
        let mut f = DVector::zeros(self.count());
        for (i, e) in self.gs.edges.iter().enumerate() {
            f[i] = log_holonomy(&e.a, &e.b, &logs) - Complex64::new(0.0, PI * e.rhs_pi_i as f64);
        }
        let base = self.gs.edges.len();
        for (k, (c, slope)) in self.gs.cusps.iter().zip(self.slopes).enumerate() {
            let hm = log_holonomy(&c.meridian.a, &c.meridian.b, &logs)
                - Complex64::new(0.0, PI * c.meridian.rhs_pi_i as f64);
            f[base + k] = match slope {
                None => hm,
                Some((p, q)) => {
                    let hl = log_holonomy(&c.longitude.a, &c.longitude.b, &logs)
                        - Complex64::new(0.0, PI * c.longitude.rhs_pi_i as f64);
                    let filled = hm * *p as f64 + hl * *q as f64 - two_pi_i;
                    hm * (1.0 - self.s) + filled * self.s
                }
            };
        }
        f
    }

    fn jacobian(&self, z: &[Complex64]) -> DMatrix<Complex64> {
        let n = z.len();
        let mut jac = DMatrix::zeros(self.count(), n);
        for (i, e) in self.gs.edges.iter().enumerate() {
            for (j, g) in row_gradient(&e.a, &e.b, z).into_iter().enumerate() {
                jac[(i, j)] = g;
            }
        }
        let base = self.gs.edges.len();
        for (k, (c, slope)) in self.gs.cusps.iter().zip(self.slopes).enumerate() {
            let gm = row_gradient(&c.meridian.a, &c.meridian.b, z);
            let gl = row_gradient(&c.longitude.a, &c.longitude.b, z);
            for j in 0..n {
                jac[(base + k, j)] = match slope {
                    None => gm[j],
                    Some((p, q)) => {
                        let coeff_m = 1.0 - self.s + self.s * *p as f64;
                        gm[j] * coeff_m + gl[j] * (self.s * *q as f64)
                    }
                };
            }
        }
        jac
    }
}

fn sup_norm(v: &DVector<Complex64>) -> f64 {
    v.iter().fold(0.0_f64, |acc, c| acc.max(c.norm()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub shapes: Vec<Complex64>,
    pub residual: f64,
    pub iterations: usize,
    pub warnings: Vec<String>,
}

impl Solution {
    pub fn volume(&self) -> f64 {
        total_volume(&self.shapes)
    }
}

// negated comparisons so that NaN inputs are rejected
#[allow(clippy::neg_cmp_op_on_partial_ord)]
fn validate_request(
    gs: &GluingSystem,
    slopes: &[FillingSlope],
    init: &[Complex64],
    tol: f64,
) -> Result<(), DehnError> {
    if slopes.len() != gs.cusps.len() {
        return Err(DehnError::Argument(format!(
            "{} slopes given for {} cusps",
            slopes.len(),
            gs.cusps.len()
        )));
    }
    for &(p, q) in slopes.iter().flatten() {
        check_slope(p, q)?;
    }
    if init.len() != gs.shapes {
        return Err(DehnError::Argument(format!(
            "{} initial shapes given for {} tetrahedra",
            init.len(),
            gs.shapes
        )));
    }
    if let Some(j) = init.iter().position(|z| !(z.im > 0.0)) {
        return Err(DehnError::Argument(format!("initial shape {j} is not in the upper half-plane")));
    }
    if !(tol > 0.0) {
        return Err(DehnError::Argument("tolerance must be positive".into()));
    }
    Ok(())
}

fn newton(
    eqs: &Equations<'_>,
    init: &[Complex64],
    tol: f64,
    max_iter: usize,
) -> Result<Solution, DehnError> {
    let mut z = init.to_vec();
    let mut f = eqs.residual(&z);
    let mut res = sup_norm(&f);
    for it in 0..max_iter {
        if res < tol {
            return Ok(finish(z, res, it));
        }
        let jac = eqs.jacobian(&z);
        let svd = jac.svd(true, true);
        let step = svd
            .solve(&(-&f), 1e-14)
            .map_err(|e| DehnError::Argument(e.to_string()))?;
        let mut lambda = 1.0;
        let mut accepted = None;
        let mut stayed_geometric = false;
        for _ in 0..=MAX_HALVINGS {
            let trial: Vec<Complex64> = z.iter().zip(step.iter()).map(|(a, d)| a + d * lambda).collect();
            if trial.iter().all(|t| t.im > 0.0 && t.re.is_finite()) {
                stayed_geometric = true;
                let ft = eqs.residual(&trial);
                let rt = sup_norm(&ft);
                if rt < res {
                    accepted = Some((trial, ft, rt));
                    break;
                }
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((trial, ft, rt)) => {
                z = trial;
                f = ft;
                res = rt;
            }
            None if !stayed_geometric => {
                let (index, zj) = z
                    .iter()
                    .enumerate()
                    .min_by(|a, b| a.1.im.total_cmp(&b.1.im))
                    .expect("at least one shape");
                return Err(DehnError::Degeneration {
                    index,
                    z: format!("{zj}"),
                });
            }
            None => {
                return Err(DehnError::NonConvergence {
                    iterations: it + 1,
                    residual: res,
                })
            }
        }
    }
    if res < tol && max_iter > 0 {
        return Ok(finish(z, res, max_iter));
    }
    Err(DehnError::NonConvergence {
        iterations: max_iter,
        residual: res,
    })
}

fn finish(shapes: Vec<Complex64>, residual: f64, iterations: usize) -> Solution {
    let warnings = shapes
        .iter()
        .enumerate()
        .filter(|(_, z)| z.im < FLAT_IM)
        .map(|(j, z)| format!("shape {j} is nearly flat (z = {z})"))
        .collect();
    Solution {
        shapes,
        residual,
        iterations,
        warnings,
    }
}

/// Damped Gauss–Newton solve of the gluing and cusp equations.
///
/// `init` defaults to `z_j = i`. The linearized system is solved in the
/// least-squares sense, which tolerates the redundant edge equation.
pub fn solve(
    gs: &GluingSystem,
    slopes: &[FillingSlope],
    init: Option<&[Complex64]>,
    tol: f64,
    max_iter: usize,
) -> Result<Solution, DehnError> {
    let default = vec![Complex64::new(0.0, 1.0); gs.shapes];
    let init = init.unwrap_or(&default);
    validate_request(gs, slopes, init, tol)?;
    newton(&Equations { gs, slopes, s: 1.0 }, init, tol, max_iter)
}

/// `Σ_j D(z_j)`; real or degenerate shapes contribute 0.
pub fn total_volume(shapes: &[Complex64]) -> f64 {
    shapes.iter().map(|&z| vol3_ideal(z).unwrap_or(0.0)).sum()
}

/// Volume of the representation obtained by filling along `slopes`.
pub fn representation_volume(
    gs: &GluingSystem,
    slopes: &[FillingSlope],
    tol: f64,
    max_iter: usize,
) -> Result<f64, DehnError> {
    Ok(solve(gs, slopes, None, tol, max_iter)?.volume())
}

#[derive(Clone, Debug, PartialEq)]
pub struct FillingPath {
    /// `(s, volume)` for `s` from 0 (complete) to 1 (filled).
    pub points: Vec<(f64, f64)>,
    /// Set when the continuation stopped early.
    pub diagnostic: Option<String>,
}

impl FillingPath {
    pub fn max_jump(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| (w[1].1 - w[0].1).abs())
            .fold(0.0, f64::max)
    }
}

/// Volumes along the linear homotopy from the complete structure to the
/// filling, each step seeded with the previous shapes.
pub fn filling_path(
    gs: &GluingSystem,
    slopes: &[FillingSlope],
    steps: usize,
    tol: f64,
    max_iter: usize,
) -> Result<FillingPath, DehnError> {
    if steps < 2 {
        return Err(DehnError::Argument("a path needs at least 2 steps".into()));
    }
    let start = solve(gs, &vec![None; gs.cusps.len()], None, tol, max_iter)?;
    validate_request(gs, slopes, &start.shapes, tol)?;
    let mut z = start.shapes.clone();
    let mut points = vec![(0.0, start.volume())];
    for k in 1..steps {
        let s = k as f64 / (steps - 1) as f64;
        match newton(&Equations { gs, slopes, s }, &z, tol, max_iter) {
            Ok(sol) => {
                points.push((s, sol.volume()));
                z = sol.shapes;
            }
            Err(err) => {
                return Ok(FillingPath {
                    points,
                    diagnostic: Some(format!("stopped at s = {s}: {err}")),
                })
            }
        }
    }
    Ok(FillingPath {
        points,
        diagnostic: None,
    })
}

/// Volume and ratio for the doubled manifold with `ℓ` of its `k` pieces folded.
pub fn doubling_volume(base: f64, k: u64, l: u64) -> Result<(f64, Q), DehnError> {
    if k == 0 {
        return Err(DehnError::Argument("k must be positive".into()));
    }
    if l >= k {
        return Err(DehnError::Argument(format!("need l < k, got l = {l}, k = {k}")));
    }
    let diff = k - l;
    Ok((
        2.0 * diff as f64 * base,
        Q::new(diff.into(), k.into()),
    ))
}
