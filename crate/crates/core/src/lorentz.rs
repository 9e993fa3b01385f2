// SPDX-License-Identifier: Apache-2.0

//! Dense double-precision tools for SO(n,1).
//!
//! Coordinates are `(x_1, …, x_n, x_{n+1})` with quadratic form
//! `q(x) = x_1² + … + x_n² − x_{n+1}²`. The hyperboloid model of H^n is the
//! sheet `q = −1, x_{n+1} > 0`; ideal points are light-like rays normalized to
//! last coordinate 1.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{LorentzError, ParseError};

pub const DEFAULT_TOL: f64 = 1e-9;

/// `J = diag(1, …, 1, −1)` of size `n + 1`.
pub fn form(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::identity(n + 1, n + 1);
    j[(n, n)] = -1.0;
    j
}

/// Lorentzian inner product `⟨x, y⟩ = Σ x_i y_i − x_{n+1} y_{n+1}`.
pub fn inner(x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    let last = x.len() - 1;
    x.dot(y) - 2.0 * x[last] * y[last]
}

pub fn quadratic_form(x: &DVector<f64>) -> f64 {
    inner(x, x)
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// Rescales a light-like (or any) vector so its last coordinate is 1.
pub fn normalize_ray(v: &DVector<f64>) -> Result<DVector<f64>, LorentzError> {
    let last = v[v.len() - 1];
    if last.abs() <= f64::EPSILON * v.amax() * 16.0 || last == 0.0 {
        return Err(LorentzError::Degenerate("ray has no finite normalization".into()));
    }
    Ok(v / last)
}

/// Rescales a time-like vector onto the upper sheet of the hyperboloid.
pub fn normalize_point(v: &DVector<f64>) -> Result<DVector<f64>, LorentzError> {
    let qv = quadratic_form(v);
    if qv >= 0.0 {
        return Err(LorentzError::Degenerate("vector is not time-like".into()));
    }
    let s = (-qv).sqrt();
    let sign = if v[v.len() - 1] < 0.0 { -1.0 } else { 1.0 };
    Ok(v * (sign / s))
}

/// Element of SO(n,1): preserves `q` and has determinant 1.
#[derive(Clone, Debug, PartialEq)]
pub struct LorentzMatrix {
    n: usize,
    entries: DMatrix<f64>,
}

impl LorentzMatrix {
    /// Validates `AᵀJA = J` (relative to `‖A‖²`) and `det A = 1`.
    ///
    /// A matrix preserving `q` has determinant `±1`, so only the sign is
    /// tested once the form check has passed.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn new(entries: DMatrix<f64>, tol: f64) -> Result<Self, LorentzError> {
        let (rows, cols) = entries.shape();
        if rows != cols || rows < 3 {
            return Err(LorentzError::Shape {
                expected: rows.max(3),
                rows,
                cols,
            });
        }
        let n = rows - 1;
        let residual = form_residual(&entries);
        if !(residual <= tol) {
            return Err(LorentzError::NotLorentz(residual));
        }
        let det = entries.determinant();
        if det < 0.0 {
            return Err(LorentzError::Determinant(det));
        }
        Ok(LorentzMatrix { n, entries })
    }

    pub fn from_unchecked(entries: DMatrix<f64>) -> Self {
        let n = entries.nrows() - 1;
        LorentzMatrix { n, entries }
    }

    pub fn identity(n: usize) -> Self {
        LorentzMatrix::from_unchecked(DMatrix::identity(n + 1, n + 1))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<f64> {
        self.entries
    }

    pub fn mul(&self, other: &LorentzMatrix) -> LorentzMatrix {
        LorentzMatrix::from_unchecked(&self.entries * &other.entries)
    }

    /// `A⁻¹ = J Aᵀ J`.
    pub fn inverse(&self) -> LorentzMatrix {
        let j = form(self.n);
        LorentzMatrix::from_unchecked(&j * self.entries.transpose() * &j)
    }

    /// `g A g⁻¹`.
    pub fn conjugate_by(&self, g: &LorentzMatrix) -> LorentzMatrix {
        g.mul(self).mul(&g.inverse())
    }

    /// `+1` if the upper sheet is preserved, `−1` if the sheets are swapped.
    pub fn sheet(&self) -> i32 {
        if self.entries[(self.n, self.n)] > 0.0 {
            1
        } else {
            -1
        }
    }

    /// Orientation character of the induced isometry of H^n.
    pub fn epsilon(&self) -> i32 {
        let det = if self.entries.determinant() < 0.0 { -1 } else { 1 };
        let sheet = self.sheet();
        let sheet_pow = if (self.n + 1).is_multiple_of(2) { 1 } else { sheet };
        sheet_pow * det
    }

    /// The matrix by which the element acts on the upper sheet, `sheet·A`.
    pub fn acting_matrix(&self) -> DMatrix<f64> {
        &self.entries * f64::from(self.sheet())
    }

    pub fn act_point(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.entries * x * f64::from(self.sheet())
    }

    /// Image of an ideal point, renormalized to last coordinate 1.
    pub fn act_ideal(&self, x: &DVector<f64>) -> Result<DVector<f64>, LorentzError> {
        normalize_ray(&(&self.entries * x))
    }

    pub fn form_residual(&self) -> f64 {
        form_residual(&self.entries)
    }

    pub fn commutes_with(&self, other: &LorentzMatrix, tol: f64) -> bool {
        let c = &self.entries * &other.entries - &other.entries * &self.entries;
        let scale = (max_abs(&self.entries) * max_abs(&other.entries)).max(1.0);
        max_abs(&c) <= tol * scale
    }

    pub fn to_json(&self) -> MatrixJson {
        MatrixJson {
            n: self.n,
            rows: (0..=self.n)
                .map(|i| self.entries.row(i).iter().copied().collect())
                .collect(),
        }
    }

    pub fn from_json(json: &MatrixJson, tol: f64) -> Result<Self, ParseError> {
        let size = json.n + 1;
        if json.rows.len() != size || json.rows.iter().any(|r| r.len() != size) {
            return Err(ParseError::Schema(format!(
                "matrix for n = {} must be {size}x{size}",
                json.n
            )));
        }
        let flat: Vec<f64> = json.rows.iter().flatten().copied().collect();
        LorentzMatrix::new(DMatrix::from_row_slice(size, size, &flat), tol)
            .map_err(|e| ParseError::Schema(e.to_string()))
    }

    pub fn parse_json(text: &str, tol: f64) -> Result<Self, ParseError> {
        let json: MatrixJson = serde_json::from_str(text)?;
        Self::from_json(&json, tol)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MatrixJson {
    pub n: usize,
    pub rows: Vec<Vec<f64>>,
}

fn form_residual(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows() - 1;
    let j = form(n);
    let r = a.transpose() * &j * a - &j;
    max_abs(&r) / max_abs(a).powi(2).max(1.0)
}

fn orthogonality_residual(u: &DMatrix<f64>) -> f64 {
    let k = u.nrows();
    max_abs(&(u.transpose() * u - DMatrix::identity(k, k)))
}

/// `m(U)`: rotation of the middle coordinates `x_2, …, x_n`.
pub fn m_gen(u: &DMatrix<f64>, tol: f64) -> Result<LorentzMatrix, LorentzError> {
    let (rows, cols) = u.shape();
    if rows != cols || rows == 0 {
        return Err(LorentzError::Shape {
            expected: rows.max(1),
            rows,
            cols,
        });
    }
    let residual = orthogonality_residual(u);
    if residual > tol {
        return Err(LorentzError::NonOrthogonal(residual));
    }
    if u.determinant() < 0.0 {
        return Err(LorentzError::NonOrthogonal(2.0));
    }
    let n = rows + 1;
    let mut a = DMatrix::identity(n + 1, n + 1);
    a.view_mut((1, 1), (rows, rows)).copy_from(u);
    Ok(LorentzMatrix::from_unchecked(a))
}

/// `a(t)`: hyperbolic translation along the `x_1` axis.
pub fn a_gen(n: usize, t: f64) -> Result<LorentzMatrix, LorentzError> {
    if n < 2 {
        return Err(LorentzError::Dimension);
    }
    let mut a = DMatrix::identity(n + 1, n + 1);
    a[(0, 0)] = t.cosh();
    a[(0, n)] = t.sinh();
    a[(n, 0)] = t.sinh();
    a[(n, n)] = t.cosh();
    Ok(LorentzMatrix::from_unchecked(a))
}

/// `n(x)` for a row vector `x` of length `n − 1`.
pub fn n_gen(x: &[f64]) -> Result<LorentzMatrix, LorentzError> {
    let n = x.len() + 1;
    if n < 2 {
        return Err(LorentzError::Dimension);
    }
    let s = x.iter().map(|v| v * v).sum::<f64>() / 2.0;
    let mut a = DMatrix::identity(n + 1, n + 1);
    a[(0, 0)] = 1.0 - s;
    a[(0, n)] = -s;
    a[(n, 0)] = s;
    a[(n, n)] = 1.0 + s;
    for (k, &xk) in x.iter().enumerate() {
        a[(0, k + 1)] = -xk;
        a[(k + 1, 0)] = xk;
        a[(k + 1, n)] = xk;
        a[(n, k + 1)] = xk;
    }
    Ok(LorentzMatrix::from_unchecked(a))
}

/// Embeds `R ∈ SO(n)` as `diag(R, 1)`.
pub fn k_gen(r: &DMatrix<f64>, tol: f64) -> Result<LorentzMatrix, LorentzError> {
    let (rows, cols) = r.shape();
    if rows != cols || rows < 2 {
        return Err(LorentzError::Shape {
            expected: rows.max(2),
            rows,
            cols,
        });
    }
    let residual = orthogonality_residual(r);
    if residual > tol || r.determinant() < 0.0 {
        return Err(LorentzError::NonOrthogonal(residual));
    }
    let mut a = DMatrix::identity(rows + 1, rows + 1);
    a.view_mut((0, 0), (rows, rows)).copy_from(r);
    Ok(LorentzMatrix::from_unchecked(a))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum IsometryKind {
    Elliptic,
    Parabolic,
    Hyperbolic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IsometryClass {
    pub kind: IsometryKind,
    /// Elliptic: a fixed point on the upper sheet.
    pub fixed_point: Option<DVector<f64>>,
    /// Parabolic: the fixed ray. Hyperbolic: attracting, then repelling endpoint.
    pub fixed_rays: Vec<DVector<f64>>,
}

/// Orthonormal basis (columns) of the numerical null space of `m`, together
/// with a flag set when some singular value sits in the ambiguous band
/// `(tol·scale, √tol·scale]`.
fn null_space(m: &DMatrix<f64>, tol: f64) -> (DMatrix<f64>, bool) {
    let cols = m.ncols();
    let padded = if m.nrows() < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), m.shape()).copy_from(m);
        p
    } else {
        m.clone()
    };
    let scale = max_abs(&padded).max(1.0);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let mut basis = Vec::new();
    let mut ambiguous = false;
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s <= tol * scale {
            basis.push(v_t.row(i).transpose());
        } else if s <= tol.sqrt() * scale {
            ambiguous = true;
        }
    }
    let k = if basis.is_empty() {
        DMatrix::zeros(cols, 0)
    } else {
        DMatrix::from_columns(&basis)
    };
    (k, ambiguous)
}

/// Unit vector of the one-dimensional null space of `m` (smallest singular value).
fn smallest_singular_vector(m: &DMatrix<f64>) -> (DVector<f64>, f64) {
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let (i, s) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, &s)| if s < best.1 { (i, s) } else { best });
    (v_t.row(i).transpose(), s)
}

enum FixedSpace {
    Timelike(DVector<f64>),
    Lightlike(DVector<f64>),
    Spacelike,
}

/// Causal type of a subspace spanned by the Euclidean-orthonormal columns of `k`.
fn fixed_space_type(k: &DMatrix<f64>, tol: f64) -> Result<FixedSpace, LorentzError> {
    if k.ncols() == 0 {
        return Ok(FixedSpace::Spacelike);
    }
    let n = k.nrows() - 1;
    let g = k.transpose() * form(n) * k;
    let eig = g.symmetric_eigen();
    let (imin, min) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, &v)| if v < best.1 { (i, v) } else { best });
    let v = k * eig.eigenvectors.column(imin);
    if min < -tol {
        return Ok(FixedSpace::Timelike(normalize_point(&v)?));
    }
    if min.abs() <= tol {
        let near_zero = eig.eigenvalues.iter().filter(|e| e.abs() <= tol).count();
        if near_zero > 1 {
            return Err(LorentzError::Degenerate(
                "fixed subspace has more than one null direction".into(),
            ));
        }
        return Ok(FixedSpace::Lightlike(normalize_ray(&v)?));
    }
    Ok(FixedSpace::Spacelike)
}

/// Classifies the isometry of H^n induced by `a`.
pub fn classify(a: &LorentzMatrix, tol: f64) -> Result<IsometryClass, LorentzError> {
    let b = a.acting_matrix();
    let size = a.n + 1;
    let (k, ambiguous) = null_space(&(&b - DMatrix::identity(size, size)), tol);
    if ambiguous {
        return Err(LorentzError::Degenerate(
            "eigenvalue 1 is numerically ambiguous".into(),
        ));
    }
    match fixed_space_type(&k, tol)? {
        FixedSpace::Timelike(x) => Ok(IsometryClass {
            kind: IsometryKind::Elliptic,
            fixed_point: Some(x),
            fixed_rays: Vec::new(),
        }),
        FixedSpace::Lightlike(r) => Ok(IsometryClass {
            kind: IsometryKind::Parabolic,
            fixed_point: None,
            fixed_rays: vec![r],
        }),
        FixedSpace::Spacelike => {
            let (attracting, repelling) = axis_endpoints(&b, tol)?;
            Ok(IsometryClass {
                kind: IsometryKind::Hyperbolic,
                fixed_point: None,
                fixed_rays: vec![attracting, repelling],
            })
        }
    }
}

fn axis_endpoints(
    b: &DMatrix<f64>,
    tol: f64,
) -> Result<(DVector<f64>, DVector<f64>), LorentzError> {
    let eigs = b.complex_eigenvalues();
    let top = eigs
        .iter()
        .max_by(|x, y| x.norm().total_cmp(&y.norm()))
        .copied()
        .ok_or_else(|| LorentzError::Degenerate("empty spectrum".into()))?;
    let scale = max_abs(b).max(1.0);
    if top.im.abs() > tol.sqrt() * scale || top.re <= 1.0 + tol.sqrt() {
        return Err(LorentzError::Degenerate(
            "no fixed point and no expanding real eigenvalue".into(),
        ));
    }
    let size = b.nrows();
    let id = DMatrix::<f64>::identity(size, size);
    let (vp, _) = smallest_singular_vector(&(b - &id * top.re));
    let (vm, _) = smallest_singular_vector(&(b - &id * top.re.recip()));
    let check = |v: &DVector<f64>| -> Result<DVector<f64>, LorentzError> {
        if quadratic_form(v).abs() > tol.sqrt() {
            return Err(LorentzError::Degenerate("axis endpoint is not light-like".into()));
        }
        normalize_ray(v)
    };
    Ok((check(&vp)?, check(&vm)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConjugacyKind {
    IntoP,
    IntoT0,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConjugacyCase {
    pub case: ConjugacyKind,
    pub conjugator: LorentzMatrix,
    /// Largest deviation of `c·B_i·c⁻¹` from the target subgroup.
    pub residual: f64,
}

/// Proper rotation of R^n taking the unit vector `from` to `to`.
fn rotation_taking(from: &DVector<f64>, to: &DVector<f64>) -> DMatrix<f64> {
    let n = from.len();
    let id = DMatrix::<f64>::identity(n, n);
    let w = from - to;
    if w.norm() <= 1e-14 {
        return id;
    }
    let w = w.normalize();
    let h1 = &id - (&w * w.transpose()) * 2.0;
    // a second reflection in a hyperplane containing `to` restores det = +1
    let mut e = DVector::zeros(n);
    let (idx, _) = to
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, &v)| if v.abs() < best.1 { (i, v.abs()) } else { best });
    e[idx] = 1.0;
    let u = (&e - to * to.dot(&e)).normalize();
    let h2 = &id - (&u * u.transpose()) * 2.0;
    h2 * h1
}

fn spatial_rotation(r: DMatrix<f64>) -> LorentzMatrix {
    let n = r.nrows();
    let mut a = DMatrix::identity(n + 1, n + 1);
    a.view_mut((0, 0), (n, n)).copy_from(&r);
    LorentzMatrix::from_unchecked(a)
}

/// Element of SO(n,1)° moving the ideal point `xi` (last coordinate 1) to
/// the ray of `e_1 − e_{n+1}`.
fn conjugator_to_p(xi: &DVector<f64>) -> LorentzMatrix {
    let n = xi.len() - 1;
    let s = xi.rows(0, n).normalize();
    let mut target = DVector::zeros(n);
    target[0] = -1.0;
    spatial_rotation(rotation_taking(&s, &target))
}

/// Element of SO(n,1)° moving the point `g0` on the upper sheet to `e_{n+1}`.
fn conjugator_to_origin(g0: &DVector<f64>) -> LorentzMatrix {
    let n = g0.len() - 1;
    let spatial = g0.rows(0, n).into_owned();
    let sinh_r = spatial.norm();
    if sinh_r <= 1e-15 {
        return LorentzMatrix::identity(n);
    }
    let r = sinh_r.asinh();
    let mut e1 = DVector::zeros(n);
    e1[0] = 1.0;
    let rot = spatial_rotation(rotation_taking(&(spatial / sinh_r), &e1));
    a_gen(n, -r).expect("n >= 2").mul(&rot)
}

fn p_residual(b: &DMatrix<f64>) -> f64 {
    let n = b.nrows() - 1;
    let mut ray = DVector::zeros(n + 1);
    ray[0] = 1.0;
    ray[n] = -1.0;
    let image = b * &ray;
    let lambda = image[0];
    let dev = (&image - &ray * lambda).amax() / max_abs(b).max(1.0);
    if lambda <= 0.0 || b[(n, n)] <= 0.0 {
        dev.max(1.0)
    } else {
        dev
    }
}

/// Deviation of `b` from the block form `diag(O(2), …, O(2), [±1], 1)`.
fn t0_residual(b: &DMatrix<f64>) -> f64 {
    let size = b.nrows();
    let n = size - 1;
    let block = |i: usize| if i >= n { usize::MAX } else { i / 2 };
    let mut dev: f64 = 0.0;
    for i in 0..size {
        for j in 0..size {
            if block(i) != block(j) && i != j {
                dev = dev.max(b[(i, j)].abs());
            }
        }
    }
    dev = dev.max((b[(n, n)] - 1.0).abs());
    let spatial = b.view((0, 0), (n, n)).into_owned();
    dev.max(orthogonality_residual(&spatial))
}

/// Conjugates a commuting family into P or into T₀.
///
/// Order of cases: a hyperbolic element's axis endpoints are either fixed by
/// every element (→ P) or swapped by some element, in which case the swap's
/// fixed point on the axis is a common fixed point (→ T₀). Otherwise a
/// parabolic element's fixed ray is common (→ P). Otherwise the joint fixed
/// subspace is computed directly.
pub fn common_invariant_structure(
    family: &[LorentzMatrix],
    tol: f64,
) -> Result<ConjugacyCase, LorentzError> {
    let Some(first) = family.first() else {
        return Err(LorentzError::NoStructure("empty family".into()));
    };
    let n = first.n;
    for (i, a) in family.iter().enumerate() {
        if a.n != n {
            return Err(LorentzError::Shape {
                expected: n + 1,
                rows: a.n + 1,
                cols: a.n + 1,
            });
        }
        if a.sheet() < 0 {
            return Err(LorentzError::NotIdentityComponent(i));
        }
    }
    for i in 0..family.len() {
        for j in i + 1..family.len() {
            if !family[i].commutes_with(&family[j], tol) {
                return Err(LorentzError::NonCommuting(i, j));
            }
        }
    }
    let classes = family
        .iter()
        .map(|a| classify(a, tol))
        .collect::<Result<Vec<_>, _>>()?;
    let close = |x: &DVector<f64>, y: &DVector<f64>| (x - y).amax() <= tol.sqrt();

    if let Some(h) = classes.iter().find(|c| c.kind == IsometryKind::Hyperbolic) {
        let (plus, minus) = (&h.fixed_rays[0], &h.fixed_rays[1]);
        let mut swap = None;
        for a in family {
            let image = a.act_ideal(plus)?;
            if close(&image, plus) {
                continue;
            }
            if close(&image, minus) {
                swap = Some(a);
                break;
            }
            return Err(LorentzError::NoStructure(
                "an element moves the axis of a hyperbolic element".into(),
            ));
        }
        return match swap {
            None => into_p(family, plus, tol),
            Some(b) => {
                let g0 = normalize_point(&(plus + b.entries() * plus))?;
                into_t0(family, &g0, tol)
            }
        };
    }
    if let Some(p) = classes.iter().find(|c| c.kind == IsometryKind::Parabolic) {
        return into_p(family, &p.fixed_rays[0], tol);
    }
    let size = n + 1;
    let mut stacked = DMatrix::zeros(size * family.len(), size);
    for (i, a) in family.iter().enumerate() {
        stacked
            .view_mut((i * size, 0), (size, size))
            .copy_from(&(a.entries() - DMatrix::identity(size, size)));
    }
    let (k, _) = null_space(&stacked, tol);
    match fixed_space_type(&k, tol)? {
        FixedSpace::Timelike(g0) => into_t0(family, &g0, tol),
        FixedSpace::Lightlike(xi) => into_p(family, &xi, tol),
        FixedSpace::Spacelike => Err(LorentzError::NoStructure(
            "no common fixed point in the closed ball".into(),
        )),
    }
}

fn verified(
    case: ConjugacyKind,
    conjugator: LorentzMatrix,
    family: &[LorentzMatrix],
    tol: f64,
) -> Result<ConjugacyCase, LorentzError> {
    let residual = family
        .iter()
        .map(|a| {
            let b = a.conjugate_by(&conjugator);
            match case {
                ConjugacyKind::IntoP => p_residual(b.entries()),
                ConjugacyKind::IntoT0 => t0_residual(b.entries()),
            }
        })
        .fold(0.0_f64, f64::max);
    if residual > tol.sqrt() {
        return Err(LorentzError::NoStructure(format!(
            "conjugated family misses the target subgroup by {residual:.3e}"
        )));
    }
    Ok(ConjugacyCase {
        case,
        conjugator,
        residual,
    })
}

fn into_p(
    family: &[LorentzMatrix],
    xi: &DVector<f64>,
    tol: f64,
) -> Result<ConjugacyCase, LorentzError> {
    verified(ConjugacyKind::IntoP, conjugator_to_p(xi), family, tol)
}

fn into_t0(
    family: &[LorentzMatrix],
    g0: &DVector<f64>,
    tol: f64,
) -> Result<ConjugacyCase, LorentzError> {
    let n = g0.len() - 1;
    let c1 = conjugator_to_origin(g0);
    let rotations: Vec<DMatrix<f64>> = family
        .iter()
        .map(|a| a.conjugate_by(&c1).entries().view((0, 0), (n, n)).into_owned())
        .collect();
    let already = family
        .iter()
        .all(|a| t0_residual(a.conjugate_by(&c1).entries()) <= tol);
    if already {
        return verified(ConjugacyKind::IntoT0, c1, family, tol);
    }
    let q = simultaneous_blocks(&rotations, tol);
    let c = spatial_rotation(q.transpose()).mul(&c1);
    verified(ConjugacyKind::IntoT0, c, family, tol)
}

/// Orthogonal `Q` (det 1) with every `Qᵀ W_i Q` block diagonal in 2×2 blocks,
/// obtained from the real Schur form of a generic combination of the `W_i`.
fn simultaneous_blocks(ws: &[DMatrix<f64>], tol: f64) -> DMatrix<f64> {
    let n = ws[0].nrows();
    let mut s = DMatrix::zeros(n, n);
    for (i, w) in ws.iter().enumerate() {
        let c = ((i as f64 + 2.0).sqrt() * 0.754_877_666).fract() + 0.5;
        s += w * c;
    }
    let (q, t) = s.schur().unpack();
    // Schur blocks: a 2×2 block wherever the subdiagonal is nonzero.
    let scale = max_abs(&t).max(1.0);
    let mut pairs: Vec<Vec<usize>> = Vec::new();
    let mut singles: Vec<usize> = Vec::new();
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)].abs() > tol.sqrt() * scale {
            pairs.push(vec![i, i + 1]);
            i += 2;
        } else {
            singles.push(i);
            i += 1;
        }
    }
    let mut order: Vec<usize> = pairs.into_iter().flatten().collect();
    order.extend(singles);
    let mut out = DMatrix::from_columns(&order.iter().map(|&c| q.column(c)).collect::<Vec<_>>());
    if out.determinant() < 0.0 {
        let mut last = out.column_mut(n - 1);
        last *= -1.0;
    }
    out
}

/// Factors `p ∈ P` as `m(U)·a(t)·n(x)`.
pub fn decompose_p(
    p: &LorentzMatrix,
    tol: f64,
) -> Result<(DMatrix<f64>, f64, Vec<f64>), LorentzError> {
    let n = p.n;
    let residual = p_residual(p.entries());
    if residual > tol {
        return Err(LorentzError::NotInP(residual));
    }
    let mut ray = DVector::zeros(n + 1);
    ray[0] = 1.0;
    ray[n] = -1.0;
    let lambda = (p.entries() * &ray)[0];
    let t = -lambda.ln();
    let q = a_gen(n, -t)?.mul(p);
    let u = q.entries().view((1, 1), (n - 1, n - 1)).into_owned();
    let x: Vec<f64> = (1..n).map(|k| -q.entries()[(0, k)]).collect();
    let m = m_gen(&u, tol.sqrt())?;
    let rebuilt = m.mul(&a_gen(n, t)?).mul(&n_gen(&x)?);
    let err = max_abs(&(rebuilt.entries() - p.entries())) / max_abs(p.entries()).max(1.0);
    if err >= 10.0 * tol {
        return Err(LorentzError::NotInP(err));
    }
    Ok((u, t, x))
}
