// SPDX-License-Identifier: Apache-2.0

//! Signed volumes of hyperbolic simplices in dimensions 2 and 3.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::HypVolError;
use crate::lorentz::{inner, quadratic_form, LorentzMatrix};
use crate::special::{bloch_wigner, lobachevsky};

/// Relative tolerance for the hyperboloid / light-cone constraint.
pub const POINT_TOL: f64 = 1e-12;

/// A point of the closed hyperbolic ball in the hyperboloid model.
#[derive(Clone, Debug, PartialEq)]
pub enum HPoint {
    /// `q(x) = −1`, last coordinate positive.
    Interior(DVector<f64>),
    /// Light-like ray, stored with last coordinate 1.
    Ideal(DVector<f64>),
}

impl HPoint {
    pub fn interior(x: DVector<f64>) -> Result<Self, HypVolError> {
        let scale = x.norm_squared().max(1.0);
        let last = x[x.len() - 1];
        if (quadratic_form(&x) + 1.0).abs() > POINT_TOL * scale || last <= 0.0 {
            return Err(HypVolError::InvalidPoint(format!("{:?}", x.as_slice())));
        }
        let s = (-quadratic_form(&x)).sqrt();
        Ok(HPoint::Interior(x / s))
    }

    pub fn ideal(x: DVector<f64>) -> Result<Self, HypVolError> {
        let last = x[x.len() - 1];
        if last == 0.0 || quadratic_form(&x).abs() > POINT_TOL * x.norm_squared() {
            return Err(HypVolError::InvalidPoint(format!("{:?}", x.as_slice())));
        }
        Ok(HPoint::Ideal(x / last))
    }

    /// Detects the model from the value of `q`.
    pub fn from_coords(coords: &[f64]) -> Result<Self, HypVolError> {
        if coords.len() < 3 {
            return Err(HypVolError::InvalidPoint(format!("{coords:?}")));
        }
        let x = DVector::from_column_slice(coords);
        if quadratic_form(&x).abs() <= POINT_TOL * x.norm_squared() {
            HPoint::ideal(x)
        } else {
            HPoint::interior(x)
        }
    }

    pub fn coords(&self) -> &DVector<f64> {
        match self {
            HPoint::Interior(x) | HPoint::Ideal(x) => x,
        }
    }

    pub fn dim(&self) -> usize {
        self.coords().len() - 1
    }

    pub fn is_ideal(&self) -> bool {
        matches!(self, HPoint::Ideal(_))
    }

    /// Image under the isometry induced by `g`.
    pub fn transform(&self, g: &LorentzMatrix) -> HPoint {
        let y = g.act_point(self.coords());
        match self {
            HPoint::Interior(_) => HPoint::Interior(y),
            HPoint::Ideal(_) => {
                let last = y[y.len() - 1];
                HPoint::Ideal(y / last)
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PointsJson {
    pub points: Vec<Vec<f64>>,
}

pub fn parse_points(text: &str) -> Result<Vec<HPoint>, crate::error::ParseError> {
    let json: PointsJson = serde_json::from_str(text)?;
    json.points
        .iter()
        .map(|p| HPoint::from_coords(p).map_err(|e| crate::error::ParseError::Schema(e.to_string())))
        .collect()
}

/// Interior angle at `x` of the triangle with further vertices `y`, `z`.
fn vertex_angle(x: &HPoint, y: &HPoint, z: &HPoint) -> Option<f64> {
    let HPoint::Interior(xv) = x else {
        return Some(0.0);
    };
    let tangent = |p: &DVector<f64>| p + xv * inner(xv, p);
    let ty = tangent(y.coords());
    let tz = tangent(z.coords());
    let ny = inner(&ty, &ty);
    let nz = inner(&tz, &tz);
    let scale = y.coords().norm_squared().max(z.coords().norm_squared()).max(1.0);
    if ny <= 1e-24 * scale || nz <= 1e-24 * scale {
        return None;
    }
    let dot = inner(&ty, &tz);
    let cross = (ny * nz - dot * dot).max(0.0).sqrt();
    Some(cross.atan2(dot))
}

/// Signed area of the geodesic triangle `x0 x1 x2` in H².
///
/// The sign is that of `det[x0, x1, x2]`; degenerate triangles give 0.
pub fn area2(x0: &HPoint, x1: &HPoint, x2: &HPoint) -> Result<f64, HypVolError> {
    for p in [x0, x1, x2] {
        if p.dim() != 2 {
            return Err(HypVolError::UnsupportedDimension(p.dim()));
        }
    }
    let m = DMatrix::from_columns(&[x0.coords().clone(), x1.coords().clone(), x2.coords().clone()]);
    let det = m.determinant();
    if det == 0.0 {
        return Ok(0.0);
    }
    let angles = [
        vertex_angle(x0, x1, x2),
        vertex_angle(x1, x2, x0),
        vertex_angle(x2, x0, x1),
    ];
    if angles.iter().any(Option::is_none) {
        return Ok(0.0);
    }
    let defect = PI - angles.iter().map(|a| a.unwrap()).sum::<f64>();
    Ok(det.signum() * defect.max(0.0))
}

/// Signed volume of the ideal tetrahedron with shape `z`.
pub fn vol3_ideal(z: Complex64) -> Result<f64, HypVolError> {
    if !z.re.is_finite() || !z.im.is_finite() || z == Complex64::new(0.0, 0.0) || z == Complex64::new(1.0, 0.0) {
        return Err(HypVolError::DegenerateShape(format!("{z}")));
    }
    Ok(bloch_wigner(z))
}

/// Homogeneous coordinates on CP¹ of an ideal point of H³ (stereographic
/// projection of the unit sphere from `e_3`).
fn to_cp1(x: &DVector<f64>) -> (Complex64, Complex64) {
    let (a, b, c) = (x[0], x[1], x[2]);
    if c <= 0.0 {
        (Complex64::new(a, b), Complex64::new(1.0 - c, 0.0))
    } else {
        (Complex64::new(1.0 + c, 0.0), Complex64::new(a, -b))
    }
}

fn bracket(p: (Complex64, Complex64), q: (Complex64, Complex64)) -> Complex64 {
    p.0 * q.1 - q.0 * p.1
}

/// Shape of the ideal tetrahedron `(ξ0, ξ1, ξ2, ξ3)`, or `None` if two
/// vertices coincide.
pub fn ideal_shape(points: &[HPoint; 4]) -> Option<Complex64> {
    let w: Vec<_> = points.iter().map(|p| to_cp1(p.coords())).collect();
    let num = bracket(w[0], w[2]) * bracket(w[1], w[3]);
    let den = bracket(w[0], w[3]) * bracket(w[1], w[2]);
    if num.norm() <= 1e-14 || den.norm() <= 1e-14 {
        return None;
    }
    Some(num / den)
}

/// Signed volume of an ideal tetrahedron in H³.
pub fn vol3_points(points: &[HPoint; 4]) -> Result<f64, HypVolError> {
    for p in points {
        if p.dim() != 3 {
            return Err(HypVolError::UnsupportedDimension(p.dim()));
        }
        if !p.is_ideal() {
            return Err(HypVolError::InteriorUnsupported);
        }
    }
    Ok(match ideal_shape(points) {
        Some(z) => bloch_wigner(z),
        None => 0.0,
    })
}

/// Alternating sum of face volumes of `n + 2` points (n = 2, or n = 3 with
/// ideal points); zero for a cocycle.
pub fn cocycle_defect(points: &[HPoint]) -> Result<f64, HypVolError> {
    let dim = points.first().map(HPoint::dim).unwrap_or(0);
    if dim != 2 && dim != 3 {
        return Err(HypVolError::UnsupportedDimension(dim));
    }
    if points.len() != dim + 2 {
        return Err(HypVolError::PointCount {
            expected: dim + 2,
            found: points.len(),
        });
    }
    let mut total = 0.0;
    for i in 0..points.len() {
        let face: Vec<&HPoint> = points
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, p)| p)
            .collect();
        let v = if dim == 2 {
            area2(face[0], face[1], face[2])?
        } else {
            vol3_points(&[face[0].clone(), face[1].clone(), face[2].clone(), face[3].clone()])?
        };
        total += if i % 2 == 0 { v } else { -v };
    }
    Ok(total)
}

/// Riemannian volume of the unit sphere `S^d`.
pub fn sphere_volume(d: usize) -> f64 {
    match d {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (d as f64 - 1.0) * sphere_volume(d - 2),
    }
}

/// `2v / vol(S^{2m})`.
pub fn normalize_volume(v: f64, m: usize) -> f64 {
    2.0 * v / sphere_volume(2 * m)
}

/// Supremum of `|vol|` over simplices: π in H², the regular ideal tetrahedron in H³.
pub fn max_simplex_volume(n: usize) -> Result<f64, HypVolError> {
    match n {
        2 => Ok(PI),
        3 => Ok(3.0 * lobachevsky(PI / 3.0)),
        _ => Err(HypVolError::UnsupportedDimension(n)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ideal2(theta: f64) -> HPoint {
        HPoint::ideal(DVector::from_vec(vec![theta.cos(), theta.sin(), 1.0])).unwrap()
    }

    fn interior2(r: f64, theta: f64) -> HPoint {
        HPoint::interior(DVector::from_vec(vec![
            r.sinh() * theta.cos(),
            r.sinh() * theta.sin(),
            r.cosh(),
        ]))
        .unwrap()
    }

    #[test]
    fn ideal_triangle() {
        let a = area2(&ideal2(0.0), &ideal2(2.0), &ideal2(4.0)).unwrap();
        assert!((a - PI).abs() < 1e-12);
        let b = area2(&ideal2(0.0), &ideal2(4.0), &ideal2(2.0)).unwrap();
        assert!((b + PI).abs() < 1e-12);
    }

    #[test]
    fn degenerate_triangles() {
        let p = interior2(0.5, 0.3);
        assert_eq!(area2(&p, &p, &interior2(1.0, 2.0)).unwrap(), 0.0);
        // three points on the geodesic x_2 = 0
        let a = area2(&interior2(0.5, 0.0), &interior2(0.0, 0.0), &interior2(1.5, PI)).unwrap();
        assert!(a.abs() < 1e-12);
    }

    #[test]
    fn right_angle_at_origin() {
        // vertices at the origin and along two orthogonal axes
        let o = interior2(0.0, 0.0);
        let a = interior2(1.0, 0.0);
        let b = interior2(1.0, PI / 2.0);
        let area = area2(&o, &a, &b).unwrap();
        // cosh c = cosh a cosh b; angles at a, b from the hyperbolic sine rule
        let c = (1.0_f64.cosh().powi(2)).acosh();
        let beta = (1.0_f64.tanh() / c.tanh()).acos();
        assert!((area - (PI / 2.0 - 2.0 * beta)).abs() < 1e-12);
    }

    #[test]
    fn shapes_and_volumes() {
        let z = Complex64::from_polar(1.0, PI / 3.0);
        assert!((vol3_ideal(z).unwrap() - 1.014_941_606_409_653_6).abs() < 1e-13);
        assert_eq!(vol3_ideal(Complex64::new(3.0, 0.0)).unwrap(), 0.0);
        assert!(vol3_ideal(Complex64::new(1.0, 0.0)).is_err());
        assert!(vol3_ideal(Complex64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn shape_of_standard_tetrahedron() {
        // (∞, 0, 1, z) in the upper half-space ↔ points of S² via inverse stereographic projection
        let lift = |w: Complex64| {
            let d = 1.0 + w.norm_sqr();
            DVector::from_vec(vec![2.0 * w.re / d, 2.0 * w.im / d, (w.norm_sqr() - 1.0) / d, 1.0])
        };
        let inf = HPoint::ideal(DVector::from_vec(vec![0.0, 0.0, 1.0, 1.0])).unwrap();
        let z = Complex64::new(0.3, 0.8);
        let pts = [
            inf,
            HPoint::ideal(lift(Complex64::new(0.0, 0.0))).unwrap(),
            HPoint::ideal(lift(Complex64::new(1.0, 0.0))).unwrap(),
            HPoint::ideal(lift(z)).unwrap(),
        ];
        let shape = ideal_shape(&pts).unwrap();
        assert!((shape - z).norm() < 1e-12);
        let det = DMatrix::from_columns(&pts.iter().map(|p| p.coords().clone()).collect::<Vec<_>>()).determinant();
        assert_eq!(det.signum(), vol3_points(&pts).unwrap().signum());
    }

    #[test]
    fn five_term_relation() {
        let pts: Vec<HPoint> = [0.1, 1.3, 2.2, 3.9, 5.1]
            .iter()
            .enumerate()
            .map(|(i, &phi)| {
                let theta = 0.4 + 0.5 * i as f64;
                HPoint::ideal(DVector::from_vec(vec![
                    theta.sin() * f64::cos(phi),
                    theta.sin() * f64::sin(phi),
                    theta.cos(),
                    1.0,
                ]))
                .unwrap()
            })
            .collect();
        assert!(cocycle_defect(&pts).unwrap().abs() < 1e-12);
    }

    #[test]
    fn constants() {
        assert!((sphere_volume(2) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_volume(4) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
        assert!((normalize_volume(4.0 * PI, 1) - 2.0).abs() < 1e-15);
        assert!((max_simplex_volume(3).unwrap() - 1.014_941_606_409_653_6).abs() < 1e-14);
        assert!(max_simplex_volume(4).is_err());
    }

    #[test]
    fn points_json() {
        let pts = parse_points(r#"{"points": [[0,0,1],[1,0,1],[0.6,0.8,1]]}"#).unwrap();
        assert!(!pts[0].is_ideal() && pts[1].is_ideal());
        assert!(parse_points(r#"{"points": [[0,0,2]]}"#).is_err());
    }
}
