// SPDX-License-Identifier: Apache-2.0

//! Exact cocycles on SO(2)^m and O(2)^m.
//!
//! SO(2) is identified with R/Z and every angle is an exact rational in
//! `[0, 1)`. The rotation cocycle `Rot`, the orientation cocycle `Or`, the
//! Euler representative `-Or/2` and the product cocycle `κ` are evaluated
//! exactly. Higher rotation numbers pair the pullback of `κ` with the
//! fundamental cycle of Z^(2m-1).

use std::fmt;
use std::sync::Arc;

use num::{BigInt, One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{CircleError, ParseError};
use crate::lattice::{fundamental_cycle_with_cap, CochainValue, LatticeCochain, LatticePoint, ValueKind};
use crate::rational::{format_q, frac, parse_q, rem_euclid, Q};

/// Largest `m` accepted by [`higher_rotation_number`]; the pairing sums over
/// `(2m-1)!` permutations.
pub const DEFAULT_FACTOR_CAP: usize = 4;

/// An element of R/Z, kept as its representative in `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Angle(Q);

impl Angle {
    pub fn new(value: Q) -> Self {
        Angle(frac(&value))
    }

    pub fn zero() -> Self {
        Angle(Q::zero())
    }

    pub fn from_ratio(numer: i64, denom: i64) -> Self {
        Angle::new(Q::new(BigInt::from(numer), BigInt::from(denom)))
    }

    /// The canonical lift in `[0, 1)`.
    pub fn lift(&self) -> &Q {
        &self.0
    }

    pub fn add(&self, other: &Angle) -> Angle {
        Angle::new(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &Angle) -> Angle {
        Angle::new(&self.0 - &other.0)
    }

    pub fn neg(&self) -> Angle {
        Angle::new(-&self.0)
    }

    pub fn times(&self, k: i64) -> Angle {
        Angle::new(&self.0 * Q::from_integer(k.into()))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn parse(text: &str) -> Result<Angle, ParseError> {
        Ok(Angle::new(parse_q(text)?))
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_q(&self.0))
    }
}

/// `Rot(g, h) = g⁻¹h`, i.e. `h - g mod 1`.
pub fn rot_cocycle(g: &Angle, h: &Angle) -> Angle {
    h.sub(g)
}

/// Orientation cocycle on (R/Z)^3: `+1` for a positively (counterclockwise)
/// ordered triple of distinct angles, `-1` for the opposite order, `0` when two
/// angles coincide.
pub fn orientation_cocycle(g0: &Angle, g1: &Angle, g2: &Angle) -> i32 {
    if g0 == g1 || g1 == g2 || g0 == g2 {
        return 0;
    }
    let a = g1.sub(g0);
    let b = g2.sub(g0);
    if a < b {
        1
    } else {
        -1
    }
}

/// The Euler-class representative `-Or/2`.
pub fn euler2_cocycle(g0: &Angle, g1: &Angle, g2: &Angle) -> Q {
    Q::new(BigInt::from(-orientation_cocycle(g0, g1, g2)), BigInt::from(2))
}

/// Element of O(2): rotation by `angle`, followed by complex conjugation
/// first when `reflect` is set (so a reflection is `z ↦ e^{2πi·angle}·z̄`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct O2Element {
    pub angle: Angle,
    pub reflect: bool,
}

impl O2Element {
    pub fn rotation(angle: Angle) -> Self {
        O2Element {
            angle,
            reflect: false,
        }
    }

    pub fn reflection(angle: Angle) -> Self {
        O2Element {
            angle,
            reflect: true,
        }
    }

    pub fn identity() -> Self {
        O2Element::rotation(Angle::zero())
    }

    pub fn compose(&self, other: &O2Element) -> O2Element {
        if self.reflect {
            O2Element {
                angle: self.angle.sub(&other.angle),
                reflect: !other.reflect,
            }
        } else {
            O2Element {
                angle: self.angle.add(&other.angle),
                reflect: other.reflect,
            }
        }
    }

    pub fn is_identity(&self) -> bool {
        !self.reflect && self.angle.is_zero()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TorusElement(Vec<Angle>);

impl TorusElement {
    pub fn new(components: Vec<Angle>) -> Self {
        TorusElement(components)
    }

    pub fn identity(m: usize) -> Self {
        TorusElement(vec![Angle::zero(); m])
    }

    pub fn components(&self) -> &[Angle] {
        &self.0
    }

    pub fn factor(&self, i: usize) -> &Angle {
        &self.0[i]
    }

    pub fn m(&self) -> usize {
        self.0.len()
    }

    pub fn compose(&self, other: &TorusElement) -> TorusElement {
        TorusElement(self.0.iter().zip(&other.0).map(|(a, b)| a.add(b)).collect())
    }

    pub fn inverse(&self) -> TorusElement {
        TorusElement(self.0.iter().map(Angle::neg).collect())
    }
}

/// A homomorphism Z^(2m-1) → O(2)^m given by the images of the basis vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusHom {
    m: usize,
    generators: Vec<Vec<O2Element>>,
}

impl TorusHom {
    pub fn new(m: usize, generators: Vec<Vec<O2Element>>) -> Result<Self, CircleError> {
        if m == 0 {
            return Err(CircleError::GeneratorCount {
                expected: 1,
                found: generators.len(),
            });
        }
        if generators.len() != 2 * m - 1 {
            return Err(CircleError::GeneratorCount {
                expected: 2 * m - 1,
                found: generators.len(),
            });
        }
        for (index, g) in generators.iter().enumerate() {
            if g.len() != m {
                return Err(CircleError::FactorCount {
                    index,
                    expected: m,
                    found: g.len(),
                });
            }
        }
        Ok(TorusHom { m, generators })
    }

    /// Purely rotational homomorphism into SO(2)^m.
    pub fn from_torus(generators: Vec<TorusElement>) -> Result<Self, CircleError> {
        let m = generators.len().div_ceil(2);
        let generators = generators
            .into_iter()
            .map(|t| t.0.into_iter().map(O2Element::rotation).collect())
            .collect();
        TorusHom::new(m, generators)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn generators(&self) -> &[Vec<O2Element>] {
        &self.generators
    }

    pub fn has_reflections(&self) -> bool {
        self.generators.iter().flatten().any(|e| e.reflect)
    }

    /// Generator images as torus elements; fails when reflections are present.
    pub fn torus_generators(&self) -> Result<Vec<TorusElement>, CircleError> {
        if self.has_reflections() {
            return Err(CircleError::ContainsReflections);
        }
        Ok(self
            .generators
            .iter()
            .map(|g| TorusElement(g.iter().map(|e| e.angle.clone()).collect()))
            .collect())
    }

    /// Image of a lattice point `v`, i.e. `Σ v_i f_i`.
    pub fn image(&self, v: &LatticePoint) -> Result<TorusElement, CircleError> {
        let gens = self.torus_generators()?;
        Ok(image_of(&gens, self.m, v))
    }

    /// Pulls a cochain on SO(2)^m back along this homomorphism.
    pub fn pullback(&self, cochain: &TorusCochain) -> Result<LatticeCochain, CircleError> {
        if cochain.m != self.m {
            return Err(CircleError::FactorCount {
                index: 0,
                expected: cochain.m,
                found: self.m,
            });
        }
        let gens = self.torus_generators()?;
        let m = self.m;
        let eval = Arc::clone(&cochain.eval);
        Ok(LatticeCochain::new(
            2 * m - 1,
            cochain.degree,
            cochain.kind,
            move |vertices| {
                let images: Vec<TorusElement> =
                    vertices.iter().map(|v| image_of(&gens, m, v)).collect();
                eval(&images)
            },
        ))
    }

    pub fn to_json(&self) -> HomJson {
        HomJson {
            m: self.m,
            generators: self
                .generators
                .iter()
                .map(|g| {
                    g.iter()
                        .map(|e| O2Json {
                            angle: e.angle.to_string(),
                            reflect: Some(e.reflect),
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn from_json(json: &HomJson) -> Result<Self, ParseError> {
        let generators = json
            .generators
            .iter()
            .map(|g| {
                g.iter()
                    .map(|e| {
                        Ok(O2Element {
                            angle: Angle::parse(&e.angle)?,
                            reflect: e.reflect.unwrap_or(false),
                        })
                    })
                    .collect::<Result<Vec<_>, ParseError>>()
            })
            .collect::<Result<Vec<_>, ParseError>>()?;
        TorusHom::new(json.m, generators).map_err(|e| ParseError::Schema(e.to_string()))
    }

    pub fn parse_json(text: &str) -> Result<Self, ParseError> {
        let json: HomJson = serde_json::from_str(text)?;
        Self::from_json(&json)
    }
}

fn image_of(gens: &[TorusElement], m: usize, v: &LatticePoint) -> TorusElement {
    let mut acc = TorusElement::identity(m);
    for (g, &k) in gens.iter().zip(v.coords()) {
        if k != 0 {
            acc = TorusElement(
                acc.0
                    .iter()
                    .zip(&g.0)
                    .map(|(a, b)| a.add(&b.times(k)))
                    .collect(),
            );
        }
    }
    acc
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct HomJson {
    pub m: usize,
    pub generators: Vec<Vec<O2Json>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct O2Json {
    pub angle: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reflect: Option<bool>,
}

type TorusEvaluator = dyn Fn(&[TorusElement]) -> CochainValue + Send + Sync;

/// A homogeneous cochain on SO(2)^m.
#[derive(Clone)]
pub struct TorusCochain {
    m: usize,
    degree: usize,
    kind: ValueKind,
    eval: Arc<TorusEvaluator>,
}

impl fmt::Debug for TorusCochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TorusCochain")
            .field("m", &self.m)
            .field("degree", &self.degree)
            .field("kind", &self.kind)
            .finish_non_exhaustive()
    }
}

impl TorusCochain {
    pub fn new<F>(m: usize, degree: usize, kind: ValueKind, eval: F) -> Self
    where
        F: Fn(&[TorusElement]) -> CochainValue + Send + Sync + 'static,
    {
        TorusCochain {
            m,
            degree,
            kind,
            eval: Arc::new(eval),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn kind(&self) -> ValueKind {
        self.kind
    }

    pub fn value_at(&self, points: &[TorusElement]) -> CochainValue {
        assert_eq!(points.len(), self.degree + 1, "wrong number of arguments");
        (self.eval)(points)
    }

    /// `Rot_i`: the rotation cocycle of the i-th factor (R/Z-valued).
    pub fn rot(m: usize, factor: usize) -> Self {
        TorusCochain::new(m, 1, ValueKind::Circle, move |g| {
            CochainValue::Circle(rot_cocycle(g[0].factor(factor), g[1].factor(factor)).0)
        })
    }

    /// `Rot_i` lifted to its representative in `[0, 1)` (rational-valued).
    pub fn rot_lifted(m: usize, factor: usize) -> Self {
        TorusCochain::new(m, 1, ValueKind::Rational, move |g| {
            CochainValue::Rational(rot_cocycle(g[0].factor(factor), g[1].factor(factor)).0)
        })
    }

    /// `Or_i`: the orientation cocycle of the i-th factor (integer-valued).
    pub fn orientation(m: usize, factor: usize) -> Self {
        TorusCochain::new(m, 2, ValueKind::Rational, move |g| {
            let o = orientation_cocycle(g[0].factor(factor), g[1].factor(factor), g[2].factor(factor));
            CochainValue::Rational(Q::from_integer(o.into()))
        })
    }
}

/// The representative of `κ` on SO(2)^m of degree `2m - 1`:
/// `(-1)^(m-1)/2^(m-1) · Rot_1(g_0,g_1) · Or_2(g_1,g_2,g_3) ⋯ Or_m(g_{2m-3},g_{2m-2},g_{2m-1})`.
///
/// `Rot_1` is lifted to `[0, 1)` before multiplying, so values are exact
/// rationals; reduce mod 1 to read off the R/Z-valued class.
pub fn kappa_cocycle(m: usize) -> TorusCochain {
    assert!(m >= 1, "kappa needs at least one factor");
    let sign = if (m - 1).is_multiple_of(2) { 1 } else { -1 };
    let prefactor = Q::new(BigInt::from(sign), BigInt::from(2).pow((m - 1) as u32));
    TorusCochain::new(m, 2 * m - 1, ValueKind::Rational, move |g| {
        let rot = rot_cocycle(g[0].factor(0), g[1].factor(0));
        if rot.is_zero() {
            return CochainValue::Rational(Q::zero());
        }
        let mut sign = 1;
        for j in 1..m {
            let a = 2 * j - 1;
            let o = orientation_cocycle(g[a].factor(j), g[a + 1].factor(j), g[a + 2].factor(j));
            if o == 0 {
                return CochainValue::Rational(Q::zero());
            }
            sign *= o;
        }
        CochainValue::Rational(rot.0 * &prefactor * Q::from_integer(sign.into()))
    })
}

/// Value of a pairing into R/Z together with the exact real lift it came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairingValue {
    pub lift: Q,
    pub reduced: Angle,
}

impl PairingValue {
    pub fn from_lift(lift: Q) -> Self {
        let reduced = Angle::new(lift.clone());
        PairingValue { lift, reduced }
    }
}

/// `⟨ρ*κ, [Z^(2m-1)]⟩`, evaluated exactly on the fundamental cycle.
pub fn higher_rotation_number(rho: &TorusHom) -> Result<PairingValue, CircleError> {
    higher_rotation_number_with_cap(rho, DEFAULT_FACTOR_CAP)
}

pub fn higher_rotation_number_with_cap(
    rho: &TorusHom,
    cap: usize,
) -> Result<PairingValue, CircleError> {
    if rho.has_reflections() {
        return Err(CircleError::ContainsReflections);
    }
    let m = rho.m();
    let z = fundamental_cycle_with_cap(2 * m - 1, 2 * cap - 1)?;
    let pulled = rho.pullback(&kappa_cocycle(m))?;
    let value = pulled.evaluate(&z)?;
    let lift = value
        .as_rational()
        .cloned()
        .expect("kappa is rational-valued");
    Ok(PairingValue::from_lift(lift))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum O2Reduction {
    /// No reflections anywhere: the same homomorphism, now into SO(2)^m.
    Reduced(TorusHom),
    /// Some factor's image is `{1, σ}` for a reflection σ; the pairing is 0.
    ZeroByReflection { factor: usize },
}

/// Sorts a homomorphism into O(2)^m into the rotational case or the case
/// where a factor lands in a two-element reflection subgroup.
pub fn o2_reduction(rho: &TorusHom) -> Result<O2Reduction, CircleError> {
    let gens = rho.generators();
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            for (a, b) in gens[i].iter().zip(&gens[j]) {
                if a.compose(b) != b.compose(a) {
                    return Err(CircleError::NonCommuting(i, j));
                }
            }
        }
    }
    if !rho.has_reflections() {
        return Ok(O2Reduction::Reduced(rho.clone()));
    }
    for factor in 0..rho.m() {
        let images: Vec<&O2Element> = gens.iter().map(|g| &g[factor]).collect();
        let Some(sigma) = images.iter().find(|e| e.reflect) else {
            continue;
        };
        if images.iter().all(|e| e.is_identity() || *e == *sigma) {
            return Ok(O2Reduction::ZeroByReflection { factor });
        }
        // Commuting elements with a reflection that are not all in {1, σ}
        // generate a Klein four-group {1, -1, σ, -σ}.
        return Err(CircleError::ReflectionSubgroup(factor));
    }
    unreachable!("has_reflections implies some factor contains a reflection")
}

/// Result of checking a candidate normalized volume against the boundary
/// rotation data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditReport {
    /// `(-vol + Σ lifts) mod 1`, or mod `1/B` with a Bieberbach divisor.
    pub defect: Angle,
    pub integral: bool,
    pub boundary_terms: Vec<PairingValue>,
}

/// Congruence audit: the normalized volume `2·Vol/vol(S^2m)` must agree with
/// the sum of the cusp pairings modulo Z (or modulo `(1/B)·Z`).
pub fn integrality_audit(
    normalized_vol: &Q,
    cusp_homs: &[TorusHom],
    m: usize,
    bieberbach_divisor: Option<u64>,
) -> Result<AuditReport, CircleError> {
    if m < 2 {
        return Err(CircleError::AuditUndefined(m));
    }
    let modulus = match bieberbach_divisor {
        Some(0) => return Err(CircleError::Divisor),
        Some(b) => Q::new(BigInt::one(), BigInt::from(b)),
        None => Q::one(),
    };
    let mut total = -normalized_vol.clone();
    let mut boundary_terms = Vec::with_capacity(cusp_homs.len());
    for hom in cusp_homs {
        if hom.m() != m {
            return Err(CircleError::FactorMismatch {
                expected: m,
                found: hom.m(),
            });
        }
        let term = match o2_reduction(hom)? {
            O2Reduction::Reduced(h) => higher_rotation_number(&h)?,
            O2Reduction::ZeroByReflection { .. } => PairingValue::from_lift(Q::zero()),
        };
        total += &term.lift;
        boundary_terms.push(term);
    }
    let defect = rem_euclid(&total, &modulus);
    let integral = defect.is_zero();
    Ok(AuditReport {
        defect: Angle(defect),
        integral,
        boundary_terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn a(n: i64, d: i64) -> Angle {
        Angle::from_ratio(n, d)
    }

    fn t(cs: &[(i64, i64)]) -> TorusElement {
        TorusElement::new(cs.iter().map(|&(n, d)| a(n, d)).collect())
    }

    #[test]
    fn rot_examples() {
        assert_eq!(rot_cocycle(&a(0, 1), &a(1, 3)), a(1, 3));
        assert_eq!(rot_cocycle(&a(1, 4), &a(1, 4)), Angle::zero());
        // defect on (0, 1/3, 1/2): Rot(g1,g2) - Rot(g0,g2) + Rot(g0,g1)
        let (g0, g1, g2) = (a(0, 1), a(1, 3), a(1, 2));
        let d = rot_cocycle(&g1, &g2)
            .sub(&rot_cocycle(&g0, &g2))
            .add(&rot_cocycle(&g0, &g1));
        assert!(d.is_zero());
    }

    #[test]
    fn orientation_examples() {
        assert_eq!(orientation_cocycle(&a(0, 1), &a(1, 3), &a(2, 3)), 1);
        assert_eq!(orientation_cocycle(&a(0, 1), &a(2, 3), &a(1, 3)), -1);
        assert_eq!(orientation_cocycle(&a(0, 1), &a(0, 1), &a(1, 2)), 0);
        // wrap-around: 5/6, 1/6, 1/2 is counterclockwise
        assert_eq!(orientation_cocycle(&a(5, 6), &a(1, 6), &a(1, 2)), 1);
    }

    #[test]
    fn euler_examples() {
        assert_eq!(euler2_cocycle(&a(0, 1), &a(1, 3), &a(2, 3)), q(-1, 2));
        assert_eq!(euler2_cocycle(&a(1, 5), &a(1, 5), &a(2, 3)), qi(0));
    }

    #[test]
    fn kappa_m1_is_lifted_rot() {
        let k = kappa_cocycle(1);
        let v = k.value_at(&[t(&[(3, 4)]), t(&[(1, 4)])]);
        assert_eq!(v, CochainValue::Rational(q(1, 2)));
    }

    #[test]
    fn kappa_m2_examples() {
        let k = kappa_cocycle(2);
        let v = k.value_at(&[t(&[(0, 1), (0, 1)]), t(&[(1, 3), (1, 5)]), t(&[(2, 3), (2, 5)]), t(&[(1, 2), (3, 5)])]);
        assert_eq!(v, CochainValue::Rational(q(-1, 6)));
        let zero_rot = k.value_at(&[t(&[(1, 7), (0, 1)]), t(&[(1, 7), (1, 5)]), t(&[(2, 3), (2, 5)]), t(&[(1, 2), (3, 5)])]);
        assert!(zero_rot.is_zero());
    }

    #[test]
    fn cup_of_pullbacks_matches_kappa() {
        let rho = TorusHom::from_torus(vec![t(&[(1, 3), (1, 5)]), t(&[(2, 7), (3, 4)]), t(&[(5, 6), (1, 9)])]).unwrap();
        let rot = rho.pullback(&TorusCochain::rot_lifted(2, 0)).unwrap();
        let or2 = rho.pullback(&TorusCochain::orientation(2, 1)).unwrap();
        let product = rot.cup(&or2).unwrap();
        let kappa = rho.pullback(&kappa_cocycle(2)).unwrap();
        let half = q(-1, 2);
        for tuple in [
            [[0, 0, 0], [1, 0, 0], [1, 1, 0], [1, 1, 1]],
            [[0, 0, 0], [0, 1, 0], [2, 1, 0], [1, -1, 3]],
            [[1, 2, 3], [0, 0, 1], [5, 1, 0], [2, 2, 2]],
        ] {
            let pts: Vec<LatticePoint> = tuple.iter().map(|c| LatticePoint::new(c.to_vec())).collect();
            assert_eq!(product.value_at(&pts).unwrap().scale(&half), kappa.value_at(&pts).unwrap());
        }
    }

    #[test]
    fn rotation_number_m1() {
        let rho = TorusHom::from_torus(vec![t(&[(1, 3)])]).unwrap();
        let p = higher_rotation_number(&rho).unwrap();
        assert_eq!(p.lift, q(1, 3));
        assert_eq!(p.reduced, a(1, 3));
    }

    #[test]
    fn rotation_number_m2_trivial_and_random() {
        let trivial = TorusHom::from_torus(vec![TorusElement::identity(2); 3]).unwrap();
        assert_eq!(higher_rotation_number(&trivial).unwrap().lift, qi(0));
        let rho = TorusHom::from_torus(vec![t(&[(1, 3), (1, 5)]), t(&[(2, 7), (3, 4)]), t(&[(5, 6), (1, 9)])]).unwrap();
        assert_eq!(higher_rotation_number(&rho).unwrap().lift, qi(0));
    }

    #[test]
    fn rotation_number_rejects_reflections() {
        let rho = TorusHom::new(1, vec![vec![O2Element::reflection(a(1, 3))]]).unwrap();
        assert_eq!(higher_rotation_number(&rho), Err(CircleError::ContainsReflections));
    }

    #[test]
    fn o2_group_law() {
        let s = O2Element::reflection(a(1, 5));
        assert!(s.compose(&s).is_identity());
        let r = O2Element::rotation(a(1, 7));
        // s r s = r^{-1}
        assert_eq!(s.compose(&r).compose(&s), O2Element::rotation(a(-1, 7)));
    }

    #[test]
    fn o2_reduction_cases() {
        let rot = TorusHom::from_torus(vec![t(&[(1, 3), (1, 5)]), t(&[(2, 7), (3, 4)]), t(&[(5, 6), (1, 9)])]).unwrap();
        assert_eq!(o2_reduction(&rot).unwrap(), O2Reduction::Reduced(rot.clone()));

        let sigma = O2Element::reflection(a(1, 8));
        let refl = TorusHom::new(
            2,
            vec![
                vec![O2Element::rotation(a(1, 3)), sigma.clone()],
                vec![O2Element::rotation(a(1, 4)), sigma.clone()],
                vec![O2Element::rotation(a(1, 5)), O2Element::identity()],
            ],
        )
        .unwrap();
        assert_eq!(o2_reduction(&refl).unwrap(), O2Reduction::ZeroByReflection { factor: 1 });

        let mixed = TorusHom::new(
            2,
            vec![
                vec![O2Element::rotation(a(1, 3)), O2Element::identity()],
                vec![O2Element::identity(), O2Element::rotation(a(1, 4))],
                vec![O2Element::rotation(a(1, 5)), O2Element::identity()],
            ],
        )
        .unwrap();
        assert!(matches!(o2_reduction(&mixed).unwrap(), O2Reduction::Reduced(_)));
    }

    #[test]
    fn o2_reduction_rejects_non_commuting_and_klein() {
        let bad = TorusHom::new(
            1,
            vec![vec![O2Element::reflection(a(0, 1))]],
        )
        .unwrap();
        assert!(matches!(o2_reduction(&bad).unwrap(), O2Reduction::ZeroByReflection { .. }));

        let noncomm = TorusHom::new(
            2,
            vec![
                vec![O2Element::reflection(a(0, 1)), O2Element::identity()],
                vec![O2Element::rotation(a(1, 3)), O2Element::identity()],
                vec![O2Element::identity(), O2Element::identity()],
            ],
        )
        .unwrap();
        assert_eq!(o2_reduction(&noncomm), Err(CircleError::NonCommuting(0, 1)));

        let klein = TorusHom::new(
            2,
            vec![
                vec![O2Element::reflection(a(0, 1)), O2Element::identity()],
                vec![O2Element::rotation(a(1, 2)), O2Element::identity()],
                vec![O2Element::identity(), O2Element::identity()],
            ],
        )
        .unwrap();
        assert_eq!(o2_reduction(&klein), Err(CircleError::ReflectionSubgroup(0)));
    }

    #[test]
    fn audit_examples() {
        let rho = TorusHom::from_torus(vec![t(&[(1, 3), (1, 5)]), t(&[(2, 7), (3, 4)]), t(&[(5, 6), (1, 9)])]).unwrap();
        let r = integrality_audit(&qi(3), &[rho.clone(), rho.clone()], 2, None).unwrap();
        assert!(r.integral);
        assert!(r.defect.is_zero());

        let r = integrality_audit(&q(1, 2), std::slice::from_ref(&rho), 2, None).unwrap();
        assert!(!r.integral);
        assert_eq!(r.defect, a(1, 2));

        let r = integrality_audit(&q(1, 3), std::slice::from_ref(&rho), 2, Some(3)).unwrap();
        assert!(r.integral);
        let r = integrality_audit(&q(1, 4), &[rho], 2, Some(3)).unwrap();
        assert!(!r.integral);
        assert_eq!(r.defect.lift(), &q(1, 12));
    }

    #[test]
    fn audit_requires_m_at_least_two() {
        assert_eq!(integrality_audit(&qi(1), &[], 1, None), Err(CircleError::AuditUndefined(1)));
        assert_eq!(integrality_audit(&qi(1), &[], 2, Some(0)), Err(CircleError::Divisor));
    }

    #[test]
    fn hom_json_round_trip() {
        let text = r#"{"m": 2, "generators": [[{"angle":"1/3"},{"angle":"2/5","reflect":false}],
                      [{"angle":"0"},{"angle":"1/2"}], [{"angle":"-1/4"},{"angle":"7/3"}]]}"#;
        let hom = TorusHom::parse_json(text).unwrap();
        assert_eq!(hom.generators()[2][0].angle, a(3, 4));
        assert_eq!(hom.generators()[2][1].angle, a(1, 3));
        let again = TorusHom::from_json(&hom.to_json()).unwrap();
        assert_eq!(again, hom);
        assert!(TorusHom::parse_json(r#"{"m": 2, "generators": []}"#).is_err());
    }
}
