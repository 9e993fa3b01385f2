// SPDX-License-Identifier: Apache-2.0

//! Lobachevsky function, complex dilogarithm and the Bloch–Wigner function.
//!
//! Λ is evaluated through the Clausen function, `Λ(θ) = Cl₂(2θ)/2`, with the
//! expansion
//!
//! ```text
//! Cl₂(φ) = φ − φ·ln|φ| − Σ_{k≥1} (−1)^k B_{2k} / (2k·(2k+1)!) · φ^(2k+1),   |φ| ≤ π
//! ```
//!
//! whose terms shrink like `(φ/2π)^(2k)`. The Bernoulli numbers are computed
//! exactly once and cached as doubles.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num::complex::Complex64;
use num::{BigInt, One, ToPrimitive, Zero};

use crate::rational::Q;

const SERIES_TERMS: usize = 40;

/// `B_0, B_1, …, B_{n}` exactly (with `B_1 = −1/2`).
pub fn bernoulli_numbers(n: usize) -> Vec<Q> {
    // B_m = −1/(m+1) · Σ_{j<m} C(m+1, j) B_j
    let mut b: Vec<Q> = Vec::with_capacity(n + 1);
    b.push(Q::one());
    for m in 1..=n {
        let mut acc = Q::zero();
        let mut binom = BigInt::one();
        for (j, bj) in b.iter().enumerate() {
            acc += bj * Q::from_integer(binom.clone());
            binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
        }
        b.push(-acc / Q::from_integer(BigInt::from(m + 1)));
    }
    b
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Coefficients `−(−1)^k B_{2k} / (2k·(2k+1)!)`, `k = 1, 2, …`.
fn clausen_coefficients() -> &'static [f64] {
    static COEFFS: OnceLock<Vec<f64>> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let b = bernoulli_numbers(2 * SERIES_TERMS);
        (1..=SERIES_TERMS)
            .map(|k| {
                let sign = if k % 2 == 0 { -1 } else { 1 };
                let denom = BigInt::from(2 * k) * factorial(2 * k + 1);
                let c = &b[2 * k] * Q::from_integer(BigInt::from(sign)) / Q::from_integer(denom);
                c.to_f64().expect("finite coefficient")
            })
            .collect()
    })
}

/// `B_{2k}/(2k+1)!`, `k = 1, 2, …`, for the dilogarithm series.
fn dilog_coefficients() -> &'static [f64] {
    static COEFFS: OnceLock<Vec<f64>> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let b = bernoulli_numbers(2 * SERIES_TERMS);
        (1..=SERIES_TERMS)
            .map(|k| {
                let c = &b[2 * k] / Q::from_integer(factorial(2 * k + 1));
                c.to_f64().expect("finite coefficient")
            })
            .collect()
    })
}

/// Reduces `x` to `[−π, π]`.
fn reduce_2pi(x: f64) -> f64 {
    x - 2.0 * PI * (x / (2.0 * PI)).round()
}

/// Clausen function `Cl₂(φ) = −∫₀^φ log|2 sin(u/2)| du`.
pub fn clausen2(phi: f64) -> f64 {
    let phi = reduce_2pi(phi);
    if phi == 0.0 {
        return 0.0;
    }
    let p2 = phi * phi;
    let mut power = phi;
    let mut sum = 0.0;
    for &c in clausen_coefficients() {
        power *= p2;
        let term = c * power;
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    phi - phi * phi.abs().ln() + sum
}

/// Lobachevsky function `Λ(θ) = −∫₀^θ log|2 sin u| du`; odd and π-periodic.
pub fn lobachevsky(theta: f64) -> f64 {
    0.5 * clausen2(2.0 * theta)
}

/// Principal-branch dilogarithm `Li₂(z) = Σ z^k/k²`, continued analytically.
pub fn dilog(z: Complex64) -> Complex64 {
    let zeta2 = PI * PI / 6.0;
    if z == Complex64::new(0.0, 0.0) {
        return z;
    }
    if z == Complex64::new(1.0, 0.0) {
        return Complex64::new(zeta2, 0.0);
    }
    if z.norm_sqr() > 1.0 {
        // Li₂(z) = −Li₂(1/z) − π²/6 − ½ log²(−z)
        let l = (-z).ln();
        return -dilog(z.inv()) - zeta2 - 0.5 * l * l;
    }
    if z.re > 0.5 {
        // Li₂(z) = −Li₂(1−z) + π²/6 − log z · log(1−z)
        let w = Complex64::new(1.0, 0.0) - z;
        return -dilog(w) + zeta2 - z.ln() * w.ln();
    }
    // Li₂(z) = Σ_n B_n u^(n+1)/(n+1)!, u = −log(1−z)
    let u = -(Complex64::new(1.0, 0.0) - z).ln();
    let u2 = u * u;
    let mut sum = u - 0.25 * u2;
    let mut power = u;
    for &c in dilog_coefficients() {
        power *= u2;
        let term = power * c;
        sum += term;
        if term.norm() < 1e-18 * sum.norm() {
            break;
        }
    }
    sum
}

/// Bloch–Wigner function `D(z) = Im Li₂(z) + arg(1−z)·log|z|`.
///
/// `D` is real-analytic on `C \ {0, 1}`, continuous on the Riemann sphere and
/// vanishes on the real line, where it is returned as exactly 0.
pub fn bloch_wigner(z: Complex64) -> f64 {
    if z.im == 0.0 || !z.re.is_finite() || !z.im.is_finite() {
        return 0.0;
    }
    let one = Complex64::new(1.0, 0.0);
    dilog(z).im + (one - z).arg() * z.norm().ln()
}

/// `D(z)` through the dihedral angles: `Λ(arg z) + Λ(arg 1/(1−z)) + Λ(arg(1−1/z))`.
pub fn bloch_wigner_lobachevsky(z: Complex64) -> f64 {
    if z.im == 0.0 {
        return 0.0;
    }
    let one = Complex64::new(1.0, 0.0);
    lobachevsky(z.arg()) + lobachevsky((one / (one - z)).arg()) + lobachevsky((one - one / z).arg())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn bernoulli_values() {
        let b = bernoulli_numbers(8);
        assert_eq!(b[1], q(-1, 2));
        assert_eq!(b[2], q(1, 6));
        assert_eq!(b[3], q(0, 1));
        assert_eq!(b[4], q(-1, 30));
        assert_eq!(b[8], q(-1, 30));
    }

    #[test]
    fn lobachevsky_special_values() {
        assert_eq!(lobachevsky(0.0), 0.0);
        assert!(lobachevsky(PI / 2.0).abs() < 1e-15);
        // Λ(π/6) = (3/2)Λ(π/3), the maximum
        assert!((lobachevsky(PI / 6.0) - 0.507_470_803_204_827_2).abs() < 1e-14);
        assert!((3.0 * lobachevsky(PI / 3.0) - 1.014_941_606_409_653_6).abs() < 1e-14);
        assert!((lobachevsky(PI / 6.0) - 1.5 * lobachevsky(PI / 3.0)).abs() < 1e-15);
        // π-periodic and odd
        for &t in &[0.1, 0.7, 1.3, 2.9] {
            assert!((lobachevsky(t + PI) - lobachevsky(t)).abs() < 1e-14);
            assert!((lobachevsky(-t) + lobachevsky(t)).abs() < 1e-15);
        }
        // duplication: Λ(2θ) = 2Λ(θ) + 2Λ(θ + π/2)
        for &t in &[0.2, 0.45, 1.1] {
            let lhs = lobachevsky(2.0 * t);
            let rhs = 2.0 * lobachevsky(t) + 2.0 * lobachevsky(t + PI / 2.0);
            assert!((lhs - rhs).abs() < 1e-14);
        }
    }

    #[test]
    fn dilog_special_values() {
        let c = |re, im| Complex64::new(re, im);
        let ln2 = std::f64::consts::LN_2;
        assert!((dilog(c(-1.0, 0.0)) - c(-PI * PI / 12.0, 0.0)).norm() < 1e-15);
        assert!((dilog(c(0.5, 0.0)) - c(PI * PI / 12.0 - ln2 * ln2 / 2.0, 0.0)).norm() < 1e-15);
        let catalan = 0.915_965_594_177_219;
        assert!((dilog(c(0.0, 1.0)) - c(-PI * PI / 48.0, catalan)).norm() < 1e-15);
        // power series agreement inside the disk
        let z = c(0.3, -0.2);
        let mut series = Complex64::new(0.0, 0.0);
        let mut p = z;
        for k in 1..200 {
            series += p / (k * k) as f64;
            p *= z;
        }
        assert!((dilog(z) - series).norm() < 1e-15);
    }

    #[test]
    fn bloch_wigner_values() {
        let z = Complex64::from_polar(1.0, PI / 3.0);
        assert!((bloch_wigner(z) - 1.014_941_606_409_653_6).abs() < 1e-14);
        assert!((bloch_wigner_lobachevsky(z) - bloch_wigner(z)).abs() < 1e-14);
        assert_eq!(bloch_wigner(Complex64::new(2.5, 0.0)), 0.0);
        let w = Complex64::new(-0.4, 2.1);
        assert!((bloch_wigner(w.conj()) + bloch_wigner(w)).abs() < 1e-14);
        assert!((bloch_wigner_lobachevsky(w) - bloch_wigner(w)).abs() < 1e-13);
    }
}
