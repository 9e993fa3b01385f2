// SPDX-License-Identifier: Apache-2.0

//! Numerical values checked against independent evaluations.

use std::f64::consts::PI;

use num::complex::Complex64;

use repvol_core::dehn::{filling_path, representation_volume, solve, EquationRow};
use repvol_core::hypvol::{max_simplex_volume, vol3_ideal};
use repvol_core::lattice::{CochainValue, LatticeCochain, ValueKind};
use repvol_core::rational::{q, to_f64};
use repvol_core::special::{bloch_wigner, dilog, lobachevsky};
use repvol_core::*;

fn lobachevsky_quadrature(theta: f64) -> f64 {
    -quadrature::double_exponential::integrate(|u| (2.0 * u.sin()).abs().ln(), 0.0, theta, 1e-14).integral
}

#[test]
fn lobachevsky_matches_quadrature_on_a_grid() {
    let n = 10_000;
    let mut worst = 0.0f64;
    for k in 1..n {
        let theta = PI * k as f64 / n as f64;
        worst = worst.max((lobachevsky(theta) - lobachevsky_quadrature(theta)).abs());
    }
    assert!(worst < 1e-10, "worst disagreement {worst:e}");
}

#[test]
fn dilog_matches_power_series() {
    let one = Complex64::new(1.0, 0.0);
    for k in 0..64 {
        let z = Complex64::from_polar(0.9 * (k as f64 + 1.0) / 64.0, 0.37 * k as f64);
        let mut series = Complex64::new(0.0, 0.0);
        let mut p = z;
        for j in 1..2000 {
            series += p / (j * j) as f64;
            p *= z;
        }
        assert!((dilog(z) - series).norm() < 1e-12, "z = {z}");
        // Euler reflection relates z and 1 − z
        let w = one - z;
        if w.norm() > 1e-3 {
            let lhs = dilog(z) + dilog(w);
            let rhs = PI * PI / 6.0 - z.ln() * w.ln();
            assert!((lhs - rhs).norm() < 1e-12, "z = {z}");
        }
    }
}

#[test]
fn bloch_wigner_matches_dihedral_angles() {
    for k in 0..200 {
        let z = Complex64::new(-3.0 + 0.031 * k as f64, 0.05 + 0.02 * k as f64);
        let one = Complex64::new(1.0, 0.0);
        let angles = [z.arg(), (one / (one - z)).arg(), (one - one / z).arg()];
        let quad: f64 = angles.iter().map(|&a| lobachevsky_quadrature(a)).sum();
        assert!((bloch_wigner(z) - quad).abs() < 1e-10, "z = {z}");
    }
}

/// `Σ a log z + Σ b log(1 − z) − rhs·πi`.
fn log_row(row: &EquationRow, z: &[Complex64]) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let mut acc = Complex64::new(0.0, -PI * row.rhs_pi_i as f64);
    for (j, &zj) in z.iter().enumerate() {
        acc += zj.ln() * row.a[j] as f64 + (one - zj).ln() * row.b[j] as f64;
    }
    acc
}

fn residual(gs: &GluingSystem, slope: Option<(i64, i64)>, z: &[Complex64]) -> f64 {
    let one = Complex64::new(1.0, 0.0);
    let mut worst = 0.0f64;
    for e in &gs.edges {
        let mut acc = Complex64::new(0.0, -PI * e.rhs_pi_i as f64);
        for (j, &zj) in z.iter().enumerate() {
            acc += zj.ln() * e.a[j] as f64 + (one - zj).ln() * e.b[j] as f64;
        }
        worst = worst.max(acc.norm());
    }
    let cusp = &gs.cusps[0];
    let h = match slope {
        None => log_row(&cusp.meridian, z),
        Some((p, qq)) => {
            log_row(&cusp.meridian, z) * p as f64 + log_row(&cusp.longitude, z) * qq as f64
                - Complex64::new(0.0, 2.0 * PI)
        }
    };
    worst.max(h.norm())
}

#[test]
fn solutions_satisfy_the_equations() {
    let gs = GluingSystem::figure_eight();
    let tol = 1e-11;
    let complete = solve(&gs, &[None], None, tol, 100).unwrap();
    assert!(residual(&gs, None, &complete.shapes) < tol);
    assert!(complete.shapes.iter().all(|z| z.im > 0.0));
    // both shapes are regular ideal tetrahedra
    for z in &complete.shapes {
        assert!((z - Complex64::from_polar(1.0, PI / 3.0)).norm() < 1e-10);
    }
    assert!((complete.volume() - 2.0 * max_simplex_volume(3).unwrap()).abs() < 1e-8);
    for p in [5, 6, 7, 9, 13, -7, -12] {
        let sol = solve(&gs, &[Some((p, 1))], None, tol, 100).unwrap();
        assert!(residual(&gs, Some((p, 1)), &sol.shapes) < tol, "({p},1)");
        assert!(sol.shapes.iter().all(|z| z.im > 0.0), "({p},1)");
    }
}

#[test]
fn filled_volumes_increase_to_the_complete_volume() {
    let gs = GluingSystem::figure_eight();
    let complete = solve(&gs, &[None], None, 1e-12, 100).unwrap().volume();
    let mut prev = 0.0;
    for p in 5..=40 {
        let v = representation_volume(&gs, &[Some((p, 1))], 1e-12, 100).unwrap();
        assert!(v > prev && v < complete, "({p},1): {v}");
        prev = v;
    }
}

#[test]
fn filling_deficit_follows_the_cusp_shape_asymptotic() {
    // Vol(M) − Vol(M(p,q)) ≈ π² / ‖(p, q)‖², with ‖(p, q)‖² = (p² + 12q²)/(2√3)
    let gs = GluingSystem::figure_eight();
    let complete = solve(&gs, &[None], None, 1e-12, 100).unwrap().volume();
    for p in [40, 70, 100] {
        let v = representation_volume(&gs, &[Some((p, 1))], 1e-12, 100).unwrap();
        let predicted = PI * PI * 2.0 * 3f64.sqrt() / (p * p + 12) as f64;
        let ratio = (complete - v) / predicted;
        assert!((ratio - 1.0).abs() < 0.02, "({p},1): ratio {ratio}");
    }
}

#[test]
fn path_jumps_shrink_with_refinement() {
    let gs = GluingSystem::figure_eight();
    let jumps: Vec<f64> = [51, 101, 201]
        .iter()
        .map(|&steps| {
            let path = filling_path(&gs, &[Some((5, 1))], steps, 1e-10, 100).unwrap();
            assert!(path.diagnostic.is_none());
            let end = path.points.last().unwrap().1;
            assert!((end - 0.981_368_828_892_232).abs() < 1e-8);
            path.max_jump()
        })
        .collect();
    assert!(jumps[1] < 0.6 * jumps[0] && jumps[2] < 0.6 * jumps[1], "{jumps:?}");
}

#[test]
fn regular_tetrahedron_volume() {
    let v = vol3_ideal(Complex64::from_polar(1.0, PI / 3.0)).unwrap();
    assert!((v - 3.0 * lobachevsky_quadrature(PI / 3.0)).abs() < 1e-10);
}

/// Plain midpoint sum of the transfer integral for `(0, 1]`, where the
/// retraction is `x ↦ ⌈x⌉ − 1`.
fn transfer_oracle(alpha: impl Fn(i64, i64) -> f64, g0: f64, g1: f64, samples: usize) -> f64 {
    let h = 1.0 / samples as f64;
    (0..samples)
        .map(|i| {
            let g = (i as f64 + 0.5) * h;
            let r0 = (g + g0).ceil() as i64 - 1;
            let r1 = (g + g1).ceil() as i64 - 1;
            alpha(r0, r1) * h
        })
        .sum()
}

#[test]
fn transfer_matches_a_finer_midpoint_sum() {
    let alpha = LatticeCochain::new(1, 1, ValueKind::Real, |p| {
        CochainValue::Real((p[1].coords()[0] - p[0].coords()[0]).abs().min(1) as f64)
    });
    let dist = |a: i64, b: i64| (b - a).abs().min(1) as f64;
    let domain = IntervalDomain::standard();
    for (x0, x1) in [(q(0, 1), q(1, 2)), (q(1, 7), q(5, 3)), (q(-2, 5), q(3, 10))] {
        let plain = transfer_cochain(&alpha, &domain, 40, Quadrature::Uniform).unwrap();
        let r = plain.evaluate(&[x0.clone(), x1.clone()]).unwrap();
        // shift off the grid so no sample lands on a breakpoint
        let oracle = transfer_oracle(dist, to_f64(&x0) + 1e-9, to_f64(&x1) + 1e-9, 400);
        assert!((r.value - oracle).abs() <= r.quadrature_error + 2.0 / 400.0, "{r:?} vs {oracle}");
        let exact = transfer_cochain(&alpha, &domain, 40, Quadrature::Refined).unwrap();
        let e = exact.evaluate(&[x0, x1]).unwrap();
        assert!((e.value - oracle).abs() <= 2.0 / 400.0 + 1e-12);
    }
}

#[test]
fn transfer_error_halves_with_samples() {
    let alpha = LatticeCochain::new(1, 1, ValueKind::Real, |p| {
        CochainValue::Real((p[1].coords()[0] - p[0].coords()[0]).abs().min(1) as f64)
    });
    let domain = IntervalDomain::standard();
    let inputs = [q(1, 3), q(2, 7)];
    let errs: Vec<f64> = [16, 32, 64, 128]
        .iter()
        .map(|&n| {
            transfer_cochain(&alpha, &domain, n, Quadrature::Uniform)
                .unwrap()
                .evaluate(&inputs)
                .unwrap()
                .quadrature_error
        })
        .collect();
    for w in errs.windows(2) {
        assert!((w[1] / w[0] - 0.5).abs() < 0.05, "{errs:?}");
    }
    let exact = transfer_cochain(&alpha, &domain, 16, Quadrature::Refined).unwrap();
    let v = exact.evaluate(&inputs).unwrap().value;
    // the retractions differ exactly on (2/3, 5/7]
    assert!((v - 1.0 / 21.0).abs() < 1e-14);
}
