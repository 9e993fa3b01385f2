// SPDX-License-Identifier: Apache-2.0

use std::fs;

use nalgebra::DMatrix;
use num::complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use repvol_core::circle::higher_rotation_number_with_cap;
use repvol_core::dehn::{self, load_gluing_system, FillingSlope};
use repvol_core::hypvol::{area2, ideal_shape, parse_points, vol3_ideal, vol3_points};
use repvol_core::lattice::{euclidean_volume_cocycle, fundamental_cycle_with_cap};
use repvol_core::rational::{format_q, parse_q};
use repvol_core::*;

use crate::output::{rational, real, reals};
use crate::{Cli, Command, DehnAction, Global, TransferAction};

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Numerical(m) => m,
        }
    }
}

fn core<E: Into<Error>>(err: E) -> CliError {
    let err: Error = err.into();
    if err.is_numerical() {
        CliError::Numerical(err.to_string())
    } else {
        CliError::Input(err.to_string())
    }
}

fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

/// Inline JSON if the argument looks like JSON, otherwise a file path.
fn read_source(arg: &str) -> Result<String, CliError> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        return Ok(arg.to_string());
    }
    fs::read_to_string(arg).map_err(|e| input(format!("cannot read {arg}: {e}")))
}

fn parse_pair<T: std::str::FromStr>(text: &str, what: &str) -> Result<(T, T), CliError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(input(format!("{what} must be given as a,b")));
    }
    let a = parts[0].parse().map_err(|_| input(format!("invalid {what}: {text}")))?;
    let b = parts[1].parse().map_err(|_| input(format!("invalid {what}: {text}")))?;
    Ok((a, b))
}

pub fn run(cli: &Cli) -> Result<Value, CliError> {
    let g = &cli.global;
    if !(g.tol > 0.0 && g.tol.is_finite()) {
        return Err(input("--tol must be positive"));
    }
    match &cli.command {
        Command::FundCycle { n, cap } => fund_cycle(*n, *cap),
        Command::Pairing { chain, hom } => pairing(chain, hom.as_deref()),
        Command::Rotnum { hom, cap } => rotnum(hom, *cap),
        Command::Audit { vol, homs, m, divisor } => audit(vol, homs, *m, *divisor),
        Command::Classify { matrix } => classify_cmd(matrix, g),
        Command::DecomposeP { matrix } => decompose(matrix, g),
        Command::Area { points } => area(points, g),
        Command::IdealVol { z, points } => ideal_vol(z.as_deref(), points.as_deref(), g),
        Command::Dehn { action } => dehn_cmd(action, g),
        Command::Double { base, k, l } => double(*base, *k, *l, g),
        Command::Transfer { action } => transfer(action, g),
    }
}

fn fund_cycle(n: usize, cap: usize) -> Result<Value, CliError> {
    let z = fundamental_cycle_with_cap(n, cap).map_err(core)?;
    serde_json::to_value(z.to_json()).map_err(|e| input(e.to_string()))
}

fn pairing(chain: &str, hom: Option<&str>) -> Result<Value, CliError> {
    let chain = LatticeChain::parse_json(&read_source(chain)?).map_err(core)?;
    match hom {
        None => {
            let v = euclidean_volume_cocycle(chain.dim())
                .evaluate(&chain)
                .map_err(core)?;
            let value = v.as_rational().cloned().unwrap_or_default();
            Ok(json!({"cochain": "volume", "value": rational(&value)}))
        }
        Some(path) => {
            let rho = TorusHom::parse_json(&read_source(path)?).map_err(core)?;
            let pulled = rho.pullback(&kappa_cocycle(rho.m())).map_err(core)?;
            let v = pulled.evaluate(&chain).map_err(core)?;
            let p = PairingValue::from_lift(v.as_rational().cloned().unwrap_or_default());
            Ok(json!({"cochain": "kappa", "lift": rational(&p.lift), "reduced": p.reduced.to_string()}))
        }
    }
}

fn rotation_term(rho: &TorusHom, cap: usize) -> Result<Value, CliError> {
    match o2_reduction(rho).map_err(core)? {
        O2Reduction::Reduced(h) => {
            let p = higher_rotation_number_with_cap(&h, cap).map_err(core)?;
            Ok(json!({"m": rho.m(), "lift": rational(&p.lift), "reduced": p.reduced.to_string()}))
        }
        O2Reduction::ZeroByReflection { factor } => Ok(json!({
            "m": rho.m(),
            "lift": "0",
            "reduced": "0",
            "reflection_factor": factor,
        })),
    }
}

fn rotnum(hom: &str, cap: usize) -> Result<Value, CliError> {
    let rho = TorusHom::parse_json(&read_source(hom)?).map_err(core)?;
    rotation_term(&rho, cap)
}

fn audit(vol: &str, homs: &[String], m: Option<usize>, divisor: Option<u64>) -> Result<Value, CliError> {
    let vol = parse_q(vol).map_err(core)?;
    let homs = homs
        .iter()
        .map(|h| TorusHom::parse_json(&read_source(h)?).map_err(core))
        .collect::<Result<Vec<_>, _>>()?;
    let m = match (m, homs.first()) {
        (Some(m), _) => m,
        (None, Some(h)) => h.m(),
        (None, None) => return Err(input("--m is required when no --hom is given")),
    };
    let report = integrality_audit(&vol, &homs, m, divisor).map_err(core)?;
    let terms: Vec<Value> = report.boundary_terms.iter().map(|t| rational(&t.lift)).collect();
    Ok(json!({
        "normalized_volume": rational(&vol),
        "boundary_terms": terms,
        "defect": report.defect.to_string(),
        "integral": report.integral,
    }))
}

fn matrix_rows(m: &DMatrix<f64>, digits: usize) -> Value {
    Value::Array((0..m.nrows()).map(|i| reals(m.row(i).iter().copied(), digits)).collect())
}

fn classify_cmd(matrix: &str, g: &Global) -> Result<Value, CliError> {
    let a = LorentzMatrix::parse_json(&read_source(matrix)?, g.tol).map_err(core)?;
    let c = classify(&a, g.tol).map_err(core)?;
    let kind = match c.kind {
        IsometryKind::Elliptic => "elliptic",
        IsometryKind::Parabolic => "parabolic",
        IsometryKind::Hyperbolic => "hyperbolic",
    };
    Ok(json!({
        "kind": kind,
        "fixed_point": c.fixed_point.map(|p| reals(p.iter().copied(), g.digits)),
        "fixed_rays": c.fixed_rays.iter().map(|r| reals(r.iter().copied(), g.digits)).collect::<Vec<_>>(),
        "epsilon": a.epsilon(),
    }))
}

fn decompose(matrix: &str, g: &Global) -> Result<Value, CliError> {
    let a = LorentzMatrix::parse_json(&read_source(matrix)?, g.tol).map_err(core)?;
    let (u, t, x) = decompose_p(&a, g.tol).map_err(core)?;
    Ok(json!({
        "U": matrix_rows(&u, g.digits),
        "t": real(t, g.digits),
        "x": reals(x, g.digits),
    }))
}

fn area(points: &str, g: &Global) -> Result<Value, CliError> {
    let pts = parse_points(&read_source(points)?).map_err(core)?;
    if pts.len() != 3 {
        return Err(input(format!("area needs 3 points, found {}", pts.len())));
    }
    let a = area2(&pts[0], &pts[1], &pts[2]).map_err(core)?;
    Ok(json!({"area": real(a, g.digits)}))
}

fn ideal_vol(z: Option<&str>, points: Option<&str>, g: &Global) -> Result<Value, CliError> {
    let (shape, vol) = match (z, points) {
        (Some(z), _) => {
            let (re, im) = parse_pair::<f64>(z, "shape")?;
            let z = Complex64::new(re, im);
            (Some(z), vol3_ideal(z).map_err(core)?)
        }
        (None, Some(p)) => {
            let pts = parse_points(&read_source(p)?).map_err(core)?;
            let pts: [HPoint; 4] = pts
                .try_into()
                .map_err(|v: Vec<HPoint>| input(format!("ideal-vol needs 4 points, found {}", v.len())))?;
            (ideal_shape(&pts), vol3_points(&pts).map_err(core)?)
        }
        (None, None) => return Err(input("give --z re,im or --points")),
    };
    Ok(json!({
        "shape": shape.map(|z| reals([z.re, z.im], g.digits)),
        "volume": real(vol, g.digits),
    }))
}

fn load_system(path: Option<&str>) -> Result<GluingSystem, CliError> {
    match path {
        None => Ok(GluingSystem::figure_eight()),
        Some(p) => load_gluing_system(read_source(p)?.as_bytes()).map_err(core),
    }
}

fn slopes_for(gs: &GluingSystem, slope: &str) -> Result<Vec<FillingSlope>, CliError> {
    let (p, q) = parse_pair::<i64>(slope, "slope")?;
    dehn::check_slope(p, q).map_err(core)?;
    let mut slopes: Vec<FillingSlope> = vec![None; gs.cusps.len()];
    match slopes.first_mut() {
        Some(first) => *first = Some((p, q)),
        None => return Err(input("gluing system has no cusps to fill")),
    }
    Ok(slopes)
}

fn solution_json(sol: &dehn::Solution, digits: usize) -> Value {
    json!({
        "volume": real(sol.volume(), digits),
        "shapes": sol.shapes.iter().map(|z| reals([z.re, z.im], digits)).collect::<Vec<_>>(),
        "residual": real(sol.residual, 3),
        "iterations": sol.iterations,
        "warnings": sol.warnings,
    })
}

fn dehn_cmd(action: &DehnAction, g: &Global) -> Result<Value, CliError> {
    match action {
        DehnAction::Solve { system } => {
            let gs = load_system(system.system.as_deref())?;
            let sol = dehn::solve(&gs, &vec![None; gs.cusps.len()], None, g.tol, g.max_iter).map_err(core)?;
            Ok(solution_json(&sol, g.digits))
        }
        DehnAction::Fill { system, slope } => {
            let gs = load_system(system.system.as_deref())?;
            let slopes = slopes_for(&gs, slope)?;
            let sol = dehn::solve(&gs, &slopes, None, g.tol, g.max_iter).map_err(core)?;
            Ok(solution_json(&sol, g.digits))
        }
        DehnAction::Path { system, slope, steps } => {
            let gs = load_system(system.system.as_deref())?;
            let slopes = slopes_for(&gs, slope)?;
            let path = dehn::filling_path(&gs, &slopes, *steps, g.tol, g.max_iter).map_err(core)?;
            let points: Vec<Value> = path
                .points
                .iter()
                .map(|&(s, v)| reals([s, v], g.digits))
                .collect();
            Ok(json!({
                "points": points,
                "max_jump": real(path.max_jump(), g.digits),
                "diagnostic": path.diagnostic,
            }))
        }
    }
}

fn double(base: Option<f64>, k: u64, l: u64, g: &Global) -> Result<Value, CliError> {
    let base = match base {
        Some(b) => b,
        None => {
            let gs = GluingSystem::figure_eight();
            dehn::solve(&gs, &[None], None, g.tol, g.max_iter).map_err(core)?.volume()
        }
    };
    let (vol, ratio) = dehn::doubling_volume(base, k, l).map_err(core)?;
    Ok(json!({"volume": real(vol, g.digits), "ratio": rational(&ratio)}))
}

fn load_domain(arg: &str) -> Result<IntervalDomain, CliError> {
    if arg == "standard" {
        return Ok(IntervalDomain::standard());
    }
    if let Some(n) = arg.strip_prefix("bad:") {
        let n: u32 = n.parse().map_err(|_| input(format!("invalid domain {arg}")))?;
        return bad_domain(n).map_err(core);
    }
    IntervalDomain::parse_json(&read_source(arg)?).map_err(core)
}

fn transfer(action: &TransferAction, g: &Global) -> Result<Value, CliError> {
    match action {
        TransferAction::Count { domain, k_interval, n } => {
            let d = load_domain(&domain.domain)?;
            let (a, b) = parse_pair::<String>(k_interval, "K")?;
            let (a, b) = (parse_q(&a).map_err(core)?, parse_q(&b).map_err(core)?);
            let count = translate_overlap_count(&d, (&a, &b), *n).map_err(core)?;
            Ok(json!({
                "domain": d.as_set().to_string(),
                "K": [format_q(&a), format_q(&b)],
                "N": n,
                "count": count,
            }))
        }
        TransferAction::Demo { domain, inputs, samples, uniform } => {
            let d = load_domain(&domain.domain)?;
            let xs: Vec<Q> = match inputs {
                Some(text) => text
                    .split(',')
                    .map(|s| parse_q(s.trim()).map_err(core))
                    .collect::<Result<_, _>>()?,
                None => {
                    let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
                    (0..2)
                        .map(|_| {
                            let den = rng.gen_range(2..=24);
                            Q::new(rng.gen_range(-2 * den..2 * den).into(), den.into())
                        })
                        .collect()
                }
            };
            // min(|γ₁ − γ₀|, 1), a bounded invariant 1-cochain
            let alpha = LatticeCochain::new(1, 1, ValueKind::Real, |p| {
                CochainValue::Real((p[1].coords()[0] - p[0].coords()[0]).abs().min(1) as f64)
            });
            let mode = if *uniform { Quadrature::Uniform } else { Quadrature::Refined };
            let t = transfer_cochain(&alpha, &d, *samples, mode).map_err(core)?;
            let r = t.evaluate(&xs).map_err(core)?;
            Ok(json!({
                "inputs": xs.iter().map(format_q).collect::<Vec<_>>(),
                "value": real(r.value, g.digits),
                "quadrature_error": real(r.quadrature_error, g.digits),
                "flagged": r.flagged,
            }))
        }
    }
}
