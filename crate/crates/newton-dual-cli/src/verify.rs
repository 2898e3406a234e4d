//! The `verify` suite: duality invariants over the worked dual pairs.

use crate::commands::{Fail, Report, Settings, Status};
use crate::input::Job;
use crate::output::{fmt_f64, Table};
use newton_dual::duality::{
    dual_exponent, dual_set, exp_log_dual, exp_log_residual, polynomial_dual, power_map_residual, verify_dual_set,
    PotentialSpec, RadialState, Term,
};
use newton_dual::spectra::{bound_spectrum_with, coulomb_energy, ho_energy, reduce_to_heun, CoulombReading, SpectrumRequest};
use newton_dual::Result;
use serde_json::{json, Map, Value};

struct Check {
    name: String,
    value: f64,
    tolerance: f64,
}

fn poly(t: &[(f64, f64)]) -> PotentialSpec {
    PotentialSpec::polynomial(t.iter().map(|&(c, q)| Term::new(c, q)).collect())
}

fn worked_sets() -> Vec<(&'static str, PotentialSpec)> {
    vec![
        ("oscillator", poly(&[(1.0, 2.0)])),
        ("coulomb", poly(&[(-1.0, -1.0)])),
        ("r^-1/2", poly(&[(-1.0, -0.5)])),
        ("r^-3/2", poly(&[(-1.0, -1.5)])),
        ("r^2 + r^-1", poly(&[(1.0, 2.0), (-1.0, -1.0)])),
        ("r^2 + r", poly(&[(1.0, 2.0), (1.0, 1.0)])),
        ("r^-1/2 + r^-3/2", poly(&[(-1.0, -0.5), (-1.0, -1.5)])),
        ("r^6 + r^2", poly(&[(1.0, 6.0), (1.0, 2.0)])),
        ("r^2 + r^-1 + r", poly(&[(1.0, 2.0), (-1.0, -1.0), (0.5, 1.0)])),
    ]
}

fn structural(name: &str, u: &PotentialSpec, out: &mut Vec<Check>) -> Result<()> {
    let st = RadialState::new(0.0, 0, 1.7).in_dimension(u.dimension);
    out.push(Check { name: format!("{name}: dual set pairwise"), value: verify_dual_set(&dual_set(u, &st)?)?, tolerance: 1e-12 });
    let rho: Vec<f64> = (0..50).map(|i| 0.3 + 0.05 * i as f64).collect();
    let mut worst = 0.0_f64;
    for k in 0..u.terms()?.len() {
        let (v, vs, m) = polynomial_dual(u, k, &st)?;
        worst = worst.max(power_map_residual(u, &st, &v, &vs, &m, &rho));
    }
    out.push(Check { name: format!("{name}: radial residual"), value: worst, tolerance: 1e-8 });
    let red = reduce_to_heun(u, 0.0, 1.7)?;
    let mut dev = 0.0_f64;
    for (p, c) in red.reconstruct() {
        let want = if p == 0.0 {
            1.7
        } else {
            -u.terms()?.iter().filter(|t| (t.power - p).abs() < 1e-9).map(|t| t.coeff).sum::<f64>()
        };
        dev = dev.max((c.re - want).abs().max(c.im.abs()) / want.abs().max(1e-300));
    }
    out.push(Check { name: format!("{name}: reduction round trip"), value: dev, tolerance: 1e-12 });
    Ok(())
}

fn ground(u: &PotentialSpec, l: f64, window: (f64, f64), s: &Settings) -> Result<f64> {
    let mut req = SpectrumRequest::new(u.clone(), l, window, 1);
    req.scan_points = 256;
    Ok(bound_spectrum_with(&req, &s.solve_options())?[0].energy)
}

/// Ground state of U by K₂, mapped to V, then V's K₂ ground state near the image.
fn spectral(name: &str, u: &PotentialSpec, window: (f64, f64), s: &Settings, out: &mut Vec<Check>) -> Result<()> {
    let e = ground(u, 0.0, window, s)?;
    let (v, vs, _) = polynomial_dual(u, 0, &RadialState::new(0.0, 0, e))?;
    let w = 0.5 * vs.energy.abs();
    let ev = ground(&v, vs.l, (vs.energy - w, vs.energy + w), s)?;
    out.push(Check { name: format!("{name}: dual ground state"), value: (ev - vs.energy).abs() / vs.energy.abs(), tolerance: 1e-6 });
    Ok(())
}

pub fn verify(job: &Job, s: &Settings) -> std::result::Result<Report, Fail> {
    let mut checks = Vec::new();
    let mut warnings = Vec::new();

    let mut inv = 0.0_f64;
    let mut prod = 0.0_f64;
    for i in 0..=990 {
        let q = -1.9 + 0.01 * i as f64;
        let d = dual_exponent(q)?;
        inv = inv.max((dual_exponent(d)? - q).abs() / q.abs().max(1.0));
        prod = prod.max(((q + 2.0) * (d + 2.0) - 4.0).abs());
    }
    checks.push(Check { name: "dual exponent involution".into(), value: inv, tolerance: 1e-13 });
    checks.push(Check { name: "(a+3)(A+3) = 4".into(), value: prod, tolerance: 1e-12 });

    for (name, u) in worked_sets() {
        if let Err(e) = structural(name, &u, &mut checks) {
            warnings.push(format!("{name}: {e}"));
        }
    }

    let e = PotentialSpec::exponential(0.3, 2.0);
    let es = RadialState::new(1.0, 0, -0.8);
    let x: Vec<f64> = (0..50).map(|i| 1.0 + 0.1 * i as f64).collect();
    match exp_log_dual(&e, &es, 1.5) {
        Ok((v, vs, m)) => checks.push(Check { name: "exp to log: radial residual".into(), value: exp_log_residual(&e, &es, &v, &vs, &m, &x), tolerance: 1e-8 }),
        Err(err) => warnings.push(format!("exp to log: {err}")),
    }

    // closed forms: oscillator levels mapped onto Coulomb
    let mut worst = 0.0_f64;
    for l in [0.0, 1.0] {
        for n_r in 0..3 {
            let (v, vs, _) = polynomial_dual(&poly(&[(1.0, 2.0)]), 0, &RadialState::new(l, n_r, ho_energy(1.0, n_r, l, 3)))?;
            let eta = v.terms()?[0].coeff;
            let coul = coulomb_energy(eta, n_r, vs.l, 3, CoulombReading::Squared);
            worst = worst.max((vs.energy - coul).abs() / coul.abs());
        }
    }
    checks.push(Check { name: "oscillator to Coulomb closed forms".into(), value: worst, tolerance: 1e-12 });

    let spectral_cases = [
        ("oscillator", poly(&[(1.0, 2.0)]), (0.5, 4.0)),
        ("r^-1/2", poly(&[(-1.0, -0.5)]), (-2.0, -0.05)),
        ("r^-3/2", poly(&[(-1.0, -1.5)]), (-2.0, -0.05)),
    ];
    for (name, u, w) in &spectral_cases {
        if let Err(e) = spectral(name, u, *w, s, &mut checks) {
            warnings.push(format!("{name}: {e}"));
        }
    }

    if let Some(u) = &job.potential {
        match u.terms() {
            Ok(_) => {
                if let Err(e) = structural("input", u, &mut checks) {
                    warnings.push(format!("input: {e}"));
                }
            }
            Err(_) => warnings.push("input potential is not polynomial; only the built-in suite ran".into()),
        }
    }

    let mut table = Table::new(vec!["check", "value", "tolerance", "pass"]);
    let mut rows = Vec::new();
    let mut all = true;
    for c in &checks {
        let pass = c.value <= c.tolerance;
        all &= pass;
        table.push(vec![c.name.clone(), fmt_f64(c.value), fmt_f64(c.tolerance), pass.to_string()]);
        rows.push(json!({"check": c.name, "value": c.value, "tolerance": c.tolerance, "pass": pass}));
    }
    let mut body = Map::new();
    body.insert("passed".into(), json!(checks.iter().filter(|c| c.value <= c.tolerance).count()));
    body.insert("total".into(), json!(checks.len()));
    body.insert("checks".into(), Value::Array(rows));
    let status = if !all {
        Status::VerificationFailed
    } else if !warnings.is_empty() {
        Status::Partial
    } else {
        Status::Ok
    };
    Ok(Report { body, table, warnings, status })
}
