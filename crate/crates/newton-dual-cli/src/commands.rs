use crate::input::{HeunFunction, Job};
use crate::output::{fmt_f64, Table, SCHEMA};
use newton_dual::connection::{k1, k2_with};
use newton_dual::duality::{
    classical_dual, dual_set, exp_log_dual, verify_dual_set, DualMember, Form, PotentialSpec, RadialState,
};
use newton_dual::heunfn::{heun_irregular_b, heun_irregular_h, heun_regular, HeunParams, SeriesControl};
use newton_dual::oracle::{apsidal_angle, fd_bound_spectrum, fd_phase_shift, orbit_dual_check, orbit_integrate, orbit_self_residual, FdLevel, RadialGrid};
use newton_dual::quad::QuadratureControl;
use newton_dual::spectra::{bound_spectrum_with, phase_shift_with, reduce_to_heun, SolveOptions, SpectrumRequest};
use newton_dual::{Error, C64};
use serde_json::{json, Map, Value};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy)]
pub struct Settings {
    pub series: SeriesControl,
    pub quad: QuadratureControl,
    pub grid_points: usize,
    pub r_max: Option<f64>,
}

impl Settings {
    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions { series: self.series, quad: self.quad, ..SolveOptions::default() }
    }

    fn grid_for(&self, u: &PotentialSpec) -> Result<RadialGrid, Error> {
        let mut g = RadialGrid::for_potential(u, self.grid_points)?;
        if let Some(r) = self.r_max {
            g.r_max = r;
            g.validate()?;
        }
        Ok(g)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Partial,
    VerificationFailed,
}

impl Status {
    fn label(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Partial => "partial",
            Status::VerificationFailed => "verification_failed",
        }
    }
}

#[derive(Debug)]
pub enum Fail {
    Input(String),
    Numerical(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        if e.is_input_error() {
            Fail::Input(e.to_string())
        } else {
            Fail::Numerical(e.to_string())
        }
    }
}

pub struct Report {
    pub body: Map<String, Value>,
    pub table: Table,
    pub warnings: Vec<String>,
    pub status: Status,
}

impl Report {
    pub fn json(&self, command: &str) -> Value {
        let mut m = Map::new();
        m.insert("schema".into(), json!(SCHEMA));
        m.insert("command".into(), json!(command));
        m.insert("status".into(), json!(self.status.label()));
        for (k, v) in &self.body {
            m.insert(k.clone(), v.clone());
        }
        m.insert("warnings".into(), json!(self.warnings));
        Value::Object(m)
    }
}

fn num(x: f64) -> Value {
    json!(x)
}

fn opt_str(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn complex(z: C64) -> Value {
    json!([z.re, z.im])
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).unwrap_or(Value::Null)
}

fn form_params(p: &PotentialSpec) -> Vec<(String, f64)> {
    match &p.form {
        Form::Polynomial { terms } => terms.iter().map(|t| (format!("r^{}", t.power), t.coeff)).collect(),
        Form::Exponential { xi, sigma } => vec![("xi".into(), *xi), ("sigma".into(), *sigma)],
        Form::LogSquared { eta, alpha_scale } => vec![("eta".into(), *eta), ("alpha_scale".into(), *alpha_scale)],
    }
}

// ---- dualize ----

pub fn dualize(job: &Job) -> Result<Report, Fail> {
    let u = job.potential().map_err(Fail::Input)?;
    u.validate()?;
    let energy = job.energy.unwrap_or(1.0);
    let state = RadialState::new(job.l, job.n_r, energy).in_dimension(u.dimension);
    let mut warnings = u.warnings();
    if job.energy.is_none() {
        warnings.push("no energy given; dual couplings use E = 1".into());
    }
    let members: Vec<DualMember> = match u.form {
        Form::Polynomial { .. } => dual_set(u, &state)?,
        _ => {
            let free = job.free.unwrap_or(1.0);
            let (v, vs, _) = exp_log_dual(u, &state, free)?;
            vec![
                DualMember { potential: u.clone(), state, map: None },
                DualMember { potential: v, state: vs, map: None },
            ]
        }
    };
    // exp/log pairs have no Heun form; only polynomial members are checked
    for (i, m) in members.iter().enumerate().filter(|(_, m)| matches!(m.potential.form, Form::Polynomial { .. })) {
        if let Err(e) = reduce_to_heun(&m.potential, m.state.l, m.state.energy) {
            warnings.push(format!("member {i}: {e}"));
        }
    }
    let mut table = Table::new(vec!["member", "pivot", "coord_exponent", "dimension", "l", "energy", "param", "value"]);
    let mut out = Vec::new();
    for (i, m) in members.iter().enumerate() {
        let pivot = m.map.map(|x| x.pivot_index);
        for (name, value) in form_params(&m.potential) {
            table.push(vec![
                i.to_string(),
                pivot.map(|p| p.to_string()).unwrap_or_default(),
                opt_str(m.map.map(|x| x.coord_exponent)),
                m.potential.dimension.to_string(),
                fmt_f64(m.state.l),
                fmt_f64(m.state.energy),
                name,
                fmt_f64(value),
            ]);
        }
        out.push(json!({
            "member": i,
            "pivot": pivot,
            "potential": to_value(&m.potential),
            "state": to_value(&m.state),
            "map": to_value(&m.map),
        }));
    }
    let mut body = Map::new();
    body.insert("members".into(), Value::Array(out));
    if matches!(u.form, Form::Polynomial { .. }) {
        body.insert("pairwise_mismatch".into(), num(verify_dual_set(&members)?));
    }
    let status = if warnings.iter().any(|w| w.starts_with("member") || w.starts_with("power")) { Status::Partial } else { Status::Ok };
    Ok(Report { body, table, warnings, status })
}

// ---- spectrum ----

fn nearest(levels: &[FdLevel], e: f64) -> Option<(usize, FdLevel)> {
    levels
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| (a.1.energy - e).abs().total_cmp(&(b.1.energy - e).abs()))
}

pub fn spectrum(job: &Job, s: &Settings) -> Result<Report, Fail> {
    let u = job.potential().map_err(Fail::Input)?;
    let [lo, hi] = job.window.ok_or_else(|| Fail::Input("spectrum needs \"window\": [lo, hi]".into()))?;
    let max_states = job.max_states.unwrap_or(3);
    let tol = job.tolerance.unwrap_or(1e-4);
    let mut req = SpectrumRequest::new(u.clone(), job.l, (lo, hi), max_states);
    if let Some(n) = job.scan_points {
        req.scan_points = n;
    }
    let mut warnings = u.warnings();
    let k2_levels = match bound_spectrum_with(&req, &s.solve_options()) {
        Ok(v) => Some(v),
        Err(Error::UnsupportedFamily(m)) => {
            warnings.push(format!("K2 path unavailable: {m}; oracle levels only"));
            None
        }
        Err(e) => return Err(e.into()),
    };
    let grid = s.grid_for(u)?;
    let fd = fd_bound_spectrum(u, job.l, &grid, 2 * max_states + 4)
        .or_else(|_| fd_bound_spectrum(u, job.l, &grid, max_states))
        .map_err(|e| warnings.push(format!("oracle: {e}")))
        .ok();

    let mut rows = Vec::new();
    let mut failed = false;
    let mut table = Table::new(vec!["n_r", "energy_k2", "energy_oracle", "oracle_error", "rel_diff"]);
    match &k2_levels {
        Some(levels) => {
            for b in levels {
                let m = fd.as_deref().and_then(|f| nearest(f, b.energy));
                let rel = m.map(|(_, f)| (f.energy - b.energy).abs() / b.energy.abs().max(f64::MIN_POSITIVE));
                if rel.is_some_and(|r| r > tol) {
                    failed = true;
                }
                let n_r = m.map(|(i, _)| i).unwrap_or(b.n_r);
                table.push(vec![
                    n_r.to_string(),
                    fmt_f64(b.energy),
                    opt_str(m.map(|x| x.1.energy)),
                    opt_str(m.map(|x| x.1.error_estimate)),
                    opt_str(rel),
                ]);
                rows.push(json!({
                    "n_r": n_r,
                    "energy_k2": b.energy,
                    "energy_oracle": m.map(|x| x.1.energy),
                    "oracle_error": m.map(|x| x.1.error_estimate),
                    "rel_diff": rel,
                    "k2_residual": b.k2_residual,
                    "at_boundary": b.at_boundary,
                }));
            }
        }
        None => {
            for (i, f) in fd.iter().flatten().enumerate().filter(|(_, f)| f.energy >= lo && f.energy <= hi).take(max_states) {
                table.push(vec![i.to_string(), String::new(), fmt_f64(f.energy), fmt_f64(f.error_estimate), String::new()]);
                rows.push(json!({
                    "n_r": i,
                    "energy_k2": null,
                    "energy_oracle": f.energy,
                    "oracle_error": f.error_estimate,
                    "rel_diff": null,
                }));
            }
        }
    }
    let mut body = Map::new();
    body.insert("l".into(), num(job.l));
    body.insert("window".into(), json!([lo, hi]));
    body.insert("tolerance".into(), num(tol));
    body.insert("grid".into(), to_value(&grid));
    body.insert("levels".into(), Value::Array(rows));
    let status = if failed {
        Status::VerificationFailed
    } else if !warnings.is_empty() {
        Status::Partial
    } else {
        Status::Ok
    };
    Ok(Report { body, table, warnings, status })
}

// ---- phase ----

fn wrap(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

pub fn phase(job: &Job, s: &Settings) -> Result<Report, Fail> {
    let u = job.potential().map_err(Fail::Input)?;
    if job.l < 0.0 || job.l.fract() != 0.0 {
        return Err(Fail::Input("phase needs a non-negative integer l".into()));
    }
    let l = job.l as u32;
    let ks = job.k.clone().unwrap_or_else(|| vec![0.5, 1.0, 2.0]);
    let tol = job.tolerance.unwrap_or(2e-2);
    let r_max = s.r_max.unwrap_or(200.0);
    let grid = RadialGrid::new(1e-6 * r_max, r_max, s.grid_points)?;
    let mut rows = Vec::new();
    let mut table = Table::new(vec!["k", "delta_k2", "delta_oracle", "abs_diff"]);
    let mut failed = false;
    let mut warnings = Vec::new();
    for &k in &ks {
        let dk = phase_shift_with(u, l, k, &s.solve_options())?;
        let fo = match fd_phase_shift(u, l, k, &grid) {
            Ok(v) => Some(v),
            Err(e) => {
                warnings.push(format!("k={k}: oracle {e}"));
                None
            }
        };
        let diff = fo.map(|f| wrap(f - dk).abs());
        failed |= diff.is_some_and(|d| d > tol);
        table.push(vec![fmt_f64(k), fmt_f64(dk), opt_str(fo), opt_str(diff)]);
        rows.push(json!({"k": k, "delta_k2": dk, "delta_oracle": fo, "abs_diff": diff}));
    }
    let mut body = Map::new();
    body.insert("l".into(), json!(l));
    body.insert("tolerance".into(), num(tol));
    body.insert("phases".into(), Value::Array(rows));
    let status = if failed {
        Status::VerificationFailed
    } else if !warnings.is_empty() {
        Status::Partial
    } else {
        Status::Ok
    };
    Ok(Report { body, table, warnings, status })
}

// ---- orbit ----

pub fn orbit(job: &Job) -> Result<Report, Fail> {
    let u = job.potential().map_err(Fail::Input)?;
    let o = job.orbit.as_ref().ok_or_else(|| Fail::Input("orbit needs an \"orbit\" block".into()))?;
    let pivot = job.pivot.unwrap_or(0);
    let tol = job.tolerance.unwrap_or(1e-4);
    let sample = orbit_integrate(u, o.energy, o.angular_momentum, o.r_start, 1, o.steps)?;
    let dual = classical_dual(u, pivot, o.energy, o.angular_momentum)?;
    let dual_residual = orbit_dual_check(&sample, &dual);
    let self_residual = orbit_self_residual(&sample, u);
    let apsidal = apsidal_angle(&sample);
    let s = dual.map.coord_exponent;
    let mut table = Table::new(vec!["r", "theta", "rho", "phi"]);
    let mut points = Vec::with_capacity(sample.points.len());
    for &(r, th) in &sample.points {
        let (rho, phi) = dual.map_point(r, th);
        table.push(vec![fmt_f64(r), fmt_f64(th), fmt_f64(rho), fmt_f64(phi)]);
        points.push(json!([r, th, rho, phi]));
    }
    let mut body = Map::new();
    body.insert(
        "summary".into(),
        json!({
            "energy": o.energy,
            "angular_momentum": o.angular_momentum,
            "r_turn_lo": sample.r_turn_lo,
            "r_turn_hi": sample.r_turn_hi,
            "apsidal_angle": apsidal,
            "dual_apsidal_angle": s * apsidal,
            "coord_exponent": s,
            "self_residual": self_residual,
            "dual_residual": dual_residual,
            "tolerance": tol,
        }),
    );
    body.insert("dual".into(), to_value(&dual));
    body.insert("points".into(), Value::Array(points));
    let status = if dual_residual.max(self_residual) > tol { Status::VerificationFailed } else { Status::Ok };
    Ok(Report { body, table, warnings: Vec::new(), status })
}

// ---- heun ----

pub fn heun(job: &Job, s: &Settings) -> Result<Report, Fail> {
    let h = job.heun.as_ref().ok_or_else(|| Fail::Input("heun needs a \"heun\" block".into()))?;
    let p = HeunParams::new(h.alpha.c64(), h.beta.c64(), h.gamma.c64(), h.delta.c64());
    let z = h.z.map(|z| z.c64());
    let need_z = || z.ok_or_else(|| Fail::Input("this function needs \"z\"".into()));
    let mut body = Map::new();
    let (name, value) = match h.function {
        HeunFunction::Regular => ("regular", heun_regular(&p, need_z()?, &s.series)?),
        HeunFunction::B => ("b_plus", heun_irregular_b(&p, need_z()?, h.n_terms)?),
        HeunFunction::H => ("h_plus", heun_irregular_h(&p, need_z()?, h.n_terms)?),
        HeunFunction::K2 => ("k2", k2_with(&p, &s.quad, &s.series)?),
        HeunFunction::K1 => {
            let r = k1(&p, &s.quad, need_z()?)?;
            body.insert("k2".into(), complex(r.k2));
            body.insert("conditioning".into(), num(r.conditioning));
            ("k1", r.k1)
        }
    };
    let mut full = Map::new();
    full.insert("function".into(), json!(name));
    full.insert("params".into(), to_value(&p));
    full.insert("z".into(), z.map(complex).unwrap_or(Value::Null));
    full.insert("value".into(), complex(value));
    full.extend(body);
    let mut table = Table::new(vec!["function", "re", "im"]);
    table.push(vec![name.to_string(), fmt_f64(value.re), fmt_f64(value.im)]);
    Ok(Report { body: full, table, warnings: Vec::new(), status: Status::Ok })
}
