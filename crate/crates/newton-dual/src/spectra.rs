//! Radial spectra from the biconfluent Heun reduction.
//!
//! With ρ = r^p and u(r) = r^{(1−p)/2} v(ρ), the radial equation
//! u″ + [E − l(l+1)/r² − U]u = 0 becomes
//! v″ + [Σ k_j ρ^j − L(L+1)/ρ²] v = 0, j ∈ {2, 1, 0, −1}, L + ½ = (l + ½)/p.
//! Scaling z = cρ and peeling z^{(1+α)/2} e^{−z²/2−βz/2} then gives the
//! canonical equation with
//!
//! c⁴ = −k₂, β = −k₁/c³, γ = k₀/c² + β²/4, δ = −2k₋₁/c, α = 2L + 1.

use crate::connection::k2_with;
use crate::duality::{Form, PotentialSpec, POWER_TOL};
use crate::error::{Error, Result};
use crate::heunfn::{HeunParams, RegularPath, SeriesControl};
use crate::par::{map_indexed, Exec};
use crate::quad::QuadratureControl;
use crate::roots::{brent, golden_min};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyRole {
    AsZ2Coefficient,
    AsBeta,
    AsGamma,
    AsDelta,
}

/// u = z^{power_s} e^{−gauss_coeff·z² − linear_coeff·z} N(z)
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peel {
    pub gauss_coeff: C64,
    pub linear_coeff: C64,
    pub power_s: C64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeunReduction {
    /// z = c r^p
    pub p: f64,
    pub c: C64,
    pub peel: Peel,
    pub heun: HeunParams,
    pub energy_role: EnergyRole,
}

impl HeunReduction {
    /// Coefficients of E − U(r) recovered from the reduction, as (power, coefficient)
    /// pairs sorted by power. The energy appears at power 0; centrifugal terms are
    /// not included.
    pub fn reconstruct(&self) -> Vec<(f64, C64)> {
        let (c, h, p) = (self.c, &self.heun, self.p);
        let k = [
            (2, -c.powi(4)),
            (1, -h.beta * c.powi(3)),
            (0, c * c * (h.gamma - 0.25 * h.beta * h.beta)),
            (-1, -0.5 * c * h.delta),
        ];
        let mut out: Vec<(f64, C64)> = k
            .iter()
            .filter(|(_, v)| v.norm() > 0.0)
            .map(|&(j, v)| (p * (j as f64 + 2.0) - 2.0, v * p * p))
            .collect();
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        out
    }
}

fn slot(q: f64, p: f64) -> Option<i32> {
    let j = (q + 2.0) / p - 2.0;
    let r = j.round();
    ((j - r).abs() < 1e-9 && (-1.0..=2.0).contains(&r)).then_some(r as i32)
}

struct Slots {
    p: f64,
    k: [C64; 4], // k_2, k_1, k_0, k_−1 (already divided by p²)
    energy_slot: i32,
    centrifugal: f64,
}

fn assign_slots(u: &PotentialSpec, l: f64, energy: f64) -> Result<Slots> {
    u.validate()?;
    let terms = match &u.form {
        Form::Polynomial { terms } => terms,
        Form::LogSquared { .. } => return Err(Error::UnsupportedFamily("log-squared potentials are served by the oracle only".into())),
        Form::Exponential { .. } => return Err(Error::NotHeunReducible("exponential potential".into())),
    };
    let l_eff = l + 0.5 * (u.dimension as f64 - 3.0);
    let mut centrifugal = l_eff * (l_eff + 1.0);
    // (power, coefficient of E − U)
    let mut parts: Vec<(f64, f64)> = vec![(0.0, energy)];
    for t in terms {
        if (t.power + 2.0).abs() < POWER_TOL {
            centrifugal += t.coeff;
        } else if t.power.abs() < POWER_TOL {
            parts[0].1 -= t.coeff;
        } else {
            parts.push((t.power, -t.coeff));
        }
    }
    // candidate pivots: highest power first, energy last among equals
    let mut order: Vec<usize> = (0..parts.len()).collect();
    order.sort_by(|&a, &b| parts[b].0.total_cmp(&parts[a].0));
    let mut fallback = None;
    for &i in &order {
        let p = 0.25 * (parts[i].0 + 2.0);
        if !(p > 0.0) {
            continue;
        }
        let mut k = [C64::new(0.0, 0.0); 4];
        let mut energy_slot = 0;
        let mut ok = true;
        for (pw, coeff) in &parts {
            match slot(*pw, p) {
                Some(j) => {
                    k[(2 - j) as usize] += coeff / (p * p);
                    if *pw == 0.0 {
                        energy_slot = j;
                    }
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        let s = Slots { p, k, energy_slot, centrifugal };
        if parts[i].1 < 0.0 {
            return Ok(s);
        }
        fallback.get_or_insert(s);
    }
    fallback.ok_or_else(|| Error::NotHeunReducible(format!("no power map places {:?} in slots 2..−1", terms.iter().map(|t| t.power).collect::<Vec<_>>())))
}

fn build(s: &Slots, c: C64) -> Result<HeunReduction> {
    let disc = s.centrifugal + 0.25;
    if disc < 0.0 {
        return Err(Error::ReductionFailed(format!("effective l(l+1) = {} is below −1/4", s.centrifugal)));
    }
    let l_reg = -0.5 + disc.sqrt();
    let big_l = (l_reg + 0.5) / s.p - 0.5;
    let alpha = 2.0 * big_l + 1.0;
    let [_, k1, k0, km1] = s.k;
    let beta = -k1 / c.powi(3);
    let gamma = k0 / (c * c) + 0.25 * beta * beta;
    let delta = -2.0 * km1 / c;
    let heun = HeunParams::new(C64::new(alpha, 0.0), beta, gamma, delta);
    let role = match s.energy_slot {
        2 => EnergyRole::AsZ2Coefficient,
        1 => EnergyRole::AsBeta,
        0 => EnergyRole::AsGamma,
        _ => EnergyRole::AsDelta,
    };
    let peel = Peel {
        gauss_coeff: C64::new(0.5, 0.0),
        linear_coeff: 0.5 * beta,
        power_s: C64::new(0.5 * (1.0 / s.p + alpha), 0.0),
    };
    Ok(HeunReduction { p: s.p, c, peel, heun, energy_role: role })
}

/// Maps the radial problem of `u` at (l, E) to biconfluent Heun form.
pub fn reduce_to_heun(u: &PotentialSpec, l: f64, energy: f64) -> Result<HeunReduction> {
    let s = assign_slots(u, l, energy)?;
    let m = -s.k[0];
    let c = if m.im == 0.0 && m.re > 0.0 { C64::new(m.re.powf(0.25), 0.0) } else { m.powf(0.25) };
    if c.norm() == 0.0 {
        return Err(Error::ReductionFailed("the z² slot is empty".into()));
    }
    build(&s, c)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRequest {
    pub potential: PotentialSpec,
    pub l: f64,
    pub energy_window: (f64, f64),
    pub max_states: usize,
    pub scan_points: usize,
}

impl SpectrumRequest {
    pub fn new(potential: PotentialSpec, l: f64, energy_window: (f64, f64), max_states: usize) -> Self {
        Self { potential, l, energy_window, max_states, scan_points: 64 }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.energy_window;
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidInput(format!("energy window ({lo}, {hi}) is empty")));
        }
        if self.scan_points < 64 {
            return Err(Error::InvalidInput("scan_points must be at least 64".into()));
        }
        self.potential.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundState {
    pub energy: f64,
    pub n_r: usize,
    /// |K₂| at the root relative to the largest |K₂| seen in the scan
    pub k2_residual: f64,
    /// root lies within 1e−6 of the window width from an edge
    pub at_boundary: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SolveOptions {
    pub series: SeriesControl,
    pub quad: QuadratureControl,
    pub exec: Exec,
}

/// K₂ of the reduction of `u` at energy E.
pub fn k2_at(u: &PotentialSpec, l: f64, energy: f64, opts: &SolveOptions) -> Result<C64> {
    let red = reduce_to_heun(u, l, energy)?;
    k2_with(&red.heun, &opts.quad, &opts.series)
}

pub fn bound_spectrum(req: &SpectrumRequest) -> Result<Vec<BoundState>> {
    bound_spectrum_with(req, &SolveOptions::default())
}

/// Eigenvalues in the window as zeros of K₂(E).
pub fn bound_spectrum_with(req: &SpectrumRequest, opts: &SolveOptions) -> Result<Vec<BoundState>> {
    req.validate()?;
    let (lo, hi) = req.energy_window;
    let n = req.scan_points;
    let width = hi - lo;
    let es: Vec<f64> = (0..n).map(|i| lo + width * i as f64 / (n - 1) as f64).collect();
    let u = &req.potential;
    let l = req.l;
    // reduction errors are structural and surface before any scanning
    let probe = reduce_to_heun(u, l, es[n / 2])?;
    let vals: Vec<Option<C64>> = map_indexed(opts.exec, n, |i| k2_at(u, l, es[i], opts).ok());
    if vals.iter().all(Option::is_none) {
        return Err(Error::ReductionFailed("K2 could not be evaluated anywhere in the window".into()));
    }
    let scan_max = vals.iter().flatten().fold(0.0_f64, |a, v| a.max(v.norm()));
    let real_family = {
        let h = probe.heun;
        [h.alpha, h.beta, h.gamma, h.delta].iter().all(|z| z.im == 0.0) && probe.c.im == 0.0
    };
    let f = |e: f64| k2_at(u, l, e, opts);
    let mut roots: Vec<(f64, f64)> = Vec::new();
    if real_family {
        for i in 0..n {
            let Some(v) = vals[i] else { continue };
            if v.re == 0.0 {
                roots.push((es[i], 0.0));
                continue;
            }
            if i + 1 < n {
                if let Some(w) = vals[i + 1] {
                    if w.re != 0.0 && v.re.signum() != w.re.signum() {
                        let xtol = 1e-13 * es[i].abs().max(es[i + 1].abs()).max(1e-3 * width);
                        let e = brent(|x| f(x).map(|z| z.re), es[i], es[i + 1], xtol, 200)?;
                        let at = f(e)?.norm();
                        // a sign change across a pole is not a zero
                        if at <= 1e-6 * v.norm().max(w.norm()) {
                            roots.push((e, at));
                        }
                    }
                }
            }
        }
    } else {
        for i in 1..n.saturating_sub(1) {
            let (Some(a), Some(b), Some(c)) = (vals[i - 1], vals[i], vals[i + 1]) else { continue };
            if !(b.norm() <= a.norm() && b.norm() <= c.norm()) {
                continue;
            }
            let (x, fx) = golden_min(|x| f(x).map(|z| z.norm()), es[i - 1], es[i + 1], 1e-12 * es[i].abs().max(1e-3 * width))?;
            if fx > 1e-8 * scan_max {
                continue;
            }
            let lo_v = f(x - 1e-6 * width)?;
            let hi_v = f(x + 1e-6 * width)?;
            let kills = |g: fn(&C64) -> f64, m: f64| g(&lo_v).signum() != g(&hi_v).signum() || g(&lo_v).abs().max(g(&hi_v).abs()) <= 1e-8 * m;
            let re_max = vals.iter().flatten().fold(0.0_f64, |m, v| m.max(v.re.abs()));
            let im_max = vals.iter().flatten().fold(0.0_f64, |m, v| m.max(v.im.abs()));
            if kills(|z| z.re, re_max) && kills(|z| z.im, im_max) {
                roots.push((x, fx));
            }
        }
    }
    roots.sort_by(|a, b| a.0.total_cmp(&b.0));
    roots.dedup_by(|a, b| (a.0 - b.0).abs() <= 1e-9 * a.0.abs().max(1e-9 * width));
    if roots.is_empty() {
        return Err(Error::NoneFound);
    }
    let scale = scan_max.max(f64::MIN_POSITIVE);
    Ok(roots
        .into_iter()
        .take(req.max_states)
        .enumerate()
        .map(|(n_r, (e, at))| BoundState {
            energy: e,
            n_r,
            k2_residual: at / scale,
            at_boundary: (e - lo).abs() < 1e-6 * width || (hi - e).abs() < 1e-6 * width,
        })
        .collect())
}

/// The K₂ zero nearest to `guess`, searched within guess·(1 ± rel_width).
pub fn refine_eigenvalue(u: &PotentialSpec, l: f64, guess: f64, rel_width: f64, opts: &SolveOptions) -> Result<f64> {
    let half = rel_width * guess.abs();
    let req = SpectrumRequest {
        potential: u.clone(),
        l,
        energy_window: (guess - half, guess + half),
        max_states: usize::MAX,
        scan_points: 64,
    };
    let states = bound_spectrum_with(&req, opts)?;
    states
        .iter()
        .min_by(|a, b| (a.energy - guess).abs().total_cmp(&(b.energy - guess).abs()))
        .map(|s| s.energy)
        .ok_or(Error::NoneFound)
}

/// Regular solution u(r) on `grid`, normalized to unit peak amplitude.
pub fn eigenfunction(u: &PotentialSpec, l: f64, energy: f64, grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    let red = reduce_to_heun(u, l, energy)?;
    if red.c.im != 0.0 || red.c.re <= 0.0 {
        return Err(Error::ReductionFailed("eigenfunctions need a real positive scale".into()));
    }
    let c = red.c.re;
    let z_max = grid.iter().fold(0.0_f64, |a, &r| a.max(c * r.max(0.0).powf(red.p)));
    let path = RegularPath::new(&red.heun, C64::new(1.0, 0.0), z_max * (1.0 + 1e-12) + 1e-12, &SeriesControl::default())?;
    let s = red.peel.power_s.re;
    let beta = red.heun.beta;
    let mut logs = Vec::with_capacity(grid.len());
    for &r in grid {
        if r <= 0.0 {
            logs.push(None);
            continue;
        }
        let z = c * r.powf(red.p);
        let (y, _, ls) = path.eval_scaled(z)?;
        let lv = C64::new(s * z.ln() - 0.5 * z * z + ls, 0.0) - 0.5 * beta * z;
        logs.push(Some((lv, y)));
    }
    let top = logs.iter().flatten().map(|(lv, y)| lv.re + y.norm().ln()).fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<(f64, f64)> = grid
        .iter()
        .zip(&logs)
        .map(|(&r, e)| match e {
            Some((lv, y)) => (r, ((lv - top).exp() * y).re),
            None => (r, 0.0),
        })
        .collect();
    let peak = out.iter().fold(0.0_f64, |a, &(_, v)| a.max(v.abs()));
    if peak > 0.0 {
        for p in &mut out {
            p.1 /= peak;
        }
    }
    Ok(out)
}

fn wrap_pi(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y == -PI {
        PI
    } else {
        y
    }
}

/// δ_l = −arg K₂ at E = k², principal value in (−π, π].
///
/// Supported are sums of 1/r and 1/r^{3/2} terms (β = 0 after reduction),
/// with the scale chosen as c = √(−2ik) so that e^{−z²/2} = e^{ikr}.
pub fn phase_shift(u: &PotentialSpec, l: u32, k: f64) -> Result<f64> {
    phase_shift_with(u, l, k, &SolveOptions::default())
}

pub fn phase_shift_with(u: &PotentialSpec, l: u32, k: f64, opts: &SolveOptions) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::InvalidInput("k must be positive".into()));
    }
    let terms = u.terms().map_err(|_| Error::UnsupportedFamily("phase shifts need a polynomial potential".into()))?;
    if let Some(t) = terms.iter().find(|t| ![-1.0, -1.5].iter().any(|q| (t.power - q).abs() < POWER_TOL)) {
        return Err(Error::UnsupportedFamily(format!("power {} in a scattering problem", t.power)));
    }
    let s = assign_slots(u, l as f64, k * k)?;
    if s.energy_slot != 2 {
        return Err(Error::UnsupportedFamily("energy does not sit in the z² slot".into()));
    }
    let c = C64::new(0.0, -2.0 * k).sqrt();
    let red = build(&s, c)?;
    let k2 = k2_with(&red.heun, &opts.quad, &opts.series)?;
    if k2.norm() == 0.0 {
        return Err(Error::Indeterminate("K2 vanishes at a scattering energy".into()));
    }
    Ok(wrap_pi(-k2.arg()))
}

/// 2√ξ (2n_r + l + n/2)
pub fn ho_energy(xi: f64, n_r: usize, l: f64, n_dims: u32) -> f64 {
    2.0 * xi.sqrt() * (2.0 * n_r as f64 + l + 0.5 * n_dims as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoulombReading {
    /// −η² / (4 (n_r + ℓ + m/2 − ½)²)
    Squared,
    /// −(η²/4) / (n_r + ℓ + m/2 − ½)
    Unsquared,
}

pub fn coulomb_energy(eta: f64, n_r: usize, l: f64, m_dims: u32, reading: CoulombReading) -> f64 {
    let d = n_r as f64 + l + 0.5 * m_dims as f64 - 0.5;
    match reading {
        CoulombReading::Squared => -eta * eta / (4.0 * d * d),
        CoulombReading::Unsquared => -0.25 * eta * eta / d,
    }
}
