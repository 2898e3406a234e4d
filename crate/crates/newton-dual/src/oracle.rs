//! Independent checks: a finite-volume radial eigensolver, an outward
//! integrator for phase shifts, and a quadrature orbit integrator.

use crate::duality::{ClassicalDual, Form, PotentialSpec, POWER_TOL};
use crate::error::{Error, Result};
use crate::par::{map_indexed, Exec};
use crate::roots::brent;
use crate::special::riccati_bessel;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub n_points: usize,
}

impl RadialGrid {
    pub fn new(r_min: f64, r_max: f64, n_points: usize) -> Result<Self> {
        let g = Self { r_min, r_max, n_points };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_min > 0.0 && self.r_min < self.r_max && self.r_max.is_finite()) {
            return Err(Error::InvalidInput(format!("grid needs 0 < r_min < r_max, got [{}, {}]", self.r_min, self.r_max)));
        }
        if self.n_points < 200 {
            return Err(Error::InvalidInput(format!("grid needs at least 200 points, got {}", self.n_points)));
        }
        Ok(())
    }

    /// Grid sized from the potential's length scale a = max |c|^{−1/(q+2)}.
    /// Confining potentials get r_max = a·25^{1/q} for their steepest power q,
    /// clamped to [6a, 60a]; everything else gets 60a.
    pub fn for_potential(u: &PotentialSpec, n_points: usize) -> Result<Self> {
        let (a, steepest) = match &u.form {
            Form::Polynomial { terms } => {
                let a = terms
                    .iter()
                    .filter(|t| t.coeff != 0.0 && (t.power + 2.0).abs() > POWER_TOL)
                    .map(|t| t.coeff.abs().powf(-1.0 / (t.power + 2.0)))
                    .fold(0.0_f64, f64::max);
                let q = terms.iter().filter(|t| t.power > 0.0 && t.coeff > 0.0).map(|t| t.power).fold(0.0_f64, f64::max);
                (if a > 0.0 { a } else { 1.0 }, q)
            }
            Form::Exponential { xi, sigma } => (1.0 / sigma.abs(), if *xi > 0.0 && *sigma > 0.0 { 8.0 } else { 0.0 }),
            Form::LogSquared { alpha_scale, .. } => (1.0 / alpha_scale, 0.0),
        };
        let r_max = if steepest > 0.0 { a * 25f64.powf(1.0 / steepest).clamp(6.0, 60.0) } else { 60.0 * a };
        let r_min = match u.form {
            Form::LogSquared { alpha_scale, .. } => 1.0 / alpha_scale * (1.0 + 1e-3),
            _ => 1e-6 * a,
        };
        Self::new(r_min, r_max, n_points)
    }

    pub fn spacing(&self) -> f64 {
        (self.r_max - self.r_min) / (self.n_points - 1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdLevel {
    /// Richardson value from the h and h/2 grids
    pub energy: f64,
    /// |E_h − E_{h/2}| / 3
    pub error_estimate: f64,
}

/// Splits off 1/r² terms into the centrifugal barrier; returns the regular
/// exponent l' with l'(l'+1) equal to the combined coefficient.
fn effective_l(u: &PotentialSpec, l: f64) -> Result<(f64, PotentialSpec)> {
    let l_eff = l + 0.5 * (u.dimension as f64 - 3.0);
    let mut lam = l_eff * (l_eff + 1.0);
    let rest = match &u.form {
        Form::Polynomial { terms } => {
            let mut kept = Vec::new();
            for t in terms {
                if (t.power + 2.0).abs() < POWER_TOL {
                    lam += t.coeff;
                } else {
                    kept.push(*t);
                }
            }
            PotentialSpec::polynomial(kept)
        }
        _ => u.clone(),
    };
    if lam < -0.25 {
        return Err(Error::InvalidInput(format!("l(l+1) = {lam} falls below −1/4 (fall to the centre)")));
    }
    Ok((-0.5 + (lam + 0.25).sqrt(), rest))
}

struct Tridiag {
    d: Vec<f64>,
    e: Vec<f64>,
}

impl Tridiag {
    /// Finite volumes for φ = u/r^{l+1} with weight w = r^{2l+2}, symmetrized:
    /// cell centres r_i = r_min + (i+½)h. The inner face carries zero flux for
    /// a regular origin, or a Dirichlet wall when `wall` is set. Cell masses
    /// and power-law terms are exact weighted cell averages, which keeps
    /// singular terms near the origin accurate.
    fn build(u: &PotentialSpec, l: f64, r_min: f64, r_max: f64, n: usize, wall: bool) -> Self {
        let h = (r_max - r_min) / n as f64;
        let w = 2.0 * l + 2.0;
        let rc = |i: usize| r_min + (i as f64 + 0.5) * h;
        let rf = |i: usize| r_min + i as f64 * h; // face i sits below cell i
        let h2 = h * h;
        let powers: Vec<(f64, f64)> = match &u.form {
            Form::Polynomial { terms } => terms.iter().map(|t| (t.coeff, t.power)).collect(),
            _ => Vec::new(),
        };
        // ∫ r^k dr over cell i divided by r_i^w h
        // with a regular origin the first cell reaches down to r = 0 when the
        // integral converges there
        let cell = |i: usize, k: f64| {
            let (mut a, b, r) = (rf(i) / rc(i), rf(i + 1) / rc(i), rc(i));
            if i == 0 && !wall && k > -1.0 + 1e-9 {
                a = 0.0;
            }
            let int = if (k + 1.0).abs() < 1e-12 { (b / a).ln() } else { (b.powf(k + 1.0) - a.powf(k + 1.0)) / (k + 1.0) };
            int * r.powf(k - w + 1.0) / h
        };
        let mass: Vec<f64> = (0..n).map(|i| cell(i, w)).collect();
        let mut d = Vec::with_capacity(n);
        let mut e = Vec::with_capacity(n.saturating_sub(1));
        for i in 0..n {
            let r = rc(i);
            let up = (rf(i + 1) / r).powf(w);
            let down = if i == 0 {
                if wall { 2.0 * (rf(0) / r).powf(w) } else { 0.0 }
            } else {
                (rf(i) / r).powf(w)
            };
            // Dirichlet at r_max through an antisymmetric ghost cell
            let up = if i + 1 == n { 2.0 * up } else { up };
            let pot = if !powers.is_empty() {
                powers.iter().map(|&(c, q)| c * cell(i, q + w)).sum::<f64>() / mass[i]
            } else {
                u.eval(r)
            };
            d.push((up + down) / (h2 * mass[i]) + pot);
            if i + 1 < n {
                let f = rf(i + 1);
                e.push(-((f * f) / (r * rc(i + 1))).powf(l + 1.0) / (h2 * (mass[i] * mass[i + 1]).sqrt()));
            }
        }
        Self { d, e }
    }

    /// Number of eigenvalues below x.
    fn count_below(&self, x: f64) -> usize {
        let mut q = self.d[0] - x;
        let mut neg = usize::from(q < 0.0);
        for i in 1..self.d.len() {
            let q_prev = if q == 0.0 { f64::EPSILON * (self.e[i - 1].abs() + 1.0) } else { q };
            q = self.d[i] - x - self.e[i - 1] * self.e[i - 1] / q_prev;
            neg += usize::from(q < 0.0);
        }
        neg
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.d.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let rad = if i > 0 { self.e[i - 1].abs() } else { 0.0 } + if i + 1 < n { self.e[i].abs() } else { 0.0 };
            lo = lo.min(self.d[i] - rad);
            hi = hi.max(self.d[i] + rad);
        }
        (lo, hi)
    }

    /// k-th smallest eigenvalue by Sturm bisection.
    fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

fn fd_levels(u: &PotentialSpec, l: f64, grid: &RadialGrid, n: usize, count: usize, exec: Exec) -> Result<Vec<f64>> {
    let (l_fd, rest) = effective_l(u, l)?;
    let wall = matches!(u.form, Form::LogSquared { .. });
    if let Form::LogSquared { alpha_scale, .. } = u.form {
        if grid.r_min <= 1.0 / alpha_scale {
            return Err(Error::InvalidInput(format!("log-squared potential needs r_min > 1/alpha = {}", 1.0 / alpha_scale)));
        }
    }
    let m = Tridiag::build(&rest, l_fd, grid.r_min, grid.r_max, n, wall);
    if m.d.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("potential is not finite on the grid".into()));
    }
    if count > n {
        return Err(Error::InvalidInput(format!("{count} levels requested from {n} cells")));
    }
    Ok(map_indexed(exec, count, |k| m.eigenvalue(k)))
}

/// Lowest `count` eigenvalues of −u″ + [l(l+1)/r² + U]u = Eu on the grid.
pub fn fd_bound_spectrum(u: &PotentialSpec, l: f64, grid: &RadialGrid, count: usize) -> Result<Vec<FdLevel>> {
    fd_bound_spectrum_with(u, l, grid, count, Exec::default())
}

pub fn fd_bound_spectrum_with(u: &PotentialSpec, l: f64, grid: &RadialGrid, count: usize, exec: Exec) -> Result<Vec<FdLevel>> {
    grid.validate()?;
    u.validate()?;
    let n = grid.n_points;
    let coarse = fd_levels(u, l, grid, n, count, exec)?;
    let fine = fd_levels(u, l, grid, 2 * n, count, exec)?;
    coarse
        .iter()
        .zip(&fine)
        .map(|(&a, &b)| {
            if (a - b).abs() > 0.01 * b.abs() {
                return Err(Error::GridTooCoarse { coarse: a, fine: b });
            }
            Ok(FdLevel { energy: (4.0 * b - a) / 3.0, error_estimate: (a - b).abs() / 3.0 })
        })
        .collect()
}

/// Single-grid eigenvalues without extrapolation, for convergence studies.
pub fn fd_raw_levels(u: &PotentialSpec, l: f64, grid: &RadialGrid, count: usize) -> Result<Vec<f64>> {
    grid.validate()?;
    u.validate()?;
    fd_levels(u, l, grid, grid.n_points, count, Exec::default())
}

enum Tail {
    Free,
    /// ξ/r tail
    Coulomb(f64),
}

/// δ_l from outward RK4 integration matched to free or Coulomb-corrected
/// sinusoids at r_max and 0.75 r_max.
pub fn fd_phase_shift(u: &PotentialSpec, l: u32, k: f64, grid: &RadialGrid) -> Result<f64> {
    grid.validate()?;
    u.validate()?;
    if !(k > 0.0) {
        return Err(Error::InvalidInput("k must be positive".into()));
    }
    let l_eff = l as f64 + 0.5 * (u.dimension as f64 - 3.0);
    if l_eff < 0.0 || l_eff.fract() != 0.0 {
        return Err(Error::UnsupportedFamily(format!("half-integer l_eff = {l_eff}")));
    }
    let lu = l_eff as u32;
    let mut tail = Tail::Free;
    let mut short: Vec<(f64, f64)> = Vec::new();
    match &u.form {
        Form::Polynomial { terms } => {
            for t in terms {
                if (t.power + 1.0).abs() < POWER_TOL {
                    tail = Tail::Coulomb(t.coeff);
                } else if t.power < -1.0 && (t.power + 2.0).abs() >= POWER_TOL {
                    short.push((t.coeff, t.power));
                } else {
                    return Err(Error::UnsupportedFamily(format!("power {} has no matching template", t.power)));
                }
            }
        }
        Form::Exponential { sigma, .. } if *sigma < 0.0 => {}
        _ => return Err(Error::UnsupportedFamily("no matching template for this tail".into())),
    }
    let lf = l_eff;
    let cent = lf * (lf + 1.0);
    let k2 = k * k;
    let rhs = |r: f64, y: [f64; 2]| [y[1], (cent / (r * r) + u.eval(r) - k2) * y[0]];
    let r0 = grid.r_min;
    let r_far = grid.r_max;
    let r_near = 0.75 * r_far;
    let h_max = grid.spacing();
    let mut r = r0;
    let mut y = [r0.powf(lf + 1.0), (lf + 1.0) * r0.powf(lf)];
    let mut at_near = None;
    for &stop in &[r_near, r_far] {
        while r < stop {
            let h = (0.05 * r).min(h_max).min(stop - r);
            let k1 = rhs(r, y);
            let k2v = rhs(r + 0.5 * h, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
            let k3 = rhs(r + 0.5 * h, [y[0] + 0.5 * h * k2v[0], y[1] + 0.5 * h * k2v[1]]);
            let k4 = rhs(r + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
            for i in 0..2 {
                y[i] += h / 6.0 * (k1[i] + 2.0 * k2v[i] + 2.0 * k3[i] + k4[i]);
            }
            r = if stop - r - h <= 1e-12 * stop { stop } else { r + h };
            // keep magnitudes bounded; only the phase matters
            let m = y[0].abs().max(y[1].abs() / k);
            if m > 1e100 {
                y = [y[0] / m, y[1] / m];
            }
        }
        if at_near.is_none() {
            at_near = Some(y);
        }
    }
    let extract = |r: f64, y: [f64; 2]| -> f64 {
        let (j, dj, yy, dy) = match tail {
            Tail::Free => {
                let (j, dj, yy, dy) = riccati_bessel(lu, k * r);
                (j, k * dj, yy, k * dy)
            }
            Tail::Coulomb(xi) => {
                let eta = xi / (2.0 * k);
                let th = k * r - eta * (2.0 * k * r).ln() - 0.5 * lf * PI;
                let dth = k - eta / r;
                (th.sin(), dth * th.cos(), -th.cos(), dth * th.sin())
            }
        };
        let w = j * dy - dj * yy;
        let a = (y[0] * dy - y[1] * yy) / w;
        let b = (j * y[1] - dj * y[0]) / w;
        // first-order correction for the short-range tail beyond r
        let rest: f64 = short.iter().map(|&(c, q)| -c * r.powf(q + 1.0) / (q + 1.0)).sum();
        wrap(f64::atan2(-b, a) - rest / (2.0 * k))
    };
    let d_far = extract(r_far, y);
    let d_near = extract(r_near, at_near.unwrap_or(y));
    if wrap(d_far - d_near).abs() > 5e-2 {
        return Err(Error::MatchUnstable { a: d_near, b: d_far });
    }
    Ok(d_far)
}

fn wrap(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y == -PI {
        PI
    } else {
        y
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitSample {
    /// (r, θ) with θ nondecreasing
    pub points: Vec<(f64, f64)>,
    pub energy: f64,
    pub angular_momentum: f64,
    pub r_turn_lo: f64,
    pub r_turn_hi: f64,
}

/// F(r) = 2(E − U)r² − L², positive inside the allowed region.
fn radicand(u: &PotentialSpec, e: f64, l: f64, r: f64) -> f64 {
    2.0 * (e - u.eval(r)) * r * r - l * l
}

fn find_turning(u: &PotentialSpec, e: f64, l: f64, r_start: f64, outward: bool) -> Result<f64> {
    let f = |r: f64| Ok(radicand(u, e, l, r));
    let mut inside = r_start;
    for _ in 0..200 {
        let probe = if outward { inside * 1.5 } else { inside / 1.5 };
        if !(probe > 1e-300 && probe < 1e300) {
            break;
        }
        if radicand(u, e, l, probe) <= 0.0 {
            let (a, b) = if outward { (inside, probe) } else { (probe, inside) };
            return brent(f, a, b, 1e-15 * b, 300);
        }
        inside = probe;
    }
    Err(Error::TurningPointNotBracketed)
}

const GL8: [(f64, f64); 4] = [
    (0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_5),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_3),
];

/// Orbit between the turning points bracketing `r_start`, from dθ/dr =
/// (L/r²)/√(2[E − L²/(2r²) − U]). The substitution
/// r = r_lo + (r_hi − r_lo)(1 − cos σ)/2 removes both endpoint singularities;
/// each σ-step is integrated with 8-point Gauss–Legendre.
pub fn orbit_integrate(u: &PotentialSpec, energy: f64, angular_momentum: f64, r_start: f64, direction: i32, n_steps: usize) -> Result<OrbitSample> {
    u.validate()?;
    if direction != 1 && direction != -1 {
        return Err(Error::InvalidInput("direction must be ±1".into()));
    }
    if n_steps < 4 || !(r_start > 0.0) || !(angular_momentum > 0.0) {
        return Err(Error::InvalidInput("need n_steps ≥ 4, r_start > 0 and L > 0".into()));
    }
    let (e, l) = (energy, angular_momentum);
    let f0 = radicand(u, e, l, r_start);
    let scale = l * l;
    // a double root of F is a circular orbit
    let dr = 1e-5 * r_start;
    let fpp = (radicand(u, e, l, r_start + dr) - 2.0 * f0 + radicand(u, e, l, r_start - dr)) / (dr * dr);
    let fp = (radicand(u, e, l, r_start + dr) - radicand(u, e, l, r_start - dr)) / (2.0 * dr);
    let circular = f0.abs() <= 1e-9 * scale && fp.abs() * r_start <= 1e-6 * scale && fpp < 0.0;
    let (lo, hi) = if circular {
        (r_start, r_start)
    } else {
        if f0 <= 0.0 {
            return Err(Error::NoAllowedRegion);
        }
        (find_turning(u, e, l, r_start, false)?, find_turning(u, e, l, r_start, true)?)
    };
    let half = 0.5 * (hi - lo);
    let r_of = |s: f64| lo + half * (1.0 - s.cos());
    let g_circ = (-0.5 * fpp).sqrt();
    // dθ/dσ = L / (r √G), G = F / ((r − lo)(hi − r))
    let integrand = |s: f64| -> f64 {
        let r = r_of(s);
        if circular {
            return l / (r * g_circ);
        }
        let g = radicand(u, e, l, r) / ((r - lo) * (hi - r));
        if g > 0.0 {
            l / (r * g.sqrt())
        } else {
            0.0
        }
    };
    let ds = PI / n_steps as f64;
    let mut theta = 0.0;
    let mut pts = Vec::with_capacity(n_steps + 1);
    pts.push((r_of(0.0), 0.0));
    for i in 0..n_steps {
        let mid = (i as f64 + 0.5) * ds;
        let acc: f64 = GL8.iter().map(|&(x, w)| w * (integrand(mid - 0.5 * ds * x) + integrand(mid + 0.5 * ds * x))).sum();
        theta += 0.5 * ds * acc;
        pts.push((r_of((i + 1) as f64 * ds), theta));
    }
    if direction == -1 {
        let total = theta;
        pts = pts.iter().rev().map(|&(r, t)| (r, total - t)).collect();
    }
    Ok(OrbitSample { points: pts, energy, angular_momentum, r_turn_lo: lo, r_turn_hi: hi })
}

/// Angle swept between the two turning points.
pub fn apsidal_angle(sample: &OrbitSample) -> f64 {
    match (sample.points.first(), sample.points.last()) {
        (Some(a), Some(b)) => b.1 - a.1,
        _ => 0.0,
    }
}

fn fd4(v: &[f64], i: usize) -> f64 {
    (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / 12.0
}

fn orbit_residual(pts: &[(f64, f64)], v: &PotentialSpec, e: f64, l: f64) -> f64 {
    let rho: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let phi: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let n = pts.len();
    if n < 5 {
        return f64::NAN;
    }
    let dphi: Vec<f64> = (2..n - 2).map(|i| fd4(&phi, i)).collect();
    let norm = dphi.iter().fold(0.0_f64, |a, d| a.max(d.abs()));
    if norm == 0.0 {
        return 0.0;
    }
    let mut worst = 0.0_f64;
    for (j, i) in (2..n - 2).enumerate() {
        let f = radicand(v, e, l, rho[i]);
        if f <= 0.0 {
            continue;
        }
        // dφ/dρ = (L/ρ²)/√(F/ρ²)
        let rhs = l / (rho[i] * f.sqrt());
        let res = (dphi[j] - rhs * fd4(&rho, i).abs()).abs() / norm;
        worst = worst.max(res);
    }
    worst
}

/// Maps the sample through the classical dual and returns the largest
/// residual of the dual orbit equation, relative to max |dφ/dσ|.
pub fn orbit_dual_check(sample: &OrbitSample, dual: &ClassicalDual) -> f64 {
    let pts: Vec<(f64, f64)> = sample.points.iter().map(|&(r, t)| dual.map_point(r, t)).collect();
    orbit_residual(&pts, &dual.potential, dual.energy, dual.angular_momentum)
}

/// Residual of the sample against its own orbit equation.
pub fn orbit_self_residual(sample: &OrbitSample, u: &PotentialSpec) -> f64 {
    orbit_residual(&sample.points, u, sample.energy, sample.angular_momentum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::duality::{classical_dual, Term};

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs()
    }

    #[test]
    fn oscillator() {
        let g = RadialGrid::new(1e-4, 12.0, 4000).unwrap();
        let s = fd_bound_spectrum(&PotentialSpec::power(1.0, 2.0), 0.0, &g, 3).unwrap();
        for (lv, w) in s.iter().zip([3.0, 7.0, 11.0]) {
            assert!(close(lv.energy, w, 1e-4), "{s:?}");
        }
    }

    #[test]
    fn coulomb() {
        let g = RadialGrid::new(1e-4, 80.0, 8000).unwrap();
        let s = fd_bound_spectrum(&PotentialSpec::power(-1.0, -1.0), 0.0, &g, 2).unwrap();
        assert!(close(s[0].energy, -0.25, 1e-4) && close(s[1].energy, -0.0625, 1e-4), "{s:?}");
        let p = fd_bound_spectrum(&PotentialSpec::power(-1.0, -1.0), 1.0, &g, 1).unwrap();
        assert!(p[0].energy > s[0].energy);
    }

    #[test]
    fn two_dimensional_coulomb_uses_squared_denominator() {
        let g = RadialGrid::new(1e-6, 40.0, 4000).unwrap();
        let u = PotentialSpec::power(-1.0, -1.0).with_dimension(2);
        let s = fd_bound_spectrum(&u, 0.0, &g, 1).unwrap();
        assert!(close(s[0].energy, -1.0, 1e-3), "{s:?}");
    }

    #[test]
    fn second_order_convergence() {
        let u = PotentialSpec::power(1.0, 2.0);
        let e = |n| fd_raw_levels(&u, 0.0, &RadialGrid::new(1e-4, 10.0, n).unwrap(), 1).unwrap()[0];
        let (a, b, c) = (e(400), e(800), e(1600));
        let ratio = (a - b) / (b - c);
        assert!((3.5..=4.5).contains(&ratio), "{ratio}");
    }

    #[test]
    fn coarse_grid_is_reported() {
        let g = RadialGrid::new(1e-4, 400.0, 200).unwrap();
        assert!(matches!(fd_bound_spectrum(&PotentialSpec::power(1.0, 2.0), 0.0, &g, 1), Err(Error::GridTooCoarse { .. })));
    }

    #[test]
    fn free_and_attractive_phases() {
        let g = RadialGrid::new(1e-6, 400.0, 40000).unwrap();
        let zero = PotentialSpec::polynomial(vec![]);
        for l in 0..3 {
            assert!(fd_phase_shift(&zero, l, 1.3, &g).unwrap().abs() < 1e-6);
        }
        let d = fd_phase_shift(&PotentialSpec::power(-0.5, -1.5), 0, 0.3, &g).unwrap();
        assert!(d > 0.0);
    }

    #[test]
    fn coulomb_phase_template() {
        let g = RadialGrid::new(1e-6, 400.0, 40000).unwrap();
        let d = fd_phase_shift(&PotentialSpec::power(1.0, -1.0), 0, 1.0, &g).unwrap();
        let sigma = crate::special::ln_gamma(num_complex::Complex64::new(1.0, 0.5)).im;
        assert!((d - sigma).abs() < 1e-2, "{d} {sigma}");
    }

    #[test]
    fn apsidal_angles() {
        let ho = PotentialSpec::power(0.5, 2.0);
        let s = orbit_integrate(&ho, 2.0, 0.8, 1.0, 1, 500).unwrap();
        assert!((apsidal_angle(&s) - PI / 2.0).abs() < 1e-10);
        let kepler = PotentialSpec::power(-1.0, -1.0);
        let s = orbit_integrate(&kepler, -0.3, 1.0, 1.0, 1, 500).unwrap();
        assert!((apsidal_angle(&s) - PI).abs() < 1e-10);
        assert!(orbit_self_residual(&s, &kepler) < 1e-6);
    }

    #[test]
    fn circular_kepler() {
        // E = −1/(2L²) at r = L²
        let l = 0.8f64;
        let s = orbit_integrate(&PotentialSpec::power(-1.0, -1.0), -0.5 / (l * l), l, l * l, 1, 100).unwrap();
        assert!(s.points.iter().all(|p| (p.0 - l * l).abs() < 1e-12));
        assert!((apsidal_angle(&s) - PI).abs() < 1e-5);
    }

    #[test]
    fn outside_the_allowed_region() {
        let r = orbit_integrate(&PotentialSpec::power(1.0, 2.0), 0.1, 1.0, 5.0, 1, 100);
        assert_eq!(r, Err(Error::NoAllowedRegion));
    }

    #[test]
    fn harmonic_to_kepler_orbit() {
        let u = PotentialSpec::polynomial(vec![Term::new(1.0, 2.0)]);
        let s = orbit_integrate(&u, 2.0, 0.8, 1.0, 1, 2000).unwrap();
        let dual = classical_dual(&u, 0, 2.0, 0.8).unwrap();
        assert!(orbit_dual_check(&s, &dual) < 1e-4);
    }
}
