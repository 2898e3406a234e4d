//! Biconfluent Heun function N(α,β,γ,δ,z).
//!
//! The equation is
//! `z y'' + (1+α−βz−2z²) y' + {(γ−α−2)z − ½[δ+β(1+α)]} y = 0`.
//! `N` is the solution regular at the origin with `N(0) = 1`. At infinity
//! there is a recessive solution `B⁺ ~ z^{(γ−α−2)/2}` and a dominant one
//! `H⁺ ~ z^{−(γ+α+2)/2} e^{z²+βz}`.

use crate::error::{Error, Result};
use crate::special::{cpow, KahanSum};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeunParams {
    pub alpha: C64,
    pub beta: C64,
    pub gamma: C64,
    pub delta: C64,
}

impl HeunParams {
    pub fn new(alpha: C64, beta: C64, gamma: C64, delta: C64) -> Self {
        Self { alpha, beta, gamma, delta }
    }

    pub fn real(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Self {
        Self::new(alpha.into(), beta.into(), gamma.into(), delta.into())
    }

    /// A₁ = ½[δ + β(1+α)], the constant term of the equation.
    pub fn a1(&self) -> C64 {
        0.5 * (self.delta + self.beta * (1.0 + self.alpha))
    }

    fn check_alpha(&self) -> Result<()> {
        let a = self.alpha;
        let k = a.re.round();
        if k <= -1.0 && (a.re - k).abs() < 1e-12 && a.im.abs() < 1e-12 {
            return Err(Error::InvalidAlpha(a.re));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesControl {
    pub rel_tol: f64,
    pub max_terms: usize,
    pub consecutive_small: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self { rel_tol: 1e-14, max_terms: 10_000, consecutive_small: 3 }
    }
}

impl SeriesControl {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || self.max_terms < 16 || self.consecutive_small < 2 {
            return Err(Error::PreconditionViolated(format!("invalid series control {self:?}")));
        }
        Ok(())
    }
}

/// Rising factorial (a)_n = a(a+1)…(a+n−1).
pub fn pochhammer(a: C64, n: usize) -> C64 {
    (0..n).fold(ONE, |acc, k| acc * (a + k as f64))
}

/// Normalized series coefficients c_n = A_n / ((1+α)_n n!) for n < count.
pub fn regular_coefficients(p: &HeunParams, count: usize) -> Result<Vec<C64>> {
    p.check_alpha()?;
    let mut c = Vec::with_capacity(count);
    if count == 0 {
        return Ok(c);
    }
    c.push(ONE);
    if count == 1 {
        return Ok(c);
    }
    let a1 = p.a1();
    c.push(a1 / (1.0 + p.alpha));
    for n in 0..count.saturating_sub(2) {
        let nf = n as f64;
        let num = (p.beta * (nf + 1.0) + a1) * c[n + 1] - (p.gamma - p.alpha - 2.0 - 2.0 * nf) * c[n];
        c.push(num / ((nf + 2.0) * (nf + 2.0 + p.alpha)));
    }
    Ok(c)
}

/// Sums the regular series at `z`, returning `(N, N')`.
pub fn heun_regular_with_derivative(p: &HeunParams, z: C64, ctl: &SeriesControl) -> Result<(C64, C64)> {
    ctl.validate()?;
    p.check_alpha()?;
    let a1 = p.a1();
    let c1 = a1 / (1.0 + p.alpha);
    if z == ZERO {
        return Ok((ONE, c1));
    }
    // work with the terms t_n = c_n z^n directly
    let mut t_prev = ONE;
    let mut t_cur = c1 * z;
    let mut sum = KahanSum::new(ONE);
    let mut dsum = KahanSum::new(ZERO);
    sum.add(t_cur);
    dsum.add(t_cur);
    let mut small = usize::from(t_cur.norm() <= ctl.rel_tol * sum.value().norm());
    let z2 = z * z;
    let mut n = 0usize;
    while small < ctl.consecutive_small {
        if n + 2 >= ctl.max_terms {
            return Err(Error::NonConvergent { terms: ctl.max_terms });
        }
        let nf = n as f64;
        let next = ((p.beta * (nf + 1.0) + a1) * z * t_cur - (p.gamma - p.alpha - 2.0 - 2.0 * nf) * z2 * t_prev)
            / ((nf + 2.0) * (nf + 2.0 + p.alpha));
        sum.add(next);
        dsum.add(next * (nf + 2.0));
        if next.norm() <= ctl.rel_tol * sum.value().norm() {
            small += 1;
        } else {
            small = 0;
        }
        t_prev = t_cur;
        t_cur = next;
        n += 1;
    }
    Ok((sum.value(), dsum.value() / z))
}

/// N(α,β,γ,δ,z) from the power series about the origin.
pub fn heun_regular(p: &HeunParams, z: C64, ctl: &SeriesControl) -> Result<C64> {
    heun_regular_with_derivative(p, z, ctl).map(|(v, _)| v)
}

/// Coefficients a_n of the recessive solution B⁺ = z^{(γ−α−2)/2} Σ a_n z^{−n}.
pub fn irregular_b_coefficients(p: &HeunParams, count: usize) -> Vec<C64> {
    let (a, b, g, d) = (p.alpha, p.beta, p.gamma, p.delta);
    let shift = 0.5 * (b * g + d);
    let mut out: Vec<C64> = Vec::with_capacity(count);
    for m in 0..count {
        let v = if m == 0 {
            ONE
        } else {
            let mf = m as f64;
            let prev = out[m - 1];
            let prev2 = if m >= 2 { out[m - 2] } else { ZERO };
            let q = mf - 1.0 - 0.5 * g;
            -((b * (mf - 0.5) - shift) * prev + (q * q - 0.25 * a * a) * prev2) / (2.0 * mf)
        };
        out.push(v);
    }
    out
}

/// Coefficients e_n of the dominant solution H⁺ = z^{−(γ+α+2)/2} e^{z²+βz} Σ e_n z^{−n}.
pub fn irregular_h_coefficients(p: &HeunParams, count: usize) -> Vec<C64> {
    let (a, b, g, d) = (p.alpha, p.beta, p.gamma, p.delta);
    let shift = 0.5 * (b * g + d);
    let mut out: Vec<C64> = Vec::with_capacity(count);
    for m in 0..count {
        let v = if m == 0 {
            ONE
        } else {
            let mf = m as f64;
            let prev = out[m - 1];
            let prev2 = if m >= 2 { out[m - 2] } else { ZERO };
            let q = mf - 1.0 + 0.5 * g;
            (-(b * (mf - 0.5) + shift) * prev + (q * q - 0.25 * a * a) * prev2) / (2.0 * mf)
        };
        out.push(v);
    }
    out
}

fn check_asymptotic_region(p: &HeunParams, z: C64, n_terms: usize) -> Result<()> {
    let needed = 2.0 * (p.alpha.norm() + p.gamma.norm() + n_terms as f64);
    if z.norm_sqr() < needed {
        return Err(Error::OutsideAsymptoticRegion { z: z.norm(), needed });
    }
    Ok(())
}

/// Sums Σ coeffs[n] z^{-n}, failing if the pairwise envelope of the terms grows.
fn strict_asymptotic_sum(coeffs: &[C64], z: C64) -> Result<C64> {
    let zinv = 1.0 / z;
    let mut pow = ONE;
    let mut sum = KahanSum::new(ZERO);
    let mut envelope = f64::INFINITY;
    let mut pair_max: f64 = 0.0;
    for (n, &c) in coeffs.iter().enumerate() {
        let term = c * pow;
        sum.add(term);
        if n >= 1 {
            pair_max = pair_max.max(term.norm());
            if n % 2 == 0 {
                if pair_max > envelope * (1.0 + 1e-12) {
                    return Err(Error::DivergentTail(n));
                }
                if pair_max > 0.0 {
                    envelope = pair_max;
                }
                pair_max = 0.0;
            }
        }
        pow *= zinv;
    }
    Ok(sum.value())
}

/// Sums an asymptotic series in 1/z with optimal truncation. Returns the sum
/// and the magnitude of the smallest term kept (an error estimate).
pub(crate) fn optimal_asymptotic_sum(coeffs: &[C64], zinv: C64) -> (C64, f64) {
    let mut pow = ONE;
    let mut sum = KahanSum::new(ZERO);
    let mut best = f64::INFINITY;
    let mut prev_pair = f64::INFINITY;
    let mut pair = 0.0_f64;
    for (n, &c) in coeffs.iter().enumerate() {
        let term = c * pow;
        let mag = term.norm();
        if n >= 2 && n % 2 == 0 {
            if pair > prev_pair {
                break;
            }
            if pair > 0.0 {
                prev_pair = pair;
            }
            pair = 0.0;
        }
        sum.add(term);
        if n >= 1 {
            pair = pair.max(mag);
        }
        if mag > 0.0 {
            best = best.min(mag);
        }
        if n > 4 && mag > 0.0 && mag <= 1e-17 * sum.value().norm() {
            break;
        }
        pow *= zinv;
    }
    (sum.value(), best)
}

/// Recessive irregular solution B⁺(z), truncated after `n_terms` terms.
pub fn heun_irregular_b(p: &HeunParams, z: C64, n_terms: usize) -> Result<C64> {
    check_asymptotic_region(p, z, n_terms)?;
    let coeffs = irregular_b_coefficients(p, n_terms.max(1));
    let s = strict_asymptotic_sum(&coeffs, z)?;
    Ok(cpow(z, 0.5 * (p.gamma - p.alpha - 2.0)) * s)
}

/// Dominant irregular solution H⁺(z), truncated after `n_terms` terms.
pub fn heun_irregular_h(p: &HeunParams, z: C64, n_terms: usize) -> Result<C64> {
    check_asymptotic_region(p, z, n_terms)?;
    let coeffs = irregular_h_coefficients(p, n_terms.max(1));
    let s = strict_asymptotic_sum(&coeffs, z)?;
    Ok(cpow(z, -0.5 * (p.gamma + p.alpha + 2.0)) * (z * z + p.beta * z).exp() * s)
}

/// Confluent hypergeometric ₁F₁(a; b; z) by its power series.
pub fn kummer_1f1(a: C64, b: C64, z: C64, ctl: &SeriesControl) -> Result<C64> {
    ctl.validate()?;
    let k = b.re.round();
    if k <= 0.0 && (b.re - k).abs() < 1e-12 && b.im.abs() < 1e-12 {
        return Err(Error::InvalidB(b.re));
    }
    let mut term = ONE;
    let mut sum = KahanSum::new(ONE);
    let mut small = 0;
    let mut n = 0usize;
    while small < ctl.consecutive_small {
        if n + 1 >= ctl.max_terms {
            return Err(Error::NonConvergent { terms: ctl.max_terms });
        }
        let nf = n as f64;
        term = term * (a + nf) / (b + nf) * z / (nf + 1.0);
        sum.add(term);
        if term.norm() <= ctl.rel_tol * sum.value().norm() {
            small += 1;
        } else {
            small = 0;
        }
        n += 1;
    }
    Ok(sum.value())
}

/// N(α,0,γ,0,z) = ₁F₁(½+α/4−γ/4; 1+α/2; z²).
pub fn heun_to_kummer(p: &HeunParams, z: C64, ctl: &SeriesControl) -> Result<C64> {
    if p.beta != ZERO || p.delta != ZERO {
        return Err(Error::PreconditionViolated("heun_to_kummer needs beta = delta = 0".into()));
    }
    kummer_1f1(0.5 + 0.25 * p.alpha - 0.25 * p.gamma, 1.0 + 0.5 * p.alpha, z * z, ctl)
}

#[derive(Debug, Clone)]
struct Anchor {
    t: f64,
    log_scale: f64,
    // Taylor coefficients in the ray parameter τ = t − t_anchor
    coeffs: Vec<C64>,
}

/// The regular solution continued along the ray z = dir·t, t ∈ [0, t_max].
///
/// Near the origin the power series is used; beyond it the solution is
/// carried by local Taylor expansions of the equation, renormalized at each
/// anchor so that values far out (where N grows like e^{z²}) stay finite.
#[derive(Debug, Clone)]
pub struct RegularPath {
    params: HeunParams,
    dir: C64,
    t_series: f64,
    t_max: f64,
    ctl: SeriesControl,
    anchors: Vec<Anchor>,
}

impl RegularPath {
    pub fn new(p: &HeunParams, dir: C64, t_max: f64, ctl: &SeriesControl) -> Result<Self> {
        p.check_alpha()?;
        ctl.validate()?;
        let dir = dir / dir.norm();
        let scale = 1.0 + p.beta.norm() + p.delta.norm().sqrt() + p.gamma.norm().sqrt();
        let t_series = (2.0 / scale).min(1.0).min(t_max.max(1e-3));
        let mut path = Self { params: *p, dir, t_series, t_max, ctl: *ctl, anchors: Vec::new() };
        if t_max > t_series {
            path.build()?;
        }
        Ok(path)
    }

    fn build(&mut self) -> Result<()> {
        let (y, dy) = heun_regular_with_derivative(&self.params, self.dir * self.t_series, &self.ctl)?;
        let mut t = self.t_series;
        let mut y = y;
        // derivative with respect to the ray parameter
        let mut dy = dy * self.dir;
        let mut log_scale = 0.0;
        loop {
            let norm = (y.norm_sqr() + dy.norm_sqr()).sqrt();
            if !norm.is_finite() || norm == 0.0 {
                return Err(Error::IntegrandDiverged(format!("continuation lost the solution at t = {t}")));
            }
            y /= norm;
            dy /= norm;
            log_scale += norm.ln();
            let h = step_size(t);
            let coeffs = self.local_coeffs(t, y, dy, h);
            let t_next = t + h;
            let (yn, dyn_) = eval_poly(&coeffs, h);
            self.anchors.push(Anchor { t, log_scale, coeffs });
            if t_next >= self.t_max {
                break;
            }
            t = t_next;
            y = yn;
            dy = dyn_;
        }
        Ok(())
    }

    // Taylor coefficients of y(dir(t0+τ)) in τ from the local recurrence.
    fn local_coeffs(&self, t0: f64, y: C64, dy: C64, h: f64) -> Vec<C64> {
        let p = &self.params;
        let z0 = self.dir * t0;
        let p0 = 1.0 + p.alpha - p.beta * z0 - 2.0 * z0 * z0;
        let p1 = -p.beta - 4.0 * z0;
        let p2 = C64::new(-2.0, 0.0);
        let q0 = (p.gamma - p.alpha - 2.0) * z0 - p.a1();
        let q1 = p.gamma - p.alpha - 2.0;
        // coefficients in dz = dir·τ first
        let mut c: Vec<C64> = vec![y, dy / self.dir];
        let hz = h;
        let mut peak = y.norm().max(c[1].norm() * hz);
        let mut small = 0;
        let mut k = 0usize;
        while small < 3 && c.len() < 400 {
            let kf = k as f64;
            let ckm1 = if k >= 1 { c[k - 1] } else { ZERO };
            let num = (kf + 1.0) * kf * c[k + 1]
                + p0 * (kf + 1.0) * c[k + 1]
                + (p1 * kf + q0) * c[k]
                + (p2 * (kf - 1.0) + q1) * ckm1;
            let next = -num / (z0 * (kf + 2.0) * (kf + 1.0));
            c.push(next);
            let mag = next.norm() * hz.powi(k as i32 + 2);
            peak = peak.max(mag);
            if mag <= 1e-18 * peak {
                small += 1;
            } else {
                small = 0;
            }
            k += 1;
        }
        let mut d = ONE;
        for ck in c.iter_mut() {
            *ck *= d;
            d *= self.dir;
        }
        c
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    /// Returns `(y, dy/dz, log_scale)` with N = e^{log_scale}·y at z = dir·t.
    pub fn eval_scaled(&self, t: f64) -> Result<(C64, C64, f64)> {
        if t <= self.t_series || self.anchors.is_empty() {
            let (y, dy) = heun_regular_with_derivative(&self.params, self.dir * t, &self.ctl)?;
            return Ok((y, dy, 0.0));
        }
        let idx = match self.anchors.binary_search_by(|a| a.t.partial_cmp(&t).unwrap()) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let a = &self.anchors[idx];
        let tau = t - a.t;
        if tau > step_size(a.t) * (1.0 + 1e-9) {
            return Err(Error::PreconditionViolated(format!("t = {t} beyond continuation range {}", self.t_max)));
        }
        let (y, dy) = eval_poly(&a.coeffs, tau);
        Ok((y, dy / self.dir, a.log_scale))
    }

    /// Returns `(N, N')` at z = dir·t.
    pub fn eval(&self, t: f64) -> Result<(C64, C64)> {
        let (y, dy, s) = self.eval_scaled(t)?;
        let f = s.exp();
        Ok((y * f, dy * f))
    }
}

fn step_size(t: f64) -> f64 {
    (0.5 * t).min(0.5)
}

fn eval_poly(c: &[C64], tau: f64) -> (C64, C64) {
    let mut y = ZERO;
    let mut dy = ZERO;
    for (k, &ck) in c.iter().enumerate().rev() {
        y = y * tau + ck;
        if k >= 1 {
            dy = dy * tau + ck * k as f64;
        }
    }
    (y, dy)
}

/// N(p, z) for arbitrary z, by continuation along the ray through z.
pub fn heun_regular_continued(p: &HeunParams, z: C64, ctl: &SeriesControl) -> Result<(C64, C64)> {
    let t = z.norm();
    if t <= 1.0 {
        return heun_regular_with_derivative(p, z, ctl);
    }
    let path = RegularPath::new(p, z / t, t * (1.0 + 1e-12), ctl)?;
    path.eval(t)
}
