//! Connection coefficients of the regular solution,
//! N = K₁·B⁺ + K₂·H⁺, and the moment integral J_λ that yields K₂.

use crate::error::{Error, Result};
use crate::heunfn::{
    irregular_b_coefficients, irregular_h_coefficients, optimal_asymptotic_sum, regular_coefficients,
    HeunParams, RegularPath, SeriesControl,
};
use crate::quad::{tanh_sinh, QuadratureControl};
use crate::special::{cpow, factorial, gamma, near_nonpositive_integer, rgamma, POLE_TOL};
use num_complex::Complex64 as C64;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };
const ASYMPTOTIC_TERMS: usize = 80;

/// J_λ split into a regular part and the (at most two) terms that carry a
/// simple pole in λ: `value = regular + taylor_pole.1/(λ+k) + tail_pole.1/(n−σ)`.
#[derive(Debug, Clone)]
struct JParts {
    regular: C64,
    taylor_pole: Option<(usize, C64)>,
    tail_pole: Option<(usize, C64)>,
}

fn cutoff(p: &HeunParams, q: &QuadratureControl) -> f64 {
    q.tail_cutoff.max(p.beta.norm() + 6.0)
}

fn series_radius(p: &HeunParams) -> f64 {
    let scale = 1.0 + p.beta.norm() + p.gamma.norm().sqrt() + p.delta.norm().sqrt() + p.alpha.norm().sqrt();
    (0.5_f64).min(1.0 / scale)
}

fn j_parts(lambda: C64, p: &HeunParams, q: &QuadratureControl, ctl: &SeriesControl) -> Result<JParts> {
    q.validate()?;
    let x_big = cutoff(p, q);
    let x1 = series_radius(p);

    // [0, x1]: termwise integration of the Taylor series of e^{−x²−βx}N(x).
    // Valid (as analytic continuation) for every λ that is not −k.
    let n_max = 600;
    let c = regular_coefficients(p, n_max)?;
    let mut h = vec![ZERO; n_max];
    h[0] = ONE;
    h[1] = -p.beta;
    for k in 1..n_max - 1 {
        h[k + 1] = (-p.beta * h[k] - 2.0 * h[k - 1]) / (k as f64 + 1.0);
    }
    let mut regular = ZERO;
    let mut taylor_pole = None;
    let mut peak: f64 = 0.0;
    let mut small = 0;
    for k in 0..n_max {
        let g: C64 = (0..=k).map(|i| c[i] * h[k - i]).sum();
        let gk = g * x1.powi(k as i32);
        peak = peak.max(gk.norm());
        let lk = lambda + k as f64;
        if lk.norm() < POLE_TOL {
            taylor_pole = Some((k, g));
        } else {
            regular += gk * cpow(C64::new(x1, 0.0), lambda) / lk;
        }
        if gk.norm() <= 1e-17 * peak {
            small += 1;
            if small >= 4 {
                break;
            }
        } else {
            small = 0;
        }
        if k == n_max - 1 {
            return Err(Error::NonConvergent { terms: n_max });
        }
    }

    // [x1, X]: quadrature on the continued solution.
    let path = RegularPath::new(p, ONE, x_big, ctl)?;
    let beta = p.beta;
    let integrand = |x: f64| -> Result<C64> {
        let (y, _, ls) = path.eval_scaled(x)?;
        let expo = C64::new(ls - x * x, 0.0) - beta * x + (lambda - 1.0) * x.ln();
        Ok(y * expo.exp())
    };
    let quad = tanh_sinh(integrand, x1, x_big, q)?;
    regular += quad.value;

    // [X, ∞): N ≈ K₂'·H⁺ there, integrated term by term.
    let (y, _, ls) = path.eval_scaled(x_big)?;
    let e = irregular_h_coefficients(p, ASYMPTOTIC_TERMS);
    let zinv = C64::new(1.0 / x_big, 0.0);
    let (h_sum, _) = optimal_asymptotic_sum(&e, zinv);
    let lnx = x_big.ln();
    let h_log = C64::new(x_big * x_big, 0.0) + beta * x_big - 0.5 * (p.gamma + p.alpha + 2.0) * lnx + h_sum.ln();
    let ln_k2 = y.ln() + ls - h_log;
    let sigma = lambda - 0.5 * (p.gamma + p.alpha + 2.0);
    let mut tail_coeffs = Vec::with_capacity(e.len());
    let mut tail_pole = None;
    for (n, &en) in e.iter().enumerate() {
        let d = n as f64 - sigma;
        if d.norm() < POLE_TOL {
            tail_pole = Some((n, en * (ln_k2 + (sigma - n as f64) * lnx).exp()));
            tail_coeffs.push(ZERO);
        } else {
            tail_coeffs.push(en / d);
        }
    }
    let (t_sum, _) = optimal_asymptotic_sum(&tail_coeffs, zinv);
    regular += (ln_k2 + sigma * lnx).exp() * t_sum;
    if !regular.re.is_finite() || !regular.im.is_finite() {
        return Err(Error::IntegrandDiverged("non-finite J".into()));
    }
    Ok(JParts { regular, taylor_pole, tail_pole })
}

/// J_λ(α,β,γ,δ) = ∫₀^∞ x^{λ−1} e^{−x²−βx} N(α,β,γ,δ,x) dx.
///
/// Where the integral diverges (at the origin for Re λ ≤ 0, or at infinity
/// when N's growth beats the Gaussian) the value is the analytic
/// continuation in λ. Returns `IntegrandDiverged` on the continuation's poles.
pub fn j_integral(lambda: C64, p: &HeunParams, q: &QuadratureControl) -> Result<C64> {
    let parts = j_parts(lambda, p, q, &SeriesControl::default())?;
    if parts.taylor_pole.is_some() || parts.tail_pole.is_some() {
        return Err(Error::IntegrandDiverged(format!("J has a pole at lambda = {lambda}")));
    }
    Ok(parts.regular)
}

/// Parameters of the inner J integral and its index λ.
fn k2_inner(p: &HeunParams) -> (C64, HeunParams) {
    let (a, b, g, d) = (p.alpha, p.beta, p.gamma, p.delta);
    let lambda = 1.0 + 0.5 * (a + g);
    let inner = HeunParams::new(0.5 * (a + g), b, 0.5 * (3.0 * a - g), d + 0.5 * b * (g - a));
    (lambda, inner)
}

/// K₂ = Γ(1+α) / [Γ((α−γ)/2) Γ(1+(α+γ)/2)] · J_{1+(α+γ)/2}((α+γ)/2, β, (3α−γ)/2, δ+β(γ−α)/2).
pub fn k2(p: &HeunParams, q: &QuadratureControl) -> Result<C64> {
    k2_with(p, q, &SeriesControl::default())
}

pub fn k2_with(p: &HeunParams, q: &QuadratureControl, ctl: &SeriesControl) -> Result<C64> {
    let (lambda, inner) = k2_inner(p);
    if near_nonpositive_integer(inner.alpha + 1.0, 1e-12).is_some() {
        return Err(Error::Indeterminate(format!("inner alpha {} is a negative integer", inner.alpha)));
    }
    let g1 = gamma(1.0 + p.alpha);
    let a_arg = 0.5 * (p.alpha - p.gamma);
    let parts = j_parts(lambda, &inner, q, ctl)?;
    let pole_a = near_nonpositive_integer(a_arg, POLE_TOL);
    let pole_l = near_nonpositive_integer(lambda, POLE_TOL);
    let ra = if pole_a.is_some() { ZERO } else { rgamma(a_arg) };
    let rl = if pole_l.is_some() { ZERO } else { rgamma(lambda) };
    let mut total = ra * rl * parts.regular;
    if let Some((k, r)) = parts.taylor_pole {
        // 1/Γ(λ) · r/(λ+k) → (−1)^k k! r
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        total += ra * sign * factorial(k as u64) * r;
    }
    if let Some((n, r)) = parts.tail_pole {
        // 1/Γ((α−γ)/2) · r/(n−σ) with σ = −(α−γ)/2 → (−1)^n n! r
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        total += rl * sign * factorial(n as u64) * r;
    }
    let out = g1 * total;
    if !out.re.is_finite() || !out.im.is_finite() {
        return Err(Error::Indeterminate(format!("K2 not finite for {p:?}")));
    }
    Ok(out)
}

/// K₂(α,0,γ,0) = Γ(1+α/2) / Γ(½+α/4−γ/4), exactly zero on the poles.
pub fn k2_closed_beta0_delta0(alpha: C64, gamma_p: C64) -> C64 {
    let arg = 0.5 + 0.25 * alpha - 0.25 * gamma_p;
    if near_nonpositive_integer(arg, POLE_TOL).is_some() {
        return ZERO;
    }
    gamma(1.0 + 0.5 * alpha) * rgamma(arg)
}

#[derive(Debug, Clone, Copy)]
pub struct K1Result {
    pub k1: C64,
    pub k2: C64,
    /// |H⁺/B⁺| at the matching point
    pub conditioning: f64,
}

/// K₁ from matching N = K₁B⁺ + K₂H⁺ at `z_match`, with K₂ from [`k2`].
pub fn k1(p: &HeunParams, q: &QuadratureControl, z_match: C64) -> Result<K1Result> {
    let ctl = SeriesControl::default();
    let k2v = k2_with(p, q, &ctl)?;
    let t = z_match.norm();
    let dir = z_match / t;
    let path = RegularPath::new(p, dir, t * (1.0 + 1e-12), &ctl)?;
    let (y, _, ls) = path.eval_scaled(t)?;
    let zinv = 1.0 / z_match;
    let (bs, _) = optimal_asymptotic_sum(&irregular_b_coefficients(p, ASYMPTOTIC_TERMS), zinv);
    let (hs, _) = optimal_asymptotic_sum(&irregular_h_coefficients(p, ASYMPTOTIC_TERMS), zinv);
    let lnz = z_match.ln();
    let ln_b = 0.5 * (p.gamma - p.alpha - 2.0) * lnz + bs.ln();
    let ln_h = -0.5 * (p.gamma + p.alpha + 2.0) * lnz + z_match * z_match + p.beta * z_match + hs.ln();
    let conditioning = (ln_h - ln_b).re.exp();
    if conditioning > 1e12 {
        return Err(Error::IllConditioned(conditioning));
    }
    // K₁ = (N − K₂H⁺)/B⁺, all scaled by e^{-ln B}
    let n_over_b = y * (ls - ln_b).exp();
    let h_over_b = (ln_h - ln_b).exp();
    Ok(K1Result { k1: n_over_b - k2v * h_over_b, k2: k2v, conditioning })
}
