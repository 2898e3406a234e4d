//! Complex gamma function and a few small numerical helpers.

use num_complex::Complex64 as C64;
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Distance below which an argument counts as sitting on a gamma pole.
pub const POLE_TOL: f64 = 1e-9;

/// Returns `Some(m)` when `z` is within `tol` of the non-positive integer `-m`.
pub fn near_nonpositive_integer(z: C64, tol: f64) -> Option<u64> {
    let k = z.re.round();
    if k <= 0.0 && (z.re - k).abs() <= tol && z.im.abs() <= tol {
        Some((-k) as u64)
    } else {
        None
    }
}

fn lanczos_sum(z: C64) -> C64 {
    let mut x = C64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    x
}

/// Natural log of the gamma function, principal branch of the Lanczos form.
pub fn ln_gamma(z: C64) -> C64 {
    if z.re < 0.5 {
        // reflection
        let s = (PI * z).sin();
        return C64::new(PI.ln(), 0.0) - s.ln() - ln_gamma(1.0 - z);
    }
    let zm = z - 1.0;
    let t = zm + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (zm + 0.5) * t.ln() - t + lanczos_sum(zm).ln()
}

/// Gamma function for complex arguments. Infinite at poles.
pub fn gamma(z: C64) -> C64 {
    if near_nonpositive_integer(z, 0.0).is_some() {
        return C64::new(f64::INFINITY, 0.0);
    }
    if z.re < 0.5 {
        return PI / ((PI * z).sin() * gamma(1.0 - z));
    }
    if z.norm() > 140.0 {
        return ln_gamma(z).exp();
    }
    let zm = z - 1.0;
    let t = zm + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powc(zm + 0.5) * (-t).exp() * lanczos_sum(zm)
}

/// Reciprocal gamma, entire; exactly zero on the poles of gamma.
pub fn rgamma(z: C64) -> C64 {
    if near_nonpositive_integer(z, 0.0).is_some() {
        return C64::new(0.0, 0.0);
    }
    if z.re < 0.5 {
        return (PI * z).sin() * gamma(1.0 - z) / PI;
    }
    1.0 / gamma(z)
}

pub fn factorial(n: u64) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Principal-branch power z^s with the convention 0^s = 0 for Re s > 0.
pub fn cpow(z: C64, s: C64) -> C64 {
    if z == C64::new(0.0, 0.0) {
        return if s == C64::new(0.0, 0.0) { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
    }
    (s * z.ln()).exp()
}

/// Compensated (Kahan) complex accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: C64,
    comp: C64,
}

impl KahanSum {
    pub fn new(start: C64) -> Self {
        Self { sum: start, comp: C64::new(0.0, 0.0) }
    }

    pub fn add(&mut self, x: C64) {
        let y_re = x.re - self.comp.re;
        let t_re = self.sum.re + y_re;
        self.comp.re = (t_re - self.sum.re) - y_re;
        let y_im = x.im - self.comp.im;
        let t_im = self.sum.im + y_im;
        self.comp.im = (t_im - self.sum.im) - y_im;
        self.sum = C64::new(t_re, t_im);
    }

    pub fn value(&self) -> C64 {
        self.sum
    }
}

/// Riccati-Bessel functions x j_l(x) and x y_l(x) with their derivatives,
/// by upward recurrence (accurate for x well above l).
pub fn riccati_bessel(l: u32, x: f64) -> (f64, f64, f64, f64) {
    // f_{-1}, f_0 for jhat = sin, yhat = -cos
    let (mut j_prev, mut j) = (x.cos(), x.sin());
    let (mut y_prev, mut y) = (x.sin(), -x.cos());
    for k in 0..l {
        let f = (2 * k + 1) as f64 / x;
        let jn = f * j - j_prev;
        let yn = f * y - y_prev;
        j_prev = j;
        j = jn;
        y_prev = y;
        y = yn;
    }
    let lf = l as f64;
    let dj = j_prev - lf / x * j;
    let dy = y_prev - lf / x * y;
    (j, dj, y, dy)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn gamma_integers_and_half() {
        assert!((gamma(c(5.0)).re - 24.0).abs() < 1e-12);
        assert!((gamma(c(0.5)).re - PI.sqrt()).abs() < 1e-14);
        assert!((gamma(c(-0.5)).re + 2.0 * PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn gamma_complex_reflection() {
        // |Gamma(i)|^2 = pi / sinh(pi)
        let g = gamma(C64::new(0.0, 1.0));
        assert!((g.norm_sqr() - PI / PI.sinh()).abs() < 1e-14);
        let z = C64::new(0.3, 2.0);
        let lhs = gamma(z) * gamma(1.0 - z);
        let rhs = PI / (PI * z).sin();
        assert!((lhs - rhs).norm() < 1e-12 * rhs.norm());
    }

    #[test]
    fn rgamma_zero_at_poles() {
        assert_eq!(rgamma(c(-3.0)), c(0.0));
        assert_eq!(rgamma(c(0.0)), c(0.0));
        assert!((rgamma(c(4.0)).re - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn ln_gamma_matches_gamma() {
        let z = C64::new(3.7, -1.2);
        assert!((ln_gamma(z).exp() - gamma(z)).norm() < 1e-12 * gamma(z).norm());
        assert!((ln_gamma(c(171.5)).re - 709.143_163_030_928_2).abs() < 1e-9);
    }

    #[test]
    fn riccati_bessel_l1() {
        let x = 3.0_f64;
        let (j, dj, y, _) = riccati_bessel(1, x);
        assert!((j - (x.sin() / x - x.cos())).abs() < 1e-14);
        assert!((y - (-x.cos() / x - x.sin())).abs() < 1e-14);
        let h = 1e-6;
        let (jp, ..) = riccati_bessel(1, x + h);
        let (jm, ..) = riccati_bessel(1, x - h);
        assert!(((jp - jm) / (2.0 * h) - dj).abs() < 1e-8);
    }
}
