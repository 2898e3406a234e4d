//! Newton duality transforms between central potentials.
//!
//! Powers are stored literally: a term `coeff * r^power`. The conventional shifted
//! exponent `a` relates to this as `power = a + 1`, so the map scale
//! `s = (a+3)/2` becomes `s = (power+2)/2` for the pivot term.
//!
//! A quantum map with pivot power `P` sends `r → ρ = r^s`, every other power
//! `Q → (Q+2)/s − 2` with its coefficient divided by `s²`, the energy into a
//! coupling `η = −E/s²` at power `2/s − 2`, and the pivot coupling into the
//! dual energy `ℰ = −ξ/s²`. The classical map is the same without the `s²`.

use crate::error::{Error, Result};
use crate::roots::brent;
use serde::{Deserialize, Serialize};

/// Exponents closer than this are treated as the same power.
pub const POWER_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coeff: f64,
    pub power: f64,
}

impl Term {
    pub fn new(coeff: f64, power: f64) -> Self {
        Self { coeff, power }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Form {
    Polynomial { terms: Vec<Term> },
    /// ξ e^{σr}
    Exponential { xi: f64, sigma: f64 },
    /// η / (r ln(α r))²
    LogSquared { eta: f64, alpha_scale: f64 },
}

fn default_dimension() -> u32 {
    3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    #[serde(flatten)]
    pub form: Form,
    #[serde(default = "default_dimension")]
    pub dimension: u32,
}

impl PotentialSpec {
    pub fn polynomial(terms: Vec<Term>) -> Self {
        Self { form: Form::Polynomial { terms }, dimension: 3 }
    }

    pub fn power(coeff: f64, power: f64) -> Self {
        Self::polynomial(vec![Term::new(coeff, power)])
    }

    pub fn exponential(xi: f64, sigma: f64) -> Self {
        Self { form: Form::Exponential { xi, sigma }, dimension: 3 }
    }

    pub fn log_squared(eta: f64, alpha_scale: f64) -> Self {
        Self { form: Form::LogSquared { eta, alpha_scale }, dimension: 3 }
    }

    pub fn with_dimension(mut self, dimension: u32) -> Self {
        self.dimension = dimension;
        self
    }

    pub fn terms(&self) -> Result<&[Term]> {
        match &self.form {
            Form::Polynomial { terms } => Ok(terms),
            _ => Err(Error::InvalidInput("expected a polynomial potential".into())),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        match &self.form {
            Form::Polynomial { terms } => {
                for (i, t) in terms.iter().enumerate() {
                    if !t.coeff.is_finite() || !t.power.is_finite() {
                        return Err(Error::InvalidInput(format!("term {i} is not finite")));
                    }
                    if terms[..i].iter().any(|o| (o.power - t.power).abs() < POWER_TOL) {
                        return Err(Error::InvalidInput(format!("repeated power {}", t.power)));
                    }
                }
                Ok(())
            }
            Form::Exponential { xi, sigma } => {
                if !(*sigma > 0.0) || !xi.is_finite() {
                    return Err(Error::InvalidInput("exponential needs sigma > 0".into()));
                }
                Ok(())
            }
            Form::LogSquared { eta, alpha_scale } => {
                if !(*alpha_scale > 0.0) || !eta.is_finite() {
                    return Err(Error::InvalidInput("log-squared needs alpha_scale > 0".into()));
                }
                Ok(())
            }
        }
    }

    /// Terms whose power is at or below −2 and therefore compete with the
    /// centrifugal barrier.
    pub fn warnings(&self) -> Vec<String> {
        match &self.form {
            Form::Polynomial { terms } => terms
                .iter()
                .filter(|t| t.power <= -2.0)
                .map(|t| format!("power {} does not support bound-state analysis", t.power))
                .collect(),
            _ => Vec::new(),
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        match &self.form {
            Form::Polynomial { terms } => terms.iter().map(|t| t.coeff * r.powf(t.power)).sum(),
            Form::Exponential { xi, sigma } => xi * (sigma * r).exp(),
            Form::LogSquared { eta, alpha_scale } => {
                let d = r * (alpha_scale * r).ln();
                eta / (d * d)
            }
        }
    }

    /// Powers sorted ascending, for structural comparison.
    pub fn sorted_powers(&self) -> Result<Vec<f64>> {
        let mut p: Vec<f64> = self.terms()?.iter().map(|t| t.power).collect();
        p.sort_by(f64::total_cmp);
        Ok(p)
    }
}

/// Bound-state behaviour of a single term `coeff * r^power`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TermClass {
    /// positive power, positive coefficient
    Confining,
    /// attractive with −2 < power < 0
    AttractiveBound,
    /// attractive with power ≤ −2: falls to the centre or sits on the threshold
    FallToCenter,
    /// no bound states supported on its own
    NoBoundStates,
}

pub fn classify_term(t: &Term) -> TermClass {
    if t.power > 0.0 && t.coeff > 0.0 {
        TermClass::Confining
    } else if t.power < 0.0 && t.coeff < 0.0 {
        if t.power > -2.0 {
            TermClass::AttractiveBound
        } else {
            TermClass::FallToCenter
        }
    } else {
        TermClass::NoBoundStates
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialState {
    pub dimension: u32,
    pub l: f64,
    pub n_r: usize,
    pub energy: f64,
    pub is_dual_image: bool,
}

impl RadialState {
    pub fn new(l: f64, n_r: usize, energy: f64) -> Self {
        Self { dimension: 3, l, n_r, energy, is_dual_image: false }
    }

    pub fn in_dimension(mut self, dimension: u32) -> Self {
        self.dimension = dimension;
        self
    }

    /// The 3-D equivalent angular momentum, `l + (n−3)/2`.
    pub fn l_eff(&self) -> f64 {
        self.l + 0.5 * (self.dimension as f64 - 3.0)
    }

    /// Coefficient of `1/r²` in the radial equation.
    pub fn centrifugal(&self) -> f64 {
        let l = self.l_eff();
        l * (l + 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    Quantum,
    Classical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualityMap {
    /// s in ρ = r^s
    pub coord_exponent: f64,
    /// dual couplings are the originals divided by this (s² quantum, 1 classical)
    pub energy_coupling_factor: f64,
    /// l + n/2 − 1 = scale · (ℓ + m/2 − 1); classically φ = scale · θ
    pub angular_scale: f64,
    /// u(r) = ρ^w v(ρ)
    pub wavefn_prefactor_exponent: f64,
    pub pivot_index: usize,
    pub dims: (u32, u32),
    pub kind: MapKind,
}

impl DualityMap {
    fn new(s: f64, pivot_index: usize, dims: (u32, u32), kind: MapKind) -> Self {
        let factor = match kind {
            MapKind::Quantum => s * s,
            MapKind::Classical => 1.0,
        };
        Self {
            coord_exponent: s,
            energy_coupling_factor: factor,
            angular_scale: s,
            wavefn_prefactor_exponent: 0.5 * (1.0 / s - 1.0),
            pivot_index,
            dims,
            kind,
        }
    }

    /// The map from the dual back to the original. Dual potentials keep the
    /// energy-derived term at the pivot's index, so the pivot is unchanged.
    pub fn inverse(&self) -> Self {
        Self::new(1.0 / self.coord_exponent, self.pivot_index, (self.dims.1, self.dims.0), self.kind)
    }

    /// Power of the pivot term that generated this map.
    pub fn pivot_power(&self) -> f64 {
        2.0 * self.coord_exponent - 2.0
    }

    pub fn map_power(&self, q: f64) -> f64 {
        (q + 2.0) / self.coord_exponent - 2.0
    }

    /// Dual angular momentum ℓ from the original l.
    pub fn map_l(&self, l: f64) -> f64 {
        let (n, m) = (self.dims.0 as f64, self.dims.1 as f64);
        (l + 0.5 * n - 1.0) / self.angular_scale - 0.5 * m + 1.0
    }
}

/// A + 1 from a + 1 under (a+3)(A+3) = 4.
pub fn dual_exponent(a_plus_1: f64) -> Result<f64> {
    if (a_plus_1 + 2.0).abs() < POWER_TOL {
        return Err(Error::PoleAtMinusThree);
    }
    Ok(4.0 / (a_plus_1 + 2.0) - 2.0)
}

fn dual_core(
    u: &PotentialSpec,
    pivot: usize,
    state: &RadialState,
    m: u32,
    kind: MapKind,
) -> Result<(PotentialSpec, RadialState, DualityMap)> {
    u.validate()?;
    let terms = u.terms()?;
    if pivot >= terms.len() {
        return Err(Error::PivotOutOfRange { pivot, len: terms.len() });
    }
    let pt = terms[pivot];
    if (pt.power + 2.0).abs() < POWER_TOL {
        return Err(Error::PoleAtMinusThree);
    }
    if terms.iter().any(|t| t.power.abs() < POWER_TOL) {
        return Err(Error::InvalidInput("constant terms belong in the energy".into()));
    }
    let energy = state.energy;
    let s = 0.5 * (pt.power + 2.0);
    let map = DualityMap::new(s, pivot, (state.dimension, m), kind);
    let f = map.energy_coupling_factor;
    let mut out = Vec::with_capacity(terms.len());
    for (i, t) in terms.iter().enumerate() {
        if i == pivot {
            out.push(Term::new(-energy / f, map.map_power(0.0)));
        } else {
            out.push(Term::new(t.coeff / f, map.map_power(t.power)));
        }
    }
    let v = PotentialSpec { form: Form::Polynomial { terms: out }, dimension: m };
    let vs = RadialState {
        dimension: m,
        l: map.map_l(state.l),
        n_r: state.n_r,
        energy: -pt.coeff / f,
        is_dual_image: !state.is_dual_image,
    };
    Ok((v, vs, map))
}

/// Dual of a single power term in three dimensions.
pub fn power_dual_quantum(u: &PotentialSpec, state: &RadialState) -> Result<(PotentialSpec, RadialState, DualityMap)> {
    let n = u.terms()?.len();
    if n != 1 {
        return Err(Error::MultiTermInput(n));
    }
    if state.dimension != 3 || u.dimension != 3 {
        return Err(Error::PreconditionViolated("power_dual_quantum works in three dimensions".into()));
    }
    dual_core(u, 0, state, 3, MapKind::Quantum)
}

/// Dual of a single power term from n to m dimensions.
pub fn power_dual_dimensions(
    u: &PotentialSpec,
    n: u32,
    m: u32,
    state: &RadialState,
) -> Result<(PotentialSpec, RadialState, DualityMap)> {
    let len = u.terms()?.len();
    if len != 1 {
        return Err(Error::MultiTermInput(len));
    }
    if n == 0 || m == 0 {
        return Err(Error::InvalidInput("dimensions must be positive".into()));
    }
    let u = u.clone().with_dimension(n);
    let st = RadialState { dimension: n, ..*state };
    dual_core(&u, 0, &st, m, MapKind::Quantum)
}

/// Quantum dual of a polynomial potential; `pivot` trades places with the energy.
pub fn polynomial_dual(u: &PotentialSpec, pivot: usize, state: &RadialState) -> Result<(PotentialSpec, RadialState, DualityMap)> {
    let st = RadialState { dimension: u.dimension, ..*state };
    dual_core(u, pivot, &st, u.dimension, MapKind::Quantum)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualMember {
    pub potential: PotentialSpec,
    pub state: RadialState,
    /// the map from the original; `None` for the original itself
    pub map: Option<DualityMap>,
}

/// The original potential followed by its dual under each pivot.
pub fn dual_set(u: &PotentialSpec, state: &RadialState) -> Result<Vec<DualMember>> {
    let n = u.terms()?.len();
    let st = RadialState { dimension: u.dimension, ..*state };
    let mut out = vec![DualMember { potential: u.clone(), state: st, map: None }];
    for k in 0..n {
        let (v, vs, m) = polynomial_dual(u, k, &st)?;
        out.push(DualMember { potential: v, state: vs, map: Some(m) });
    }
    Ok(out)
}

/// Largest relative mismatch between `a` and `b` as term sets, or `None`
/// when their power lists differ.
pub fn potential_mismatch(a: &PotentialSpec, b: &PotentialSpec) -> Option<f64> {
    let (ta, tb) = (a.terms().ok()?, b.terms().ok()?);
    if ta.len() != tb.len() {
        return None;
    }
    let mut worst: f64 = 0.0;
    for t in ta {
        let o = tb.iter().find(|o| (o.power - t.power).abs() <= POWER_TOL * (1.0 + t.power.abs()))?;
        let scale = t.coeff.abs().max(o.coeff.abs()).max(f64::MIN_POSITIVE);
        worst = worst.max((t.coeff - o.coeff).abs() / scale);
    }
    Some(worst)
}

/// Checks that every member of a dual set maps onto every other one under
/// some pivot, returning the worst coefficient/energy mismatch.
pub fn verify_dual_set(set: &[DualMember]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (i, a) in set.iter().enumerate() {
        let n = a.potential.terms()?.len();
        for (j, b) in set.iter().enumerate() {
            if i == j {
                continue;
            }
            let mut best = f64::INFINITY;
            for k in 0..n {
                let Ok((v, vs, _)) = polynomial_dual(&a.potential, k, &a.state) else { continue };
                if let Some(d) = potential_mismatch(&v, &b.potential) {
                    let de = (vs.energy - b.state.energy).abs() / vs.energy.abs().max(b.state.energy.abs()).max(1e-300);
                    let dl = (vs.l - b.state.l).abs();
                    best = best.min(d.max(de).max(dl));
                }
            }
            worst = worst.max(best);
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalDual {
    pub potential: PotentialSpec,
    pub energy: f64,
    pub angular_momentum: f64,
    pub map: DualityMap,
}

/// Classical dual: ρ = r^s, φ = sθ, η = −E, ℰ = −ξ, other couplings and L unchanged.
pub fn classical_dual(u: &PotentialSpec, pivot: usize, energy: f64, angular_momentum: f64) -> Result<ClassicalDual> {
    let st = RadialState { dimension: u.dimension, l: 0.0, n_r: 0, energy, is_dual_image: false };
    let (v, vs, map) = dual_core(u, pivot, &st, u.dimension, MapKind::Classical)?;
    Ok(ClassicalDual { potential: v, energy: vs.energy, angular_momentum, map })
}

impl ClassicalDual {
    /// (r, θ) → (ρ, φ)
    pub fn map_point(&self, r: f64, theta: f64) -> (f64, f64) {
        let s = self.map.coord_exponent;
        (r.powf(s), s * theta)
    }
}

/// Two-term potential whose terms are dual to each other's images:
/// ξ r^{a+1} + μ r^{2(√((a+3)/2) − 1)}. Returns (U, V) with V built by the
/// energy-free part of the map; the second coefficient carries the s²
/// factor in the quantum case only.
pub fn termwise_dual_pair(xi: f64, a_plus_1: f64, mu: f64, eta: f64, kind: MapKind) -> Result<(PotentialSpec, PotentialSpec)> {
    let big_a1 = dual_exponent(a_plus_1)?;
    let s = 0.5 * (a_plus_1 + 2.0);
    if !(s > 0.0) {
        return Err(Error::InvalidInput("termwise pairs need a > −3".into()));
    }
    let b1 = 2.0 * (s.sqrt() - 1.0);
    let big_b1 = 2.0 * ((1.0 / s).sqrt() - 1.0);
    let mu_v = match kind {
        MapKind::Quantum => mu / (s * s),
        MapKind::Classical => mu,
    };
    let u = PotentialSpec::polynomial(vec![Term::new(xi, a_plus_1), Term::new(mu, b1)]);
    let v = PotentialSpec::polynomial(vec![Term::new(eta, big_a1), Term::new(mu_v, big_b1)]);
    Ok((u, v))
}

pub fn map_coordinate(m: &DualityMap, r: f64) -> f64 {
    r.powf(m.coord_exponent)
}

fn normalize_max(mut out: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    let peak = out.iter().fold(0.0_f64, |a, &(_, v)| a.max(v.abs()));
    if peak > 0.0 {
        for p in &mut out {
            p.1 /= peak;
        }
    }
    out
}

/// (r, u) samples to (ρ, v) with v = ρ^{−w} u, scaled to unit peak.
pub fn map_wavefunction(m: &DualityMap, samples: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let w = m.wavefn_prefactor_exponent;
    let out = samples
        .iter()
        .map(|&(r, u)| {
            let rho = map_coordinate(m, r);
            (rho, rho.powf(-w) * u)
        })
        .collect();
    normalize_max(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpLogDirection {
    ExpToLog,
    LogToExp,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpLogMap {
    pub sigma: f64,
    pub alpha_scale: f64,
    pub direction: ExpLogDirection,
}

impl ExpLogMap {
    pub fn map_coordinate(&self, r: f64) -> f64 {
        match self.direction {
            ExpLogDirection::ExpToLog => (0.5 * self.sigma * r).exp() / self.alpha_scale,
            ExpLogDirection::LogToExp => 2.0 / self.sigma * (self.alpha_scale * r).ln(),
        }
    }

    /// Inverse coordinate map with its first two derivatives, r(ρ).
    pub fn source_coordinate(&self, rho: f64) -> (f64, f64, f64) {
        let (s, a) = (self.sigma, self.alpha_scale);
        match self.direction {
            ExpLogDirection::ExpToLog => {
                let k = 2.0 / s;
                (k * (a * rho).ln(), k / rho, -k / (rho * rho))
            }
            ExpLogDirection::LogToExp => {
                let g = (0.5 * s * rho).exp() / a;
                (g, 0.5 * s * g, 0.25 * s * s * g)
            }
        }
    }

    /// Prefactor h(ρ) in v = h u with its first two derivatives.
    pub fn prefactor(&self, rho: f64) -> (f64, f64, f64) {
        match self.direction {
            ExpLogDirection::ExpToLog => {
                let h = rho.sqrt();
                (h, 0.5 / h, -0.25 / (h * rho))
            }
            ExpLogDirection::LogToExp => {
                let k = -0.25 * self.sigma;
                let h = (k * rho).exp();
                (h, k * h, k * k * h)
            }
        }
    }

    pub fn map_wavefunction(&self, samples: &[(f64, f64)]) -> Vec<(f64, f64)> {
        let out = samples
            .iter()
            .map(|&(r, u)| {
                let rho = self.map_coordinate(r);
                (rho, self.prefactor(rho).0 * u)
            })
            .collect();
        normalize_max(out)
    }
}

fn solve_angular(target: f64) -> Result<f64> {
    let disc = 0.25 + target;
    if !(disc >= 0.0) {
        return Err(Error::UnsolvableAngular(target));
    }
    Ok(-0.5 + disc.sqrt())
}

/// Exponential ↔ log-squared duality. `free` is the parameter the source
/// potential does not fix: α for an exponential input, σ for a log-squared one.
pub fn exp_log_dual(input: &PotentialSpec, state: &RadialState, free: f64) -> Result<(PotentialSpec, RadialState, ExpLogMap)> {
    input.validate()?;
    if !(free > 0.0) {
        return Err(Error::InvalidInput("free map parameter must be positive".into()));
    }
    let l = state.l_eff();
    match input.form {
        Form::Exponential { xi, sigma } => {
            let k2 = (2.0 / sigma).powi(2);
            let eta = l * (l + 1.0);
            let ell = solve_angular(-k2 * state.energy - 0.25)?;
            let cal_e = -k2 * free * free * xi;
            let map = ExpLogMap { sigma, alpha_scale: free, direction: ExpLogDirection::ExpToLog };
            let vs = RadialState { dimension: 3, l: ell, n_r: state.n_r, energy: cal_e, is_dual_image: !state.is_dual_image };
            Ok((PotentialSpec::log_squared(eta, free), vs, map))
        }
        Form::LogSquared { eta, alpha_scale } => {
            let sigma = free;
            let k2 = (0.5 * sigma).powi(2);
            let xi = -k2 * state.energy / (alpha_scale * alpha_scale);
            let energy = -k2 * (l * (l + 1.0) + 0.25);
            let l_new = solve_angular(eta)?;
            let map = ExpLogMap { sigma, alpha_scale, direction: ExpLogDirection::LogToExp };
            let vs = RadialState { dimension: 3, l: l_new, n_r: state.n_r, energy, is_dual_image: !state.is_dual_image };
            Ok((PotentialSpec::exponential(xi, sigma), vs, map))
        }
        Form::Polynomial { .. } => Err(Error::InvalidInput("exp_log_dual needs an exponential or log-squared potential".into())),
    }
}

/// Residual of V's radial equation after substituting r = g(ρ), v = h(ρ)u(g(ρ))
/// into U's, over two independent local solutions. `g` and `h` return the
/// value and first two derivatives. The result is relative to the largest
/// term at each point.
pub fn transformed_residual<G, H>(
    u: &PotentialSpec,
    su: &RadialState,
    v: &PotentialSpec,
    sv: &RadialState,
    g: G,
    h: H,
    rho: &[f64],
) -> f64
where
    G: Fn(f64) -> (f64, f64, f64),
    H: Fn(f64) -> (f64, f64, f64),
{
    let (cu, cv) = (su.centrifugal(), sv.centrifugal());
    let mut worst: f64 = 0.0;
    for &p in rho {
        let (r, g1, g2) = g(p);
        let (h0, h1, h2) = h(p);
        let q_u = cu / (r * r) + u.eval(r) - su.energy;
        let q_v = cv / (p * p) + v.eval(p) - sv.energy;
        for (u0, u1) in [(1.0, 0.0), (0.0, 1.0)] {
            let u2 = q_u * u0;
            let v0 = h0 * u0;
            let v2 = h2 * u0 + 2.0 * h1 * u1 * g1 + h0 * (u2 * g1 * g1 + u1 * g2);
            let res = v2 - q_v * v0;
            let scale = [v2.abs(), (sv.energy * v0).abs(), (cv / (p * p) * v0).abs(), (v.eval(p) * v0).abs(), (h0 * u2 * g1 * g1).abs(), (2.0 * h1 * u1 * g1).abs(), (h0 * u1 * g2).abs()]
                .into_iter()
                .fold(f64::MIN_POSITIVE, f64::max);
            worst = worst.max(res.abs() / scale);
        }
    }
    worst
}

/// Residual check for a power/polynomial map from U (state `su`) to V.
pub fn power_map_residual(u: &PotentialSpec, su: &RadialState, v: &PotentialSpec, sv: &RadialState, m: &DualityMap, rho: &[f64]) -> f64 {
    let s = m.coord_exponent;
    let w = m.wavefn_prefactor_exponent;
    let g = |p: f64| {
        let e = 1.0 / s;
        let r = p.powf(e);
        (r, e * r / p, e * (e - 1.0) * r / (p * p))
    };
    let h = |p: f64| {
        let h = p.powf(-w);
        (h, -w * h / p, w * (w + 1.0) * h / (p * p))
    };
    transformed_residual(u, su, v, sv, g, h, rho)
}

pub fn exp_log_residual(u: &PotentialSpec, su: &RadialState, v: &PotentialSpec, sv: &RadialState, m: &ExpLogMap, rho: &[f64]) -> f64 {
    transformed_residual(u, su, v, sv, |p| m.source_coordinate(p), |p| m.prefactor(p), rho)
}

/// Rebuilds the original potential from a dual one: the pivot slot of `v`
/// holds the energy-derived coupling and is replaced by ξ = −f·ℰ.
fn source_potential(m: &DualityMap, v: &PotentialSpec, cal_e: f64) -> Result<PotentialSpec> {
    let terms = v.terms()?;
    if m.pivot_index >= terms.len() {
        return Err(Error::PivotOutOfRange { pivot: m.pivot_index, len: terms.len() });
    }
    let inv = m.inverse();
    let f = m.energy_coupling_factor;
    let out = terms
        .iter()
        .enumerate()
        .map(|(i, t)| {
            if i == m.pivot_index {
                Term::new(-f * cal_e, m.pivot_power())
            } else {
                Term::new(t.coeff * f, inv.map_power(t.power))
            }
        })
        .collect();
    Ok(PotentialSpec { form: Form::Polynomial { terms: out }, dimension: m.dims.0 })
}

/// Dual eigenvalue ℰ of V from a spectrum solver for U.
///
/// `solver(n_r, l, U)` returns the n_r-th energy of U at angular momentum l.
/// For a trial ℰ the original U is rebuilt (its pivot coupling is −f·ℰ) and
/// ℰ is accepted when U's energy equals −f·η, η being V's coupling in the
/// pivot slot. `target.energy`, when finite and nonzero, seeds the bracket;
/// otherwise both signs are scanned.
pub fn dual_eigenvalue<S>(solver: S, m: &DualityMap, target: &RadialState, v: &PotentialSpec) -> Result<f64>
where
    S: Fn(usize, f64, &PotentialSpec) -> Result<f64>,
{
    let terms = v.terms()?;
    let pivot = m.pivot_index;
    if pivot >= terms.len() {
        return Err(Error::PivotOutOfRange { pivot, len: terms.len() });
    }
    let f = m.energy_coupling_factor;
    let want = -f * terms[pivot].coeff;
    let inv = m.inverse();
    let l_u = inv.map_l(target.l);
    let resid = |e: f64| -> Result<f64> {
        let u = source_potential(m, v, e)?;
        Ok(solver(target.n_r, l_u, &u)? - want)
    };
    let seeds: Vec<f64> = if target.energy.is_finite() && target.energy != 0.0 {
        vec![target.energy]
    } else {
        vec![1.0, -1.0]
    };
    let (lo, hi) = bracket(&resid, &seeds)?;
    let (flo, fhi) = (resid(lo)?, resid(hi)?);
    let mid = 0.5 * (lo + hi);
    if let Ok(fm) = resid(mid) {
        if fm < flo.min(fhi) - 1e-9 * (flo.abs() + fhi.abs()) || fm > flo.max(fhi) + 1e-9 * (flo.abs() + fhi.abs()) {
            return Err(Error::NonMonotone);
        }
    }
    brent(resid, lo, hi, 1e-15 * lo.abs().max(hi.abs()), 200)
}

/// Expands geometrically around each seed until the residual changes sign.
fn bracket<F>(resid: &F, seeds: &[f64]) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    for &seed in seeds {
        let first = resid(seed).ok();
        if first == Some(0.0) {
            return Ok((seed, seed));
        }
        // walk up and down in |ℰ| from the seed, one step each way per round
        let mut up = first.map(|v| (seed, v));
        let mut down = up;
        for k in 1..=40 {
            let step = 1.25_f64.powi(k);
            for (e, side) in [(seed * step, &mut up), (seed / step, &mut down)] {
                let Ok(val) = resid(e) else {
                    *side = None;
                    continue;
                };
                if val == 0.0 {
                    return Ok((e, e));
                }
                if let Some((pe, pv)) = *side {
                    if pv.signum() != val.signum() {
                        return Ok((pe.min(e), pe.max(e)));
                    }
                }
                *side = Some((e, val));
            }
        }
    }
    Err(Error::NoBracket("dual energy residual keeps one sign".into()))
}
