use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("series did not converge within {terms} terms")]
    NonConvergent { terms: usize },
    #[error("alpha = {0} is a negative integer; (1+alpha)_n vanishes")]
    InvalidAlpha(f64),
    #[error("b = {0} is a non-positive integer")]
    InvalidB(f64),
    #[error("asymptotic series terms grow before term {0}")]
    DivergentTail(usize),
    #[error("|z| = {z} is outside the asymptotic region (needs |z|^2 >= {needed})")]
    OutsideAsymptoticRegion { z: f64, needed: f64 },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("quadrature did not reach tolerance (estimate {estimate:e}, level {level})")]
    QuadratureFailed { estimate: f64, level: usize },
    #[error("integrand diverged: {0}")]
    IntegrandDiverged(String),
    #[error("indeterminate connection coefficient: {0}")]
    Indeterminate(String),
    #[error("matching is ill-conditioned (ratio {0:e})")]
    IllConditioned(f64),
    #[error("exponent -2 is the pole of the duality map")]
    PoleAtMinusThree,
    #[error("expected a single-term potential, got {0} terms")]
    MultiTermInput(usize),
    #[error("pivot {pivot} out of range for {len} terms")]
    PivotOutOfRange { pivot: usize, len: usize },
    #[error("no real angular momentum solves l(l+1) = {0}")]
    UnsolvableAngular(f64),
    #[error("no sign change found: {0}")]
    NoBracket(String),
    #[error("solver is not monotone over the bracket")]
    NonMonotone,
    #[error("potential is not reducible to the biconfluent Heun equation: {0}")]
    NotHeunReducible(String),
    #[error("no eigenvalue found in the window")]
    NoneFound,
    #[error("reduction failed: {0}")]
    ReductionFailed(String),
    #[error("unsupported potential family: {0}")]
    UnsupportedFamily(String),
    #[error("grid too coarse: two-grid estimates {coarse} and {fine} differ by more than 1%")]
    GridTooCoarse { coarse: f64, fine: f64 },
    #[error("phase extraction unstable: {a} vs {b}")]
    MatchUnstable { a: f64, b: f64 },
    #[error("no classically allowed region")]
    NoAllowedRegion,
    #[error("turning point not bracketed")]
    TurningPointNotBracketed,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// True for errors caused by the caller's input rather than by numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidAlpha(_)
                | Error::InvalidB(_)
                | Error::PreconditionViolated(_)
                | Error::PoleAtMinusThree
                | Error::MultiTermInput(_)
                | Error::PivotOutOfRange { .. }
                | Error::UnsolvableAngular(_)
                | Error::NotHeunReducible(_)
                | Error::UnsupportedFamily(_)
                | Error::InvalidInput(_)
                | Error::OutsideAsymptoticRegion { .. }
                | Error::NoAllowedRegion
        )
    }
}
