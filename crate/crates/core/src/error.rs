use thiserror::Error;

/// Errors raised across the crate.
///
/// Numerical failures (singularities, non-convergence) are kept apart from
/// input validation so the command-line front end can map them onto distinct
/// exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point lies within the exclusion radius of collision {letter} (s = {side:e})")]
    CollisionSingularity { letter: u8, side: f64 },

    #[error("the (phi, theta) chart is singular at the pole phi = {phi}")]
    PoleSingularity { phi: f64 },

    #[error("finite-difference step {0} exceeds the admissible maximum 1e-2")]
    StepTooLarge(f64),

    #[error("point is outside the end chart of collision {0}")]
    OutOfChart(u8),

    #[error("integrator step size collapsed at t = {t} (h = {h:e})")]
    StepFailure { t: f64, h: f64 },

    #[error("equator angle {0} is within the exclusion of a collision point")]
    AtCollision(f64),

    #[error("periodic word of odd length {0} admits no consistent alternating signs")]
    OddPeriodicLength(usize),

    #[error("no window shift removes the stutter at the periodic join")]
    NoValidShift,

    #[error("word {0} is untied (winds around a single end)")]
    UntiedWord(String),

    #[error("word {0} is tied; expected a two-letter alternation")]
    TiedWord(String),

    #[error("syzygy word of the loop changed from {expected} to {found}")]
    HomotopyEscape { expected: String, found: String },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("probe left the collision-free patch: {0}")]
    PatchViolation(String),

    #[error("vanishing separation between bodies {0} and {1}")]
    Singularity(u8, u8),

    #[error("collision bound violated: {0}")]
    BoundViolated(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    /// True for failures of the numerics rather than of the caller's input.
    pub fn is_numerical(&self) -> bool {
        !matches!(
            self,
            Error::Invalid(_)
                | Error::OddPeriodicLength(_)
                | Error::UntiedWord(_)
                | Error::TiedWord(_)
                | Error::NoValidShift
                | Error::StepTooLarge(_)
                | Error::OutOfChart(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
