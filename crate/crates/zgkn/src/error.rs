use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("inadmissible input: {0}")]
    Inadmissible(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("start point is an equilibrium (offset must be positive)")]
    StartAtEquilibrium,

    #[error("step size underflow at t = {t} (state {y:?})")]
    StepUnderflow { t: f64, y: Vec<f64> },

    #[error("non-finite state at t = {t}; last good state {last_good:?}")]
    NonFinite { t: f64, last_good: Vec<f64> },

    #[error("integration budget of {0} steps exhausted")]
    StepBudget(usize),

    #[error("orbit never reached the terminal band (x = {x}, boundary at {x_plus})")]
    Unclassified { x: f64, x_plus: f64 },

    #[error("no winding jump in bracket [{lo}, {hi}]: windings {w_lo} and {w_hi}, target {target}")]
    NoJump { lo: f64, hi: f64, w_lo: i64, w_hi: i64, target: i64 },

    #[error("bisection budget of {0} iterations exhausted")]
    BisectionBudget(usize),

    #[error("orbits do not overlap inside the area window")]
    NoOverlap,

    #[error("fixed-point iteration did not converge in {iterations} iterations (last |dE| = {delta_e:e})")]
    NotConverged { iterations: usize, delta_e: f64, last_energy: f64, last_lambda: f64 },

    #[error("unresolved root cluster after {0} grid refinements")]
    RootCluster(usize),
}
