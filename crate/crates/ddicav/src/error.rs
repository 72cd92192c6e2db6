//! Error type shared by all solver layers.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violates its admissible range (negative rate, r = 0, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The requested quantity is undefined at these parameters (a complex
    /// denominator is exactly zero, the linear response diverges, ...).
    #[error("singular parameters: {0}")]
    SingularParameters(String),

    /// An iterative kernel failed to reach its tolerance.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// A stability eigenvalue sits on the classification threshold.
    #[error("marginal stability: eigenvalue real part {real_part:.3e} within ±{threshold:.0e}")]
    MarginalStability { real_part: f64, threshold: f64 },

    /// Relaxation hit `t_max` with the flow still above tolerance.
    #[error("no convergence by t = {t_max}: rhs norm {rhs_norm:.3e}")]
    NonConvergence { t_max: f64, rhs_norm: f64 },

    /// A trajectory left the physical region (inversion outside [-1, 1]).
    #[error("state out of range: {0}")]
    StateOutOfRange(String),

    /// The Liouvillian null space has numerical dimension > 1.
    #[error("degenerate steady state: null space dimension {0} > 1")]
    DegenerateSteadyState(usize),

    /// The classifier was handed a state that is not a fixed point.
    #[error("not a fixed point: mean-field rhs norm {0:.3e}")]
    NotAFixedPoint(f64),

    /// Error raised while evaluating one point of a sweep.
    #[error("at sweep point {index} (value {value}): {source}")]
    AtGridPoint {
        index: usize,
        value: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Tag an error with the sweep point it occurred at.
    pub fn at_grid_point(self, index: usize, value: f64) -> Self {
        Error::AtGridPoint {
            index,
            value,
            source: Box::new(self),
        }
    }
}
