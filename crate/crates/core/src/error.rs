use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// The energy coincides with the propagator pole of a mesh node.
    #[error("energy {energy} sits on the (rotated) cut at mesh node {node}; shift the mesh or change theta")]
    SingularDenominator { energy: Complex64, node: usize },

    #[error("linear system is numerically singular (condition estimate {condition:.3e}); energy is too close to a pole")]
    NearSingular { condition: f64 },

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("contour rotation insufficient: {0}")]
    ContourInsufficient(String),

    #[error("residue matrix is not rank one (relative residual {residual:.3e})")]
    Factorization { residual: f64 },

    #[error("null space of dimension other than one at E = {energy}")]
    DegenerateRoot { energy: Complex64 },

    #[error("root {energy} lies on the rotated continuum of channel {channel}; it is a discretised continuum state, not a pole")]
    ContinuumRoot { energy: Complex64, channel: usize },

    #[error("overflow guard exceeded: {0}")]
    Overflow(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Innermost error with the stage labels peeled off.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }

    pub fn is_non_convergence(&self) -> bool {
        matches!(
            self.root(),
            Error::NoConvergence { .. } | Error::ContourInsufficient(_) | Error::ContinuumRoot { .. } | Error::NearSingular { .. }
        )
    }
}

/// Attaches the name of the pipeline stage to an error.
pub trait StageExt<T> {
    fn stage(self, stage: impl Into<String>) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: impl Into<String>) -> Result<T> {
        self.map_err(|source| Error::Stage {
            stage: stage.into(),
            source: Box::new(source),
        })
    }
}
