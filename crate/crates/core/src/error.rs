// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix dimension {dim} exceeds the configured maximum {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("invalid dimension {0}: must be at least 1")]
    EmptyMatrix(usize),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error(
        "eigensolver did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})"
    )]
    NotConverged { sweeps: usize, residual: f64 },

    #[error("site {site} out of range for a chain of {n_sites} sites")]
    SiteOutOfRange { site: usize, n_sites: usize },

    #[error("matrix is not Hermitian: deviation {deviation:e} exceeds tolerance {tol:e}")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("trace {trace} differs from 1 by more than {tol:e}")]
    TraceMismatch { trace: f64, tol: f64 },

    #[error("minimum eigenvalue {min_eigenvalue:e} is below -{tol:e}")]
    NotPositive { min_eigenvalue: f64, tol: f64 },

    #[error("state vector norm {norm} is not 1 within {tol:e}")]
    Unnormalized { norm: f64, tol: f64 },

    #[error("imaginary part {imag:e} of a real expectation value exceeds {tol:e}")]
    ComplexExpectation { imag: f64, tol: f64 },

    #[error("degenerate ground state: the two lowest levels differ by {gap:e}")]
    DegenerateGroundState { gap: f64 },

    #[error("magnetization sector 2Sz = {sector} is empty for {n_sites} sites")]
    EmptySector { sector: i64, n_sites: usize },

    #[error("Hamiltonian does not conserve S_z (commutator norm {norm:e})")]
    SectorNotConserved { norm: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("estimator identity `{identity}` violated by {deviation:e} at t = {t}")]
    IdentityViolated {
        identity: &'static str,
        deviation: f64,
        t: f64,
    },

    #[error("cmx format error at line {line}: {reason}")]
    Cmx { line: usize, reason: String },

    #[error("config error at line {line}: {reason}")]
    ConfigSyntax { line: usize, reason: String },

    #[error("config key `{key}`: {reason}")]
    ConfigValue { key: String, reason: String },

    #[error("{stage} failed at step {step}: {source}")]
    Stage {
        stage: &'static str,
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{what}: {source}")]
    InvalidInput {
        what: String,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn at_stage(self, stage: &'static str, step: usize) -> Self {
        Error::Stage {
            stage,
            step,
            source: Box::new(self),
        }
    }

    pub(crate) fn invalid_input(self, what: impl Into<String>) -> Self {
        Error::InvalidInput {
            what: what.into(),
            source: Box::new(self),
        }
    }

    /// True when the failure stems from user input (configuration, files,
    /// parameters) rather than from the numerics.
    pub fn is_input_error(&self) -> bool {
        match self {
            Error::Stage { source, .. } => source.is_input_error(),
            Error::ConfigSyntax { .. }
            | Error::ConfigValue { .. }
            | Error::Cmx { .. }
            | Error::Io { .. }
            | Error::InvalidInput { .. }
            | Error::InvalidParameter { .. }
            | Error::SiteOutOfRange { .. }
            | Error::EmptySector { .. }
            | Error::SectorNotConserved { .. } => true,
            _ => false,
        }
    }
}
