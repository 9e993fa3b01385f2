// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("invalid rational {0:?}, expected \"p/q\"")]
    Rational(String),
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("schema violation: {0}")]
    Schema(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChainError {
    #[error("dimension {requested} exceeds the configured cap {cap}")]
    SizeLimit { requested: usize, cap: usize },
    #[error("degree error: {0}")]
    Degree(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("incompatible cochain values: {0}")]
    IncompatibleValues(String),
    #[error("dimension must be at least 1")]
    EmptyDimension,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircleError {
    #[error("expected {expected} generators, found {found}")]
    GeneratorCount { expected: usize, found: usize },
    #[error("generator {index} has {found} factors, expected {expected}")]
    FactorCount {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("homomorphism contains reflections; apply o2_reduction first")]
    ContainsReflections,
    #[error("generator images {0} and {1} do not commute")]
    NonCommuting(usize, usize),
    #[error("factor {0} image is a reflection subgroup larger than {{1, sigma}}")]
    ReflectionSubgroup(usize),
    #[error("audit requires m >= 2, got m = {0}")]
    AuditUndefined(usize),
    #[error("cusp homomorphism has m = {found}, audit expects m = {expected}")]
    FactorMismatch { expected: usize, found: usize },
    #[error("bieberbach divisor must be positive")]
    Divisor,
    #[error(transparent)]
    Chain(#[from] ChainError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LorentzError {
    #[error("matrix must be {expected}x{expected}, found {rows}x{cols}")]
    Shape {
        expected: usize,
        rows: usize,
        cols: usize,
    },
    #[error("matrix does not preserve the quadratic form (residual {0:.3e})")]
    NotLorentz(f64),
    #[error("determinant {0} is not 1")]
    Determinant(f64),
    #[error("U is not special orthogonal (residual {0:.3e})")]
    NonOrthogonal(f64),
    #[error("vector length {found} does not match expected {expected}")]
    VectorLength { expected: usize, found: usize },
    #[error("numerical degeneracy: {0}")]
    Degenerate(String),
    #[error("input elements {0} and {1} do not commute")]
    NonCommuting(usize, usize),
    #[error("no common invariant structure found: {0}")]
    NoStructure(String),
    #[error("matrix does not stabilize the ray R(e1 - e_(n+1)) (residual {0:.3e})")]
    NotInP(f64),
    #[error("dimension n must be at least 2")]
    Dimension,
    #[error("element {0} swaps the sheets of the hyperboloid")]
    NotIdentityComponent(usize),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HypVolError {
    #[error("shape parameter {0} is degenerate (0 or 1)")]
    DegenerateShape(String),
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("point is not on the hyperboloid or light cone: {0}")]
    InvalidPoint(String),
    #[error("three-dimensional volumes require ideal vertices")]
    InteriorUnsupported,
    #[error("expected {expected} points, found {found}")]
    PointCount { expected: usize, found: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DehnError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("slope ({0},{1}) is not a coprime pair")]
    NonCoprimeSlope(i64, i64),
    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("shape {index} degenerated (z = {z})")]
    Degeneration { index: usize, z: String },
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error(transparent)]
    Volume(#[from] HypVolError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransferError {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("coverage gap at {0}")]
    CoverageGap(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error(transparent)]
    Chain(#[from] ChainError),
}

/// Umbrella error used by callers that mix modules (the CLI, mostly).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Circle(#[from] CircleError),
    #[error(transparent)]
    Lorentz(#[from] LorentzError),
    #[error(transparent)]
    HypVol(#[from] HypVolError),
    #[error(transparent)]
    Dehn(#[from] DehnError),
    #[error(transparent)]
    Transfer(#[from] TransferError),
}

impl Error {
    /// True for failures of a numerical procedure rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Lorentz(LorentzError::Degenerate(_))
                | Error::Lorentz(LorentzError::NoStructure(_))
                | Error::Dehn(DehnError::NonConvergence { .. })
                | Error::Dehn(DehnError::Degeneration { .. })
        )
    }
}

impl From<serde_json::Error> for ParseError {
    fn from(err: serde_json::Error) -> Self {
        ParseError::Json(err.to_string())
    }
}
