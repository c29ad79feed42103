//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph must have at least 2 nodes, got {0}")]
    TooFewNodes(usize),

    #[error("self-loop on node {0}")]
    SelfLoop(usize),

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("edge ({0}, {1}) has nonpositive weight {2}")]
    NonpositiveWeight(usize, usize, f64),

    #[error("edge ({0}, {1}) references a node outside 1..={2}")]
    NodeOutOfRange(usize, usize, usize),

    #[error("graph file, line {line}: {msg}")]
    GraphFile { line: usize, msg: String },

    #[error("graph is not strongly connected")]
    NotStronglyConnected,

    #[error("left null vector has a component of modulus <= {0:.1e}; strong connectivity is numerically broken")]
    XiNotPositive(f64),

    #[error("eigensolver failed: {0}")]
    EigensolverFailure(String),

    #[error("spectrum is empty")]
    EmptySpectrum,

    #[error("eigenvalue {0} has nonpositive real part")]
    NonpositiveRealPart(nalgebra::Complex<f64>),

    #[error("sin(omega*tau) = {0:.3e}; tau is on a sampling boundary k*pi/omega")]
    DegenerateSampling(f64),

    #[error("flow horizon dt = {0} must be positive")]
    NonpositiveDt(f64),

    #[error("spectrum/Laplacian dimension mismatch: {0} vs {1}")]
    BasisMismatch(usize, usize),

    #[error("reduced map has spectral radius {0:.6} >= 1; no contraction certificate exists")]
    NotContractive(f64),

    #[error("epsilon {eps:.3e} cannot bring the induced norm below 1 (got {norm:.6})")]
    EpsilonTooSmall { eps: f64, norm: f64 },

    #[error("quantizer range M = {m} must exceed the error bound Delta = {delta}")]
    RangeBelowDelta { m: f64, delta: f64 },

    #[error("adjustable zooming requires M > 2*Delta (M = {m}, Delta = {delta})")]
    RangeBelowTwoDelta { m: f64, delta: f64 },

    #[error("zoom factor mu = {0} must be positive")]
    NonpositiveMu(f64),

    #[error("M = {m} is below the admissible threshold {threshold:.4} (theta >= 1)")]
    MBelowThreshold { m: f64, threshold: f64 },

    #[error("contraction factor theta = {0:.4} >= 1; certificate invalid")]
    ThetaNotContractive(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error(
        "tau = {0} is outside every feasibility window; pass allow_infeasible to simulate anyway"
    )]
    InfeasibleTau(f64),

    #[error("seeded initial state requires a valid certificate: {0}")]
    SeedNeedsCertificate(String),

    #[error("explicit initial state must have {expected} entries per field, got {got}")]
    BadInitialState { expected: usize, got: usize },

    #[error("horizon {0} is not a positive multiple of tau {1}")]
    BadHorizon(f64, f64),
}

pub type Result<T> = std::result::Result<T, Error>;
