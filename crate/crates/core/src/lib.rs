//! Certification and exact simulation of networked harmonic oscillators
//! coupled through quantized, sampled velocity feedback over a directed
//! graph.
//!
//! The crate is organized along the pipeline:
//! [`graph`] -> [`spectrum`] -> [`stability`] / [`propagation`] ->
//! [`quantizer`] -> [`simulator`]. Everything is deterministic: fixed
//! eigenvalue ordering, seeded draws, and closed-form propagation with no
//! integrator tolerance.

pub use nalgebra;

pub mod error;
pub mod graph;
pub mod propagation;
pub mod quantizer;
pub mod schur;
pub mod simulator;
pub mod spectrum;
pub mod stability;

pub use error::{Error, Result};
pub use graph::{DirectedGraph, Laplacian};
pub use propagation::{certificate, Certificate, EpsNormFrame, SystemMatrices};
pub use quantizer::{coupling_input, zoom_out_trigger, UniformQuantizer, ZoomSchedule, ZoomStage};
pub use simulator::{
    simulate, step_exact, InitialState, ReferenceOrbit, Sample, Scenario, SimulationTrace,
    ZoomConfig,
};
pub use spectrum::{spectral_decomposition, LaplacianSpectrum};
pub use stability::{
    bilinear_stability_check, complex_quadratic_is_hurwitz, feasible_windows, mode_block,
    mode_quadratic_roots, phi_bound, spectral_radius_reduced, ComplexQuadratic, FeasibilityReport,
    ModeBound,
};

/// The oscillator gain used by the shipped reference scenarios, sqrt(pi/2).
pub fn omega_reference() -> f64 {
    (std::f64::consts::PI / 2.0).sqrt()
}
