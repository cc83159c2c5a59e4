//! Discrete path-integral transition amplitudes for networks of coupled
//! harmonic-oscillator sources.
//!
//! The crate follows one pipeline: a lattice action matrix ([`action`]) and its
//! closed-form Gaussian integral, checked against brute-force quadrature
//! ([`oracle`]); the continuum Green's function of two coupled oscillators
//! ([`green`]); and the four-source twin-slit amplitude together with the
//! distances obtained by matching it to free Schrödinger propagation
//! ([`twin_slit`]).

pub mod action;
pub mod amplitude;
pub mod band;
pub mod green;
pub mod network;
pub mod oracle;
pub mod twin_slit;

pub use action::{
    build_action_matrix, gaussian_evaluation, quadratic_form, raw_action_matrix, symmetrize,
    transition_amplitude, ActionError, ActionMatrix, GaussianEvaluation, RootBranch,
};
pub use amplitude::{intensity, wrap_phase, Amplitude, PhasorSum};
pub use band::{BandError, BandLu, BandMatrix, LogDet};
pub use green::{
    freq_kernels, green_residual, pairwise_phase, self_interaction_phase, time_domain_green,
    GreenError, GreenKernels, GreenMatrix, ResidualGrid, SpectralSource,
};
pub use network::{OscillatorNetwork, ValidationError};
pub use oracle::{
    brute_force_amplitude, compare_with_oracle, continuum_convergence_report, ConvergenceReport,
    ConvergenceRow, OracleComparison, OracleError, QuadratureSpec, TestFunction,
    MAX_BRUTE_FORCE_DIM,
};
pub use twin_slit::{
    coupling_coefficient, coupling_for_coefficient, equidistant_amplitude, four_source_amplitude,
    infer_distance, pattern_scan, phase_sweep, schrodinger_propagator, schrodinger_two_path,
    DistanceResult, ImpulseModel, PatternRow, PatternScan, SchrodingerSide, SchrodingerTwoPath,
    SourceDynamics, TwinSlitError, TwinSlitScenario, TwoPath,
};
