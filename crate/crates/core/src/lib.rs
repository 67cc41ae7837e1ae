//! Numerical laboratory for normalized ground states of the Choquard
//! equation -Delta u + lambda u = (|x|^{-1} * |u|^p) |u|^{p-2} u on radial
//! grids in R^3: two independent solvers, the variational layer, sector
//! spectra of the linearized operators, branch continuation in p, and
//! radial rearrangement checks.

pub mod energy;
pub mod error;
pub mod grid;
pub mod interp;
pub mod linalg;
pub mod potential;
pub mod rearrange;
pub mod solver;
pub mod spectrum;
pub mod sweep;
pub mod util;

pub use energy::{
    c1, c2_lower_bound, calibrate_hls_constant, energy, gagliardo_bound_holds, hls_quotient,
    kinetic_energy, mass_scaling_exponent, scale_minimize, scale_minimize_kd, sobolev_constant,
    DiagnosticConstants, EnergyBreakdown,
};
pub use error::{ChoquardError, Result};
pub use grid::{
    apply_sector_laplacian, gradient, integrate, norm_h1, norm_lq, sector_laplacian,
    QuadratureKind, QuadratureRule, RadialGrid, RadialProfile, SectorLaplacian,
};
pub use potential::{apply_resolvent, coulomb_energy, multipole_potential, newton_potential};
pub use rearrange::{rearrange, rearrangement_inequalities, RearrangementReport};
pub use solver::{
    check_state_invariants, decay_fit, euler_lagrange_gradient, ground_state_from_json,
    ground_state_to_json, h1_distance, pohozaev_report, solve, solve_fixpoint, solve_flow,
    DecayFit, GroundState, InitialGuess, Method, PohozaevReport, SolverConfig,
};
pub use spectrum::{
    assemble, coercivity_constant, ift_operators_check, low_spectrum, nondegeneracy_report,
    spectrum_report_to_json, IftReport, NondegeneracyReport, OperatorKind, SectorOperator,
    SpectralConfig, SpectrumReport,
};
pub use sweep::{
    convergence_study, kernel_tracking, sweep, sweep_to_csv, uniqueness_probe, ConvergenceStudy,
    KernelTracking, SweepConfig, SweepRecord, UniquenessProbe,
};
