//! Two-mode bosonic interferometry workbench.
//!
//! Everything lives in fixed total-number sectors of the two-mode Fock space.
//! A sector with `n` bosons carries a spin `J = n/2` via the Schwinger mapping
//!
//! ```text
//! Jx = (a'b + ab')/2,  Jy = (a'b - ab')/2i,  Jz = (a'a - b'b)/2,  N = a'a + b'b
//! ```
//!
//! and every observable used here commutes with `N`, so number-fluctuating
//! inputs are exactly represented as weighted mixtures of per-sector pure
//! states ([`ensemble::Ensemble`]).
//!
//! The crate computes:
//!
//! * per-sector operators and unitaries ([`sector`]),
//! * named input states: relative-phase eigenstates, planar quantum squeezed
//!   (PQS) states, beam-split coherent states, two-well BEC ground states
//!   ([`states`]),
//! * Moore-Penrose normalized spin moments over number-fluctuating ensembles
//!   ([`ensemble`]),
//! * entanglement / squeezing / sensitivity criteria: `E_HZ`, `E_ph`,
//!   `xi_S`, `xi_S,ph`, `eta_ph`, and the phase-noise curve ([`criteria`]),
//! * single-shot counting simulation and two-setting estimation of an
//!   unknown phase ([`measure`]),
//! * parameter sweeps used by the CLI and the figure reproductions
//!   ([`sweep`]).
//!
//! With the default `parallel` feature, ensemble reductions, sweeps and
//! Monte Carlo trials fan out over rayon; disabling it yields a fully
//! sequential build with identical results.
//!
//! ```
//! use pqslab::*;
//!
//! // attractive two-well ground states under Poissonian number noise
//! let spec = SweepSpec::new(
//!     StateKind::Ground,
//!     NumberModel::Poisson { mean: 40.0, tail_mass: 1e-9 },
//!     vec![-0.04], // g/kappa
//! );
//! let row = &run_sweep(&spec).unwrap()[0];
//! assert!(row.report.e_ph < 1.0); // phase entanglement survives the noise
//! assert!(row.report.xi_s_ph_y < 1.0); // and the state is phase squeezed
//! ```

pub mod criteria;
pub mod ensemble;
mod exec;
pub mod measure;
pub mod sector;
pub mod states;
pub mod sweep;
pub mod tridiag;

pub use criteria::{
    cj_asymptote, delta_phi_curve, e_hz, e_ph, eta_ph, report, xi_s, xi_s_ph, CriteriaError,
    CriterionReport, PhaseNoiseCurve, PhaseNoisePoint,
};
pub use ensemble::{
    attach, coherent_product_ensemble, moments, normalized_expectation, poisson_distribution,
    Ensemble, EnsembleError, EnsembleMember, NormalizedMoments, NumberDistribution, SpinAxis,
};
pub use measure::{
    calibration_constant, estimate_phase, outcome_distribution, ratio_estimate, rms_error_scan,
    sample_shots, EstimationResult, MeasureError, MeasurementSetting, Outcome,
    OutcomeDistribution, QuietSetting, RmsScanPoint, ShotRecord,
};
pub use sector::{
    build_hamiltonian, build_jphi, build_spin_operators, generalized_inverse_scalar,
    mode_unitary, mz_input_rotation, su2_rotation, HamiltonianParams, SectorBasis, SectorError,
    SectorOperator, SpinOperators,
};
pub use states::{
    fix_frame, gaussian_pqs_state, ground_state, mz_prepare, optimal_pqs_state, phase_eigenstate,
    su2_coherent, su2_coherent_x, GroundState, PqsOutcome, PqsSpec, SectorState, StateError,
};
pub use sweep::{
    build_input_ensemble, evaluate_point, log_grid, optimize_mz_phase, run_sweep, MzPreparer,
    NumberModel, ResultRow, StateKind, SweepError, SweepSpec,
};
