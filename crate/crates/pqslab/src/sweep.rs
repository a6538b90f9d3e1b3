//! Parameter sweeps over the interaction ratio: builds the input ensemble at
//! each grid point, optionally applies the Mach-Zehnder preparation, and
//! evaluates every criterion. Used by the CLI subcommands and the
//! reproduction of the published curves.

use std::collections::HashMap;

use thiserror::Error;

use crate::criteria::{self, CriteriaError, CriterionReport, PhaseNoisePoint};
use crate::ensemble::{
    attach, member, moments, Ensemble, EnsembleError, NormalizedMoments, NumberDistribution,
};
use crate::exec;
use crate::measure::wrap_angle;
use crate::sector::{
    generalized_inverse_scalar, mz_input_rotation, HamiltonianParams, SectorOperator,
};
use crate::states::{
    gaussian_pqs_state, ground_state, mz_prepare, optimal_pqs_state, phase_eigenstate,
    su2_coherent, PqsSpec, StateError,
};

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("coupling grid is empty")]
    EmptyGrid,
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Criteria(#[from] CriteriaError),
    #[error("optimal PQS solve did not converge for n = {n}")]
    PqsNotConverged { n: u64 },
}

/// Input state family for a sweep.
#[derive(Clone, Debug)]
pub enum StateKind {
    /// Two-well ground state at the grid coupling g/kappa.
    Ground,
    /// Variationally optimal PQS state.
    PqsOptimal { tol: f64, max_iters: u32 },
    /// Gaussian-envelope PQS state; `sigma_m = None` uses the optimal width.
    PqsGaussian { sigma_m: Option<f64>, theta: f64 },
    /// Relative-phase eigenstate.
    Phase { theta: f64 },
    /// Beam-split coherent state (coherent product under Poisson numbers).
    Coherent { rel_phase: f64 },
}

/// Total-number model of the input.
#[derive(Clone, Copy, Debug)]
pub enum NumberModel {
    Fixed(u64),
    Poisson { mean: f64, tail_mass: f64 },
}

impl NumberModel {
    pub fn distribution(&self) -> Result<NumberDistribution, EnsembleError> {
        match self {
            NumberModel::Fixed(n) => Ok(NumberDistribution::delta(*n)),
            NumberModel::Poisson { mean, tail_mass } => {
                crate::ensemble::poisson_distribution(*mean, *tail_mass)
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            NumberModel::Fixed(n) => *n as f64,
            NumberModel::Poisson { mean, .. } => *mean,
        }
    }
}

/// One sweep: a state family, a number model and a g/kappa grid.
#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub state: StateKind,
    pub number: NumberModel,
    /// g/kappa grid (kappa = 1). Non-Hamiltonian state kinds ignore the
    /// value but still emit one row per grid point.
    pub couplings: Vec<f64>,
    pub mz_prepare: bool,
    /// Fixed input z-rotation before the beamsplitter; `None` optimizes it
    /// per grid point by maximizing |<J~x>| of the prepared ensemble.
    pub mz_input_phase: Option<f64>,
    /// Offsets for the phase-noise column (may be empty).
    pub offsets: Vec<f64>,
    pub exact_covariance: bool,
}

impl SweepSpec {
    pub fn new(state: StateKind, number: NumberModel, couplings: Vec<f64>) -> Self {
        Self {
            state,
            number,
            couplings,
            mz_prepare: false,
            mz_input_phase: None,
            offsets: Vec::new(),
            exact_covariance: false,
        }
    }
}

/// Criterion values (plus optional phase-noise samples) at one grid point.
#[derive(Clone, Debug)]
pub struct ResultRow {
    pub coupling: f64,
    pub mean_n: f64,
    pub report: CriterionReport,
    pub moments: NormalizedMoments,
    /// Input phase actually used when the MZ preparation ran.
    pub mz_phase: Option<f64>,
    pub delta_phi: Vec<PhaseNoisePoint>,
    pub delta_phi_worst: Option<f64>,
}

/// Builds the raw (pre-MZ) input ensemble for one grid point.
pub fn build_input_ensemble(
    kind: &StateKind,
    dist: &NumberDistribution,
    coupling: f64,
) -> Result<Ensemble, SweepError> {
    let ens = match kind {
        StateKind::Ground => {
            let params = HamiltonianParams::from_ratio(coupling);
            attach(|n| Ok(ground_state(n, &params).state), dist)?
        }
        StateKind::PqsOptimal { tol, max_iters } => {
            // a sweep treats non-convergence as a numerical failure
            let members = exec::try_map_slice(dist.support(), |(n, p)| {
                if *n == 0 {
                    return Ok(member(*p, phase_eigenstate(0, 0.0)));
                }
                let o = optimal_pqs_state(*n, *tol, *max_iters).map_err(SweepError::from)?;
                if !o.converged {
                    return Err(SweepError::PqsNotConverged { n: *n });
                }
                Ok(member(*p, o.state))
            })?;
            Ensemble::new(members).map_err(SweepError::from)?
        }
        StateKind::PqsGaussian { sigma_m, theta } => attach(
            |n| {
                let spec = match sigma_m {
                    Some(s) => PqsSpec::new(*s, *theta)?,
                    None => PqsSpec {
                        theta: *theta,
                        ..PqsSpec::optimal_width(n)
                    },
                };
                gaussian_pqs_state(n, &spec)
            },
            dist,
        )?,
        StateKind::Phase { theta } => attach(|n| Ok(phase_eigenstate(n, *theta)), dist)?,
        StateKind::Coherent { rel_phase } => {
            attach(|n| su2_coherent(n, 0.5, *rel_phase), dist)?
        }
    };
    Ok(ens)
}

/// Beamsplitter unitaries (and their conjugated in-plane spin operator) for
/// every sector of a support, built once per sweep.
pub struct MzPreparer {
    sectors: HashMap<u64, MzSector>,
}

struct MzSector {
    unitary: SectorOperator,
    /// U^H (Jx + i Jy) U, used by the input-phase optimizer.
    plane_conjugate: nalgebra::DMatrix<num_complex::Complex64>,
}

impl MzPreparer {
    pub fn for_support(ns: impl IntoIterator<Item = u64>) -> Self {
        let ns: Vec<u64> = ns.into_iter().collect();
        let built = exec::map_slice(&ns, |n| {
            let unitary = mz_input_rotation(*n);
            let ops = crate::sector::build_spin_operators(*n);
            let plane = ops.jx.matrix() + ops.jy.matrix() * num_complex::Complex64::new(0.0, 1.0);
            let plane_conjugate = unitary.matrix().adjoint() * plane * unitary.matrix();
            (
                *n,
                MzSector {
                    unitary,
                    plane_conjugate,
                },
            )
        });
        Self {
            sectors: built.into_iter().collect(),
        }
    }

    fn sector(&self, n: u64) -> &MzSector {
        self.sectors
            .get(&n)
            .expect("sector missing from MZ preparer support")
    }

    pub fn unitary(&self, n: u64) -> &SectorOperator {
        &self.sector(n).unitary
    }

    /// Applies input phase + beamsplitter + frame fixing to every member.
    pub fn prepare(&self, ens: &Ensemble, input_phase: f64) -> Result<Ensemble, SweepError> {
        Ok(ens.map_states(|s| mz_prepare(s, input_phase, self.unitary(s.n())))?)
    }
}

/// Finds the input z-rotation maximizing |<J~x>| of the prepared ensemble:
/// 181-point grid over (-pi, pi] refined by golden section.
pub fn optimize_mz_phase(ens: &Ensemble, preparer: &MzPreparer) -> f64 {
    // The prepared in-plane mean length per member is |sum_d S_d e^{i zeta d}|
    // with S_d the diagonal sums of conj(psi_k) T_kl psi_l, T = U^H (Jx+iJy) U,
    // d = k - l. Building S once per member makes each angle O(dim).
    let tables: Vec<(f64, Vec<num_complex::Complex64>)> =
        exec::map_slice(ens.members(), |member| {
            let n = member.state.n();
            let dim = n as usize + 1;
            let t = &preparer.sector(n).plane_conjugate;
            let amps = member.state.amplitudes();
            let mut s = vec![num_complex::Complex64::ZERO; 2 * dim - 1];
            for k in 0..dim {
                for l in 0..dim {
                    let w = amps[k].conj() * t[(k, l)] * amps[l];
                    s[(k + dim - 1) - l] += w;
                }
            }
            (
                member.weight * generalized_inverse_scalar(n),
                s,
            )
        });
    let objective = |zeta: f64| -> f64 {
        tables
            .iter()
            .map(|(w, s)| {
                let dim = (s.len() + 1) / 2;
                let mut total = num_complex::Complex64::ZERO;
                for (idx, sd) in s.iter().enumerate() {
                    let d = idx as f64 - (dim as f64 - 1.0);
                    total += sd * num_complex::Complex64::from_polar(1.0, zeta * d);
                }
                w * total.norm()
            })
            .sum()
    };
    let grid = 181usize;
    let mut best_k = 0usize;
    let mut best = f64::NEG_INFINITY;
    for k in 0..grid {
        let zeta = -std::f64::consts::PI + std::f64::consts::TAU * k as f64 / grid as f64;
        let v = objective(zeta);
        if v > best {
            best = v;
            best_k = k;
        }
    }
    let step = std::f64::consts::TAU / grid as f64;
    let center = -std::f64::consts::PI + step * best_k as f64;
    let (mut lo, mut hi) = (center - step, center + step);
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let mut f1 = objective(x1);
    let mut f2 = objective(x2);
    for _ in 0..60 {
        if f1 > f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = objective(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = objective(x2);
        }
    }
    wrap_angle(if f1 > f2 { x1 } else { x2 })
}

/// Evaluates one grid point: input ensemble, optional MZ preparation,
/// criteria and phase-noise samples.
pub fn evaluate_point(
    spec: &SweepSpec,
    dist: &NumberDistribution,
    preparer: Option<&MzPreparer>,
    coupling: f64,
) -> Result<ResultRow, SweepError> {
    let input = build_input_ensemble(&spec.state, dist, coupling)?;
    let local_preparer;
    let preparer = match (spec.mz_prepare, preparer) {
        (true, None) => {
            // standalone call without a shared preparer: build one here
            local_preparer = MzPreparer::for_support(dist.support().iter().map(|(n, _)| *n));
            Some(&local_preparer)
        }
        (_, p) => p,
    };
    let (ens, mz_phase) = match (spec.mz_prepare, preparer) {
        (true, Some(prep)) => {
            let zeta = spec
                .mz_input_phase
                .unwrap_or_else(|| optimize_mz_phase(&input, prep));
            (prep.prepare(&input, zeta)?, Some(zeta))
        }
        _ => (input, None),
    };
    let m = moments(&ens);
    let report = criteria::report(&m)?;
    let (delta_phi, delta_phi_worst) = if spec.offsets.is_empty() {
        (Vec::new(), None)
    } else {
        let curve = criteria::delta_phi_curve(&m, &spec.offsets, spec.exact_covariance)?;
        (curve.points, Some(curve.worst_case))
    };
    Ok(ResultRow {
        coupling,
        mean_n: m.mean_n,
        report,
        moments: m,
        mz_phase,
        delta_phi,
        delta_phi_worst,
    })
}

/// Runs the whole grid; rows come back in grid order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<ResultRow>, SweepError> {
    if spec.couplings.is_empty() {
        return Err(SweepError::EmptyGrid);
    }
    let dist = spec.number.distribution()?;
    let preparer = spec
        .mz_prepare
        .then(|| MzPreparer::for_support(dist.support().iter().map(|(n, _)| *n)));
    let rows = exec::try_map_slice(&spec.couplings, |coupling| {
        evaluate_point(spec, &dist, preparer.as_ref(), *coupling)
    })?;
    Ok(rows)
}

/// Log-spaced grid of `count` magnitudes between `lo` and `hi` (same sign).
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(count >= 1);
    assert!(lo != 0.0 && hi != 0.0 && (lo > 0.0) == (hi > 0.0), "log grid needs one sign");
    if count == 1 {
        return vec![lo];
    }
    let sign = if lo > 0.0 { 1.0 } else { -1.0 };
    let (a, b) = (lo.abs().ln(), hi.abs().ln());
    (0..count)
        .map(|i| sign * (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}
