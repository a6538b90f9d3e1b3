//! `pqslab estimate`: Monte Carlo two-setting phase estimation against the
//! analytic sensitivity, emitted as a JSON report.

use std::path::Path;

use serde::Serialize;

use super::AppError;
use crate::config::{parse_setup, Config};
use crate::output::emit;

#[derive(Serialize)]
struct EstimateReport {
    state: String,
    number: String,
    coupling: f64,
    mz_prepare: bool,
    mz_input_phase: Option<f64>,
    calibration: f64,
    shots_per_setting: usize,
    trials: usize,
    seed: u64,
    rows: Vec<EstimateRow>,
}

#[derive(Serialize)]
struct EstimateRow {
    phi: f64,
    rms: f64,
    rms_normalized: f64,
    analytic_delta_phi: f64,
    analytic_rms: f64,
    quiet_first_fraction: f64,
}

pub fn run(
    cfg: &Config,
    out: Option<&Path>,
    seed: u64,
    shots_flag: Option<usize>,
    trials_flag: Option<usize>,
) -> Result<(), AppError> {
    let setup = parse_setup(cfg)?;
    if setup.spec.couplings.len() != 1 {
        return Err(AppError::Config(
            "estimate needs a single coupling (set `couplings = <value>`)".into(),
        ));
    }
    let coupling = setup.spec.couplings[0];
    let shots = match shots_flag {
        Some(s) => s,
        None => cfg.usize_or("shots", 10_000)?,
    };
    let trials = match trials_flag {
        Some(t) => t,
        None => cfg.usize_or("trials", 200)?,
    };
    let default_phis = vec![
        std::f64::consts::FRAC_PI_4,
        std::f64::consts::FRAC_PI_2,
        3.0 * std::f64::consts::FRAC_PI_4,
    ];
    let phis = cfg.f64_list("phis")?.unwrap_or(default_phis);
    if phis.is_empty() {
        return Err(AppError::Config("field `phis` is empty".into()));
    }

    let dist = setup.spec.number.distribution()?;
    let input = pqslab::build_input_ensemble(&setup.spec.state, &dist, coupling)?;
    let (ens, mz_phase) = if setup.spec.mz_prepare {
        let preparer = pqslab::MzPreparer::for_support(dist.support().iter().map(|(n, _)| *n));
        let zeta = setup
            .spec
            .mz_input_phase
            .unwrap_or_else(|| pqslab::optimize_mz_phase(&input, &preparer));
        (preparer.prepare(&input, zeta)?, Some(zeta))
    } else {
        (input, None)
    };

    let calibration = pqslab::calibration_constant(&ens)?;
    let scan = pqslab::rms_error_scan(&ens, &phis, shots, seed, trials)?;
    let report = EstimateReport {
        state: cfg.str_or("state", "ground").to_string(),
        number: cfg.str_or("number", "poisson").to_string(),
        coupling,
        mz_prepare: setup.spec.mz_prepare,
        mz_input_phase: mz_phase,
        calibration,
        shots_per_setting: shots,
        trials,
        seed,
        rows: scan
            .iter()
            .map(|r| EstimateRow {
                phi: r.phi,
                rms: r.rms,
                rms_normalized: r.rms_normalized,
                analytic_delta_phi: r.analytic_delta_phi,
                analytic_rms: r.analytic_rms,
                quiet_first_fraction: r.quiet_first_fraction,
            })
            .collect(),
    };
    let text = format!("{}\n", serde_json::to_string_pretty(&report)?);
    emit(out, "estimate.json", &text)?;
    Ok(())
}
