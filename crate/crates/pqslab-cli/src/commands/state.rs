//! `pqslab state`: JSON dump of one sector state with amplitudes and the
//! normalized moments of its pure ensemble.

use std::path::Path;

use serde::Serialize;

use super::AppError;
use crate::output::emit;

#[derive(Serialize)]
struct StateDump {
    kind: String,
    n: u64,
    coupling: Option<f64>,
    sigma_m: Option<f64>,
    theta: Option<f64>,
    cj: Option<f64>,
    amplitudes: Vec<Amplitude>,
    moments: MomentsDump,
    report: Option<ReportDump>,
}

#[derive(Serialize)]
struct Amplitude {
    m: f64,
    re: f64,
    im: f64,
    abs2: f64,
    phase: f64,
}

#[derive(Serialize)]
struct MomentsDump {
    mean_jx_t: f64,
    mean_jy_t: f64,
    mean_jz_t: f64,
    var_jx_t: f64,
    var_jy_t: f64,
    var_jz_t: f64,
    cov_jxjy_t: f64,
    mean_n: f64,
    mean_n_plus: f64,
    mean_jx: f64,
    var_jx: f64,
    var_jy: f64,
    var_jz: f64,
}

#[derive(Serialize)]
struct ReportDump {
    e_hz: f64,
    e_ph: f64,
    xi_s_y: Option<f64>,
    xi_s_z: Option<f64>,
    xi_s_ph_y: f64,
    xi_s_ph_z: f64,
    eta_ph: f64,
}

pub struct StateArgs {
    pub kind: String,
    pub n: u64,
    pub coupling: f64,
    pub sigma_m: Option<f64>,
    pub theta: f64,
    pub pqs_tol: f64,
    pub pqs_max_iters: u32,
}

pub fn run(args: &StateArgs, out: Option<&Path>) -> Result<(), AppError> {
    let mut cj = None;
    let (state, coupling, sigma_m, theta) = match args.kind.as_str() {
        "phase" => (
            pqslab::phase_eigenstate(args.n, args.theta),
            None,
            None,
            Some(args.theta),
        ),
        "coherent" => (pqslab::su2_coherent_x(args.n), None, None, None),
        "pqs-gaussian" => {
            let spec = match args.sigma_m {
                Some(s) => pqslab::PqsSpec::new(s, args.theta)?,
                None => pqslab::PqsSpec {
                    theta: args.theta,
                    ..pqslab::PqsSpec::optimal_width(args.n)
                },
            };
            (
                pqslab::gaussian_pqs_state(args.n, &spec)?,
                None,
                Some(spec.sigma_m),
                Some(args.theta),
            )
        }
        "pqs-optimal" => {
            let o = pqslab::optimal_pqs_state(args.n, args.pqs_tol, args.pqs_max_iters)?;
            if !o.converged {
                return Err(AppError::Numerical(format!(
                    "optimal PQS solve did not converge for n = {}",
                    args.n
                )));
            }
            cj = Some(o.cj);
            (o.state, None, None, None)
        }
        "ground" => (
            pqslab::ground_state(args.n, &pqslab::HamiltonianParams::from_ratio(args.coupling))
                .state,
            Some(args.coupling),
            None,
            None,
        ),
        other => {
            return Err(AppError::Config(format!(
                "unknown state kind `{other}` (expected phase|coherent|pqs-gaussian|pqs-optimal|ground)"
            )))
        }
    };

    let basis = state.basis();
    // +0.0 folds negative zeros so dumps are visually stable
    let clean = |x: f64| x + 0.0;
    let amplitudes = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(k, a)| Amplitude {
            m: basis.m(k),
            re: clean(a.re),
            im: clean(a.im),
            abs2: a.norm_sqr(),
            phase: clean(a.arg()),
        })
        .collect();
    let m = pqslab::moments(&pqslab::ensemble::Ensemble::pure(state));
    let report = pqslab::report(&m).ok().map(|r| ReportDump {
        e_hz: r.e_hz,
        e_ph: r.e_ph,
        xi_s_y: r.xi_s_y,
        xi_s_z: r.xi_s_z,
        xi_s_ph_y: r.xi_s_ph_y,
        xi_s_ph_z: r.xi_s_ph_z,
        eta_ph: r.eta_ph,
    });
    let dump = StateDump {
        kind: args.kind.clone(),
        n: args.n,
        coupling,
        sigma_m,
        theta,
        cj,
        amplitudes,
        moments: MomentsDump {
            mean_jx_t: m.mean_jx_t,
            mean_jy_t: m.mean_jy_t,
            mean_jz_t: m.mean_jz_t,
            var_jx_t: m.var_jx_t,
            var_jy_t: m.var_jy_t,
            var_jz_t: m.var_jz_t,
            cov_jxjy_t: m.cov_jxjy_t,
            mean_n: m.mean_n,
            mean_n_plus: m.mean_n_plus,
            mean_jx: m.mean_jx,
            var_jx: m.var_jx,
            var_jy: m.var_jy,
            var_jz: m.var_jz,
        },
        report,
    };
    let text = format!("{}\n", serde_json::to_string_pretty(&dump)?);
    emit(out, "state.json", &text)?;
    Ok(())
}
