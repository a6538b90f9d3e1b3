//! Single-shot interferometric counting and two-setting phase estimation.
//!
//! A measurement at reference phase theta counts both output ports; the
//! outcomes are joint eigenvalues (n, m) of (N, J^(phi-theta)) with
//! N± = N/2 ± J^(phi-theta). The normalized reading per shot is m n+,
//! averaging to <J~(phi-theta)>.
//!
//! An unknown phase needs two orthogonal settings. The pair is read at
//! offsets D and D + pi/2 (D = phi - theta'), so the model is
//! r0 = c cos(D), r1 = -c sin(D), c = |<a'b N+>|. The least-squares
//! location atan2(-r1, r0) picks the quiet-quadrant reading, which is then
//! inverted alone for the final estimate.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::ensemble::{moments, Ensemble, SpinAxis};
use crate::exec;
use crate::sector::{generalized_inverse_scalar, ladder, SectorBasis};
use crate::tridiag::SymTridiag;

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("ratio estimate needs at least one shot record")]
    NoRecords,
    #[error("calibration constant must be positive (got {0})")]
    BadCalibration(f64),
    #[error("phase undetermined: both readings are zero")]
    UndeterminedPhase,
    #[error("rms scan needs at least 100 trials (got {0})")]
    TooFewTrials(usize),
    #[error("rms scan needs at least one shot per setting")]
    NoShots,
    #[error("ensemble has no usable mean spin for calibration")]
    ZeroCalibration,
}

/// Unknown phase on mode b and fixed reference phase on mode a; the
/// measured operator depends only on the offset phi - theta.
#[derive(Clone, Copy, Debug)]
pub struct MeasurementSetting {
    pub phi: f64,
    pub theta: f64,
}

impl MeasurementSetting {
    pub fn new(phi: f64, theta: f64) -> Self {
        Self { phi, theta }
    }

    /// phi - theta reduced to (-pi, pi].
    pub fn offset(&self) -> f64 {
        wrap_angle(self.phi - self.theta)
    }
}

pub(crate) fn wrap_angle(a: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    let mut x = a % two_pi;
    if x <= -std::f64::consts::PI {
        x += two_pi;
    } else if x > std::f64::consts::PI {
        x -= two_pi;
    }
    x
}

/// Both output counts of one shot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShotRecord {
    pub n_plus: u64,
    pub n_minus: u64,
}

impl ShotRecord {
    pub fn n(&self) -> u64 {
        self.n_plus + self.n_minus
    }

    /// Half the count difference: the J^(phi-theta) eigenvalue.
    pub fn m(&self) -> f64 {
        (self.n_plus as f64 - self.n_minus as f64) / 2.0
    }

    /// Normalized reading m n+; zero for empty shots.
    pub fn reading(&self) -> f64 {
        self.m() * generalized_inverse_scalar(self.n())
    }
}

/// Joint outcome probabilities over (n, m) for one ensemble and setting.
#[derive(Clone, Debug)]
pub struct OutcomeDistribution {
    outcomes: Vec<Outcome>,
}

#[derive(Clone, Copy, Debug)]
pub struct Outcome {
    pub n: u64,
    /// Index of the eigenvalue m = m_index - n/2 (ascending).
    pub m_index: usize,
    pub prob: f64,
}

impl Outcome {
    pub fn m(&self) -> f64 {
        self.m_index as f64 - self.n as f64 / 2.0
    }

    pub fn record(&self) -> ShotRecord {
        ShotRecord {
            n_plus: self.m_index as u64,
            n_minus: self.n - self.m_index as u64,
        }
    }

    pub fn reading(&self) -> f64 {
        self.m() * generalized_inverse_scalar(self.n)
    }
}

impl OutcomeDistribution {
    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn total_probability(&self) -> f64 {
        self.outcomes.iter().map(|o| o.prob).sum()
    }

    /// Probability-weighted mean of the normalized reading.
    pub fn mean_reading(&self) -> f64 {
        self.outcomes.iter().map(|o| o.prob * o.reading()).sum()
    }

    /// Probability-weighted variance of the normalized reading.
    pub fn reading_variance(&self) -> f64 {
        let mu = self.mean_reading();
        self.outcomes
            .iter()
            .map(|o| o.prob * (o.reading() - mu) * (o.reading() - mu))
            .sum()
    }

    fn sampler(&self) -> Sampler<'_> {
        let mut cdf = Vec::with_capacity(self.outcomes.len());
        let mut acc = 0.0;
        for o in &self.outcomes {
            acc += o.prob;
            cdf.push(acc);
        }
        if let Some(last) = cdf.last_mut() {
            *last = last.max(1.0);
        }
        Sampler {
            cdf,
            outcomes: &self.outcomes,
        }
    }
}

struct Sampler<'a> {
    cdf: Vec<f64>,
    outcomes: &'a [Outcome],
}

impl Sampler<'_> {
    fn draw(&self, rng: &mut ChaCha8Rng) -> ShotRecord {
        let u: f64 = rng.random();
        let idx = self.cdf.partition_point(|c| *c < u);
        self.outcomes[idx.min(self.outcomes.len() - 1)].record()
    }
}

/// Projects every member onto the eigenbasis of J^(phi-theta) in its sector.
/// J^phi = D Jx D^H with D = diag(e^{-i phi m}), so one real tridiagonal
/// eigenbasis per sector serves every angle.
pub fn outcome_distribution(ens: &Ensemble, setting: &MeasurementSetting) -> OutcomeDistribution {
    let offset = setting.offset();
    let per_member: Vec<Vec<Outcome>> = exec::map_slice(ens.members(), |member| {
        let n = member.state.n();
        let dim = n as usize + 1;
        if dim == 1 {
            return vec![Outcome {
                n,
                m_index: 0,
                prob: member.weight,
            }];
        }
        let basis = SectorBasis::new(n);
        let off: Vec<f64> = (0..dim - 1).map(|k| ladder(n, k) / 2.0).collect();
        let t = SymTridiag::new(vec![0.0; dim], off);
        let amps = member.state.amplitudes();
        (0..dim)
            .map(|col| {
                // Jx eigenvalues are exactly m = col - J
                let v = t.eigenvector(basis.m(col), &[]);
                let mut overlap = Complex64::ZERO;
                for (k, vk) in v.iter().enumerate() {
                    // eigenvector of J^phi is e^{-i phi m_k} v_k
                    let phase = Complex64::from_polar(1.0, offset * basis.m(k));
                    overlap += phase * vk * amps[k];
                }
                Outcome {
                    n,
                    m_index: col,
                    prob: member.weight * overlap.norm_sqr(),
                }
            })
            .collect()
    });
    let outcomes = per_member.into_iter().flatten().collect();
    OutcomeDistribution { outcomes }
}

/// I.i.d. shots from the outcome distribution, reproducible for a fixed seed.
pub fn sample_shots(
    ens: &Ensemble,
    setting: &MeasurementSetting,
    shots: usize,
    seed: u64,
) -> Vec<ShotRecord> {
    let dist = outcome_distribution(ens, setting);
    let sampler = dist.sampler();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..shots).map(|_| sampler.draw(&mut rng)).collect()
}

/// Mean normalized reading over the records.
pub fn ratio_estimate(records: &[ShotRecord]) -> Result<f64, MeasureError> {
    if records.is_empty() {
        return Err(MeasureError::NoRecords);
    }
    Ok(records.iter().map(|r| r.reading()).sum::<f64>() / records.len() as f64)
}

/// Which of the two orthogonal settings landed in a quiet quadrant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuietSetting {
    First,
    Second,
}

/// Estimate from one orthogonal reading pair. `phi_hat` is relative to the
/// first setting's reference theta'.
#[derive(Clone, Copy, Debug)]
pub struct EstimationResult {
    pub r0: f64,
    pub r1: f64,
    /// Final estimate: the quiet-quadrant reading inverted alone.
    pub phi_hat: f64,
    /// Joint least-squares location atan2(-r1, r0) used to pick the quadrant.
    pub phi_hat_joint: f64,
    pub chosen_setting: QuietSetting,
    /// Total shots consumed by the pair; filled by the scan driver.
    pub shots_used: u64,
}

/// Inverts the reading pair (r0, r1) = (c cos D, -c sin D). The joint
/// least-squares solution locates the quadrant; the quiet reading (the one
/// with |derivative| >= |c|/sqrt(2)) is then inverted for the estimate.
pub fn estimate_phase(r0: f64, r1: f64, calibration: f64) -> Result<EstimationResult, MeasureError> {
    if !(calibration > 0.0) {
        return Err(MeasureError::BadCalibration(calibration));
    }
    if r0 == 0.0 && r1 == 0.0 {
        return Err(MeasureError::UndeterminedPhase);
    }
    let cos_e = (r0 / calibration).clamp(-1.0, 1.0);
    let sin_e = (-r1 / calibration).clamp(-1.0, 1.0);
    let joint = sin_e.atan2(cos_e);
    let (chosen, phi_hat) = if sin_e.abs() >= cos_e.abs() {
        // first setting reads the steep cosine fringe
        let magnitude = cos_e.acos();
        let sign = if sin_e >= 0.0 { 1.0 } else { -1.0 };
        (QuietSetting::First, sign * magnitude)
    } else {
        let principal = sin_e.asin();
        let phi = if cos_e >= 0.0 {
            principal
        } else {
            std::f64::consts::PI - principal
        };
        (QuietSetting::Second, wrap_angle(phi))
    };
    Ok(EstimationResult {
        r0,
        r1,
        phi_hat,
        phi_hat_joint: joint,
        chosen_setting: chosen,
        shots_used: 0,
    })
}

/// Calibration constant |<a'b N+>|: the in-plane mean length of the
/// normalized spin.
pub fn calibration_constant(ens: &Ensemble) -> Result<f64, MeasureError> {
    let x = crate::ensemble::normalized_expectation(ens, SpinAxis::X);
    let y = crate::ensemble::normalized_expectation(ens, SpinAxis::Y);
    let c = x.hypot(y);
    if c <= 0.0 {
        return Err(MeasureError::ZeroCalibration);
    }
    Ok(c)
}

/// Monte Carlo scan row: RMS error of the estimator at one true phase.
#[derive(Clone, Copy, Debug)]
pub struct RmsScanPoint {
    pub phi: f64,
    pub rms: f64,
    /// Per-shot-normalized error rms * sqrt(shots per setting).
    pub rms_normalized: f64,
    /// Single-shot Delta-phi at the quiet offset of the true phase.
    pub analytic_delta_phi: f64,
    /// analytic_delta_phi / sqrt(shots per setting).
    pub analytic_rms: f64,
    /// Fraction of trials whose quiet reading was the first setting.
    pub quiet_first_fraction: f64,
}

/// Repeats the two-setting estimation `trials` times per true phase and
/// compares the RMS error against the analytic phase noise. Trials draw
/// fresh shots for both settings; per-trial seeds derive from (seed, phase
/// index, trial) so results do not depend on scheduling.
pub fn rms_error_scan(
    ens: &Ensemble,
    true_phis: &[f64],
    shots_per_setting: usize,
    seed: u64,
    trials: usize,
) -> Result<Vec<RmsScanPoint>, MeasureError> {
    if trials < 100 {
        return Err(MeasureError::TooFewTrials(trials));
    }
    if shots_per_setting == 0 {
        return Err(MeasureError::NoShots);
    }
    let cal = calibration_constant(ens)?;
    let m = moments(ens);
    let mut rows = Vec::with_capacity(true_phis.len());
    for (phase_index, &phi) in true_phis.iter().enumerate() {
        // offsets D and D + pi/2 realize the (cos, -sin) reading model
        let dist0 = outcome_distribution(ens, &MeasurementSetting::new(phi, 0.0));
        let dist1 = outcome_distribution(
            ens,
            &MeasurementSetting::new(phi + std::f64::consts::FRAC_PI_2, 0.0),
        );
        let results: Vec<(f64, bool)> = exec::map_indices(trials, |trial| {
            let s0 = dist0.sampler();
            let s1 = dist1.sampler();
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, phase_index, trial));
            let mut sum0 = 0.0;
            for _ in 0..shots_per_setting {
                sum0 += s0.draw(&mut rng).reading();
            }
            let mut sum1 = 0.0;
            for _ in 0..shots_per_setting {
                sum1 += s1.draw(&mut rng).reading();
            }
            let r0 = sum0 / shots_per_setting as f64;
            let r1 = sum1 / shots_per_setting as f64;
            match estimate_phase(r0, r1, cal) {
                Ok(est) => (
                    wrap_angle(est.phi_hat - phi),
                    est.chosen_setting == QuietSetting::First,
                ),
                Err(_) => (std::f64::consts::PI, false),
            }
        });
        let mse = results.iter().map(|(e, _)| e * e).sum::<f64>() / trials as f64;
        let quiet_first =
            results.iter().filter(|(_, first)| *first).count() as f64 / trials as f64;
        let rms = mse.sqrt();
        // analytic column at the deterministic quiet offset of the true phase
        let quiet_offset = if phi.sin().abs() >= phi.cos().abs() {
            phi
        } else {
            phi - std::f64::consts::FRAC_PI_2
        };
        let analytic = crate::criteria::delta_phi_curve(&m, &[quiet_offset], false)
            .ok()
            .and_then(|c| c.points[0].delta_phi)
            .unwrap_or(f64::INFINITY);
        rows.push(RmsScanPoint {
            phi,
            rms,
            rms_normalized: rms * (shots_per_setting as f64).sqrt(),
            analytic_delta_phi: analytic,
            analytic_rms: analytic / (shots_per_setting as f64).sqrt(),
            quiet_first_fraction: quiet_first,
        });
    }
    Ok(rows)
}

fn derive_seed(seed: u64, phase_index: usize, trial: usize) -> u64 {
    // splitmix64 over a packed key
    let mut z = seed
        .wrapping_add(0x9e37_79b9_7f4a_7c15u64.wrapping_mul(phase_index as u64 + 1))
        .wrapping_add(0x517c_c1b7_2722_0a95u64.wrapping_mul(trial as u64 + 1));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
