//! Entanglement, squeezing and sensitivity criteria over normalized moments.
//!
//! * `E_HZ  = (var Jx + var Jy) / (<N>/2)`         mode entanglement, raw spins
//! * `E_ph  = (var J~x + var J~y) / (<N+>/2)`      mode entanglement, immune to
//!   number fluctuations
//! * `xi_S^{Y/Z}    = sqrt(n) dJ^{Y/Z} / |<Jx>|`   particle entanglement, fixed n only
//! * `xi_S,ph^{Y/Z} = sqrt(<N>) dJ~^{Y/Z} / |<J~x>|`
//! * `eta_ph = sqrt(<N><N+> E_ph / 2) / |<J~x>|`   worst-case sub-shot sensitivity
//!   over the quiet quadrants
//!
//! Values below one witness the corresponding resource.

use thiserror::Error;

use crate::ensemble::NormalizedMoments;

#[derive(Debug, Error)]
pub enum CriteriaError {
    #[error("criterion undefined: ensemble has zero mean particle number")]
    ZeroMeanNumber,
    #[error("criterion undefined: ensemble is all vacuum (<N+> = 0)")]
    AllVacuum,
    #[error("criterion undefined: |<J~x>| = 0")]
    ZeroMeanSpin,
    #[error("spin squeezing xi_S is defined only for a fixed particle number")]
    FixedNumberOnly,
}

/// Hillery-Zubairy sum criterion on raw spins; < 1 witnesses mode entanglement
/// at fixed particle number.
pub fn e_hz(m: &NormalizedMoments) -> Result<f64, CriteriaError> {
    if m.mean_n <= 0.0 {
        return Err(CriteriaError::ZeroMeanNumber);
    }
    Ok((m.var_jx + m.var_jy) / (m.mean_n / 2.0))
}

/// Number-normalized phase-entanglement criterion; < 1 witnesses mode
/// entanglement for arbitrary number fluctuations.
pub fn e_ph(m: &NormalizedMoments) -> Result<f64, CriteriaError> {
    if m.mean_n_plus <= 0.0 {
        return Err(CriteriaError::AllVacuum);
    }
    Ok((m.var_jx_t + m.var_jy_t) / (m.mean_n_plus / 2.0))
}

/// Fixed-number spin squeezing (xi_y, xi_z). Refuses ensembles that are not
/// concentrated on the single sector `fixed_n`.
pub fn xi_s(m: &NormalizedMoments, fixed_n: u64) -> Result<(f64, f64), CriteriaError> {
    if m.fixed_n != Some(fixed_n) {
        return Err(CriteriaError::FixedNumberOnly);
    }
    if m.mean_jx.abs() <= 0.0 {
        return Err(CriteriaError::ZeroMeanSpin);
    }
    let root_n = (fixed_n as f64).sqrt();
    Ok((
        root_n * m.var_jy.max(0.0).sqrt() / m.mean_jx.abs(),
        root_n * m.var_jz.max(0.0).sqrt() / m.mean_jx.abs(),
    ))
}

/// Normalized spin squeezing (xi_y, xi_z); < 1 witnesses particle
/// entanglement in the presence of number fluctuations.
pub fn xi_s_ph(m: &NormalizedMoments) -> Result<(f64, f64), CriteriaError> {
    if m.mean_jx_t.abs() <= 0.0 {
        return Err(CriteriaError::ZeroMeanSpin);
    }
    let root_n = m.mean_n.max(0.0).sqrt();
    Ok((
        root_n * m.var_jy_t.max(0.0).sqrt() / m.mean_jx_t.abs(),
        root_n * m.var_jz_t.max(0.0).sqrt() / m.mean_jx_t.abs(),
    ))
}

/// Phase-sensitivity measure: < 1 guarantees sub-shot sensitivity for every
/// unknown phase using the two-orthogonal-setting strategy. Algebraically
/// sqrt(<N> (var J~x + var J~y)) / |<J~x>|.
pub fn eta_ph(m: &NormalizedMoments) -> Result<f64, CriteriaError> {
    if m.mean_n_plus <= 0.0 {
        return Err(CriteriaError::AllVacuum);
    }
    if m.mean_jx_t.abs() <= 0.0 {
        return Err(CriteriaError::ZeroMeanSpin);
    }
    let e = e_ph(m)?;
    Ok((m.mean_n * m.mean_n_plus * e / 2.0).sqrt() / m.mean_jx_t.abs())
}

/// Asymptotic lower bound on var(Jx) + var(Jy): 3 (2J)^(2/3) / 8.
pub fn cj_asymptote(j: f64) -> f64 {
    assert!(j > 0.0, "spin must be positive");
    3.0 * (2.0 * j).powf(2.0 / 3.0) / 8.0
}

/// One point of the phase-noise curve; `delta_phi` is `None` at the
/// divergent offsets 0 and pi.
#[derive(Clone, Copy, Debug)]
pub struct PhaseNoisePoint {
    /// Offset phi - theta' between the unknown phase and the reference.
    pub offset: f64,
    pub delta_phi: Option<f64>,
}

/// Phase uncertainty versus measurement offset, plus the worst case over the
/// quiet quadrants (attained at offset pi/4).
#[derive(Clone, Debug)]
pub struct PhaseNoiseCurve {
    pub points: Vec<PhaseNoisePoint>,
    pub worst_case: f64,
}

/// (Delta phi)^2 = [var(J~x) cot^2(offset) + var(J~y)] / <J~x>^2 per offset.
/// With `exact_covariance` the full rotated variance
/// cos^2 var_x + sin^2 var_y + 2 sin cos cov replaces the numerator.
pub fn delta_phi_curve(
    m: &NormalizedMoments,
    offsets: &[f64],
    exact_covariance: bool,
) -> Result<PhaseNoiseCurve, CriteriaError> {
    if m.mean_jx_t.abs() <= 0.0 {
        return Err(CriteriaError::ZeroMeanSpin);
    }
    let denom = m.mean_jx_t * m.mean_jx_t;
    let eval = |offset: f64| -> Option<f64> {
        let s = offset.sin();
        if s.abs() < 1e-12 {
            return None; // divergent at 0 and pi
        }
        let c = offset.cos();
        let num = if exact_covariance {
            (c * c * m.var_jx_t + s * s * m.var_jy_t + 2.0 * s * c * m.cov_jxjy_t) / (s * s)
        } else {
            let cot = c / s;
            cot * cot * m.var_jx_t + m.var_jy_t
        };
        Some((num / denom).max(0.0).sqrt())
    };
    let points = offsets
        .iter()
        .map(|&offset| PhaseNoisePoint {
            offset,
            delta_phi: eval(offset),
        })
        .collect();
    let worst_case = ((m.var_jx_t + m.var_jy_t) / denom).max(0.0).sqrt();
    Ok(PhaseNoiseCurve { points, worst_case })
}

/// Every criterion evaluated on one set of moments. Fixed-number squeezing
/// values are present only for delta number distributions.
#[derive(Clone, Debug)]
pub struct CriterionReport {
    pub e_hz: f64,
    pub e_ph: f64,
    pub xi_s_y: Option<f64>,
    pub xi_s_z: Option<f64>,
    pub xi_s_ph_y: f64,
    pub xi_s_ph_z: f64,
    pub eta_ph: f64,
    pub entangled_modes: bool,
    pub entangled_particles: bool,
    pub subshot_all_angles: bool,
}

/// Assembles the full report; errors if the mean number, <N+>, or the mean
/// spin vanishes.
pub fn report(m: &NormalizedMoments) -> Result<CriterionReport, CriteriaError> {
    let e_hz_v = e_hz(m)?;
    let e_ph_v = e_ph(m)?;
    let (xi_y, xi_z) = xi_s_ph(m)?;
    let eta = eta_ph(m)?;
    let fixed = m
        .fixed_n
        .and_then(|n| xi_s(m, n).ok());
    Ok(CriterionReport {
        e_hz: e_hz_v,
        e_ph: e_ph_v,
        xi_s_y: fixed.map(|x| x.0),
        xi_s_z: fixed.map(|x| x.1),
        xi_s_ph_y: xi_y,
        xi_s_ph_z: xi_z,
        eta_ph: eta,
        entangled_modes: e_ph_v < 1.0,
        entangled_particles: xi_y.min(xi_z) < 1.0,
        subshot_all_angles: eta < 1.0,
    })
}
