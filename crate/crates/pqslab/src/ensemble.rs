//! Number-fluctuating ensembles and Moore-Penrose normalized moments.
//!
//! An [`Ensemble`] is a weighted list of per-sector pure states representing
//! a number-diagonal density operator. Normalized spin operators are
//! J~ = J N+ with N+ the generalized inverse of the number operator
//! (eigenvalue 1/n for n > 0, 0 on the vacuum), so expectations decompose
//! over sectors as sums weighted by n+ and (n+)^2.

use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::exec;
use crate::sector::generalized_inverse_scalar;
use crate::states::{su2_coherent, SectorState, SpinMoments, StateError};

#[derive(Debug, Error)]
pub enum EnsembleError {
    #[error("weights must be non-negative and sum to 1 within 1e-9 (sum = {sum})")]
    BadWeights { sum: f64 },
    #[error("number distribution has duplicate entry for n = {n}")]
    DuplicateSector { n: u64 },
    #[error("poisson mean must be positive (got {0})")]
    InvalidMean(f64),
    #[error("tail mass must lie in (0, 1e-6] (got {0})")]
    InvalidTailMass(f64),
    #[error("distribution support is empty")]
    EmptySupport,
    #[error("intensities must be non-negative and not both zero")]
    InvalidIntensities,
    #[error("state factory failed for n = {n}: {source}")]
    Factory {
        n: u64,
        #[source]
        source: StateError,
    },
}

/// Probability weights over total particle number.
#[derive(Clone, Debug)]
pub struct NumberDistribution {
    support: Vec<(u64, f64)>,
}

impl NumberDistribution {
    /// Validates weights (non-negative, unit sum within 1e-9, distinct n)
    /// and sorts the support by n.
    pub fn new(mut support: Vec<(u64, f64)>) -> Result<Self, EnsembleError> {
        if support.is_empty() {
            return Err(EnsembleError::EmptySupport);
        }
        support.sort_by_key(|(n, _)| *n);
        for w in support.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(EnsembleError::DuplicateSector { n: w[0].0 });
            }
        }
        let sum: f64 = support.iter().map(|(_, p)| *p).sum();
        if support.iter().any(|(_, p)| *p < 0.0) || (sum - 1.0).abs() > 1e-9 {
            return Err(EnsembleError::BadWeights { sum });
        }
        Ok(Self { support })
    }

    /// All probability on a single n.
    pub fn delta(n: u64) -> Self {
        Self {
            support: vec![(n, 1.0)],
        }
    }

    pub fn support(&self) -> &[(u64, f64)] {
        &self.support
    }

    pub fn mean(&self) -> f64 {
        self.support.iter().map(|(n, p)| *n as f64 * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        self.support
            .iter()
            .map(|(n, p)| p * (*n as f64 - mu) * (*n as f64 - mu))
            .sum()
    }
}

/// Poisson weights truncated to the smallest contiguous range around the
/// mean holding all but `tail_mass` of the probability, then renormalized.
pub fn poisson_distribution(mean: f64, tail_mass: f64) -> Result<NumberDistribution, EnsembleError> {
    if !(mean > 0.0) || !mean.is_finite() {
        return Err(EnsembleError::InvalidMean(mean));
    }
    if !(tail_mass > 0.0 && tail_mass <= 1e-6) {
        return Err(EnsembleError::InvalidTailMass(tail_mass));
    }
    let ln_pmf = |k: u64| -> f64 { k as f64 * mean.ln() - mean - ln_gamma(k as f64 + 1.0) };
    let pmf = |k: u64| -> f64 { ln_pmf(k).exp() };
    let mode = mean.floor() as u64;
    let mut lo = mode;
    let mut hi = mode;
    let mut total = pmf(mode);
    // expand greedily toward the larger boundary pmf
    while total < 1.0 - tail_mass {
        let p_lo = if lo > 0 { pmf(lo - 1) } else { -1.0 };
        let p_hi = pmf(hi + 1);
        if p_hi >= p_lo {
            hi += 1;
            total += p_hi;
        } else {
            lo -= 1;
            total += p_lo;
        }
    }
    let mut support: Vec<(u64, f64)> = (lo..=hi).map(|n| (n, pmf(n))).collect();
    let sum: f64 = support.iter().map(|(_, p)| *p).sum();
    for (_, p) in support.iter_mut() {
        *p /= sum;
    }
    NumberDistribution::new(support)
}

/// One weighted member of a number-diagonal mixture.
#[derive(Clone, Debug)]
pub struct EnsembleMember {
    pub weight: f64,
    pub state: SectorState,
}

/// Weighted collection of per-sector pure states (block-diagonal density
/// operator). Members are kept sorted by ascending n, preserving insertion
/// order within one n, so reductions have a fixed order.
#[derive(Clone, Debug)]
pub struct Ensemble {
    members: Vec<EnsembleMember>,
}

impl Ensemble {
    pub fn new(mut members: Vec<EnsembleMember>) -> Result<Self, EnsembleError> {
        if members.is_empty() {
            return Err(EnsembleError::EmptySupport);
        }
        let sum: f64 = members.iter().map(|m| m.weight).sum();
        if members.iter().any(|m| m.weight < 0.0) || (sum - 1.0).abs() > 1e-9 {
            return Err(EnsembleError::BadWeights { sum });
        }
        members.sort_by_key(|m| m.state.n());
        Ok(Self { members })
    }

    /// Single pure state at fixed n.
    pub fn pure(state: SectorState) -> Self {
        Self {
            members: vec![EnsembleMember {
                weight: 1.0,
                state,
            }],
        }
    }

    pub fn members(&self) -> &[EnsembleMember] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// The common n if every member lives in the same sector.
    pub fn fixed_n(&self) -> Option<u64> {
        let n0 = self.members.first()?.state.n();
        self.members
            .iter()
            .all(|m| m.state.n() == n0)
            .then_some(n0)
    }

    /// Applies a per-sector transformation to every member.
    pub fn map_states<F>(&self, f: F) -> Result<Ensemble, EnsembleError>
    where
        F: Fn(&SectorState) -> Result<SectorState, StateError> + Sync + Send,
    {
        let states = exec::try_map_slice(&self.members, |m| {
            f(&m.state).map_err(|source| EnsembleError::Factory {
                n: m.state.n(),
                source,
            })
        })?;
        let members = self
            .members
            .iter()
            .zip(states)
            .map(|(m, state)| EnsembleMember {
                weight: m.weight,
                state,
            })
            .collect();
        Ensemble::new(members)
    }
}

/// Builds one member per support point of `dist` from a state factory.
pub fn attach<F>(factory: F, dist: &NumberDistribution) -> Result<Ensemble, EnsembleError>
where
    F: Fn(u64) -> Result<SectorState, StateError> + Sync + Send,
{
    let members = exec::try_map_slice(dist.support(), |(n, p)| {
        let state = factory(*n).map_err(|source| EnsembleError::Factory { n: *n, source })?;
        debug_assert_eq!(state.n(), *n, "factory returned a state for the wrong sector");
        Ok(EnsembleMember {
            weight: *p,
            state,
        })
    })?;
    Ensemble::new(members)
}

/// Block-diagonal reduction of the coherent product |alpha>|beta>:
/// Poissonian total number with mean alpha_sq + beta_sq, and in each sector
/// the SU(2) coherent state set by the intensity ratio and relative phase.
/// Exact for every number-conserving observable.
pub fn coherent_product_ensemble(
    alpha_sq: f64,
    beta_sq: f64,
    rel_phase: f64,
    tail_mass: f64,
) -> Result<Ensemble, EnsembleError> {
    if alpha_sq < 0.0 || beta_sq < 0.0 || alpha_sq + beta_sq <= 0.0 {
        return Err(EnsembleError::InvalidIntensities);
    }
    let mean = alpha_sq + beta_sq;
    let p = alpha_sq / mean;
    let dist = poisson_distribution(mean, tail_mass)?;
    attach(|n| su2_coherent(n, p, rel_phase), &dist)
}

/// Spin directions measurable by the interferometer.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpinAxis {
    X,
    Y,
    Z,
    /// cos(angle) Jx + sin(angle) Jy.
    Phi(f64),
}

/// First and second moments of the normalized spins J~ = J N+, with raw
/// (un-normalized) counterparts used by the fixed-number criteria.
#[derive(Clone, Copy, Debug)]
pub struct NormalizedMoments {
    pub mean_jx_t: f64,
    pub mean_jy_t: f64,
    pub mean_jz_t: f64,
    pub var_jx_t: f64,
    pub var_jy_t: f64,
    pub var_jz_t: f64,
    /// Symmetrized covariance <{J~x, J~y}/2> - <J~x><J~y>.
    pub cov_jxjy_t: f64,
    pub mean_n: f64,
    pub mean_n_plus: f64,
    pub mean_jx: f64,
    pub var_jx: f64,
    pub var_jy: f64,
    pub var_jz: f64,
    /// Set when every member shares one sector.
    pub fixed_n: Option<u64>,
}

/// <J~ axis> = sum of weight * n+ * <J axis> over members.
pub fn normalized_expectation(ens: &Ensemble, axis: SpinAxis) -> f64 {
    let per: Vec<(f64, SpinMoments)> = exec::map_slice(ens.members(), |m| {
        (
            m.weight * generalized_inverse_scalar(m.state.n()),
            m.state.spin_moments(),
        )
    });
    per.iter()
        .map(|(w, m)| {
            w * match axis {
                SpinAxis::X => m.ex,
                SpinAxis::Y => m.ey,
                SpinAxis::Z => m.ez,
                SpinAxis::Phi(a) => a.cos() * m.ex + a.sin() * m.ey,
            }
        })
        .sum()
}

/// All normalized and raw moments of the ensemble. Member contributions are
/// evaluated in parallel and reduced in the fixed member order.
pub fn moments(ens: &Ensemble) -> NormalizedMoments {
    let per: Vec<SpinMoments> = exec::map_slice(ens.members(), |m| m.state.spin_moments());
    let mut acc = Accumulator::default();
    for (member, m) in ens.members().iter().zip(per.iter()) {
        let w = member.weight;
        let n = member.state.n();
        let np = generalized_inverse_scalar(n);
        acc.add(w, n as f64, np, m);
    }
    acc.finish(ens.fixed_n())
}

#[derive(Default)]
struct Accumulator {
    tx: f64,
    ty: f64,
    tz: f64,
    txx: f64,
    tyy: f64,
    tzz: f64,
    txy: f64,
    rx: f64,
    ry: f64,
    rz: f64,
    rxx: f64,
    ryy: f64,
    rzz: f64,
    n: f64,
    np: f64,
}

impl Accumulator {
    fn add(&mut self, w: f64, n: f64, np: f64, m: &SpinMoments) {
        self.tx += w * np * m.ex;
        self.ty += w * np * m.ey;
        self.tz += w * np * m.ez;
        self.txx += w * np * np * m.exx;
        self.tyy += w * np * np * m.eyy;
        self.tzz += w * np * np * m.ezz;
        self.txy += w * np * np * m.exy_sym;
        self.rx += w * m.ex;
        self.ry += w * m.ey;
        self.rz += w * m.ez;
        self.rxx += w * m.exx;
        self.ryy += w * m.eyy;
        self.rzz += w * m.ezz;
        self.n += w * n;
        self.np += w * np;
    }

    fn finish(self, fixed_n: Option<u64>) -> NormalizedMoments {
        NormalizedMoments {
            mean_jx_t: self.tx,
            mean_jy_t: self.ty,
            mean_jz_t: self.tz,
            var_jx_t: self.txx - self.tx * self.tx,
            var_jy_t: self.tyy - self.ty * self.ty,
            var_jz_t: self.tzz - self.tz * self.tz,
            cov_jxjy_t: self.txy - self.tx * self.ty,
            mean_n: self.n,
            mean_n_plus: self.np,
            mean_jx: self.rx,
            var_jx: self.rxx - self.rx * self.rx,
            var_jy: self.ryy - self.ry * self.ry,
            var_jz: self.rzz - self.rz * self.rz,
            fixed_n,
        }
    }
}

/// Per-sector conditional variances: the right-hand side of the normalized
/// variance inequality sum_n P_n (n+)^2 var_n(J axis). Members sharing one n
/// are merged into the conditional mixture first.
pub fn conditional_variance_bound(ens: &Ensemble, axis: SpinAxis) -> f64 {
    let mut by_n: Vec<(u64, f64, f64, f64)> = Vec::new(); // (n, P_n, sum w*<O>, sum w*<O^2>)
    for member in ens.members() {
        let m = member.state.spin_moments();
        let (e1, e2) = match axis {
            SpinAxis::X => (m.ex, m.exx),
            SpinAxis::Y => (m.ey, m.eyy),
            SpinAxis::Z => (m.ez, m.ezz),
            SpinAxis::Phi(a) => {
                let c = a.cos();
                let s = a.sin();
                (
                    c * m.ex + s * m.ey,
                    c * c * m.exx + s * s * m.eyy + 2.0 * s * c * m.exy_sym,
                )
            }
        };
        let n = member.state.n();
        match by_n.last_mut() {
            Some(row) if row.0 == n => {
                row.1 += member.weight;
                row.2 += member.weight * e1;
                row.3 += member.weight * e2;
            }
            _ => by_n.push((n, member.weight, member.weight * e1, member.weight * e2)),
        }
    }
    by_n.iter()
        .map(|(n, p, s1, s2)| {
            if *p <= 0.0 {
                return 0.0;
            }
            let np = generalized_inverse_scalar(*n);
            let mean = s1 / p;
            let second = s2 / p;
            p * np * np * (second - mean * mean)
        })
        .sum()
}

/// Shorthand constructor for a weighted member.
pub fn member(weight: f64, state: SectorState) -> EnsembleMember {
    EnsembleMember { weight, state }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{phase_eigenstate, su2_coherent_x};
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    #[test]
    fn poisson_examples() {
        // P(0) = e^{-1} before truncation renormalization
        let d = poisson_distribution(1.0, 1e-9).unwrap();
        let p0 = d.support().iter().find(|(n, _)| *n == 0).unwrap().1;
        assert!((p0 - (-1.0f64).exp()).abs() < 1e-9);
        // mean 100: std of support within 0.5% of 10
        let d = poisson_distribution(100.0, 1e-12).unwrap();
        assert!((d.variance().sqrt() / 10.0 - 1.0).abs() < 0.005);
        let total: f64 = d.support().iter().map(|(_, p)| p).sum();
        assert!((total - 1.0).abs() < 1e-12);
        // support stays within roughly mean + 8.5 sigma
        let hi = d.support().last().unwrap().0;
        assert!(hi <= 100 + 85);
        assert!(poisson_distribution(100.0, 1e-3).is_err());
        assert!(poisson_distribution(-1.0, 1e-9).is_err());
    }

    #[test]
    fn distribution_validation() {
        assert!(NumberDistribution::new(vec![(2, 0.5), (2, 0.5)]).is_err());
        assert!(NumberDistribution::new(vec![(2, 0.7), (3, 0.7)]).is_err());
        assert!(NumberDistribution::new(vec![(2, 0.5), (4, 0.5)]).is_ok());
    }

    #[test]
    fn attach_examples() {
        let single = attach(|n| Ok(phase_eigenstate(n, 0.0)), &NumberDistribution::delta(5)).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single.fixed_n(), Some(5));

        let two = NumberDistribution::new(vec![(2, 0.5), (4, 0.5)]).unwrap();
        let ens = attach(|n| Ok(phase_eigenstate(n, 0.0)), &two).unwrap();
        assert_eq!(ens.len(), 2);
        assert_relative_eq!(ens.members()[0].weight, 0.5);
        assert_eq!(ens.fixed_n(), None);
    }

    #[test]
    fn normalized_expectation_examples() {
        // all-vacuum ensemble gives 0 for every spin
        let vac = Ensemble::pure(phase_eigenstate(0, 0.0));
        assert_eq!(normalized_expectation(&vac, SpinAxis::X), 0.0);
        // fixed-n coherent: <J~x> = 1/2 exactly
        let coh = Ensemble::pure(su2_coherent_x(40));
        assert_relative_eq!(
            normalized_expectation(&coh, SpinAxis::X),
            0.5,
            epsilon = 1e-12
        );
        // two-sector mix keeps the value
        let two = NumberDistribution::new(vec![(2, 0.5), (4, 0.5)]).unwrap();
        let ens = attach(|n| Ok(su2_coherent_x(n)), &two).unwrap();
        assert_relative_eq!(
            normalized_expectation(&ens, SpinAxis::X),
            0.5,
            epsilon = 1e-12
        );
    }

    #[test]
    fn fixed_n_normalization_is_scalar() {
        let n = 50u64;
        let ens = Ensemble::pure(su2_coherent_x(n));
        let m = moments(&ens);
        assert_relative_eq!(m.var_jx_t, m.var_jx / (n * n) as f64, epsilon = 1e-15);
        assert_relative_eq!(m.var_jy_t, 1.0 / (4.0 * n as f64), epsilon = 1e-12);
        assert_eq!(m.fixed_n, Some(n));
        assert!(m.mean_n_plus <= 1.0);
    }

    #[test]
    fn moments_interpolate_linearly_in_weights() {
        let a = su2_coherent_x(6);
        let b = phase_eigenstate(9, 0.3);
        let mk = |w: f64| {
            Ensemble::new(vec![member(w, a.clone()), member(1.0 - w, b.clone())]).unwrap()
        };
        let m0 = moments(&mk(0.0));
        let m1 = moments(&mk(1.0));
        let mh = moments(&mk(0.25));
        assert_relative_eq!(
            mh.mean_jx_t,
            0.25 * m1.mean_jx_t + 0.75 * m0.mean_jx_t,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            mh.mean_n,
            0.25 * m1.mean_n + 0.75 * m0.mean_n,
            epsilon = 1e-12
        );
    }

    #[test]
    fn coherent_product_symmetry_and_edges() {
        let ens = coherent_product_ensemble(8.0, 8.0, 0.0, 1e-9).unwrap();
        for m in ens.members() {
            let want = su2_coherent_x(m.state.n());
            for (a, b) in m.state.amplitudes().iter().zip(want.amplitudes()) {
                assert!((a - b).norm() < 1e-12);
            }
        }
        let onesided = coherent_product_ensemble(8.0, 0.0, 0.0, 1e-9).unwrap();
        for m in onesided.members() {
            let amp = m.state.amplitudes();
            assert_relative_eq!(amp[amp.len() - 1].norm(), 1.0, epsilon = 1e-12);
        }
        assert!(coherent_product_ensemble(0.0, 0.0, 0.0, 1e-9).is_err());
    }

    #[test]
    fn variance_inequality_on_random_mixtures() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let count = rng.random_range(1..5usize);
            let mut members = Vec::new();
            let mut wsum = 0.0;
            for _ in 0..count {
                let n = rng.random_range(0..12u64);
                let amp: Vec<Complex64> = (0..n as usize + 1)
                    .map(|_| {
                        Complex64::new(
                            rng.random::<f64>() * 2.0 - 1.0,
                            rng.random::<f64>() * 2.0 - 1.0,
                        )
                    })
                    .collect();
                let amp = if amp.iter().all(|a| a.norm() < 1e-12) {
                    vec![Complex64::new(1.0, 0.0); n as usize + 1]
                } else {
                    amp
                };
                let w: f64 = rng.random::<f64>() + 0.01;
                wsum += w;
                members.push(member(w, SectorState::new(n, amp).unwrap()));
            }
            for m in members.iter_mut() {
                m.weight /= wsum;
            }
            let ens = Ensemble::new(members).unwrap();
            let m = moments(&ens);
            for (axis, var) in [
                (SpinAxis::X, m.var_jx_t),
                (SpinAxis::Y, m.var_jy_t),
                (SpinAxis::Z, m.var_jz_t),
            ] {
                let bound = conditional_variance_bound(&ens, axis);
                assert!(var - bound >= -1e-10, "axis {axis:?}: {var} < {bound}");
            }
        }
    }
}
