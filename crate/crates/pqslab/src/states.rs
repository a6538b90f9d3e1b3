//! Per-sector state factory: relative-phase eigenstates, Gaussian and
//! variationally optimal planar quantum squeezed (PQS) states, beam-split
//! coherent states and two-well ground states.
//!
//! All factory output is unit norm. Ground states (and Mach-Zehnder prepared
//! states) are frame-fixed: a deterministic z-rotation puts the mean spin on
//! +X with <Jy> = 0, and the global phase is pinned so results are
//! reproducible bit for bit.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::sector::{
    hamiltonian_sym_tridiag, ladder, HamiltonianParams, SectorBasis, SectorOperator,
};
use crate::tridiag::HermTridiag;

#[derive(Debug, Error)]
pub enum StateError {
    #[error("amplitude vector has zero norm")]
    ZeroNorm,
    #[error("amplitude vector length {len} does not match sector dimension {dim}")]
    DimensionMismatch { len: usize, dim: usize },
    #[error("sigma_m must be positive (got {0})")]
    InvalidSigma(f64),
    #[error("optimal PQS state needs n >= 1")]
    EmptySector,
    #[error("tolerance must be positive (got {0})")]
    InvalidTolerance(f64),
    #[error("intensities must be non-negative and not both zero")]
    InvalidIntensities,
}

/// Unit-norm complex amplitudes over m = -J..J within one sector.
#[derive(Clone, Debug)]
pub struct SectorState {
    n: u64,
    amplitudes: Vec<Complex64>,
}

impl SectorState {
    /// Normalizes the given amplitudes; errors on a zero vector.
    pub fn new(n: u64, mut amplitudes: Vec<Complex64>) -> Result<Self, StateError> {
        let dim = n as usize + 1;
        if amplitudes.len() != dim {
            return Err(StateError::DimensionMismatch {
                len: amplitudes.len(),
                dim,
            });
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(StateError::ZeroNorm);
        }
        for a in amplitudes.iter_mut() {
            *a /= norm;
        }
        Ok(Self { n, amplitudes })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn basis(&self) -> SectorBasis {
        SectorBasis::new(self.n)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn apply_jx(&self) -> Vec<Complex64> {
        let n = self.n;
        let a = &self.amplitudes;
        let dim = a.len();
        let mut out = vec![Complex64::ZERO; dim];
        for k in 0..dim.saturating_sub(1) {
            let c = ladder(n, k) / 2.0;
            out[k + 1] += c * a[k];
            out[k] += c * a[k + 1];
        }
        out
    }

    pub fn apply_jy(&self) -> Vec<Complex64> {
        let n = self.n;
        let a = &self.amplitudes;
        let dim = a.len();
        let i = Complex64::new(0.0, 1.0);
        let mut out = vec![Complex64::ZERO; dim];
        for k in 0..dim.saturating_sub(1) {
            let c = ladder(n, k) / 2.0;
            out[k + 1] -= i * c * a[k];
            out[k] += i * c * a[k + 1];
        }
        out
    }

    pub fn apply_jz(&self) -> Vec<Complex64> {
        let basis = self.basis();
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(k, a)| a * basis.m(k))
            .collect()
    }

    /// First and second spin moments of this pure state.
    pub fn spin_moments(&self) -> SpinMoments {
        let jx = self.apply_jx();
        let jy = self.apply_jy();
        let jz = self.apply_jz();
        let a = &self.amplitudes;
        let inner =
            |u: &[Complex64], v: &[Complex64]| -> Complex64 {
                u.iter().zip(v).map(|(x, y)| x.conj() * y).sum()
            };
        SpinMoments {
            ex: inner(a, &jx).re,
            ey: inner(a, &jy).re,
            ez: inner(a, &jz).re,
            exx: inner(&jx, &jx).re,
            eyy: inner(&jy, &jy).re,
            ezz: inner(&jz, &jz).re,
            exy_sym: inner(&jx, &jy).re,
        }
    }

    /// Applies a sector operator (typically a unitary) and renormalizes.
    pub fn transformed(&self, op: &SectorOperator) -> Result<Self, StateError> {
        assert_eq!(op.n(), self.n, "operator acts in a different sector");
        SectorState::new(self.n, op.apply(&self.amplitudes))
    }
}

/// Raw spin moments of one sector state: means, second moments and the
/// symmetrized cross moment <{Jx,Jy}/2>.
#[derive(Clone, Copy, Debug, Default)]
pub struct SpinMoments {
    pub ex: f64,
    pub ey: f64,
    pub ez: f64,
    pub exx: f64,
    pub eyy: f64,
    pub ezz: f64,
    pub exy_sym: f64,
}

impl SpinMoments {
    pub fn var_x(&self) -> f64 {
        self.exx - self.ex * self.ex
    }
    pub fn var_y(&self) -> f64 {
        self.eyy - self.ey * self.ey
    }
    pub fn var_z(&self) -> f64 {
        self.ezz - self.ez * self.ez
    }
    /// In-plane mean length |<Jx> + i <Jy>|.
    pub fn planar_mean(&self) -> f64 {
        self.ex.hypot(self.ey)
    }
}

/// Gaussian PQS envelope: `sigma_m` is the target Jz variance of the state
/// (amplitudes exp(-m^2/(4 sigma_m)), so |amplitude|^2 has variance sigma_m),
/// `theta` the phase-ramp offset.
#[derive(Clone, Copy, Debug)]
pub struct PqsSpec {
    pub sigma_m: f64,
    pub theta: f64,
}

impl PqsSpec {
    pub fn new(sigma_m: f64, theta: f64) -> Result<Self, StateError> {
        if !(sigma_m > 0.0) {
            return Err(StateError::InvalidSigma(sigma_m));
        }
        Ok(Self { sigma_m, theta })
    }

    /// The variance-sum minimizing envelope width sigma_m = (J^2/2)^(2/3).
    pub fn optimal_width(n: u64) -> Self {
        let j = n as f64 / 2.0;
        let sigma = (j * j / 2.0).powf(2.0 / 3.0).max(0.25);
        Self {
            sigma_m: sigma,
            theta: 0.0,
        }
    }
}

/// |theta>_p = (n+1)^(-1/2) sum_m e^{i m theta} |J,m>.
pub fn phase_eigenstate(n: u64, theta: f64) -> SectorState {
    let basis = SectorBasis::new(n);
    let amp = (0..basis.dim())
        .map(|k| Complex64::from_polar(1.0, basis.m(k) * theta))
        .collect();
    SectorState::new(n, amp).expect("uniform amplitudes have unit norm")
}

/// Gaussian-envelope PQS state, truncated to m in [-J, J] and renormalized.
pub fn gaussian_pqs_state(n: u64, spec: &PqsSpec) -> Result<SectorState, StateError> {
    if !(spec.sigma_m > 0.0) {
        return Err(StateError::InvalidSigma(spec.sigma_m));
    }
    let basis = SectorBasis::new(n);
    let amp: Vec<Complex64> = (0..basis.dim())
        .map(|k| {
            let m = basis.m(k);
            let r = (-m * m / (4.0 * spec.sigma_m)).exp();
            Complex64::from_polar(r, m * spec.theta)
        })
        .collect();
    SectorState::new(n, amp)
}

/// SU(2) coherent state with mode-a weight `p` in [0,1] and relative phase
/// `rel_phase`: amplitudes sqrt(C(n,k) p^k q^(n-k)) e^{i(n-k) rel_phase}.
pub fn su2_coherent(n: u64, p: f64, rel_phase: f64) -> Result<SectorState, StateError> {
    if !(0.0..=1.0).contains(&p) || !p.is_finite() {
        return Err(StateError::InvalidIntensities);
    }
    let dim = n as usize + 1;
    let mut mags = vec![0.0f64; dim];
    if p == 0.0 {
        mags[0] = 1.0;
    } else if p == 1.0 {
        mags[dim - 1] = 1.0;
    } else {
        let q = 1.0 - p;
        let nf = n as f64;
        // anchor at the binomial mode, recurse outward in log-stable ratios
        let k0 = ((nf * p).floor() as usize).min(dim - 1);
        let ln_anchor = 0.5
            * (ln_gamma(nf + 1.0) - ln_gamma(k0 as f64 + 1.0) - ln_gamma(nf - k0 as f64 + 1.0)
                + k0 as f64 * p.ln()
                + (nf - k0 as f64) * q.ln());
        mags[k0] = ln_anchor.exp();
        for k in k0..dim - 1 {
            let ratio = ((nf - k as f64) / (k as f64 + 1.0) * p / q).sqrt();
            mags[k + 1] = mags[k] * ratio;
        }
        for k in (0..k0).rev() {
            let ratio = ((k as f64 + 1.0) / (nf - k as f64) * q / p).sqrt();
            mags[k] = mags[k + 1] * ratio;
        }
    }
    let amp = mags
        .iter()
        .enumerate()
        .map(|(k, r)| Complex64::from_polar(*r, (n as f64 - k as f64) * rel_phase))
        .collect();
    SectorState::new(n, amp)
}

/// Beam-split number state: the maximal-Jx coherent state, <Jx> = n/2.
pub fn su2_coherent_x(n: u64) -> SectorState {
    su2_coherent(n, 0.5, 0.0).expect("balanced weights are valid")
}

/// Rotates the frame so <Jx> >= 0 and <Jy> = 0, then pins the global phase
/// (largest-magnitude amplitude made real positive). States with no in-plane
/// mean are only phase-pinned.
pub fn fix_frame(state: &SectorState) -> SectorState {
    let m = state.spin_moments();
    let basis = state.basis();
    let mut amp: Vec<Complex64> = state.amplitudes().to_vec();
    let planar = m.planar_mean();
    if planar > 1e-12 * (state.n() as f64 / 2.0 + 1.0) {
        // e^{i beta Jz} sends the mean vector angle beta to zero
        let beta = m.ey.atan2(m.ex);
        for (k, a) in amp.iter_mut().enumerate() {
            *a *= Complex64::from_polar(1.0, beta * basis.m(k));
        }
    }
    let k0 = amp
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .map(|(k, _)| k)
        .unwrap_or(0);
    let phase = amp[k0] / amp[k0].norm();
    for a in amp.iter_mut() {
        *a /= phase;
    }
    SectorState::new(state.n(), amp).expect("rotation preserves the norm")
}

/// Ground state of the two-well Hamiltonian with frame fixing and a
/// degeneracy flag.
#[derive(Clone, Debug)]
pub struct GroundState {
    pub state: SectorState,
    pub energy: f64,
    /// Gap to the first excited level; infinite for 1-dimensional sectors.
    pub gap: f64,
    /// Set when the gap is below 1e-12 * ||H||; the returned vector is then
    /// the tie-break winner with the larger |<Jx>|.
    pub degenerate: bool,
}

/// Lowest eigenvector of the two-well Hamiltonian in sector n, frame-fixed.
pub fn ground_state(n: u64, params: &HamiltonianParams) -> GroundState {
    if n == 0 {
        return GroundState {
            state: SectorState::new(0, vec![Complex64::new(1.0, 0.0)]).unwrap(),
            energy: 0.0,
            gap: f64::INFINITY,
            degenerate: false,
        };
    }
    let t = hamiltonian_sym_tridiag(n, params);
    let (e0, e1) = t.two_smallest();
    let (blo, bhi) = t.bounds();
    let scale = blo.abs().max(bhi.abs()).max(1.0);
    let gap = e1.map(|e| e - e0).unwrap_or(f64::INFINITY);
    let degenerate = gap < 1e-12 * scale;
    let v0 = t.eigenvector(e0, &[]);
    let chosen = if degenerate {
        let v1 = t.eigenvector(e1.unwrap(), &[&v0]);
        let jx_of = |v: &[f64]| -> f64 {
            (0..v.len() - 1)
                .map(|k| v[k] * v[k + 1] * ladder(n, k))
                .sum::<f64>()
        };
        if jx_of(&v1).abs() > jx_of(&v0).abs() {
            v1
        } else {
            v0
        }
    } else {
        v0
    };
    let amp = chosen.iter().map(|x| Complex64::new(*x, 0.0)).collect();
    let state = SectorState::new(n, amp).expect("eigenvector is normalized");
    GroundState {
        state: fix_frame(&state),
        energy: e0,
        gap,
        degenerate,
    }
}

/// Mach-Zehnder preparation: input z-rotation by `input_phase`, the
/// beamsplitter unitary `mz`, then frame fixing.
pub fn mz_prepare(
    state: &SectorState,
    input_phase: f64,
    mz: &SectorOperator,
) -> Result<SectorState, StateError> {
    let basis = state.basis();
    let rotated: Vec<Complex64> = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(k, a)| a * Complex64::from_polar(1.0, -input_phase * basis.m(k)))
        .collect();
    let rotated = SectorState::new(state.n(), rotated)?;
    Ok(fix_frame(&rotated.transformed(mz)?))
}

/// Result of the planar-variance minimization.
#[derive(Clone, Debug)]
pub struct PqsOutcome {
    pub state: SectorState,
    /// Achieved minimum of var(Jx) + var(Jy).
    pub cj: f64,
    pub converged: bool,
    pub iterations: u32,
}

/// State minimizing var(Jx) + var(Jy) by self-consistent iteration: given the
/// current means (x, y), take the ground vector of
/// Jx^2 + Jy^2 - 2x Jx - 2y Jy and repeat until the objective is stationary.
/// Runs from the Gaussian warm start plus five seeded random restarts and
/// keeps the best.
pub fn optimal_pqs_state(n: u64, tol: f64, max_iters: u32) -> Result<PqsOutcome, StateError> {
    if n == 0 {
        return Err(StateError::EmptySector);
    }
    if !(tol > 0.0) {
        return Err(StateError::InvalidTolerance(tol));
    }
    let warm = gaussian_pqs_state(n, &PqsSpec::optimal_width(n))?;
    let mut best: Option<PqsOutcome> = None;
    let mut consider = |o: PqsOutcome| match &best {
        Some(b) if b.cj <= o.cj => {}
        _ => best = Some(o),
    };
    consider(pqs_iterate(&warm, tol, max_iters));
    for restart in 0..5u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0x9e37_79b9_7f4a_7c15 ^ restart);
        let amp: Vec<Complex64> = (0..n as usize + 1)
            .map(|_| {
                Complex64::new(
                    rng.random::<f64>() * 2.0 - 1.0,
                    rng.random::<f64>() * 2.0 - 1.0,
                )
            })
            .collect();
        let start = SectorState::new(n, amp)?;
        consider(pqs_iterate(&start, tol, max_iters));
    }
    Ok(best.expect("at least the warm start ran"))
}

/// One self-consistent minimization run. The iteration matrix
/// J(J+1) - Jz^2 - 2x Jx - 2y Jy is Hermitian tridiagonal.
fn pqs_iterate(start: &SectorState, tol: f64, max_iters: u32) -> PqsOutcome {
    let n = start.n();
    let basis = SectorBasis::new(n);
    let dim = basis.dim();
    let j = basis.j();
    let mut state = start.clone();
    let mut m = state.spin_moments();
    let objective = |m: &SpinMoments| m.var_x() + m.var_y();
    let mut f = objective(&m);
    let mut converged = false;
    let mut iterations = 0;
    for it in 0..max_iters {
        iterations = it + 1;
        let (x, y) = (m.ex, m.ey);
        let diag: Vec<f64> = (0..dim)
            .map(|k| {
                let mk = basis.m(k);
                j * (j + 1.0) - mk * mk
            })
            .collect();
        let off: Vec<Complex64> = (0..dim - 1)
            .map(|k| {
                let c = ladder(n, k) / 2.0;
                // -2x Jx - 2y Jy contributes -(x + iy) c on the superdiagonal
                Complex64::new(-2.0 * x * c, -2.0 * y * c)
            })
            .collect();
        let herm = HermTridiag { diag, off };
        let (_, vec) = herm.ground();
        state = match SectorState::new(n, vec) {
            Ok(s) => s,
            Err(_) => break,
        };
        m = state.spin_moments();
        let f_new = objective(&m);
        if (f - f_new).abs() < tol {
            f = f_new;
            converged = true;
            break;
        }
        f = f_new;
    }
    PqsOutcome {
        state: fix_frame(&state),
        cj: f,
        converged,
        iterations,
    }
}
