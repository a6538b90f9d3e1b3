//! Shared oracles for the integration suites. These deliberately avoid the
//! library's solution paths: the planar-variance reference uses a dual
//! 1-parameter scan, and the dense eigensolver comes from nalgebra.
// each test binary compiles this module separately and uses a subset
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use pqslab::tridiag::SymTridiag;
use pqslab::SectorState;

/// Reference value of min var(Jx) + var(Jy) over all pure states of one
/// sector. Exact variational dual: for any target mean a,
/// f(psi) >= lambda_min(K - 2a Jx) + a^2 with K = J(J+1) - Jz^2, and the
/// bound is tight at the optimum, so a 1-d scan over a recovers the minimum
/// (z-rotation symmetry removes the Jy mean).
pub fn cj_reference(n: u64) -> f64 {
    assert!(n >= 1);
    let dim = n as usize + 1;
    let j = n as f64 / 2.0;
    let diag: Vec<f64> = (0..dim)
        .map(|k| {
            let m = k as f64 - j;
            j * (j + 1.0) - m * m
        })
        .collect();
    let ladder: Vec<f64> = (0..dim - 1)
        .map(|k| ((n as usize - k) as f64 * (k + 1) as f64).sqrt())
        .collect();
    let value = |a: f64| -> f64 {
        let off: Vec<f64> = ladder.iter().map(|c| -a * c).collect();
        SymTridiag::new(diag.clone(), off).eigenvalue(0) + a * a
    };
    let grid = 400usize;
    let mut best_i = 0usize;
    let mut best = f64::INFINITY;
    for i in 0..=grid {
        let a = j * i as f64 / grid as f64;
        let v = value(a);
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let mut lo = j * best_i.saturating_sub(1) as f64 / grid as f64;
    let mut hi = j * (best_i + 1).min(grid) as f64 / grid as f64;
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let mut f1 = value(x1);
    let mut f2 = value(x2);
    for _ in 0..90 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = value(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = value(x2);
        }
    }
    f1.min(f2)
}

/// var(Jx) + var(Jy) of a sector state.
pub fn planar_variance_sum(state: &SectorState) -> f64 {
    let m = state.spin_moments();
    m.var_x() + m.var_y()
}

/// Dense Hermitian eigenvalues (ascending) through nalgebra, the generic
/// dense oracle used against the tridiagonal bisection path.
pub fn dense_eigenvalues(matrix: &DMatrix<Complex64>) -> Vec<f64> {
    let eig = matrix.clone().symmetric_eigen();
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    vals
}
