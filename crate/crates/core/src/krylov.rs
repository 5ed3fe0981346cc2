//! Lanczos approximation of `exp(-i H dt) |v⟩` from the sparse matrix.
//!
//! Used when a dense decomposition is out of reach. The subspace grows until
//! the standard residual estimate drops below the requested tolerance; if a
//! segment refuses to converge the interval is halved and the halves are
//! propagated in turn.

use faer::{Mat, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::SparseHamiltonian;

const MAX_SUBSPACE: usize = 60;
const MAX_SPLIT_DEPTH: usize = 40;

pub(crate) fn expm_multiply(
    h: &SparseHamiltonian,
    psi: &[Complex64],
    dt: f64,
    tolerance: f64,
) -> Result<Vec<Complex64>> {
    expm_multiply_rec(h, psi, dt, tolerance, 0)
}

fn expm_multiply_rec(
    h: &SparseHamiltonian,
    psi: &[Complex64],
    dt: f64,
    tolerance: f64,
    depth: usize,
) -> Result<Vec<Complex64>> {
    if dt == 0.0 {
        return Ok(psi.to_vec());
    }
    if depth > MAX_SPLIT_DEPTH {
        return Err(Error::Numerical(
            "krylov propagation failed to converge after repeated interval splitting".into(),
        ));
    }
    match lanczos_segment(h, psi, dt, tolerance)? {
        Some(result) => Ok(result),
        None => {
            let half = expm_multiply_rec(h, psi, dt / 2.0, tolerance, depth + 1)?;
            expm_multiply_rec(h, &half, dt / 2.0, tolerance, depth + 1)
        }
    }
}

/// One Lanczos build; `None` means the subspace cap was hit before the
/// residual estimate met the tolerance.
fn lanczos_segment(
    h: &SparseHamiltonian,
    psi: &[Complex64],
    dt: f64,
    tolerance: f64,
) -> Result<Option<Vec<Complex64>>> {
    let d = h.dim();
    let beta0 = crate::state::l2_norm(psi);
    if beta0 == 0.0 {
        return Ok(Some(psi.to_vec()));
    }
    let mut vectors: Vec<Vec<Complex64>> = Vec::with_capacity(MAX_SUBSPACE + 1);
    vectors.push(psi.iter().map(|a| a / beta0).collect());
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![Complex64::new(0.0, 0.0); d];

    for j in 0..MAX_SUBSPACE {
        h.matvec(&vectors[j], &mut w);
        if j > 0 {
            let b = betas[j - 1];
            for (wi, vi) in w.iter_mut().zip(&vectors[j - 1]) {
                *wi -= b * vi;
            }
        }
        // H is real symmetric, so the diagonal coefficient is real.
        let alpha: f64 = vectors[j]
            .iter()
            .zip(&w)
            .map(|(v, wi)| (v.conj() * wi).re)
            .sum();
        for (wi, vi) in w.iter_mut().zip(&vectors[j]) {
            *wi -= alpha * vi;
        }
        // full reorthogonalization; the subspace is small
        for v in &vectors {
            let overlap: Complex64 = v.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
            for (wi, vi) in w.iter_mut().zip(v) {
                *wi -= overlap * vi;
            }
        }
        alphas.push(alpha);
        let beta = crate::state::l2_norm(&w);

        let m = j + 1;
        let (weights, tail) = tridiagonal_exp_column(&alphas, &betas, dt)?;
        let residual = beta * tail;
        if residual <= tolerance || beta < 1e-14 * alpha.abs().max(1.0) {
            let mut out = vec![Complex64::new(0.0, 0.0); d];
            for (y, v) in weights.iter().zip(&vectors[..m]) {
                let scaled = beta0 * y;
                for (o, vi) in out.iter_mut().zip(v) {
                    *o += scaled * vi;
                }
            }
            return Ok(Some(out));
        }
        betas.push(beta);
        vectors.push(w.iter().map(|a| a / beta).collect());
    }
    Ok(None)
}

/// First column of `exp(-i dt T)` for the real symmetric tridiagonal `T`,
/// together with the magnitude of its last entry (the residual weight).
fn tridiagonal_exp_column(alphas: &[f64], betas: &[f64], dt: f64) -> Result<(Vec<Complex64>, f64)> {
    let m = alphas.len();
    let mut t: Mat<f64> = Mat::zeros(m, m);
    for (i, &a) in alphas.iter().enumerate() {
        t[(i, i)] = a;
    }
    for (i, &b) in betas.iter().take(m - 1).enumerate() {
        t[(i, i + 1)] = b;
        t[(i + 1, i)] = b;
    }
    let eig = faer::linalg::solvers::SelfAdjointEigen::new(t.as_ref(), Side::Lower)
        .map_err(|e| Error::Numerical(format!("krylov projection eigen failed: {e:?}")))?;
    let q = eig.U();
    let mut column = vec![Complex64::new(0.0, 0.0); m];
    for (k, &lambda) in eig.S().column_vector().iter().enumerate() {
        let phase = Complex64::from_polar(1.0, -lambda * dt);
        let weight = q[(0, k)];
        for (i, c) in column.iter_mut().enumerate() {
            *c += phase * (weight * q[(i, k)]);
        }
    }
    let tail = column[m - 1].norm();
    Ok((column, tail))
}
