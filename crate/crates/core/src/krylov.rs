//! Lanczos approximation of `exp(i t A) y` for an operator `A` that is
//! self-adjoint in a diagonally weighted inner product `⟨x, y⟩_W = Σ w x̄ y`.
//!
//! Running the recurrence on `y` with the `W` inner product is the same as
//! running plain Lanczos on `z = W^{1/2} y` with `A_w = W^{1/2} A W^{-1/2}`,
//! without ever forming square roots of the weights.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosOptions {
    /// Relative tolerance on the a posteriori error estimate.
    pub tol: f64,
    /// Largest Krylov basis before the step is split.
    pub max_basis: usize,
    /// How many times the step may be halved when the basis is exhausted.
    pub restarts: usize,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions { tol: 1e-12, max_basis: 128, restarts: 1 }
    }
}

/// Per-call statistics.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LanczosStats {
    pub basis: usize,
    pub estimate: f64,
    pub substeps: usize,
}

fn dot_w(w: &[f64], x: &[C64], y: &[C64]) -> C64 {
    w.iter().zip(x.iter().zip(y)).map(|(w, (a, b))| a.conj() * b * *w).sum()
}

fn norm_w(w: &[f64], x: &[C64]) -> f64 {
    w.iter().zip(x).map(|(w, a)| w * a.norm_sqr()).sum::<f64>().sqrt()
}

/// `exp(i t T) e_1` for the symmetric tridiagonal `T = tridiag(β, α, β)`.
fn exp_tridiagonal(alpha: &[f64], beta: &[f64], t: f64) -> Vec<C64> {
    let k = alpha.len();
    let mut tm = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        tm[(i, i)] = alpha[i];
        if i + 1 < k {
            tm[(i, i + 1)] = beta[i];
            tm[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(tm);
    let q = &eig.eigenvectors;
    (0..k).map(|row| (0..k).map(|l| C64::from_polar(q[(row, l)] * q[(0, l)], t * eig.eigenvalues[l])).sum()).collect()
}

/// Computes `exp(i t A) y`.
///
/// `apply(x, out)` must overwrite `out` with `A x`. The result is built as
/// `c_1 y + β Σ_{j≥2} c_j v_j`, so a vector in the kernel of `A` comes back
/// bit for bit.
pub fn expmv<F>(apply: &F, w: &[f64], y: &[C64], t: f64, opts: &LanczosOptions) -> Result<(Vec<C64>, LanczosStats)>
where
    F: Fn(&[C64], &mut [C64]) + ?Sized,
{
    match expmv_once(apply, w, y, t, opts) {
        Ok(r) => Ok(r),
        Err(Error::KrylovDivergence { basis, estimate }) if opts.restarts > 0 => {
            let inner = LanczosOptions { restarts: opts.restarts - 1, ..*opts };
            let (half, s1) =
                expmv(apply, w, y, 0.5 * t, &inner).map_err(|_| Error::KrylovDivergence { basis, estimate })?;
            let (full, s2) = expmv(apply, w, &half, 0.5 * t, &inner)?;
            Ok((
                full,
                LanczosStats {
                    basis: s1.basis.max(s2.basis),
                    estimate: s1.estimate + s2.estimate,
                    substeps: s1.substeps + s2.substeps,
                },
            ))
        }
        Err(e) => Err(e),
    }
}

fn expmv_once<F>(apply: &F, w: &[f64], y: &[C64], t: f64, opts: &LanczosOptions) -> Result<(Vec<C64>, LanczosStats)>
where
    F: Fn(&[C64], &mut [C64]) + ?Sized,
{
    let n = y.len();
    let beta0 = norm_w(w, y);
    if beta0 == 0.0 || t == 0.0 {
        return Ok((y.to_vec(), LanczosStats { basis: 0, estimate: 0.0, substeps: 1 }));
    }
    let mut basis: Vec<Vec<C64>> = Vec::new();
    let mut alpha = Vec::new();
    let mut beta = Vec::new();

    // First step on the unnormalised vector: A y = 0 exactly gives α = 0.
    let mut au = vec![C64::new(0.0, 0.0); n];
    apply(y, &mut au);
    let a1 = dot_w(w, y, &au).re / (beta0 * beta0);
    let v1: Vec<C64> = y.iter().map(|v| v / beta0).collect();
    let mut r: Vec<C64> = au.iter().zip(&v1).map(|(a, v)| a / beta0 - v * a1).collect();
    alpha.push(a1);
    basis.push(v1);

    let mut scale = a1.abs();
    loop {
        let k = alpha.len();
        let b = norm_w(w, &r);
        scale = scale.max(b);
        let c = exp_tridiagonal(&alpha, &beta, t);
        let estimate = b * c[k - 1].norm();
        let breakdown = b <= 1e-14 * scale.max(f64::MIN_POSITIVE);
        if breakdown || estimate <= opts.tol {
            let mut out: Vec<C64> = y.iter().map(|v| v * c[0]).collect();
            for (j, v) in basis.iter().enumerate().skip(1) {
                let cj = c[j] * beta0;
                for (o, x) in out.iter_mut().zip(v) {
                    *o += x * cj;
                }
            }
            return Ok((out, LanczosStats { basis: k, estimate, substeps: 1 }));
        }
        if k >= opts.max_basis {
            return Err(Error::KrylovDivergence { basis: k, estimate });
        }
        beta.push(b);
        let v: Vec<C64> = r.iter().map(|x| x / b).collect();
        apply(&v, &mut au);
        let a = dot_w(w, &v, &au).re;
        scale = scale.max(a.abs());
        let prev = &basis[k - 1];
        for i in 0..n {
            r[i] = au[i] - v[i] * a - prev[i] * b;
        }
        alpha.push(a);
        basis.push(v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn symmetric_matrix(n: usize) -> DMatrix<f64> {
        // deterministic, diagonally heavy, eigenvalues spread over ~[-20, 0]
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                -10.0 - (i as f64).sin() * 8.0
            } else {
                ((i * 7 + j * 7) % 11) as f64 / 11.0 - 0.5
            }
        })
    }

    fn dense_reference(a: &DMatrix<f64>, y: &[C64], t: f64) -> Vec<C64> {
        let ac = a.map(|v| C64::new(0.0, t * v));
        let e = ac.exp();
        let yv = nalgebra::DVector::from_column_slice(y);
        (e * yv).iter().copied().collect()
    }

    #[test]
    fn matches_dense_exponential() {
        let n = 40;
        let a = symmetric_matrix(n);
        let w = vec![1.0; n];
        let y: Vec<C64> = (0..n).map(|i| C64::new((i as f64).cos(), 0.3 * i as f64 / n as f64)).collect();
        let apply = |x: &[C64], out: &mut [C64]| {
            for i in 0..n {
                out[i] = (0..n).map(|j| x[j] * a[(i, j)]).sum();
            }
        };
        for t in [0.01, 0.1, 1.0] {
            let (got, _) = expmv(&apply, &w, &y, t, &LanczosOptions::default()).unwrap();
            let want = dense_reference(&a, &y, t);
            let err = got.iter().zip(&want).map(|(g, h)| (g - h).norm()).fold(0.0, f64::max);
            assert!(err < 1e-11, "t={t}: {err}");
        }
    }

    #[test]
    fn weighted_inner_product_preserves_weighted_norm() {
        // A = W^{-1} S with S symmetric is self-adjoint in ⟨·,·⟩_W
        let n = 30;
        let s = symmetric_matrix(n);
        let w: Vec<f64> = (0..n).map(|i| 0.5 + (i % 4) as f64 * 0.25).collect();
        let apply = |x: &[C64], out: &mut [C64]| {
            for i in 0..n {
                out[i] = (0..n).map(|j| x[j] * s[(i, j)]).sum::<C64>() / w[i];
            }
        };
        let y: Vec<C64> = (0..n).map(|i| C64::new(1.0, (i as f64 * 0.7).sin())).collect();
        let (z, _) = expmv(&apply, &w, &y, 0.7, &LanczosOptions::default()).unwrap();
        let (m0, m1) = (norm_w(&w, &y), norm_w(&w, &z));
        assert!(((m1 - m0) / m0).abs() < 1e-13);
    }

    #[test]
    fn kernel_vectors_are_returned_exactly() {
        let n = 10;
        let apply = |x: &[C64], out: &mut [C64]| {
            for i in 0..n {
                let l = if i > 0 { x[i - 1] } else { x[i] };
                let r = if i + 1 < n { x[i + 1] } else { x[i] };
                out[i] = (l + r) - x[i] * 2.0;
            }
        };
        let y = vec![C64::new(1.0, 0.0); n];
        let (z, stats) = expmv(&apply, &vec![1.0; n], &y, 3.0, &LanczosOptions::default()).unwrap();
        assert_eq!(z, y);
        assert_eq!(stats.basis, 1);
    }

    #[test]
    fn exhausted_basis_is_reported() {
        let n = 50;
        let a = symmetric_matrix(n).map(|v| v * 100.0);
        let apply = |x: &[C64], out: &mut [C64]| {
            for i in 0..n {
                out[i] = (0..n).map(|j| x[j] * a[(i, j)]).sum();
            }
        };
        let y: Vec<C64> = (0..n).map(|i| C64::new((i as f64).sin(), 0.0)).collect();
        let opts = LanczosOptions { max_basis: 4, restarts: 0, ..Default::default() };
        let err = expmv(&apply, &vec![1.0; n], &y, 1.0, &opts).unwrap_err();
        assert!(matches!(err, Error::KrylovDivergence { basis: 4, .. }));
    }
}
