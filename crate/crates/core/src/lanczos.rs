//! Restarted Lanczos for the lowest eigenpair of a real symmetric operator.

use ndarray::Array2;
use ndarray_linalg::{Eigh, UPLO};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosConfig {
    /// Krylov space size per restart.
    pub krylov_dim: usize,
    /// Residual norm `|A x - theta x|` at which the pair is accepted.
    pub tol: f64,
    pub max_restarts: usize,
}

impl Default for LanczosConfig {
    fn default() -> Self {
        LanczosConfig { krylov_dim: 40, tol: 1e-10, max_restarts: 200 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
    pub matvecs: usize,
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = dot(v, v).sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

/// Lowest eigenpair of the operator `apply(x, y): y = A x`.
///
/// Uses full reorthogonalisation and restarts from the current Ritz vector,
/// so the result is reliable also when `v0` has small ground-state weight.
pub fn lowest_eigenpair<F>(apply: F, v0: &[f64], cfg: &LanczosConfig) -> Result<Eigenpair>
where
    F: Fn(&[f64], &mut [f64]),
{
    let (pair, converged) = lowest_eigenpair_best_effort(apply, v0, cfg)?;
    if converged {
        Ok(pair)
    } else {
        Err(Error::NotConverged(format!(
            "Lanczos after {} restarts (theta = {}, residual = {:e})",
            cfg.max_restarts, pair.value, pair.residual
        )))
    }
}

/// As [`lowest_eigenpair`], but an unconverged run returns its final Ritz
/// pair (with the true residual) and `false` instead of an error.
pub fn lowest_eigenpair_best_effort<F>(apply: F, v0: &[f64], cfg: &LanczosConfig) -> Result<(Eigenpair, bool)>
where
    F: Fn(&[f64], &mut [f64]),
{
    let dim = v0.len();
    if dim == 0 {
        return Err(Error::InvalidParameter("empty Lanczos start vector".into()));
    }
    let mut x = v0.to_vec();
    if normalize(&mut x) == 0.0 {
        return Err(Error::InvalidParameter("zero Lanczos start vector".into()));
    }
    let m = cfg.krylov_dim.max(2).min(dim);
    let mut matvecs = 0;
    let mut w = vec![0.0; dim];

    for _ in 0..=cfg.max_restarts {
        let mut basis: Vec<Vec<f64>> = vec![x.clone()];
        let mut alpha: Vec<f64> = Vec::with_capacity(m);
        let mut beta: Vec<f64> = Vec::with_capacity(m);
        let mut ritz = (0.0, Vec::new(), f64::INFINITY);
        for j in 0..m {
            apply(&basis[j], &mut w);
            matvecs += 1;
            let a = dot(&w, &basis[j]);
            alpha.push(a);
            // two passes of classical Gram-Schmidt against the whole basis
            for _ in 0..2 {
                for q in &basis {
                    let c = dot(&w, q);
                    axpy(-c, q, &mut w);
                }
            }
            let b = dot(&w, &w).sqrt();
            let (theta, y) = tridiag_lowest(&alpha, &beta)?;
            let res = b * y[j].abs();
            ritz = (theta, y, res);
            if res < cfg.tol || b < 1e-14 * a.abs().max(1.0) || j + 1 == m {
                break;
            }
            beta.push(b);
            let mut next = w.clone();
            next.iter_mut().for_each(|v| *v /= b);
            basis.push(next);
        }
        let (_, y, res) = ritz;
        x.iter_mut().for_each(|v| *v = 0.0);
        for (q, c) in basis.iter().zip(&y) {
            axpy(*c, q, &mut x);
        }
        normalize(&mut x);
        if res < cfg.tol || basis.len() == dim {
            // explicit residual guards against loss of orthogonality
            apply(&x, &mut w);
            matvecs += 1;
            let rq = dot(&x, &w);
            axpy(-rq, &x, &mut w);
            let r = dot(&w, &w).sqrt();
            if r < cfg.tol.max(1e-12) * 10.0 || basis.len() == dim {
                return Ok((Eigenpair { value: rq, vector: x, residual: r, matvecs }, true));
            }
        }
    }
    apply(&x, &mut w);
    matvecs += 1;
    let rq = dot(&x, &w);
    axpy(-rq, &x, &mut w);
    let r = dot(&w, &w).sqrt();
    Ok((Eigenpair { value: rq, vector: x, residual: r, matvecs }, false))
}

fn tridiag_lowest(alpha: &[f64], beta: &[f64]) -> Result<(f64, Vec<f64>)> {
    let n = alpha.len();
    let mut t = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        t[[i, i]] = alpha[i];
        if i + 1 < n {
            t[[i, i + 1]] = beta[i];
            t[[i + 1, i]] = beta[i];
        }
    }
    let (vals, vecs) = t.eigh(UPLO::Lower)?;
    Ok((vals[0], vecs.column(0).to_vec()))
}
