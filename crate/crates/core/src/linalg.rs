//! Tridiagonal solves and a matrix-free MINRES for symmetric indefinite
//! operators.

use crate::error::{ChoquardError, Result};

/// Solve (diag, off) w = rhs for a symmetric tridiagonal system by Thomas
/// elimination. The systems we build are strictly diagonally dominant.
pub fn solve_tridiagonal(diag: &[f64], off: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    debug_assert_eq!(rhs.len(), n);
    debug_assert!(n == 0 || off.len() + 1 == n);
    let mut d = vec![0.0; n];
    let mut c = vec![0.0; n];
    d[0] = diag[0];
    c[0] = rhs[0];
    for i in 1..n {
        let m = off[i - 1] / d[i - 1];
        d[i] = diag[i] - m * off[i - 1];
        c[i] = rhs[i] - m * c[i - 1];
    }
    let mut x = vec![0.0; n];
    x[n - 1] = c[n - 1] / d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = (c[i] - off[i] * x[i + 1]) / d[i];
    }
    x
}

/// MINRES for A x = b with A symmetric (possibly indefinite), matrix-free.
/// Returns the iterate once ||A x - b|| <= rtol * ||b||.
pub fn minres(
    apply: impl Fn(&[f64]) -> Vec<f64>,
    b: &[f64],
    rtol: f64,
    max_iter: usize,
) -> Result<Vec<f64>> {
    let n = b.len();
    let norm_b = norm(b);
    if norm_b == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let mut v_prev = vec![0.0; n];
    let mut v = b.to_vec();
    let mut beta = norm_b;
    scale(&mut v, 1.0 / beta);

    let mut eta = beta;
    let (mut c_old, mut c_cur) = (1.0, 1.0);
    let (mut s_old, mut s_cur) = (0.0, 0.0);
    let mut w_old = vec![0.0; n];
    let mut w_cur = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut res = norm_b;

    for _ in 0..max_iter {
        // Lanczos step
        let mut av = apply(&v);
        let alpha = dot(&av, &v);
        for i in 0..n {
            av[i] -= alpha * v[i] + beta * v_prev[i];
        }
        let beta_new = norm(&av);

        // previous rotations
        let rho1 = c_cur * alpha - c_old * s_cur * beta;
        let rho2 = s_cur * alpha + c_old * c_cur * beta;
        let rho3 = s_old * beta;

        // new rotation
        let delta = (rho1 * rho1 + beta_new * beta_new).sqrt();
        if delta == 0.0 {
            return Err(ChoquardError::SingularIftSolve(res / norm_b));
        }
        let c_new = rho1 / delta;
        let s_new = beta_new / delta;

        let mut w_new = vec![0.0; n];
        for i in 0..n {
            w_new[i] = (v[i] - rho2 * w_cur[i] - rho3 * w_old[i]) / delta;
            x[i] += c_new * eta * w_new[i];
        }
        res *= s_new.abs();
        if res <= rtol * norm_b {
            return Ok(x);
        }
        eta = -s_new * eta;

        if beta_new == 0.0 {
            break;
        }
        let v_next: Vec<f64> = av.iter().map(|t| t / beta_new).collect();
        v_prev = std::mem::replace(&mut v, v_next);
        beta = beta_new;
        w_old = std::mem::replace(&mut w_cur, w_new);
        c_old = c_cur;
        c_cur = c_new;
        s_old = s_cur;
        s_cur = s_new;
    }
    if res <= rtol * norm_b * 10.0 {
        Ok(x)
    } else {
        Err(ChoquardError::SingularIftSolve(res / norm_b))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn scale(a: &mut [f64], s: f64) {
    for x in a.iter_mut() {
        *x *= s;
    }
}
