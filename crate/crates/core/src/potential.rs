//! Coulomb-kernel convolutions and the (-Delta + lambda)^{-1} resolvent,
//! reduced to prefix sums and tridiagonal solves.
//!
//! The kernel sums use the plain uniform rule in s^2 ds so that the pairing
//! matrix is exactly self-adjoint against it; an O(h^2) diagonal correction
//! repairs the Euler-Maclaurin defect of splitting the integral at the
//! kernel kink s = r.

use crate::error::{ChoquardError, Result};
use crate::grid::{integrate, QuadratureKind, QuadratureRule, RadialProfile, sector_laplacian};
use crate::linalg::solve_tridiagonal;
use std::f64::consts::PI;

/// V = |x|^{-1} * f for radial f:
/// V(r) = (4*pi/r) int_0^r s^2 f ds + 4*pi int_r^{r_max} s f ds.
pub fn newton_potential(f: &RadialProfile) -> RadialProfile {
    let n = f.grid.n();
    let h = f.grid.h();
    let mut inner = Vec::with_capacity(n); // cumulative s^2 f
    let mut acc = 0.0;
    for i in 0..n {
        let s = f.grid.r(i);
        acc += s * s * f.values[i];
        inner.push(acc);
    }
    let mut outer = vec![0.0; n]; // sum_{j > i} s f
    let mut acc = 0.0;
    for i in (0..n).rev() {
        outer[i] = acc;
        let s = f.grid.r(i);
        acc += s * f.values[i];
    }
    let corr = PI * h * h / 3.0;
    let values = (0..n)
        .map(|i| 4.0 * PI * h * (inner[i] / f.grid.r(i) + outer[i]) + corr * f.values[i])
        .collect();
    RadialProfile {
        grid: f.grid.clone(),
        values,
    }
}

/// Sector-ell kernel convolution
/// W_l(r) = 4*pi/(2l+1) [ r^{-(l+1)} int_0^r s^{l+2} g ds + r^l int_r^{r_max} s^{1-l} g ds ].
/// Powers are taken in ratio form against r_max to stay finite for l >= 2.
pub fn multipole_potential(g: &RadialProfile, ell: usize) -> Result<RadialProfile> {
    if ell == 0 {
        return Ok(newton_potential(g));
    }
    let n = g.grid.n();
    let h = g.grid.h();
    let rmax = g.grid.r_max();
    let le = ell as i32;

    // inner_i = sum_{j<=i} (s_j/rmax)^{l+2} g_j ; scaled back by (rmax/r)^{l+1} * rmax
    let mut inner = Vec::with_capacity(n);
    let mut acc = 0.0;
    for i in 0..n {
        let t = g.grid.r(i) / rmax;
        acc += t.powi(le + 2) * g.values[i];
        inner.push(acc);
    }
    // outer_i = sum_{j>i} (rmax/s_j)^{l-1} g_j ; scaled by (r/rmax)^l * rmax
    let mut outer = vec![0.0; n];
    let mut acc = 0.0;
    for i in (0..n).rev() {
        outer[i] = acc;
        let t = rmax / g.grid.r(i);
        acc += t.powi(le - 1) * g.values[i];
    }
    let pref = 4.0 * PI / (2 * ell + 1) as f64 * h;
    let corr = PI * h * h / 3.0;
    let mut values = Vec::with_capacity(n);
    for i in 0..n {
        let r = g.grid.r(i);
        let v = pref
            * ((rmax / r).powi(le + 1) * rmax / r * inner[i] * (r / rmax)
                + (r / rmax).powi(le) * rmax * outer[i])
            + corr * g.values[i];
        values.push(v);
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(ChoquardError::MultipoleOverflow(ell));
    }
    Ok(RadialProfile {
        grid: g.grid.clone(),
        values,
    })
}

/// D_p(u) = (1/2p) int |u|^p (|x|^{-1} * |u|^p) dx, admissible for 1 < p < 5.
pub fn coulomb_energy(u: &RadialProfile, p: f64) -> Result<f64> {
    if !(p > 1.0 && p < 5.0) {
        return Err(ChoquardError::ExponentOutOfRange(p, 1.0, 5.0));
    }
    let dens = RadialProfile {
        grid: u.grid.clone(),
        values: u.values.iter().map(|v| v.abs().powf(p)).collect(),
    };
    let v = newton_potential(&dens);
    let prod = RadialProfile {
        grid: u.grid.clone(),
        values: dens
            .values
            .iter()
            .zip(&v.values)
            .map(|(a, b)| a * b)
            .collect(),
    };
    let rule = QuadratureRule::new(QuadratureKind::Simpson, &u.grid);
    Ok(integrate(&prod, &rule) / (2.0 * p))
}

/// Solve (-Delta_l + lambda) g = f on the grid (tridiagonal in w = r*g).
pub fn apply_resolvent(f: &RadialProfile, lambda: f64, ell: usize) -> Result<RadialProfile> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(ChoquardError::NonPositiveLambda(lambda));
    }
    let op = sector_laplacian(&f.grid, ell);
    let n = f.grid.n();
    let diag: Vec<f64> = op.diag.iter().map(|d| d + lambda).collect();
    let rhs: Vec<f64> = (0..n).map(|i| f.grid.r(i) * f.values[i]).collect();
    let w = solve_tridiagonal(&diag, &op.off, &rhs);
    let values = (0..n).map(|i| w[i] / f.grid.r(i)).collect();
    Ok(RadialProfile {
        grid: f.grid.clone(),
        values,
    })
}
