//! Cubic resampling and high-order radial derivatives on uniform grids.

use crate::grid::{RadialGrid, RadialProfile};
use crate::error::Result;

/// Evaluate a profile at an arbitrary radius by piecewise cubic Lagrange
/// interpolation through four neighboring nodes; radial fields are evenly
/// extended through the origin and zero beyond r_max.
pub fn eval_cubic(f: &RadialProfile, x: f64) -> f64 {
    let n = f.grid.n();
    let h = f.grid.h();
    if x >= f.grid.r_max() {
        return if x == f.grid.r_max() { f.values[n - 1] } else { 0.0 };
    }
    // node value at signed index j (j = 0 is the origin ghost, even extension)
    let val = |j: isize| -> f64 {
        if j <= 0 {
            let k = (-j) as usize; // f(-r) = f(r); f(0) handled by k = 0 -> node 1 mirror
            if k == 0 {
                // cubic extrapolation to the origin through nodes 1..4
                let v = &f.values;
                4.0 * v[0] - 6.0 * v[1] + 4.0 * v[2] - v[3]
            } else if k <= n {
                f.values[k - 1]
            } else {
                0.0
            }
        } else if (j as usize) <= n {
            f.values[j as usize - 1]
        } else {
            0.0
        }
    };
    let t = x / h; // node i sits at t = i+1... in signed index terms node j at j*h
    let j0 = t.floor() as isize; // interval [j0, j0+1]
    let s = t - j0 as f64;
    // Lagrange cubic through j0-1, j0, j0+1, j0+2
    let (f_m1, f_0, f_1, f_2) = (val(j0 - 1), val(j0), val(j0 + 1), val(j0 + 2));
    let a = -s * (s - 1.0) * (s - 2.0) / 6.0;
    let b = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
    let c = -(s + 1.0) * s * (s - 2.0) / 2.0;
    let d = (s + 1.0) * s * (s - 1.0) / 6.0;
    a * f_m1 + b * f_0 + c * f_1 + d * f_2
}

/// Resample onto another grid.
pub fn resample(f: &RadialProfile, grid: &RadialGrid) -> Result<RadialProfile> {
    let values = (0..grid.n()).map(|i| eval_cubic(f, grid.r(i))).collect();
    RadialProfile::new(grid.clone(), values)
}

/// Fourth-order radial derivative (five-point stencils, one-sided at ends).
pub fn derivative4(f: &RadialProfile) -> RadialProfile {
    let n = f.grid.n();
    let h = f.grid.h();
    let v = &f.values;
    let mut d = vec![0.0; n];
    debug_assert!(n >= 5);
    for i in 2..n - 2 {
        d[i] = (-v[i + 2] + 8.0 * v[i + 1] - 8.0 * v[i - 1] + v[i - 2]) / (12.0 * h);
    }
    d[0] = (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / (12.0 * h);
    d[1] = (-3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]) / (12.0 * h);
    d[n - 2] =
        (3.0 * v[n - 1] + 10.0 * v[n - 2] - 18.0 * v[n - 3] + 6.0 * v[n - 4] - v[n - 5])
            / (12.0 * h);
    d[n - 1] =
        (25.0 * v[n - 1] - 48.0 * v[n - 2] + 36.0 * v[n - 3] - 16.0 * v[n - 4] + 3.0 * v[n - 5])
            / (12.0 * h);
    RadialProfile {
        grid: f.grid.clone(),
        values: d,
    }
}
