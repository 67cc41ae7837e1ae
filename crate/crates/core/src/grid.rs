//! Radial grids, quadrature, norms and the sector Laplacian.
//!
//! Uniform mesh r_i = i*h, i = 1..n, origin excluded; the truncation radius
//! r_max = n*h carries a Dirichlet condition one ghost cell out. All volume
//! integrals reduce to 4*pi * int r^2 f(r) dr.

use crate::error::{ChoquardError, Result};
use std::f64::consts::PI;

/// Uniform radial mesh with the origin excluded.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    n: usize,
    h: f64,
    r_max: f64,
}

impl RadialGrid {
    /// Build a grid with n nodes at i*h, h = r_max/n.
    pub fn new(n: usize, r_max: f64) -> Result<Self> {
        if n < 16 {
            return Err(ChoquardError::TooFewNodes(n));
        }
        if !(r_max > 0.0) || !r_max.is_finite() {
            return Err(ChoquardError::NonPositiveRadius(r_max));
        }
        let h = r_max / n as f64;
        Ok(RadialGrid { n, h, r_max })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// Node radius r_i = (i+1)*h for storage index i in 0..n.
    pub fn r(&self, i: usize) -> f64 {
        (i + 1) as f64 * self.h
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.r(i)).collect()
    }
}

/// Sampled radial function on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub grid: RadialGrid,
    pub values: Vec<f64>,
}

impl RadialProfile {
    pub fn new(grid: RadialGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(ChoquardError::LengthMismatch {
                got: values.len(),
                expected: grid.n(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(ChoquardError::NonFiniteProfile);
        }
        Ok(RadialProfile { grid, values })
    }

    /// Sample f(r) at every node.
    pub fn from_fn(grid: RadialGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..grid.n()).map(|i| f(grid.r(i))).collect();
        RadialProfile::new(grid, values)
    }

    pub fn zeros(grid: RadialGrid) -> Self {
        let n = grid.n();
        RadialProfile {
            grid,
            values: vec![0.0; n],
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Serialize as CSV with header `r,value`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,value\n");
        for i in 0..self.grid.n() {
            out.push_str(&format!(
                "{},{}\n",
                crate::util::fmt_g17(self.grid.r(i)),
                crate::util::fmt_g17(self.values[i])
            ));
        }
        out
    }

    /// Parse the CSV form written by `to_csv`.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rs = Vec::new();
        let mut vs = Vec::new();
        for (k, line) in text.lines().enumerate() {
            if k == 0 {
                if line.trim() != "r,value" {
                    return Err(ChoquardError::Parse(format!(
                        "expected header 'r,value', got '{line}'"
                    )));
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let mut it = line.split(',');
            let (a, b) = (it.next(), it.next());
            match (a, b) {
                (Some(a), Some(b)) => {
                    rs.push(
                        a.trim()
                            .parse::<f64>()
                            .map_err(|e| ChoquardError::Parse(e.to_string()))?,
                    );
                    vs.push(
                        b.trim()
                            .parse::<f64>()
                            .map_err(|e| ChoquardError::Parse(e.to_string()))?,
                    );
                }
                _ => return Err(ChoquardError::Parse(format!("bad row '{line}'"))),
            }
        }
        if rs.len() < 16 {
            return Err(ChoquardError::Parse("fewer than 16 rows".into()));
        }
        let h = rs[0];
        let n = rs.len();
        let grid = RadialGrid::new(n, h * n as f64)?;
        for (i, &r) in rs.iter().enumerate() {
            if (r - grid.r(i)).abs() > 1e-9 * grid.r_max() {
                return Err(ChoquardError::Parse(format!(
                    "node {i} at r={r} is not on a uniform origin-excluded mesh"
                )));
            }
        }
        RadialProfile::new(grid, vs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureKind {
    Trapezoid,
    Simpson,
}

/// Nodal weights for 4*pi int_0^{r_max} r^2 f dr; the r^2 factor is folded in.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub kind: QuadratureKind,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// The integrand r^2 f vanishes at r = 0, so node 0 never appears.
    pub fn new(kind: QuadratureKind, grid: &RadialGrid) -> Self {
        let n = grid.n();
        let h = grid.h();
        let mut c = vec![0.0; n + 1]; // coefficients on nodes 0..n (node 0 dropped later)
        match kind {
            QuadratureKind::Trapezoid => {
                c[0] = 0.5;
                for ci in c.iter_mut().take(n).skip(1) {
                    *ci = 1.0;
                }
                c[n] = 0.5;
            }
            QuadratureKind::Simpson => {
                let m = if n % 2 == 0 { n } else { n - 3 };
                // composite Simpson over the first m intervals
                c[0] += 1.0 / 3.0;
                c[m] += 1.0 / 3.0;
                for (k, ci) in c.iter_mut().enumerate().take(m).skip(1) {
                    *ci += if k % 2 == 1 { 4.0 / 3.0 } else { 2.0 / 3.0 };
                }
                if n % 2 == 1 {
                    // 3/8 rule on the last three intervals
                    c[n - 3] += 3.0 / 8.0;
                    c[n - 2] += 9.0 / 8.0;
                    c[n - 1] += 9.0 / 8.0;
                    c[n] += 3.0 / 8.0;
                }
            }
        }
        let weights = (0..n)
            .map(|i| {
                let r = grid.r(i);
                4.0 * PI * r * r * h * c[i + 1]
            })
            .collect();
        QuadratureRule { kind, weights }
    }
}

/// 4*pi int_0^{r_max} r^2 f dr with the given rule.
pub fn integrate(f: &RadialProfile, rule: &QuadratureRule) -> f64 {
    debug_assert_eq!(rule.weights.len(), f.values.len());
    rule.weights
        .iter()
        .zip(&f.values)
        .map(|(w, v)| w * v)
        .sum()
}

/// Lq norm over R^3; q = f64::INFINITY gives the sup norm.
pub fn norm_lq(f: &RadialProfile, q: f64, rule: &QuadratureRule) -> Result<f64> {
    if q.is_infinite() && q > 0.0 {
        return Ok(f.max_abs());
    }
    if !(q >= 1.0) {
        return Err(ChoquardError::InvalidNormExponent(q));
    }
    let s: f64 = rule
        .weights
        .iter()
        .zip(&f.values)
        .map(|(w, v)| w * v.abs().powf(q))
        .sum();
    Ok(s.powf(1.0 / q))
}

/// Centered-difference radial derivative, one-sided at both ends.
pub fn gradient(f: &RadialProfile) -> RadialProfile {
    let n = f.grid.n();
    let h = f.grid.h();
    let v = &f.values;
    let mut d = vec![0.0; n];
    if n >= 2 {
        d[0] = (v[1] - v[0]) / h;
        d[n - 1] = (v[n - 1] - v[n - 2]) / h;
    }
    for i in 1..n - 1 {
        d[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
    }
    RadialProfile {
        grid: f.grid.clone(),
        values: d,
    }
}

/// H1 norm in the additive convention ||f||_2 + ||f'||_2.
pub fn norm_h1(f: &RadialProfile, rule: &QuadratureRule) -> f64 {
    let l2 = norm_lq(f, 2.0, rule).expect("q=2 is valid");
    let g = gradient(f);
    let gl2 = norm_lq(&g, 2.0, rule).expect("q=2 is valid");
    l2 + gl2
}

/// Symmetric tridiagonal realization of -w'' + l(l+1) w / r^2 in w = r*f,
/// with Dirichlet ghosts at r = 0 and r = r_max + h.
#[derive(Debug, Clone)]
pub struct SectorLaplacian {
    pub ell: usize,
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
    pub h: f64,
}

pub fn sector_laplacian(grid: &RadialGrid, ell: usize) -> SectorLaplacian {
    let n = grid.n();
    let h = grid.h();
    let hh = h * h;
    let ll = (ell * (ell + 1)) as f64;
    let diag = (0..n)
        .map(|i| {
            let r = grid.r(i);
            2.0 / hh + ll / (r * r)
        })
        .collect();
    let off = vec![-1.0 / hh; n.saturating_sub(1)];
    SectorLaplacian { ell, diag, off, h }
}

impl SectorLaplacian {
    /// y = A w.
    pub fn apply(&self, w: &[f64]) -> Vec<f64> {
        let n = w.len();
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = self.diag[i] * w[i];
            if i > 0 {
                s += self.off[i - 1] * w[i - 1];
            }
            if i + 1 < n {
                s += self.off[i] * w[i + 1];
            }
            y[i] = s;
        }
        y
    }

    /// Quadratic form w^T A w, written as a sum of squared edge differences
    /// plus the centrifugal diagonal (manifestly nonnegative).
    pub fn form(&self, w: &[f64]) -> f64 {
        let n = w.len();
        let hh = self.h * self.h;
        let mut s = 0.0;
        // edges 0-1, ..., (n-1)-n plus the two Dirichlet ghost edges
        s += w[0] * w[0] / hh;
        for i in 0..n - 1 {
            let d = w[i + 1] - w[i];
            s += d * d / hh;
        }
        s += w[n - 1] * w[n - 1] / hh;
        let ll = (self.ell * (self.ell + 1)) as f64;
        if ll > 0.0 {
            for (i, wi) in w.iter().enumerate() {
                let r = (i + 1) as f64 * self.h;
                s += ll * wi * wi / (r * r);
            }
        }
        s
    }
}

/// Action of -Delta restricted to the sector, in f-coordinates.
pub fn apply_sector_laplacian(op: &SectorLaplacian, f: &RadialProfile) -> RadialProfile {
    let n = f.grid.n();
    let w: Vec<f64> = (0..n).map(|i| f.grid.r(i) * f.values[i]).collect();
    let aw = op.apply(&w);
    let values = (0..n).map(|i| aw[i] / f.grid.r(i)).collect();
    RadialProfile {
        grid: f.grid.clone(),
        values,
    }
}

// ---- internal uniform-rule helpers (the solver's variational frame) ----
//
// On smooth exponentially decaying fields the plain uniform rule in w = r*f
// is spectrally accurate (all odd derivatives of r^2-weighted integrands
// vanish at the origin), and it makes the discrete energy an exact quadratic
// form of the tridiagonal solve operator.

/// 4*pi*h sum r_i^2 f_i g_i.
pub(crate) fn inner_uniform(grid: &RadialGrid, f: &[f64], g: &[f64]) -> f64 {
    let h = grid.h();
    let s: f64 = (0..grid.n())
        .map(|i| {
            let r = grid.r(i);
            r * r * f[i] * g[i]
        })
        .sum();
    4.0 * PI * h * s
}

/// int |u|^2 dx in the uniform rule.
pub(crate) fn mass_uniform(grid: &RadialGrid, u: &[f64]) -> f64 {
    inner_uniform(grid, u, u)
}

/// Kinetic energy (1/2) int |grad u|^2 dx = 2*pi int (w')^2 dr as the exact
/// Dirichlet form of the sector-0 tridiagonal.
pub(crate) fn kinetic_uniform(grid: &RadialGrid, u: &[f64]) -> f64 {
    let n = grid.n();
    let h = grid.h();
    let mut s = 0.0;
    let mut prev = 0.0; // ghost w_0 = 0
    for (i, ui) in u.iter().enumerate().take(n) {
        let w = grid.r(i) * ui;
        let d = w - prev;
        s += d * d;
        prev = w;
    }
    s += prev * prev; // ghost w_{n+1} = 0
    2.0 * PI * s / h
}
