//! Radial symmetric-decreasing rearrangement by measure-preserving
//! rebinning of node values, and the kinetic/Coulomb inequality checks
//! used by the existence argument.

use crate::energy::kinetic_energy;
use crate::error::{ChoquardError, Result};
use crate::grid::RadialProfile;
use crate::potential::coulomb_energy;

/// Cell volumes of the uniform radial measure 4*pi r^2 h.
fn cell_volumes(f: &RadialProfile) -> Vec<f64> {
    let h = f.grid.h();
    (0..f.grid.n())
        .map(|i| {
            let r = f.grid.r(i);
            4.0 * std::f64::consts::PI * r * r * h
        })
        .collect()
}

/// Symmetric-decreasing rearrangement: node values sorted descending by
/// their volume measure and reassigned inward, sampling the rearranged
/// quantile at each target cell's volume midpoint. Ties keep the original
/// radial order (stable sort), so nonincreasing inputs are fixed points.
pub fn rearrange(u: &RadialProfile) -> Result<RadialProfile> {
    let min = u.values.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < 0.0 {
        return Err(ChoquardError::NegativeInput(min));
    }
    let n = u.grid.n();
    let vols = cell_volumes(u);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| u.values[b].partial_cmp(&u.values[a]).unwrap());

    // cumulative volume of the sorted cells
    let mut cum = Vec::with_capacity(n + 1);
    cum.push(0.0);
    let mut acc = 0.0;
    for &j in &order {
        acc += vols[j];
        cum.push(acc);
    }
    // target cells share the same volume partition in radial order
    let mut tgt_acc = 0.0;
    let mut values = Vec::with_capacity(n);
    let mut k = 0usize; // source pointer, advances monotonically
    for vol in vols.iter().take(n) {
        let mid = tgt_acc + 0.5 * vol;
        tgt_acc += vol;
        while k + 1 < n && cum[k + 1] <= mid {
            k += 1;
        }
        values.push(u.values[order[k]]);
    }
    RadialProfile::new(u.grid.clone(), values)
}

/// Kinetic and Coulomb energies before and after rearrangement with the
/// discrete inequality flags (tolerance 1e-6 relative).
#[derive(Debug, Clone, Copy)]
pub struct RearrangementReport {
    pub k_before: f64,
    pub k_after: f64,
    pub d_before: f64,
    pub d_after: f64,
    pub k_ok: bool,
    pub d_ok: bool,
}

pub fn rearrangement_inequalities(u: &RadialProfile, p: f64) -> Result<RearrangementReport> {
    if !(p > 5.0 / 3.0 && p < 7.0 / 3.0) {
        return Err(ChoquardError::ExponentOutOfRange(p, 5.0 / 3.0, 7.0 / 3.0));
    }
    let us = rearrange(u)?;
    let k_before = kinetic_energy(u);
    let k_after = kinetic_energy(&us);
    let d_before = coulomb_energy(u, p)?;
    let d_after = coulomb_energy(&us, p)?;
    Ok(RearrangementReport {
        k_before,
        k_after,
        d_before,
        d_after,
        k_ok: k_after <= k_before + 1e-6 * k_before.abs(),
        d_ok: d_after >= d_before - 1e-6 * d_before.abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{integrate, norm_lq, QuadratureKind, QuadratureRule, RadialGrid};
    use approx::assert_relative_eq;

    #[test]
    fn rejects_negative_input() {
        let g = RadialGrid::new(64, 8.0).unwrap();
        let u = RadialProfile::from_fn(g, |r| 1.0 - r).unwrap();
        assert!(rearrange(&u).is_err());
    }

    #[test]
    fn nonincreasing_profile_is_fixed_point() {
        let g = RadialGrid::new(500, 20.0).unwrap();
        let u = RadialProfile::from_fn(g, |r| (-r).exp()).unwrap();
        let us = rearrange(&u).unwrap();
        assert_eq!(us.values, u.values);
    }

    #[test]
    fn idempotent() {
        let g = RadialGrid::new(400, 20.0).unwrap();
        let u = RadialProfile::from_fn(g, |r| ((3.0 * r).sin().abs()) * (-r / 3.0).exp())
            .unwrap();
        let once = rearrange(&u).unwrap();
        let twice = rearrange(&once).unwrap();
        assert_eq!(once.values, twice.values);
    }

    #[test]
    fn shell_moves_to_equal_volume_ball() {
        // indicator of the shell [5, 6] -> ball of radius (6^3 - 5^3)^{1/3}
        let g = RadialGrid::new(2000, 10.0).unwrap();
        let u = RadialProfile::from_fn(g.clone(), |r| {
            if (5.0..=6.0).contains(&r) {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        let us = rearrange(&u).unwrap();
        let r_ball = (6.0f64.powi(3) - 5.0f64.powi(3)).powf(1.0 / 3.0); // ~4.49794
        // support of the rearranged bump ends at r_ball (within a cell)
        let mut last_one = 0.0;
        for i in 0..g.n() {
            if us.values[i] > 0.5 {
                last_one = g.r(i);
            }
        }
        assert!((last_one - r_ball).abs() < 2.0 * g.h(), "edge at {last_one}, want {r_ball}");
        // volume is preserved
        let rule = QuadratureRule::new(QuadratureKind::Trapezoid, &g);
        assert_relative_eq!(
            integrate(&us, &rule),
            integrate(&u, &rule),
            max_relative = 2e-2
        );
    }

    #[test]
    fn norms_preserved_on_smooth_profile() {
        let g = RadialGrid::new(3000, 60.0).unwrap();
        let u = RadialProfile::from_fn(g.clone(), |r| {
            (-(r - 8.0) * (r - 8.0) / 12.0).exp() + 0.4 * (-r * r / 20.0).exp()
        })
        .unwrap();
        let us = rearrange(&u).unwrap();
        let rule = QuadratureRule::new(QuadratureKind::Simpson, &g);
        for q in [2.0, 6.0] {
            let a = norm_lq(&u, q, &rule).unwrap();
            let b = norm_lq(&us, q, &rule).unwrap();
            assert_relative_eq!(a, b, max_relative = 1e-4);
        }
    }

    #[test]
    fn order_preservation() {
        let g = RadialGrid::new(300, 15.0).unwrap();
        let u = RadialProfile::from_fn(g.clone(), |r| ((2.0 * r).sin().abs()) * (-r / 4.0).exp())
            .unwrap();
        let v = RadialProfile::new(
            g.clone(),
            u.values.iter().map(|x| x + 0.05).collect(),
        )
        .unwrap();
        let (us, vs) = (rearrange(&u).unwrap(), rearrange(&v).unwrap());
        for i in 0..g.n() {
            assert!(us.values[i] <= vs.values[i] + 1e-15);
        }
    }

    #[test]
    fn oscillating_profile_strict_inequalities() {
        let g = RadialGrid::new(3000, 60.0).unwrap();
        let u = RadialProfile::from_fn(g, |r| {
            ((-r).exp() * (1.0 + 0.5 * (3.0 * r).sin())).max(0.0)
        })
        .unwrap();
        let rep = rearrangement_inequalities(&u, 2.0).unwrap();
        assert!(rep.k_ok && rep.k_after < rep.k_before);
        assert!(rep.d_ok && rep.d_after > rep.d_before);
    }

    #[test]
    fn monotone_profile_equalities() {
        let g = RadialGrid::new(1000, 30.0).unwrap();
        let u = RadialProfile::from_fn(g, |r| (-r / 2.0).exp()).unwrap();
        let rep = rearrangement_inequalities(&u, 2.0).unwrap();
        assert!(rep.k_ok && rep.d_ok);
        assert_eq!(rep.k_before, rep.k_after);
        assert_eq!(rep.d_before, rep.d_after);
    }
}
