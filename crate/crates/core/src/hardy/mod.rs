//! Hardy-space functionals on the disc, inner–outer factors, the Smirnov
//! class test and the comparison of the equivalent Hardy-space conditions.

mod analytic;
mod equivalence;

pub use analytic::{Analytic, OuterPart};
pub use equivalence::{equivalence_report, EquivalenceOptions, EquivalenceReport, PreconditionFlags, Quantity};

use num_complex::Complex64;
use serde::Serialize;

use crate::circle::CircleGrid;
use crate::error::{Error, Result};
use crate::harmonic::DiscFunction;
use crate::modular::{luxemburg_norm_of, CellModular, ModularFamily};

/// Radii `1 - 2^{-j}` for `j = 1..=levels`.
pub fn dyadic_radii(levels: u32) -> Vec<f64> {
    (1..=levels as i32).map(|j| 1.0 - 2f64.powi(-j)).collect()
}

/// `|f(r e^{iθ_j})|` at the cell midpoints, computed through `log|f|` so that
/// overflow shows up as `+∞` rather than NaN.
pub fn slice_moduli(f: &impl DiscFunction, grid: &CircleGrid, r: f64) -> Vec<f64> {
    grid.midpoints().iter().map(|&t| f.log_abs(Complex64::from_polar(r, t)).exp()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HardyModular {
    /// `(r, ρ_Φ(r, f))` along the radius grid.
    pub profile: Vec<(f64, f64)>,
    /// `max_r ρ_Φ(r, f)`.
    pub value: f64,
    pub argmax: f64,
    /// `ρ(r_last) - ρ(r_prev)`.
    pub last_delta: f64,
    /// The value passed the ceiling while still increasing.
    pub diverging: bool,
}

/// Default divergence ceiling for `ρ_{H_Φ}`.
pub const DIVERGENCE_CEILING: f64 = 1e6;

/// `ρ_{H_Φ}(f) ≈ max_{r ∈ radii} ρ_Φ(r, f)`.
pub fn rho_hardy(
    f: &impl DiscFunction,
    fam: &ModularFamily,
    grid: &CircleGrid,
    radii: &[f64],
    ceiling: f64,
) -> Result<HardyModular> {
    check_radii(radii)?;
    let cm = CellModular::new(fam, grid);
    let profile: Vec<(f64, f64)> = radii.iter().map(|&r| (r, cm.eval(&slice_moduli(f, grid, r)))).collect();
    Ok(summarize(profile, ceiling))
}

fn summarize(profile: Vec<(f64, f64)>, ceiling: f64) -> HardyModular {
    let (argmax, value) = profile.iter().copied().fold((profile[0].0, f64::NEG_INFINITY), |best, p| {
        if p.1 > best.1 {
            p
        } else {
            best
        }
    });
    let n = profile.len();
    let last_delta = if n >= 2 { profile[n - 1].1 - profile[n - 2].1 } else { 0.0 };
    let last_delta = if last_delta.is_nan() { f64::INFINITY } else { last_delta };
    let diverging = value > ceiling && last_delta > 0.0 || !value.is_finite();
    HardyModular { profile, value, argmax, last_delta, diverging }
}

fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.is_empty() {
        return Err(Error::InvalidParameter { name: "radii", reason: "empty radius grid".into() });
    }
    if let Some(&r) = radii.iter().find(|&&r| !(r > 0.0 && r < 1.0)) {
        return Err(Error::InvalidParameter { name: "radii", reason: format!("radius {r} outside (0, 1)") });
    }
    Ok(())
}

/// `‖f‖_{H_Φ,(a)} ≈ max_{r ∈ radii} ‖f_r‖_(a)`.
pub fn norm_hardy(f: &impl DiscFunction, fam: &ModularFamily, grid: &CircleGrid, a: f64, radii: &[f64]) -> Result<f64> {
    check_radii(radii)?;
    let cm = CellModular::new(fam, grid);
    radii
        .iter()
        .map(|&r| luxemburg_norm_of(&cm, &slice_moduli(f, grid, r), a))
        .try_fold(0.0, |acc: f64, v| Ok(acc.max(v?)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SmirnovVerdict {
    Smirnov,
    NotSmirnov,
    /// The means had not settled to within the tolerance.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmirnovReport {
    /// `(r, (1/2π) ∫ log⁺|f(re^{iθ})| dθ)`.
    pub means: Vec<(f64, f64)>,
    /// Richardson extrapolation `2 v_last - v_prev` of the means.
    pub limit: f64,
    /// `(1/2π) ∫ log⁺|f(e^{iθ})| dθ`.
    pub boundary: f64,
    pub gap: f64,
    pub last_delta: f64,
    pub verdict: SmirnovVerdict,
}

impl SmirnovReport {
    pub fn is_smirnov(&self) -> bool {
        self.verdict == SmirnovVerdict::Smirnov
    }
}

/// Compare the limit of the `log⁺` means of `f_r` with the boundary mean.
///
/// At radius `r` the mean uses `max(min_samples, 2^⌈log₂(64/(1-r))⌉)` equally
/// spaced points, enough to resolve features of width `1 - r`.
pub fn smirnov_test(f: &impl DiscFunction, radii: &[f64], tol: f64, min_samples: usize) -> Result<SmirnovReport> {
    check_radii(radii)?;
    if radii.len() < 2 {
        return Err(Error::InvalidParameter { name: "radii", reason: "need at least two radii".into() });
    }
    let samples = |r: f64| ((64.0 / (1.0 - r)).ceil() as usize).next_power_of_two().max(min_samples);
    let means: Vec<(f64, f64)> = radii
        .iter()
        .map(|&r| {
            let n = samples(r);
            let sum: f64 = (0..n)
                .map(|k| f.log_abs(Complex64::from_polar(r, std::f64::consts::TAU * (k as f64 + 0.5) / n as f64)).max(0.0))
                .sum();
            (r, sum / n as f64)
        })
        .collect();
    let n_b = samples(*radii.last().unwrap());
    let boundary = (0..n_b)
        .map(|k| f.boundary_value(std::f64::consts::TAU * (k as f64 + 0.5) / n_b as f64).norm().ln().max(0.0))
        .sum::<f64>()
        / n_b as f64;
    let (v_prev, v_last) = (means[means.len() - 2].1, means[means.len() - 1].1);
    let last_delta = v_last - v_prev;
    let limit = 2.0 * v_last - v_prev;
    let gap = (limit - boundary).abs();
    let verdict = if !(last_delta.abs() <= tol) {
        SmirnovVerdict::Inconclusive
    } else if gap <= tol {
        SmirnovVerdict::Smirnov
    } else {
        SmirnovVerdict::NotSmirnov
    };
    Ok(SmirnovReport { means, limit, boundary, gap, last_delta, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::BoundaryFunction;
    use crate::harmonic::DiskFunction;
    use crate::modular::Exponent;
    use std::f64::consts::TAU;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn constant_function_functionals() {
        let grid = CircleGrid::uniform(32).unwrap();
        let fam = ModularFamily::var_exp(Exponent::constant(2.0).unwrap());
        let f = Analytic::constant(c(3.0));
        let radii = dyadic_radii(6);
        let rho = rho_hardy(&f, &fam, &grid, &radii, DIVERGENCE_CEILING).unwrap();
        assert!(rho.profile.iter().all(|p| (p.1 - TAU * 9.0).abs() < 1e-9));
        assert!(!rho.diverging);
        let norm = norm_hardy(&f, &fam, &grid, 1.0, &radii).unwrap();
        assert!((norm / (3.0 * TAU.sqrt()) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn norm_at_threshold_equal_to_modular_is_one() {
        let grid = CircleGrid::uniform(64).unwrap();
        let fam = ModularFamily::var_exp(Exponent::smooth(1.5, 2.5).unwrap());
        let f = Analytic::pole_power(c(0.5), 1.0).unwrap();
        let radii = dyadic_radii(8);
        let rho = rho_hardy(&f, &fam, &grid, &radii, DIVERGENCE_CEILING).unwrap();
        let norm = norm_hardy(&f, &fam, &grid, rho.value, &radii).unwrap();
        assert!((norm - 1.0).abs() < 1e-9);
        let n2 = norm_hardy(&f, &fam, &grid, 2.0 * rho.value, &radii).unwrap();
        assert!(n2 <= norm);
    }

    #[test]
    fn polynomial_is_smirnov() {
        let p = DiskFunction::analytic(&[c(1.0), c(2.0), c(0.0), c(-1.5)]).unwrap();
        let r = smirnov_test(&p, &dyadic_radii(12), 1e-3, 256).unwrap();
        assert_eq!(r.verdict, SmirnovVerdict::Smirnov, "{r:?}");
    }

    #[test]
    fn inverse_singular_inner_is_not_smirnov() {
        let f = Analytic::singular_inner(vec![(0.0, 1.0)]).unwrap().inverse();
        let r = smirnov_test(&f, &dyadic_radii(12), 1e-3, 256).unwrap();
        assert_eq!(r.verdict, SmirnovVerdict::NotSmirnov);
        assert!((r.limit - 1.0).abs() < 1e-6 && r.boundary.abs() < 1e-9);
        let grid = CircleGrid::uniform(1024).unwrap();
        let fam = ModularFamily::var_exp_floored(Exponent::smooth(1.5, 2.5).unwrap());
        assert!(rho_hardy(&f, &fam, &grid, &dyadic_radii(12), DIVERGENCE_CEILING).unwrap().diverging);
    }

    #[test]
    fn outer_of_constant_two_is_smirnov() {
        let l = BoundaryFunction::constant(CircleGrid::uniform(64).unwrap(), 2f64.ln()).unwrap();
        let f = Analytic::outer(l, OuterPart::Full);
        let r = smirnov_test(&f, &dyadic_radii(10), 1e-6, 64).unwrap();
        assert!(r.is_smirnov(), "{r:?}");
    }
}
