//! Modular families, modulars, Luxemburg-type norms and the constants that
//! control them.

mod constants;
mod family;

pub use constants::{
    doubling_constant, ratio, sci_constant, DoublingReport, DoublingSearch, SciReport, SciSearch,
};
pub use family::{
    log_plus, Bound, Envelope, Exponent, HardyFamilies, ModularFamily, PointFunction, Profile, Scalar,
};

use num_complex::Complex64;

use crate::circle::BoundaryFunction;
use crate::error::{Error, Result};

/// A nondecreasing map `[0, ∞) → [0, ∞)`.
pub trait ModularFunction {
    fn eval(&self, t: f64) -> f64;

    fn eval_complex(&self, z: Complex64) -> f64 {
        self.eval(z.norm())
    }
}

impl<F: Fn(f64) -> f64> ModularFunction for F {
    fn eval(&self, t: f64) -> f64 {
        self(t)
    }
}

const INVERSE_RTOL: f64 = 1e-12;

/// Generalized inverse `sup{t ∈ [0, t_max] : Φ(t) ≤ y}`.
///
/// On a flat stretch at height `y` this is the right end of the flat.
pub fn inverse(phi: &impl ModularFunction, y: f64, t_max: f64) -> Result<f64> {
    let floor = phi.eval(0.0);
    if y < floor {
        return Err(Error::BelowRange { target: y, floor });
    }
    let top = phi.eval(t_max);
    if top < y {
        return Err(Error::Unreachable { target: y, reached: top });
    }
    if top <= y {
        return Ok(t_max);
    }
    // bracket: Φ(lo) ≤ y < Φ(hi)
    let mut hi = t_max;
    let mut lo = 0.5 * t_max;
    while lo > f64::MIN_POSITIVE && phi.eval(lo) > y {
        hi = lo;
        lo *= 0.5;
    }
    if phi.eval(lo) > y {
        return Ok(0.0);
    }
    while hi - lo > INVERSE_RTOL * hi {
        let mid = 0.5 * (lo + hi);
        if phi.eval(mid) <= y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Generalized inverse without a caller-supplied ceiling: the ceiling is found
/// by doubling up to `1e300`.
pub fn inverse_unbounded(phi: &impl ModularFunction, y: f64) -> Result<f64> {
    let mut t_max = 1.0;
    while phi.eval(t_max) < y && t_max < 1e300 {
        t_max *= 2.0;
    }
    inverse(phi, y, t_max)
}

/// Precomputed per-cell data for repeated modular evaluations of one family on
/// one grid.
#[derive(Debug, Clone)]
pub struct CellModular<'a> {
    family: &'a ModularFamily,
    exponents: Vec<f64>,
    measures: Vec<f64>,
}

impl<'a> CellModular<'a> {
    pub fn new(family: &'a ModularFamily, grid: &crate::circle::CircleGrid) -> Self {
        let n = grid.n_cells();
        Self {
            family,
            exponents: (0..n).map(|j| family.exponent.eval(grid.midpoint(j))).collect(),
            measures: (0..n).map(|j| grid.cell_measure(j)).collect(),
        }
    }

    /// `Σ_j Φ_{x_j}(|v_j| / scale) m_j`. Infinite or NaN terms give `+∞`.
    pub fn eval_scaled(&self, values: &[f64], scale: f64) -> f64 {
        let mut total = 0.0;
        for ((&v, &p), &m) in values.iter().zip(&self.exponents).zip(&self.measures) {
            let term = self.family.profile.eval(p, v.abs() / scale);
            if term.is_nan() {
                return f64::INFINITY;
            }
            total += term * m;
        }
        total
    }

    pub fn eval(&self, values: &[f64]) -> f64 {
        self.eval_scaled(values, 1.0)
    }
}

/// `ρ_Φ(f) = Σ_j Φ_{x_j}(f_j)·m(cell_j)` with `x_j` the cell midpoint.
pub fn modular(fam: &ModularFamily, f: &BoundaryFunction) -> f64 {
    CellModular::new(fam, f.grid()).eval(f.values())
}

/// Search range for the norm bisection.
pub const NORM_FLOOR: f64 = 1e-30;
pub const NORM_CEILING: f64 = 1e30;
const NORM_LOG_TOL: f64 = 1e-11;

/// `‖f‖_(a) = inf{λ > 0 : ρ(f/λ) < a}`.
pub fn luxemburg_norm(fam: &ModularFamily, f: &BoundaryFunction, a: f64) -> Result<f64> {
    luxemburg_norm_of(&CellModular::new(fam, f.grid()), f.values(), a)
}

/// Norm bisection against a prepared cell modular; lets callers reuse the
/// per-cell exponents across many norms on one grid.
pub fn luxemburg_norm_of(cm: &CellModular<'_>, values: &[f64], a: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::InvalidParameter { name: "a", reason: format!("threshold must be positive, got {a}") });
    }
    let at_ceiling = cm.eval_scaled(values, NORM_CEILING);
    if at_ceiling >= a {
        return Err(Error::NormInfinite { modular: at_ceiling, threshold: a });
    }
    if cm.eval_scaled(values, NORM_FLOOR) < a {
        return Ok(0.0);
    }
    // ρ(f/e^lo) ≥ a > ρ(f/e^hi)
    let mut lo = NORM_FLOOR.ln();
    let mut hi = NORM_CEILING.ln();
    while hi - lo > NORM_LOG_TOL {
        let mid = 0.5 * (lo + hi);
        if cm.eval_scaled(values, mid.exp()) < a {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::CircleGrid;
    use std::f64::consts::{E, TAU};

    fn sq(t: f64) -> f64 {
        t * t
    }

    #[test]
    fn inverse_of_powers() {
        assert!((inverse(&sq, 9.0, 100.0).unwrap() - 3.0).abs() < 1e-11);
        let cube = |t: f64| t * t * t;
        assert!((inverse(&cube, 0.001, 10.0).unwrap() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn inverse_takes_right_edge_of_flat() {
        let fam = ModularFamily::log_type(Exponent::constant(0.0).unwrap(), 2.0).unwrap();
        let phi = fam.at(0.0);
        let t = inverse(&phi, 1.0, 50.0).unwrap();
        // dense scan for the last t with Φ(t) ≤ 1
        let scan = (0..=200_000)
            .map(|k| 50.0 * k as f64 / 200_000.0)
            .filter(|&t| phi.eval(t) <= 1.0)
            .fold(0.0, f64::max);
        assert!((t - 1.0).abs() < 1e-11);
        assert!((t - scan).abs() <= 50.0 / 200_000.0);
    }

    #[test]
    fn inverse_errors() {
        assert!(matches!(inverse(&sq, 1e6, 10.0), Err(Error::Unreachable { .. })));
        let fam = ModularFamily::var_exp_floored(Exponent::constant(2.0).unwrap());
        assert!(matches!(inverse(&fam.at(0.0), 0.5, 10.0), Err(Error::BelowRange { .. })));
    }

    #[test]
    fn modular_basics() {
        let grid = CircleGrid::uniform(16).unwrap();
        let fam = ModularFamily::var_exp(Exponent::constant(2.0).unwrap());
        let one = BoundaryFunction::constant(grid.clone(), 1.0).unwrap();
        assert!((modular(&fam, &one) - TAU).abs() < 1e-12);
        let zero = BoundaryFunction::constant(grid, 0.0).unwrap();
        assert_eq!(modular(&fam, &zero), 0.0);
    }

    #[test]
    fn norm_of_constant_square() {
        let grid = CircleGrid::uniform(8).unwrap();
        let fam = ModularFamily::var_exp(Exponent::constant(2.0).unwrap());
        let f = BoundaryFunction::constant(grid, 3.0).unwrap();
        let norm = luxemburg_norm(&fam, &f, 1.0).unwrap();
        assert!((norm / (3.0 * TAU.sqrt()) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn log_squared_example() {
        let grid = CircleGrid::from_breakpoints(&[0.01]).unwrap();
        let f = BoundaryFunction::new(grid, vec![E.powi(20), 0.0]).unwrap();
        let fam = ModularFamily::scalar(Scalar::LogPlusPower { a: 2.0 });
        assert!((modular(&fam, &f) - 4.0).abs() < 1e-9);
        let norm = luxemburg_norm(&fam, &f, 1.0).unwrap();
        assert!((norm / E.powi(10) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_and_infinite_norms() {
        let grid = CircleGrid::uniform(8).unwrap();
        let fam = ModularFamily::var_exp(Exponent::constant(2.0).unwrap());
        let zero = BoundaryFunction::constant(grid.clone(), 0.0).unwrap();
        assert_eq!(luxemburg_norm(&fam, &zero, 1.0).unwrap(), 0.0);
        let floored = ModularFamily::var_exp_floored(Exponent::constant(2.0).unwrap());
        assert!(matches!(luxemburg_norm(&floored, &zero, 1.0), Err(Error::NormInfinite { .. })));
    }
}
