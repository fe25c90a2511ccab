//! Functions on the unit disc and the maximal operators built from them.

mod cone;
mod control;
mod series;

pub use cone::{area_integral, area_integral_by, nt_max, nt_max_by, phi_max, phi_max_by, ConeSpec};
pub use control::{check_max_control, ControlKind, MaxControl, MaxControlReport};
pub use series::{poisson_extend, BoundaryData, DiskFunction, TrigPolynomial};

use num_complex::Complex64;

use crate::circle::BoundaryFunction;
use crate::error::Result;

/// Radius used for boundary values of functions that are not continuous up
/// to the circle.
pub const BOUNDARY_RADIUS: f64 = 1.0 - 1e-9;

/// A function on the open unit disc.
pub trait DiscFunction: Sync {
    fn value(&self, z: Complex64) -> Complex64;

    /// Complex derivative (for analytic functions) or `∂/∂z`.
    fn derivative(&self, z: Complex64) -> Complex64;

    /// Value on the unit circle. Functions singular on the circle override
    /// this with a radial limit.
    fn boundary_value(&self, theta: f64) -> Complex64 {
        self.value(Complex64::from_polar(1.0, theta))
    }

    /// `log |f(z)|`, which implementors may compute without forming `f(z)`.
    fn log_abs(&self, z: Complex64) -> f64 {
        self.value(z).norm().ln()
    }
}

/// `(M f)(x)`: the largest average of `f` over a run of grid cells containing
/// `x`, searched exhaustively over all `N²` runs.
pub fn hl_maximal(f: &BoundaryFunction) -> Result<BoundaryFunction> {
    let grid = f.grid();
    let n = grid.n_cells();
    let values = f.values();
    let uniform = grid.is_uniform();
    let measures: Vec<f64> = (0..n).map(|j| grid.cell_measure(j)).collect();
    let mut out = vec![f64::NEG_INFINITY; n];
    let mut averages = vec![0.0; n];
    for start in 0..n {
        let mut mass = 0.0;
        let mut length = 0.0;
        for (len, avg) in averages.iter_mut().enumerate() {
            let j = (start + len) % n;
            if uniform {
                mass += values[j];
                *avg = mass / (len + 1) as f64;
            } else {
                mass += values[j] * measures[j];
                length += measures[j];
                *avg = mass / length;
            }
        }
        // cell `start + d` lies in every run from `start` of length > d
        let mut best = f64::NEG_INFINITY;
        for d in (0..n).rev() {
            best = best.max(averages[d]);
            let j = (start + d) % n;
            if best > out[j] {
                out[j] = best;
            }
        }
    }
    BoundaryFunction::new(grid.clone(), out)
}
