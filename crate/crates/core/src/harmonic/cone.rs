use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::circle::{Arc, BoundaryFunction, CircleGrid};
use crate::error::{Error, Result};
use crate::modular::{Bound, ModularFamily, ModularFunction};

use super::{DiscFunction, DiskFunction};

/// Approach region `Γ_θ = {re^{it} : |t - θ| < aperture·(1 - r)}` sampled on
/// the radii `0, 1/2, 3/4, …, r_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConeSpec {
    pub aperture: f64,
    pub r_max: f64,
}

impl Default for ConeSpec {
    fn default() -> Self {
        Self { aperture: 0.5, r_max: 1.0 - 2f64.powi(-12) }
    }
}

impl ConeSpec {
    pub fn new(aperture: f64, r_max: f64) -> Result<Self> {
        if !(aperture > 0.0 && aperture.is_finite()) {
            return Err(Error::InvalidParameter { name: "aperture", reason: format!("must be positive, got {aperture}") });
        }
        if !(r_max > 0.0 && r_max < 1.0) {
            return Err(Error::InvalidParameter { name: "r_max", reason: format!("must lie in (0, 1), got {r_max}") });
        }
        Ok(Self { aperture, r_max })
    }

    /// `0` and `1 - 2^{-j}` up to `r_max`, ending exactly at `r_max`.
    pub fn radii(&self) -> Vec<f64> {
        let mut radii = vec![0.0];
        let mut j = 1;
        loop {
            let r = 1.0 - 2f64.powi(-j);
            if r > self.r_max + 1e-15 {
                break;
            }
            radii.push(r);
            j += 1;
        }
        if *radii.last().unwrap() < self.r_max - 1e-15 {
            radii.push(self.r_max);
        }
        radii
    }

    pub fn half_width(&self, r: f64) -> f64 {
        self.aperture * (1.0 - r)
    }

    /// Angular offsets `k(1 - r)/8` with `|k| < 8·aperture`.
    pub fn offsets(&self, r: f64) -> impl Iterator<Item = f64> {
        let k_max = ((8.0 * self.aperture).ceil() as i64 - 1).max(0);
        let step = (1.0 - r) / 8.0;
        (-k_max..=k_max).map(move |k| k as f64 * step)
    }
}

/// Sup of `modulus` over the sampled cone at every cell midpoint.
///
/// Fails with [`Error::NonFinite`] if the supremum overflows at some cell.
pub fn nt_max_by(grid: &CircleGrid, cone: &ConeSpec, modulus: impl Fn(Complex64) -> f64 + Sync) -> Result<BoundaryFunction> {
    let radii = cone.radii();
    let values: Vec<f64> = grid
        .midpoints()
        .par_iter()
        .map(|&theta| {
            let mut best: f64 = 0.0;
            for &r in &radii {
                for off in cone.offsets(r) {
                    let v = modulus(Complex64::from_polar(r, theta + off));
                    best = if v.is_nan() { f64::INFINITY } else { best.max(v) };
                }
            }
            best
        })
        .collect();
    BoundaryFunction::new(grid.clone(), values)
}

/// `u*(θ) = sup_{Γ_θ} |u|`.
pub fn nt_max(u: &impl DiscFunction, grid: &CircleGrid, cone: &ConeSpec) -> Result<BoundaryFunction> {
    nt_max_by(grid, cone, |z| u.value(z).norm())
}

const GL_NODES: [f64; 5] = [-0.906_179_845_938_664, -0.538_469_310_105_683_1, 0.0, 0.538_469_310_105_683_1, 0.906_179_845_938_664];
const GL_WEIGHTS: [f64; 5] = [0.236_926_885_056_189_1, 0.478_628_670_499_366_5, 0.568_888_888_888_888_9, 0.478_628_670_499_366_5, 0.236_926_885_056_189_1];

/// `(∬_{Γ_θ} g dA)^{1/2}` for a nonnegative density `g`, by Gauss–Legendre
/// quadrature on each radial band `[r_j, r_{j+1}]` and across the cone.
pub fn area_integral_by(grid: &CircleGrid, cone: &ConeSpec, density: impl Fn(Complex64) -> f64 + Sync) -> Result<BoundaryFunction> {
    let radii = cone.radii();
    let values: Vec<f64> = grid
        .midpoints()
        .par_iter()
        .map(|&theta| {
            let mut total = 0.0;
            for band in radii.windows(2) {
                let (a, b) = (band[0], band[1]);
                let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
                for (&xr, &wr) in GL_NODES.iter().zip(&GL_WEIGHTS) {
                    let r = mid + half * xr;
                    let hw = cone.half_width(r);
                    let mut inner = 0.0;
                    for (&xt, &wt) in GL_NODES.iter().zip(&GL_WEIGHTS) {
                        inner += wt * density(Complex64::from_polar(r, theta + hw * xt));
                    }
                    total += wr * half * inner * hw * r;
                }
            }
            if total.is_nan() {
                f64::INFINITY
            } else {
                total.sqrt()
            }
        })
        .collect();
    BoundaryFunction::new(grid.clone(), values)
}

/// Lusin area integral `Au(θ) = (∬_{Γ_θ} |∇u|² dA)^{1/2}`.
pub fn area_integral(u: &DiskFunction, grid: &CircleGrid, cone: &ConeSpec) -> Result<BoundaryFunction> {
    area_integral_by(grid, cone, |z| u.grad_norm_sq(z))
}

/// `sup_{re^{it} ∈ Γ_θ} Φ_{I(θ,r),+}(modulus(re^{it}))` with aperture 1/2 and
/// `I(θ, r)` the arc of length `1 - r` centred at `θ`.
pub fn phi_max_by(
    grid: &CircleGrid,
    fam: &ModularFamily,
    r_max: f64,
    modulus: impl Fn(Complex64) -> f64 + Sync,
) -> Result<BoundaryFunction> {
    let cone = ConeSpec::new(0.5, r_max)?;
    let radii = cone.radii();
    let values: Result<Vec<f64>> = grid
        .midpoints()
        .par_iter()
        .map(|&theta| {
            let mut best: f64 = 0.0;
            for &r in &radii {
                let mut m: f64 = 0.0;
                for off in cone.offsets(r) {
                    let v = modulus(Complex64::from_polar(r, theta + off));
                    m = if v.is_nan() { f64::INFINITY } else { m.max(v) };
                }
                let arc = Arc::centered(theta, 1.0 - r)?;
                let env = fam.envelope_on_arc(&arc, (1.0 - r) / 32.0, Bound::Upper);
                best = best.max(env.eval(m));
            }
            Ok(best)
        })
        .collect();
    BoundaryFunction::new(grid.clone(), values?)
}

/// The Φ-maximal function `u*_Φ`.
pub fn phi_max(u: &impl DiscFunction, fam: &ModularFamily, grid: &CircleGrid, r_max: f64) -> Result<BoundaryFunction> {
    phi_max_by(grid, fam, r_max, |z| u.value(z).norm())
}
