use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::circle::{BoundaryFunction, CircleGrid};
use crate::error::{Error, Result};

use super::DiscFunction;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `u(re^{iθ}) = Σ_{|k| ≤ M} c_k r^{|k|} e^{ikθ}`, stored as `P(z) + Q(z̄)` with
/// `P(z) = Σ_{k ≥ 0} c_k z^k` and `Q(w) = Σ_{k ≥ 1} c_{-k} w^k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiskFunction {
    modes: usize,
    /// `c_k` at index `k + modes`.
    coeffs: Vec<Complex64>,
}

impl DiskFunction {
    /// Coefficients `c_{-M}, …, c_M` (odd length `2M + 1`).
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len().is_multiple_of(2) {
            return Err(Error::InvalidParameter {
                name: "coeffs",
                reason: format!("need 2M+1 coefficients, got {}", coeffs.len()),
            });
        }
        if let Some(k) = coeffs.iter().position(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::NonFinite { cell: k, value: coeffs[k].re });
        }
        Ok(Self { modes: coeffs.len() / 2, coeffs })
    }

    pub fn from_fn(modes: usize, c: impl Fn(i64) -> Complex64) -> Result<Self> {
        let m = modes as i64;
        Self::new((-m..=m).map(c).collect())
    }

    /// Analytic function with Taylor coefficients `a_0, a_1, …`.
    pub fn analytic(taylor: &[Complex64]) -> Result<Self> {
        let modes = taylor.len().saturating_sub(1);
        Self::from_fn(modes, |k| if k >= 0 { taylor[k as usize] } else { Complex64::new(0.0, 0.0) })
    }

    pub fn constant(c: f64) -> Self {
        Self { modes: 0, coeffs: vec![Complex64::new(c, 0.0)] }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn coefficient(&self, k: i64) -> Complex64 {
        if k.unsigned_abs() as usize > self.modes {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + self.modes as i64) as usize]
        }
    }

    fn map_coeffs(&self, f: impl Fn(i64, Complex64) -> Complex64) -> Self {
        let m = self.modes as i64;
        Self { modes: self.modes, coeffs: (-m..=m).map(|k| f(k, self.coefficient(k))).collect() }
    }

    /// Largest `|c_{-k} - conj(c_k)|`; zero for real-valued functions.
    pub fn reality_defect(&self) -> f64 {
        (0..=self.modes as i64)
            .map(|k| (self.coefficient(-k) - self.coefficient(k).conj()).norm())
            .fold(0.0, f64::max)
    }

    fn scale(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Harmonic conjugate `v` with `u + iv` analytic and `v(0) = 0`.
    pub fn conjugate(&self) -> Result<Self> {
        let mismatch = self.reality_defect();
        if mismatch > 1e-12 * self.scale().max(1.0) {
            return Err(Error::NotReal { mismatch });
        }
        Ok(self.map_coeffs(|k, c| -I * (k.signum() as f64) * c))
    }

    /// `z ↦ u(rz)`.
    pub fn dilate(&self, r: f64) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidParameter { name: "r", reason: format!("dilation must lie in (0, 1), got {r}") });
        }
        Ok(self.map_coeffs(|k, c| c * r.powi(k.abs() as i32)))
    }

    /// `Re f` for an analytic `f` (negative coefficients ignored).
    pub fn real_part(&self) -> Self {
        self.map_coeffs(|k, _| match k {
            0 => Complex64::new(self.coefficient(0).re, 0.0),
            k if k > 0 => 0.5 * self.coefficient(k),
            k => 0.5 * self.coefficient(-k).conj(),
        })
    }

    /// `Im f` for an analytic `f` (negative coefficients ignored).
    pub fn imag_part(&self) -> Self {
        self.map_coeffs(|k, _| match k {
            0 => Complex64::new(self.coefficient(0).im, 0.0),
            k if k > 0 => self.coefficient(k) / (2.0 * I),
            k => (self.coefficient(-k) / (2.0 * I)).conj(),
        })
    }

    /// `(P(z), P′(z), Q(w), Q′(w))` by Horner's rule.
    fn parts(&self, z: Complex64) -> (Complex64, Complex64, Complex64, Complex64) {
        let m = self.modes as i64;
        let w = z.conj();
        let zero = Complex64::new(0.0, 0.0);
        let (mut p, mut dp) = (zero, zero);
        for k in (0..=m).rev() {
            dp = dp * z + p;
            p = p * z + self.coefficient(k);
        }
        let (mut q, mut dq) = (zero, zero);
        for k in (1..=m).rev() {
            dq = dq * w + q;
            q = q * w + self.coefficient(-k);
        }
        // Q has no constant term: shift once
        dq = dq * w + q;
        q *= w;
        (p, dp, q, dq)
    }

    /// `(∂u/∂x, ∂u/∂y)`.
    pub fn gradient(&self, z: Complex64) -> (Complex64, Complex64) {
        let (_, dp, _, dq) = self.parts(z);
        (dp + dq, I * (dp - dq))
    }

    /// `|∂u/∂x|² + |∂u/∂y|²`.
    pub fn grad_norm_sq(&self, z: Complex64) -> f64 {
        let (ux, uy) = self.gradient(z);
        ux.norm_sqr() + uy.norm_sqr()
    }

    /// Values at the cell midpoints of the circle of radius `r ≤ 1`.
    pub fn sample(&self, grid: &CircleGrid, r: f64) -> Vec<Complex64> {
        grid.midpoints().into_iter().map(|t| self.value(Complex64::from_polar(r, t))).collect()
    }

    /// Real parts of the boundary values, as a cell function.
    pub fn boundary_real(&self, grid: &CircleGrid) -> Result<BoundaryFunction> {
        BoundaryFunction::new(grid.clone(), self.sample(grid, 1.0).iter().map(|v| v.re).collect())
    }

    /// `(k, Re c_k, Im c_k)` rows.
    pub fn coefficient_rows(&self) -> Vec<(i64, f64, f64)> {
        let m = self.modes as i64;
        (-m..=m).map(|k| (k, self.coefficient(k).re, self.coefficient(k).im)).collect()
    }

    /// Inverse of [`coefficient_rows`](Self::coefficient_rows); missing modes are zero.
    pub fn from_rows(rows: &[(i64, f64, f64)]) -> Result<Self> {
        let modes = rows.iter().map(|r| r.0.unsigned_abs() as usize).max().unwrap_or(0);
        Self::from_fn(modes, |k| {
            rows.iter()
                .filter(|r| r.0 == k)
                .map(|r| Complex64::new(r.1, r.2))
                .sum()
        })
    }
}

impl DiscFunction for DiskFunction {
    fn value(&self, z: Complex64) -> Complex64 {
        let (p, _, q, _) = self.parts(z);
        p + q
    }

    /// `∂u/∂z = P′(z)`; the complex derivative when `u` is analytic.
    fn derivative(&self, z: Complex64) -> Complex64 {
        self.parts(z).1
    }
}

/// Boundary data with computable Fourier coefficients
/// `ĝ(k) = (1/2π) ∫ g(θ) e^{-ikθ} dθ`.
pub trait BoundaryData {
    fn fourier_coefficient(&self, k: i64) -> Complex64;
}

impl BoundaryData for BoundaryFunction {
    /// Exact for the piecewise-constant interpretation.
    fn fourier_coefficient(&self, k: i64) -> Complex64 {
        let grid = self.grid();
        let edges = grid.edges();
        let mut sum = Complex64::new(0.0, 0.0);
        if k == 0 {
            for (j, &v) in self.values().iter().enumerate() {
                sum += v * grid.cell_measure(j);
            }
            return sum / TAU;
        }
        let kf = k as f64;
        let mut prev = Complex64::from_polar(1.0, -kf * edges[0]);
        for (j, &v) in self.values().iter().enumerate() {
            let next = Complex64::from_polar(1.0, -kf * edges[j + 1]);
            sum += v * (next - prev);
            prev = next;
        }
        sum / (Complex64::new(0.0, -kf) * TAU)
    }
}

/// `Σ_k c_k e^{ikθ}` with finitely many nonzero `c_k`.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct TrigPolynomial {
    terms: Vec<(i64, Complex64)>,
}

impl TrigPolynomial {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(mut self, k: i64, c: Complex64) -> Self {
        self.terms.push((k, c));
        self
    }

    /// `+ a cos(kθ)`
    pub fn cos(self, k: i64, a: f64) -> Self {
        self.add(k, Complex64::new(0.5 * a, 0.0)).add(-k, Complex64::new(0.5 * a, 0.0))
    }

    /// `+ b sin(kθ)`
    pub fn sin(self, k: i64, b: f64) -> Self {
        self.add(k, Complex64::new(0.0, -0.5 * b)).add(-k, Complex64::new(0.0, 0.5 * b))
    }

    pub fn degree(&self) -> usize {
        self.terms.iter().map(|t| t.0.unsigned_abs() as usize).max().unwrap_or(0)
    }

    pub fn eval(&self, theta: f64) -> Complex64 {
        self.terms.iter().map(|&(k, c)| c * Complex64::from_polar(1.0, k as f64 * theta)).sum()
    }

    /// Real parts at the cell midpoints.
    pub fn sample(&self, grid: &CircleGrid) -> Result<BoundaryFunction> {
        BoundaryFunction::from_fn(grid.clone(), |t| self.eval(t).re)
    }
}

impl BoundaryData for TrigPolynomial {
    fn fourier_coefficient(&self, k: i64) -> Complex64 {
        self.terms.iter().filter(|t| t.0 == k).map(|t| t.1).sum()
    }
}

/// Harmonic extension `Σ_{|k| ≤ modes} ĝ(k) r^{|k|} e^{ikθ}`.
pub fn poisson_extend(g: &impl BoundaryData, modes: usize) -> DiskFunction {
    let m = modes as i64;
    DiskFunction { modes, coeffs: (-m..=m).map(|k| g.fourier_coefficient(k)).collect() }
}
