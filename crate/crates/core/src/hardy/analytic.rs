use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::circle::BoundaryFunction;
use crate::error::{Error, Result};
use crate::harmonic::{DiscFunction, DiskFunction, BOUNDARY_RADIUS};

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Which part of `log|f|` an outer function is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OuterPart {
    /// `log|f|`
    Full,
    /// `log⁺|f|`, giving `F_b`.
    Bounded,
    /// `-log⁻|f| = min(log|f|, 0)`, giving `F_s`.
    Small,
}

/// Analytic functions on the disc with closed-form values and derivatives.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Analytic {
    Constant { c: Complex64 },
    /// `(1 - w z)^{-a}`, principal branch.
    PolePower { w: Complex64, a: f64 },
    Blaschke { zeros: Vec<Complex64> },
    /// `exp(-Σ m_j (e^{iθ_j} + z)/(e^{iθ_j} - z))` for atoms `(θ_j, m_j)`.
    SingularInner { atoms: Vec<(f64, f64)> },
    /// `exp((1/2π) ∫ (e^{it} + z)/(e^{it} - z) L(t) dt)` with `L` the chosen part
    /// of a cellwise log-modulus.
    Outer {
        #[serde(skip)]
        log_modulus: BoundaryFunction,
        part: OuterPart,
    },
    Inverse { inner: Box<Analytic> },
    Product { factors: Vec<Analytic> },
    Series { series: DiskFunction },
}

impl Analytic {
    pub fn constant(c: Complex64) -> Self {
        Self::Constant { c }
    }

    /// `(1 - w z)^{-a}` with `|w| ≤ 1`.
    pub fn pole_power(w: Complex64, a: f64) -> Result<Self> {
        if w.norm() > 1.0 {
            return Err(Error::OutsideDisc { modulus: 1.0 / w.norm() });
        }
        if !a.is_finite() {
            return Err(Error::InvalidParameter { name: "power", reason: format!("must be finite, got {a}") });
        }
        Ok(Self::PolePower { w, a })
    }

    /// `Π (|a|/a)(a - z)/(1 - ā z)`, with the factor `z` for `a = 0`.
    pub fn blaschke(zeros: Vec<Complex64>) -> Result<Self> {
        if let Some(a) = zeros.iter().find(|a| a.norm() >= 1.0) {
            return Err(Error::OutsideDisc { modulus: a.norm() });
        }
        Ok(Self::Blaschke { zeros })
    }

    pub fn singular_inner(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if let Some(&(_, m)) = atoms.iter().find(|a| !(a.1 >= 0.0 && a.1.is_finite())) {
            return Err(Error::InvalidParameter { name: "mass", reason: format!("atom masses must be nonnegative, got {m}") });
        }
        Ok(Self::SingularInner { atoms })
    }

    pub fn outer(log_modulus: BoundaryFunction, part: OuterPart) -> Self {
        let log_modulus = match part {
            OuterPart::Full => log_modulus,
            OuterPart::Bounded => log_modulus.map(|v| v.max(0.0)).expect("clamping keeps values finite"),
            OuterPart::Small => log_modulus.map(|v| v.min(0.0)).expect("clamping keeps values finite"),
        };
        Self::Outer { log_modulus, part }
    }

    pub fn inverse(self) -> Self {
        Self::Inverse { inner: Box::new(self) }
    }

    pub fn product(factors: Vec<Analytic>) -> Self {
        Self::Product { factors }
    }

    /// `B·S·F` from zeros, singular atoms and a log-modulus.
    pub fn factorized(zeros: Vec<Complex64>, atoms: Vec<(f64, f64)>, log_modulus: BoundaryFunction) -> Result<Self> {
        Ok(Self::product(vec![
            Self::blaschke(zeros)?,
            Self::singular_inner(atoms)?,
            Self::outer(log_modulus, OuterPart::Full),
        ]))
    }

    /// `(G(z), G′(z))` for the Herglotz integral `G` of the outer data.
    fn herglotz(log_modulus: &BoundaryFunction, z: Complex64) -> (Complex64, Complex64) {
        let grid = log_modulus.grid();
        let edges = grid.edges();
        let n = grid.n_cells();
        if n == 1 {
            return (Complex64::new(log_modulus.values()[0], 0.0), ZERO);
        }
        let mut g = ZERO;
        let mut dg = ZERO;
        let mut wa = Complex64::from_polar(1.0, edges[0]) - z;
        for (j, &l) in log_modulus.values().iter().enumerate() {
            let wb = Complex64::from_polar(1.0, edges[j + 1]) - z;
            if l != 0.0 {
                // arg(w - z) increases monotonically along the circle
                let darg = (wb / wa).arg().rem_euclid(TAU);
                let integral = Complex64::new(-(edges[j + 1] - edges[j]) + 2.0 * darg, -2.0 * (wb.norm() / wa.norm()).ln());
                g += l * integral;
                dg += l * 2.0 * I * (1.0 / wb - 1.0 / wa);
            }
            wa = wb;
        }
        (g / TAU, dg / TAU)
    }

    /// Sum of `m_j (e^{iθ_j} + z)/(e^{iθ_j} - z)` and its derivative.
    fn atom_sum(atoms: &[(f64, f64)], z: Complex64) -> (Complex64, Complex64) {
        atoms.iter().fold((ZERO, ZERO), |(h, dh), &(theta, m)| {
            let e = Complex64::from_polar(1.0, theta);
            (h + m * (e + z) / (e - z), dh + m * 2.0 * e / ((e - z) * (e - z)))
        })
    }
}

impl DiscFunction for Analytic {
    fn value(&self, z: Complex64) -> Complex64 {
        match self {
            Self::Constant { c } => *c,
            Self::PolePower { w, a } => (-a * (ONE - w * z).ln()).exp(),
            Self::Blaschke { zeros } => zeros.iter().map(|&a| blaschke_factor(a, z)).product(),
            Self::SingularInner { atoms } => (-Self::atom_sum(atoms, z).0).exp(),
            Self::Outer { log_modulus, .. } => Self::herglotz(log_modulus, z).0.exp(),
            Self::Inverse { inner } => 1.0 / inner.value(z),
            Self::Product { factors } => factors.iter().map(|f| f.value(z)).product(),
            Self::Series { series } => series.value(z),
        }
    }

    fn derivative(&self, z: Complex64) -> Complex64 {
        match self {
            Self::Constant { .. } => ZERO,
            Self::PolePower { w, a } => a * w * (-(a + 1.0) * (ONE - w * z).ln()).exp(),
            Self::Blaschke { zeros } => (0..zeros.len())
                .map(|i| {
                    zeros.iter().enumerate().fold(ONE, |acc, (j, &a)| {
                        acc * if i == j { blaschke_factor_derivative(a, z) } else { blaschke_factor(a, z) }
                    })
                })
                .sum(),
            Self::SingularInner { atoms } => {
                let (h, dh) = Self::atom_sum(atoms, z);
                -dh * (-h).exp()
            }
            Self::Outer { log_modulus, .. } => {
                let (g, dg) = Self::herglotz(log_modulus, z);
                dg * g.exp()
            }
            Self::Inverse { inner } => {
                let v = inner.value(z);
                -inner.derivative(z) / (v * v)
            }
            Self::Product { factors } => (0..factors.len())
                .map(|i| {
                    factors.iter().enumerate().fold(ONE, |acc, (j, f)| {
                        acc * if i == j { f.derivative(z) } else { f.value(z) }
                    })
                })
                .sum(),
            Self::Series { series } => series.derivative(z),
        }
    }

    fn boundary_value(&self, theta: f64) -> Complex64 {
        let z = Complex64::from_polar(1.0, theta);
        match self {
            Self::Outer { log_modulus, .. } => {
                let g = Self::herglotz(log_modulus, Complex64::from_polar(BOUNDARY_RADIUS, theta)).0;
                Complex64::from_polar(log_modulus.value_at(theta).exp(), g.im)
            }
            Self::Inverse { inner } => 1.0 / inner.boundary_value(theta),
            Self::Product { factors } => factors.iter().map(|f| f.boundary_value(theta)).product(),
            Self::PolePower { w, .. } if (ONE - w * z).norm() < 1e-12 => {
                self.value(Complex64::from_polar(BOUNDARY_RADIUS, theta))
            }
            _ => self.value(z),
        }
    }

    fn log_abs(&self, z: Complex64) -> f64 {
        match self {
            Self::Constant { c } => c.norm().ln(),
            Self::PolePower { w, a } => -a * (ONE - w * z).norm().ln(),
            Self::Blaschke { zeros } => zeros.iter().map(|&a| blaschke_factor(a, z).norm().ln()).sum(),
            Self::SingularInner { atoms } => -Self::atom_sum(atoms, z).0.re,
            Self::Outer { log_modulus, .. } => Self::herglotz(log_modulus, z).0.re,
            Self::Inverse { inner } => -inner.log_abs(z),
            Self::Product { factors } => factors.iter().map(|f| f.log_abs(z)).sum(),
            Self::Series { series } => series.value(z).norm().ln(),
        }
    }
}

fn blaschke_factor(a: Complex64, z: Complex64) -> Complex64 {
    if a == ZERO {
        z
    } else {
        (a.norm() / a) * (a - z) / (ONE - a.conj() * z)
    }
}

fn blaschke_factor_derivative(a: Complex64, z: Complex64) -> Complex64 {
    if a == ZERO {
        ONE
    } else {
        let d = ONE - a.conj() * z;
        (a.norm() / a) * (a.norm_sqr() - 1.0) / (d * d)
    }
}
