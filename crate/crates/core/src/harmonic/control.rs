use serde::Serialize;

use crate::circle::{BoundaryFunction, CircleGrid};
use crate::error::{Error, Result};
use crate::modular::{log_plus, CellModular, ModularFamily, Scalar};

use super::{hl_maximal, nt_max, ConeSpec, DiscFunction};

/// Which maximal inequality is being measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ControlKind {
    /// `∫ Ψ(Φ_t(u*))` against `∫ Ψ(Φ_t(|u|))` on the circle.
    Harmonic,
    /// As `Harmonic` with `log⁺|f|` and `log⁺ f*` for analytic `f`.
    LogPlusAnalytic,
    /// `ρ_{Ψ∘Φ}(M f)` against `ρ_{Ψ∘Φ}(f)`.
    HardyLittlewood,
}

/// A function paired with its maximal function, ready for modular comparisons
/// at any scale `c` (the pair for `c·u` is obtained without recomputation).
#[derive(Debug, Clone)]
pub struct MaxControl {
    pub kind: ControlKind,
    grid: CircleGrid,
    boundary: Vec<f64>,
    maximal: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaxControlReport {
    pub kind: ControlKind,
    /// Bound imposed on the input modular.
    pub a: f64,
    /// Multiplier applied to the function.
    pub scale: f64,
    pub input: f64,
    /// The realized bound `B̂(A)` on the maximal-function modular.
    pub output: f64,
}

impl MaxControl {
    pub fn harmonic(u: &impl DiscFunction, grid: &CircleGrid, cone: &ConeSpec) -> Result<Self> {
        let boundary = grid.midpoints().iter().map(|&t| u.boundary_value(t).norm()).collect();
        let maximal = nt_max(u, grid, cone)?.values().to_vec();
        Ok(Self { kind: ControlKind::Harmonic, grid: grid.clone(), boundary, maximal })
    }

    pub fn log_plus_analytic(f: &impl DiscFunction, grid: &CircleGrid, cone: &ConeSpec) -> Result<Self> {
        Ok(Self { kind: ControlKind::LogPlusAnalytic, ..Self::harmonic(f, grid, cone)? })
    }

    pub fn hardy_littlewood(f: &BoundaryFunction) -> Result<Self> {
        let boundary: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
        let abs = BoundaryFunction::new(f.grid().clone(), boundary.clone())?;
        let maximal = hl_maximal(&abs)?.values().to_vec();
        Ok(Self { kind: ControlKind::HardyLittlewood, grid: f.grid().clone(), boundary, maximal })
    }

    pub fn maximal(&self) -> &[f64] {
        &self.maximal
    }

    fn transformed(&self, values: &[f64], c: f64) -> Vec<f64> {
        match self.kind {
            ControlKind::LogPlusAnalytic => values.iter().map(|&v| log_plus(c * v)).collect(),
            _ => values.iter().map(|&v| c * v).collect(),
        }
    }

    /// `(input, output)` modulars of `Ψ ∘ Φ` at scale `c`.
    pub fn modulars(&self, composed: &CellModular<'_>, c: f64) -> (f64, f64) {
        (
            composed.eval(&self.transformed(&self.boundary, c)),
            composed.eval(&self.transformed(&self.maximal, c)),
        )
    }

    /// Compare at scale 1; the input modular must not exceed `a`.
    pub fn check(&self, phi: &ModularFamily, psi: Scalar, a: f64) -> Result<MaxControlReport> {
        let fam = phi.clone().compose_outer(psi);
        let cm = CellModular::new(&fam, &self.grid);
        let (input, output) = self.modulars(&cm, 1.0);
        if input > a {
            return Err(Error::Precondition(format!("input modular {input} exceeds the bound A = {a}")));
        }
        Ok(MaxControlReport { kind: self.kind, a, scale: 1.0, input, output })
    }

    /// For each `A`, rescale so the input modular equals `A` (from below) and
    /// record the maximal-function modular there.
    pub fn sweep(&self, phi: &ModularFamily, psi: Scalar, a_values: &[f64]) -> Result<Vec<MaxControlReport>> {
        let fam = phi.clone().compose_outer(psi);
        let cm = CellModular::new(&fam, &self.grid);
        a_values
            .iter()
            .map(|&a| {
                let c = self.scale_for(&cm, a)?;
                let (input, output) = self.modulars(&cm, c);
                Ok(MaxControlReport { kind: self.kind, a, scale: c, input, output })
            })
            .collect()
    }

    /// Largest `c` (to 1e-12 relative) with input modular `≤ a`.
    fn scale_for(&self, cm: &CellModular<'_>, a: f64) -> Result<f64> {
        let input = |c: f64| self.modulars(cm, c).0;
        if input(0.0) > a {
            return Err(Error::Precondition(format!("A = {a} lies below the modular of the zero function")));
        }
        let mut hi = 1.0;
        while input(hi) <= a {
            hi *= 2.0;
            if hi > 1e300 {
                return Err(Error::Precondition(format!("input modular never reaches A = {a}")));
            }
        }
        let mut lo = 0.0;
        while hi - lo > 1e-12 * hi {
            let mid = 0.5 * (lo + hi);
            if input(mid) <= a {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    }
}

/// One-shot form of [`MaxControl::check`].
pub fn check_max_control(control: &MaxControl, phi: &ModularFamily, psi: Scalar, a: f64) -> Result<MaxControlReport> {
    control.check(phi, psi, a)
}
