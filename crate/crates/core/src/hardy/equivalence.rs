use std::f64::consts::TAU;

use serde::Serialize;

use crate::circle::CircleGrid;
use crate::error::{Error, Result};
use crate::harmonic::{area_integral_by, nt_max_by, ConeSpec, DiscFunction};
use crate::modular::{
    doubling_constant, log_plus, sci_constant, CellModular, DoublingSearch, HardyFamilies, ModularFamily, SciSearch,
};

use super::{dyadic_radii, rho_hardy, slice_moduli, smirnov_test, HardyModular, SmirnovReport, DIVERGENCE_CEILING};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceOptions {
    pub cone: ConeSpec,
    pub radii: Vec<f64>,
    /// Bound placed on one modular when measuring `B̂(A)`.
    pub a: f64,
    pub ceiling: f64,
    pub smirnov_tol: f64,
    /// Modulus at which the SCI profiles are measured.
    pub sci_modulus: f64,
    pub sci: SciSearch,
    pub doubling: DoublingSearch,
}

impl Default for EquivalenceOptions {
    fn default() -> Self {
        Self {
            cone: ConeSpec::default(),
            radii: dyadic_radii(12),
            a: 10.0,
            ceiling: DIVERGENCE_CEILING,
            smirnov_tol: 1e-3,
            sci_modulus: 1.0,
            sci: SciSearch::default(),
            doubling: DoublingSearch::default(),
        }
    }
}

/// Hypotheses on the three families, each measured numerically.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreconditionFlags {
    pub phi_sci: bool,
    pub phi_convex: bool,
    pub phi_superlinear: bool,
    pub psi_convex: bool,
    pub psi_superlinear: bool,
    pub psi_doubling: bool,
    /// Lower growth index of `Ψ` above 1 on `[1, ∞)`, which makes the maximal
    /// operator bounded in the modular sense on a finite measure space.
    pub psi_maximal_bounded: bool,
    pub theta_doubling: bool,
    pub theta_sci: bool,
    pub phi_sci_constant: f64,
    pub theta_sci_constant: f64,
    pub theta_doubling_constant: f64,
    pub psi_doubling_constant: f64,
    pub psi_lower_index: f64,
}

impl PreconditionFlags {
    pub fn failures(&self) -> Vec<&'static str> {
        [
            (self.phi_sci, "phi-sci"),
            (self.phi_convex, "phi-convex"),
            (self.phi_superlinear, "phi-superlinear"),
            (self.psi_convex, "psi-convex"),
            (self.psi_superlinear, "psi-superlinear"),
            (self.psi_doubling, "psi-doubling"),
            (self.psi_maximal_bounded, "psi-maximal-bounded"),
            (self.theta_doubling, "theta-doubling"),
            (self.theta_sci, "theta-sci"),
        ]
        .into_iter()
        .filter(|(ok, _)| !ok)
        .map(|(_, name)| name)
        .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Quantity {
    pub name: &'static str,
    /// `ρ_Θ` of the quantity; `+∞` when it overflowed or diverged.
    pub modular: f64,
    pub finite: bool,
    /// Scale `c` at which the modular of `c·f`'s quantity reaches `A`.
    pub scale_at_a: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub flags: PreconditionFlags,
    pub quantities: Vec<Quantity>,
    pub rho_hardy: HardyModular,
    pub smirnov: SmirnovReport,
    pub a: f64,
    /// Largest modular of any quantity once one of them is scaled to `A`;
    /// `None` when some quantity is infinite or `A` is unreachable.
    pub b_hat: Option<f64>,
    pub all_finite: bool,
}

impl EquivalenceReport {
    pub fn quantity(&self, name: &str) -> Option<&Quantity> {
        self.quantities.iter().find(|q| q.name == name)
    }
}

/// Measure the five equivalent Hardy-space conditions for `f`, plus `v*`.
pub fn equivalence_report(
    f: &impl DiscFunction,
    fams: &HardyFamilies,
    grid: &CircleGrid,
    opts: &EquivalenceOptions,
) -> Result<EquivalenceReport> {
    check_composition(fams)?;
    let flags = precondition_flags(fams, opts)?;
    let failures = flags.failures();
    if !failures.is_empty() {
        return Err(Error::Precondition(format!("family hypotheses failed: {}", failures.join(", "))));
    }

    let theta = &fams.theta;
    let cm = CellModular::new(theta, grid);
    let rho = rho_hardy(f, theta, grid, &opts.radii, opts.ceiling)?;
    let slices: Vec<Vec<f64>> = opts.radii.iter().map(|&r| slice_moduli(f, grid, r)).collect();
    let f_star = nt_max_by(grid, &opts.cone, |z| f.log_abs(z).exp());
    let u_star = nt_max_by(grid, &opts.cone, |z| f.value(z).re.abs());
    let v_star = nt_max_by(grid, &opts.cone, |z| f.value(z).im.abs());
    let area = area_integral_by(grid, &opts.cone, |z| f.derivative(z).norm_sqr());
    let boundary: Vec<f64> = grid.midpoints().iter().map(|&t| f.boundary_value(t).norm()).collect();

    // every quantity as a set of sample vectors whose modulars are maximized
    let mut samples: Vec<(&'static str, Option<Vec<Vec<f64>>>)> = vec![(
        "rho-hardy",
        if rho.diverging { None } else { Some(slices) },
    )];
    for (name, q) in [("nontangential-f", f_star), ("nontangential-u", u_star), ("nontangential-v", v_star), ("area-u", area)] {
        samples.push((name, q.ok().map(|b| vec![b.values().to_vec()])));
    }
    let boundary_ok = boundary.iter().all(|v| v.is_finite());
    samples.push(("boundary", boundary_ok.then(|| vec![boundary])));

    let modular_at = |sets: &[Vec<f64>], c: f64| -> f64 {
        sets.iter().map(|v| cm.eval_scaled(v, 1.0 / c)).fold(0.0, f64::max)
    };
    let mut quantities = Vec::new();
    for (name, sets) in &samples {
        let (modular, scale_at_a) = match sets {
            Some(s) => {
                let m = modular_at(s, 1.0);
                (m, scale_for(|c| modular_at(s, c), opts.a, TAU * theta.point_eval(0.0, 0.0)))
            }
            None => (f64::INFINITY, None),
        };
        quantities.push(Quantity { name, modular, finite: modular.is_finite(), scale_at_a });
    }
    let all_finite = quantities.iter().all(|q| q.finite);
    let b_hat = if all_finite && quantities.iter().all(|q| q.scale_at_a.is_some()) {
        let c = quantities.iter().filter_map(|q| q.scale_at_a).fold(0.0, f64::max);
        Some(samples.iter().filter_map(|(_, s)| s.as_ref()).map(|s| modular_at(s, c)).fold(0.0, f64::max))
    } else {
        None
    };
    let smirnov = smirnov_test(f, &opts.radii, opts.smirnov_tol, grid.n_cells())?;
    Ok(EquivalenceReport { flags, quantities, rho_hardy: rho, smirnov, a: opts.a, b_hat, all_finite })
}

/// Largest `c` with `q(c) ≤ a`, by doubling then bisection; `None` when
/// `a` does not exceed the zero-function modular `floor`.
fn scale_for(q: impl Fn(f64) -> f64, a: f64, floor: f64) -> Option<f64> {
    if !(a > floor) {
        return None;
    }
    let mut hi = 1.0;
    while q(hi) <= a {
        hi *= 2.0;
        if hi > 1e300 {
            return None;
        }
    }
    let mut lo = 0.0;
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if q(mid) <= a {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}

fn x_samples() -> impl Iterator<Item = f64> {
    (0..16).map(|k| TAU * k as f64 / 16.0)
}

/// `Θ_x(t) = Ψ(Φ_x(log⁺ t))` on sampled `(x, t)`.
fn check_composition(fams: &HardyFamilies) -> Result<()> {
    for x in x_samples() {
        for k in 0..=60 {
            let t = 10f64.powf(-3.0 + 0.1 * k as f64);
            let want = fams.psi.point_eval(x, fams.phi.point_eval(x, log_plus(t)));
            let got = fams.theta.point_eval(x, t);
            let agree = (got == want) || (got - want).abs() <= 1e-9 * want.abs().max(1.0);
            if !agree {
                return Err(Error::Precondition(format!(
                    "theta does not equal psi ∘ phi ∘ log⁺ at x = {x:.4}, t = {t:.4e}: {got} vs {want}"
                )));
            }
        }
    }
    Ok(())
}

fn precondition_flags(fams: &HardyFamilies, opts: &EquivalenceOptions) -> Result<PreconditionFlags> {
    let phi_sci = sci_constant(&fams.phi, opts.sci_modulus, &opts.sci)?;
    let theta_sci = sci_constant(&fams.theta, opts.sci_modulus, &opts.sci)?;
    let theta_doubling = doubling_constant(&fams.theta, &opts.doubling)?;
    let psi_doubling = doubling_constant(&fams.psi, &opts.doubling)?;
    let psi_lower_index = lower_index(&fams.psi);
    Ok(PreconditionFlags {
        phi_sci: !phi_sci.diverging,
        phi_convex: convex(&fams.phi),
        phi_superlinear: superlinear(&fams.phi),
        psi_convex: convex(&fams.psi),
        psi_superlinear: superlinear(&fams.psi),
        psi_doubling: !psi_doubling.diverging,
        psi_maximal_bounded: psi_lower_index > 1.0 + 1e-9,
        theta_doubling: !theta_doubling.diverging,
        theta_sci: !theta_sci.diverging,
        phi_sci_constant: phi_sci.constant,
        theta_sci_constant: theta_sci.constant,
        theta_doubling_constant: theta_doubling.constant,
        psi_doubling_constant: psi_doubling.constant,
        psi_lower_index,
    })
}

/// Nonnegative second differences on uniform grids over `[0, 1]`, `[0, 10]`
/// and `[0, 100]`.
pub(crate) fn convex(fam: &ModularFamily) -> bool {
    x_samples().all(|x| {
        [1.0, 10.0, 100.0].iter().all(|&top| {
            let n = 400;
            let v: Vec<f64> = (0..=n).map(|k| fam.point_eval(x, top * k as f64 / n as f64)).collect();
            v.windows(3).all(|w| {
                if !w.iter().all(|a| a.is_finite()) {
                    return true;
                }
                w[2] - 2.0 * w[1] + w[0] >= -1e-9 * (w[2].abs() + w[1].abs())
            })
        })
    })
}

/// `Φ(t)/t` does not decay on `[1, 10^8]`: its minimum over the whole range
/// matches its minimum over `[1, 10^4]`.
pub(crate) fn superlinear(fam: &ModularFamily) -> bool {
    x_samples().all(|x| {
        let ratio = |k: i32| {
            let t = 10f64.powf(0.05 * k as f64);
            fam.point_eval(x, t) / t
        };
        let near = (0..=80).map(ratio).fold(f64::INFINITY, f64::min);
        let all = (0..=160).map(ratio).fold(f64::INFINITY, f64::min);
        near > 0.0 && all >= near * (1.0 - 1e-9)
    })
}

/// `inf log₂(Ψ(2t)/Ψ(t))` over `t ∈ [1, 10^6]` and sampled `x`.
fn lower_index(fam: &ModularFamily) -> f64 {
    x_samples()
        .flat_map(|x| {
            (0..=120).map(move |k| {
                let t = 10f64.powf(0.05 * k as f64);
                (fam.point_eval(x, 2.0 * t) / fam.point_eval(x, t)).log2()
            })
        })
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardy::Analytic;
    use num_complex::Complex64;
    use crate::modular::{Exponent, Scalar};

    fn small_opts() -> EquivalenceOptions {
        EquivalenceOptions { radii: dyadic_radii(8), cone: ConeSpec::new(0.5, 1.0 - 2f64.powi(-8)).unwrap(), ..Default::default() }
    }

    #[test]
    fn zero_function_report() {
        let fams = HardyFamilies::variable_exponent(Exponent::smooth(1.5, 2.5).unwrap(), 1.0).unwrap();
        let grid = CircleGrid::uniform(64).unwrap();
        let r = equivalence_report(&Analytic::constant(Complex64::new(0.0, 0.0)), &fams, &grid, &small_opts()).unwrap();
        for q in &r.quantities {
            assert!((q.modular - TAU).abs() < 1e-9, "{q:?}");
        }
        assert!(r.smirnov.is_smirnov());
    }

    #[test]
    fn inconsistent_composition_is_rejected() {
        let mut fams = HardyFamilies::variable_exponent(Exponent::smooth(1.5, 2.5).unwrap(), 1.0).unwrap();
        fams.psi = ModularFamily::scalar(Scalar::Power { a: 3.0 });
        let grid = CircleGrid::uniform(16).unwrap();
        let err = equivalence_report(&Analytic::constant(Complex64::new(1.0, 0.0)), &fams, &grid, &small_opts());
        assert!(matches!(err, Err(Error::Precondition(_))));
    }

    #[test]
    fn step_exponent_fails_sci_hypotheses() {
        let fams = HardyFamilies::variable_exponent(Exponent::step(1.0, 3.0).unwrap(), 0.5).unwrap();
        let grid = CircleGrid::uniform(16).unwrap();
        match equivalence_report(&Analytic::constant(Complex64::new(1.0, 0.0)), &fams, &grid, &small_opts()) {
            Err(Error::Precondition(msg)) => assert!(msg.contains("sci"), "{msg}"),
            other => panic!("expected precondition failure, got {other:?}"),
        }
    }

    #[test]
    fn family_shape_checks() {
        let sq = ModularFamily::scalar(Scalar::Power { a: 2.0 });
        let root = ModularFamily::scalar(Scalar::Power { a: 0.5 });
        assert!(convex(&sq) && superlinear(&sq));
        assert!(!convex(&root) && !superlinear(&root));
        assert!((lower_index(&sq) - 2.0).abs() < 1e-12);
    }
}

#[cfg(test)]
mod examples {
    use super::*;
    use crate::hardy::Analytic;
    use crate::modular::Exponent;
    use num_complex::Complex64;

    fn fams() -> HardyFamilies {
        HardyFamilies::variable_exponent(Exponent::smooth(1.5, 2.5).unwrap(), 1.0).unwrap()
    }

    fn opts() -> EquivalenceOptions {
        EquivalenceOptions { radii: dyadic_radii(10), cone: ConeSpec::new(0.5, 1.0 - 2f64.powi(-10)).unwrap(), ..Default::default() }
    }

    #[test]
    fn mild_pole_has_all_quantities_finite() {
        let f = Analytic::pole_power(Complex64::new(0.9, 0.0), 0.25).unwrap();
        let grid = CircleGrid::uniform(256).unwrap();
        let r = equivalence_report(&f, &fams(), &grid, &opts()).unwrap();
        assert!(r.all_finite, "{:?}", r.quantities);
        let b = r.b_hat.unwrap();
        assert!(b >= r.a && b.is_finite());
        assert!(r.smirnov.is_smirnov());
    }

    #[test]
    fn inverse_singular_inner_blows_up_inside_only() {
        let f = Analytic::singular_inner(vec![(0.0, 1.0)]).unwrap().inverse();
        let grid = CircleGrid::uniform(1024).unwrap();
        let r = equivalence_report(&f, &fams(), &grid, &opts()).unwrap();
        assert!(r.quantity("boundary").unwrap().finite);
        assert!(!r.quantity("nontangential-f").unwrap().finite || r.rho_hardy.diverging);
        assert!(r.b_hat.is_none());
        assert!(!r.smirnov.is_smirnov());
    }
}
