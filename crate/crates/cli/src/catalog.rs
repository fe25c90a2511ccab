//! Named test functions and modular families.

use num_complex::Complex64;
use orlicz_core::circle::{BoundaryFunction, CircleGrid};
use orlicz_core::hardy::{Analytic, OuterPart};
use orlicz_core::harmonic::{poisson_extend, BoundaryData, DiscFunction, DiskFunction, TrigPolynomial};
use orlicz_core::modular::{Exponent, HardyFamilies, ModularFamily};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{ExponentSpec, FamilySpec, FunctionSpec};
use crate::error::{CliError, Result};

pub const FAMILIES: [&str; 7] =
    ["const-exp", "var-exp-smooth", "var-exp-step", "var-exp-floored", "log-type", "exp-family", "theta-composition"];

pub const FUNCTIONS: [&str; 9] = [
    "constant",
    "step",
    "random-step",
    "trig-poly",
    "pole-power",
    "blaschke",
    "singular-inner",
    "inverse-singular-inner",
    "outer",
];

const EXPONENTS: [&str; 4] = ["constant", "smooth", "step", "holder"];

fn exponent(spec: &ExponentSpec, kind: &str) -> Result<Exponent> {
    Ok(match kind {
        "constant" => Exponent::constant(spec.p)?,
        "smooth" => Exponent::smooth(spec.p_lo, spec.p_hi)?,
        "step" => Exponent::step(spec.p_lo, spec.p_hi)?,
        "holder" => Exponent::holder(spec.p_lo, spec.p_hi, spec.holder_s)?,
        other => {
            return Err(CliError::UnknownName { kind: "exponent", name: other.into(), available: EXPONENTS.to_vec() })
        }
    })
}

/// The three families of a Hardy-space comparison.
pub fn hardy_families(spec: &FamilySpec) -> Result<HardyFamilies> {
    if spec.name != "theta-composition" {
        return Err(CliError::config("family", format!("hardy-report needs theta-composition, got {}", spec.name)));
    }
    let e = exponent(&spec.exponent, &spec.exponent.kind)?;
    Ok(match spec.variant.as_str() {
        "variable-exponent" => HardyFamilies::variable_exponent(e, spec.q)?,
        "log-corrected" => HardyFamilies::log_corrected(e, spec.s, spec.q)?,
        other => {
            return Err(CliError::UnknownName {
                kind: "variant",
                name: other.into(),
                available: vec!["variable-exponent", "log-corrected"],
            })
        }
    })
}

pub fn family(spec: &FamilySpec) -> Result<ModularFamily> {
    let e = &spec.exponent;
    Ok(match spec.name.as_str() {
        "const-exp" => ModularFamily::var_exp(exponent(e, "constant")?),
        "var-exp-smooth" => ModularFamily::var_exp(exponent(e, "smooth")?),
        "var-exp-step" => ModularFamily::var_exp(exponent(e, "step")?),
        "var-exp-floored" => ModularFamily::var_exp_floored(exponent(e, &e.kind)?),
        "log-type" => ModularFamily::log_type(exponent(e, &e.kind)?, spec.s)?,
        "exp-family" => ModularFamily::exp_family(exponent(e, &e.kind)?, spec.q, spec.s)?,
        "theta-composition" => hardy_families(spec)?.theta,
        other => return Err(CliError::UnknownName { kind: "family", name: other.into(), available: FAMILIES.to_vec() }),
    })
}

fn check_function_name(name: &str) -> Result<()> {
    if FUNCTIONS.contains(&name) {
        Ok(())
    } else {
        Err(CliError::UnknownName { kind: "function", name: name.into(), available: FUNCTIONS.to_vec() })
    }
}

fn random_step(spec: &FunctionSpec) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n;
    let pieces = rng.gen_range(1..=32);
    let mut cuts: Vec<usize> = (0..pieces).map(|_| rng.gen_range(0..n)).collect();
    cuts.sort_unstable();
    let levels: Vec<f64> = (0..pieces).map(|_| spec.amplitude * 10f64.powf(rng.gen_range(-2.0..2.0))).collect();
    (0..n)
        .map(|j| match cuts.iter().filter(|&&c| c <= j).count() {
            0 => levels[pieces - 1],
            k => levels[k - 1],
        })
        .collect()
}

fn trig_poly(spec: &FunctionSpec) -> TrigPolynomial {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut p = TrigPolynomial::new().cos(0, spec.amplitude * rng.gen_range(-1.0..1.0));
    for k in 1..=spec.degree as i64 {
        p = p.cos(k, spec.amplitude * rng.gen_range(-1.0..1.0)).sin(k, spec.amplitude * rng.gen_range(-1.0..1.0));
    }
    p
}

fn cell_values(spec: &FunctionSpec) -> Result<Option<Vec<f64>>> {
    Ok(match spec.name.as_str() {
        "constant" => Some(vec![spec.value; spec.n]),
        "step" => {
            let k = spec.values.len();
            if k == 0 || !spec.n.is_multiple_of(k) {
                return Err(CliError::config("values", format!("length {k} must divide n = {}", spec.n)));
            }
            Some((0..spec.n).map(|j| spec.values[j * k / spec.n]).collect())
        }
        "random-step" => Some(random_step(spec)),
        _ => None,
    })
}

/// `|f|` on the cells of the uniform grid: the cell values for step-like
/// functions, the boundary modulus for everything else.
pub fn boundary(spec: &FunctionSpec) -> Result<BoundaryFunction> {
    check_function_name(&spec.name)?;
    let grid = CircleGrid::uniform(spec.n)?;
    if let Some(v) = cell_values(spec)? {
        return Ok(BoundaryFunction::new(grid, v.into_iter().map(f64::abs).collect())?);
    }
    if spec.name == "trig-poly" {
        let p = trig_poly(spec);
        return Ok(BoundaryFunction::from_fn(grid, |t| p.eval(t).norm())?);
    }
    let f = disc(spec)?;
    Ok(BoundaryFunction::from_fn(grid, |t| f.boundary_value(t).norm())?)
}

/// `u + iv` for real boundary data `u`, with `v(0) = 0`.
fn analytic_completion(data: &impl BoundaryData, modes: usize) -> Result<Analytic> {
    let u = poisson_extend(data, modes);
    let v = u.conjugate()?;
    let series = DiskFunction::from_fn(modes, |k| u.coefficient(k) + Complex64::i() * v.coefficient(k))?;
    Ok(Analytic::Series { series })
}

fn outer_log_modulus(spec: &FunctionSpec) -> Result<BoundaryFunction> {
    let p = trig_poly(spec);
    Ok(BoundaryFunction::from_fn(CircleGrid::uniform(spec.n)?, |t| p.eval(t).re)?)
}

/// The analytic function on the disc.
pub fn disc(spec: &FunctionSpec) -> Result<Analytic> {
    check_function_name(&spec.name)?;
    let c = |(re, im): (f64, f64)| Complex64::new(re, im);
    Ok(match spec.name.as_str() {
        "constant" => Analytic::constant(Complex64::new(spec.value, 0.0)),
        "step" | "random-step" => {
            let v = cell_values(spec)?.expect("step-like");
            analytic_completion(&BoundaryFunction::new(CircleGrid::uniform(spec.n)?, v)?, spec.modes)?
        }
        "trig-poly" => analytic_completion(&trig_poly(spec), spec.modes.max(spec.degree))?,
        "pole-power" => Analytic::pole_power(Complex64::from_polar(spec.pole_radius, spec.pole_angle), spec.power)?,
        "blaschke" => Analytic::blaschke(spec.zeros.iter().copied().map(c).collect())?,
        "singular-inner" => Analytic::singular_inner(atoms_or_unit(spec))?,
        "inverse-singular-inner" => Analytic::singular_inner(atoms_or_unit(spec))?.inverse(),
        "outer" => Analytic::outer(outer_log_modulus(spec)?, OuterPart::Full),
        _ => unreachable!("checked above"),
    })
}

/// The configured atoms, or a unit atom at `0`.
fn atoms_or_unit(spec: &FunctionSpec) -> Vec<(f64, f64)> {
    if spec.atoms.is_empty() {
        vec![(0.0, 1.0)]
    } else {
        spec.atoms.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RawConfig;

    fn spec(name: &str) -> FunctionSpec {
        let mut raw = RawConfig::empty();
        raw.set("command", "\"tree\"");
        raw.set("function", name);
        raw.set("n", "64");
        raw.resolve().unwrap().function
    }

    #[test]
    fn inverse_singular_inner_at_origin_is_e() {
        let f = disc(&spec("inverse-singular-inner")).unwrap();
        assert!((f.value(Complex64::new(0.0, 0.0)) - Complex64::new(std::f64::consts::E, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn unknown_names_list_the_catalog() {
        let msg = disc(&spec("nosuch")).unwrap_err().to_string();
        assert!(FUNCTIONS.iter().all(|n| msg.contains(n)), "{msg}");
        let mut raw = RawConfig::empty();
        raw.set("command", "\"tree\"");
        raw.set("family", "nosuch");
        let msg = family(&raw.resolve().unwrap().family).unwrap_err().to_string();
        assert!(FAMILIES.iter().all(|n| msg.contains(n)), "{msg}");
    }

    #[test]
    fn trig_completion_is_analytic_with_real_part_on_boundary() {
        let s = spec("trig-poly");
        let f = disc(&s).unwrap();
        let p = trig_poly(&s);
        for t in [0.1, 1.7, 4.0] {
            let z = Complex64::from_polar(1.0, t);
            assert!((f.value(z).re - p.eval(t).re).abs() < 1e-12);
        }
    }

    #[test]
    fn every_catalog_entry_builds() {
        for name in FUNCTIONS {
            let s = spec(name);
            boundary(&s).unwrap();
            disc(&s).unwrap();
        }
    }
}
