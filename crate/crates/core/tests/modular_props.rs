use std::f64::consts::TAU;

use orlicz_core::circle::{Arc, BoundaryFunction, CircleGrid, CellRun};
use orlicz_core::modular::{
    luxemburg_norm, modular, sci_constant, Bound, Exponent, ModularFamily, ModularFunction, Scalar, SciSearch,
};
use proptest::prelude::*;

fn exponent() -> impl Strategy<Value = Exponent> {
    (0usize..4, 0.5f64..2.0, 0.0f64..1.5, 0.2f64..1.0).prop_map(|(kind, lo, width, s)| match kind {
        0 => Exponent::constant(lo).unwrap(),
        1 => Exponent::smooth(lo, lo + width).unwrap(),
        2 => Exponent::step(lo, lo + width).unwrap(),
        _ => Exponent::holder(lo, lo + width, s).unwrap(),
    })
}

fn family() -> impl Strategy<Value = ModularFamily> {
    (exponent(), 0usize..6, 1.1f64..3.0).prop_map(|(e, kind, s)| match kind {
        0 => ModularFamily::var_exp(e),
        1 => ModularFamily::var_exp_floored(e),
        2 => ModularFamily::log_type(e, s).unwrap(),
        3 => ModularFamily::exp_family(e, s + 1.0, s).unwrap(),
        4 => ModularFamily::exponential(e, 0.5).unwrap(),
        _ => ModularFamily::var_exp(e).compose_outer(Scalar::Power { a: s }),
    })
}

fn step_function() -> impl Strategy<Value = BoundaryFunction> {
    prop::collection::vec(0.0f64..5.0, 2..=64).prop_map(|v| {
        let grid = CircleGrid::uniform(v.len()).unwrap();
        BoundaryFunction::new(grid, v).unwrap()
    })
}

/// Modular of the zero function, the least value any modular can take.
fn zero_modular(fam: &ModularFamily, grid: &CircleGrid) -> f64 {
    (0..grid.n_cells()).map(|j| fam.point_eval(grid.midpoint(j), 0.0) * grid.cell_measure(j)).sum()
}

fn t_grid() -> impl Iterator<Item = f64> {
    std::iter::once(0.0).chain((0..=40).map(|k| 10f64.powf(-4.0 + 0.2 * k as f64)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn envelopes_bracket_every_closure_sample(fam in family(), n in 4usize..64, start in 0usize..64, len in 1usize..64) {
        let grid = CircleGrid::uniform(n).unwrap();
        let run = CellRun { start: start % n, len: 1 + len % n };
        let upper = fam.envelope_on_run(&grid, run, Bound::Upper);
        let lower = fam.envelope_on_run(&grid, run, Bound::Lower);
        let mut xs: Vec<f64> = run.cells(n).flat_map(|j| [grid.cell(j).0, grid.midpoint(j), grid.cell(j).1]).collect();
        xs.dedup();
        for x in xs {
            for t in t_grid() {
                let v = fam.point_eval(x, t);
                prop_assert!(lower.eval(t) <= v && v <= upper.eval(t), "x = {}, t = {}", x, t);
            }
        }
    }

    #[test]
    fn arc_envelopes_bracket_lattice_samples(fam in family(), start in 0.0f64..TAU, len in 1e-3f64..TAU, pieces in 1usize..40) {
        let arc = Arc::new(start, len).unwrap();
        let step = len / pieces as f64;
        let upper = fam.envelope_on_arc(&arc, step, Bound::Upper);
        let lower = fam.envelope_on_arc(&arc, step, Bound::Lower);
        for k in 0..=pieces {
            let x = arc.start() + k as f64 * step;
            for t in t_grid() {
                let v = fam.point_eval(x, t);
                prop_assert!(lower.eval(t) <= v * (1.0 + 1e-12) && v <= upper.eval(t) * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn finite_modular_gives_finite_norm(e in exponent(), f in step_function(), a in 1e-3f64..100.0) {
        // families vanishing at 0, where every positive threshold is reachable
        let fam = ModularFamily::var_exp(e);
        prop_assert!(modular(&fam, &f).is_finite());
        prop_assert!(luxemburg_norm(&fam, &f, a).unwrap().is_finite());
    }

    #[test]
    fn scaling_identity(fam in family(), f in step_function(), factor in 0.1f64..20.0, margin in 0.1f64..10.0) {
        let b = zero_modular(&fam, f.grid()) + margin;
        let scaled = fam.clone().scaled(factor).unwrap();
        let lhs = luxemburg_norm(&scaled, &f, factor * b).unwrap();
        let rhs = luxemburg_norm(&fam, &f, b).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs.max(1e-300), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn norm_decreases_in_threshold(fam in family(), f in step_function(), m1 in 0.1f64..10.0, m2 in 0.1f64..10.0) {
        let z = zero_modular(&fam, f.grid());
        let (small, big) = (z + m1.min(m2), z + m1.max(m2));
        let n_small = luxemburg_norm(&fam, &f, small).unwrap();
        let n_big = luxemburg_norm(&fam, &f, big).unwrap();
        prop_assert!(n_big <= n_small * (1.0 + 1e-9));
    }

    #[test]
    fn norm_is_homogeneous(e in exponent(), f in step_function(), c in 0.01f64..100.0, a in 0.1f64..10.0) {
        let fam = ModularFamily::var_exp(e);
        let base = luxemburg_norm(&fam, &f, a).unwrap();
        let scaled = luxemburg_norm(&fam, &f.scaled(c).unwrap(), a).unwrap();
        prop_assert!((scaled - c * base).abs() <= 1e-9 * c * base.max(1e-300));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn precomposition_does_not_raise_sci_constant(e in exponent(), a in 0.3f64..3.0, modulus in 0.5f64..4.0) {
        let search = SciSearch { levels: 5, w_points: 24, ..SciSearch::default() };
        let fam = ModularFamily::var_exp(e);
        let base = sci_constant(&fam, modulus, &search).unwrap().constant;
        let composed = sci_constant(&fam.compose(Scalar::Power { a }), modulus, &search).unwrap().constant;
        prop_assert!(composed <= base * (1.0 + 1e-9), "{} > {}", composed, base);
    }
}
