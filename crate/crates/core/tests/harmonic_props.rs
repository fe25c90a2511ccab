use std::f64::consts::TAU;

use num_complex::Complex64;
use orlicz_core::circle::{BoundaryFunction, CircleGrid};
use orlicz_core::harmonic::{area_integral, hl_maximal, nt_max, poisson_extend, ConeSpec, DiscFunction, DiskFunction, TrigPolynomial};
use proptest::prelude::*;

fn trig_poly() -> impl Strategy<Value = TrigPolynomial> {
    (-2.0f64..2.0, prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..=8)).prop_map(|(c0, modes)| {
        modes
            .into_iter()
            .enumerate()
            .fold(TrigPolynomial::new().cos(0, c0), |p, (k, (a, b))| p.cos(k as i64 + 1, a).sin(k as i64 + 1, b))
    })
}

fn disc_point() -> impl Strategy<Value = Complex64> {
    (0.0f64..0.999, 0.0f64..TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

fn nonneg_step() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..10.0, 16)
}

fn grid16() -> CircleGrid {
    CircleGrid::uniform(16).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn double_conjugate_is_minus_centred(p in trig_poly(), z in disc_point()) {
        let u = poisson_extend(&p, 8);
        let vv = u.conjugate().unwrap().conjugate().unwrap();
        let want = -u.value(z).re + u.value(Complex64::new(0.0, 0.0)).re;
        prop_assert!((vv.value(z).re - want).abs() < 1e-12);
    }

    #[test]
    fn poisson_extension_stays_within_boundary_range(p in trig_poly(), z in disc_point()) {
        let u = poisson_extend(&p, 8);
        let samples: Vec<f64> = (0..4096).map(|k| p.eval(TAU * k as f64 / 4096.0).re).collect();
        let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let slack = 1e-3;
        let v = u.value(z).re;
        prop_assert!(lo - slack <= v && v <= hi + slack, "{} not in [{}, {}]", v, lo, hi);
    }

    #[test]
    fn maximal_operator_is_sublinear(f in nonneg_step(), g in nonneg_step(), c in 0.0f64..5.0) {
        let grid = grid16();
        let bf = BoundaryFunction::new(grid.clone(), f.clone()).unwrap();
        let bg = BoundaryFunction::new(grid.clone(), g.clone()).unwrap();
        let sum = BoundaryFunction::new(grid.clone(), f.iter().zip(&g).map(|(a, b)| a + b).collect()).unwrap();
        let (mf, mg, ms) = (hl_maximal(&bf).unwrap(), hl_maximal(&bg).unwrap(), hl_maximal(&sum).unwrap());
        for j in 0..16 {
            let bound = mf.values()[j] + mg.values()[j];
            prop_assert!(ms.values()[j] <= bound * (1.0 + 1e-12) + 1e-12);
        }
        let mc = hl_maximal(&bf.scaled(c).unwrap()).unwrap();
        for j in 0..16 {
            prop_assert!((mc.values()[j] - c * mf.values()[j]).abs() <= 1e-12 * (1.0 + c * mf.values()[j]));
        }
    }

    #[test]
    fn cone_maximum_dominates_radial_samples(p in trig_poly()) {
        let u = poisson_extend(&p, 8);
        let grid = grid16();
        let cone = ConeSpec::new(0.5, 1.0 - 2f64.powi(-8)).unwrap();
        let star = nt_max(&u, &grid, &cone).unwrap();
        for (j, &t) in grid.midpoints().iter().enumerate() {
            for r in cone.radii() {
                prop_assert!(u.value(Complex64::from_polar(r, t)).norm() <= star.values()[j]);
            }
        }
    }

    #[test]
    fn wider_cones_give_larger_maxima(p in trig_poly(), a1 in 0.1f64..2.0, a2 in 0.1f64..2.0) {
        let u = poisson_extend(&p, 8);
        let grid = grid16();
        let r_max = 1.0 - 2f64.powi(-8);
        let narrow = nt_max(&u, &grid, &ConeSpec::new(a1.min(a2), r_max).unwrap()).unwrap();
        let wide = nt_max(&u, &grid, &ConeSpec::new(a1.max(a2), r_max).unwrap()).unwrap();
        for j in 0..16 {
            prop_assert!(narrow.values()[j] <= wide.values()[j]);
        }
    }

    #[test]
    fn area_integral_vanishes_exactly_for_constants(c in -5.0f64..5.0, p in trig_poly()) {
        let grid = grid16();
        let cone = ConeSpec::default();
        let flat = area_integral(&DiskFunction::constant(c), &grid, &cone).unwrap();
        prop_assert!(flat.values().iter().all(|&v| v == 0.0));
        let u = poisson_extend(&p, 8);
        if (1..=8).any(|k| u.coefficient(k).norm() > 1e-3) {
            let a = area_integral(&u, &grid, &cone).unwrap();
            prop_assert!(a.values().iter().all(|&v| v > 0.0));
        }
    }
}
