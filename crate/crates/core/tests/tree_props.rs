use std::f64::consts::TAU;

use orlicz_core::circle::{BoundaryFunction, CircleGrid};
use orlicz_core::leveltree::{build_tree, lemma_sums, LevelTree};
use orlicz_core::modular::{luxemburg_norm, modular, Exponent, ModularFamily};
use proptest::prelude::*;

fn family() -> impl Strategy<Value = ModularFamily> {
    (0usize..3, 1.0f64..2.0, 0.0f64..1.5).prop_map(|(kind, lo, width)| {
        let e = match kind {
            0 => Exponent::constant(lo).unwrap(),
            1 => Exponent::smooth(lo, lo + width).unwrap(),
            _ => Exponent::holder(lo, lo + width, 0.5).unwrap(),
        };
        ModularFamily::var_exp(e)
    })
}

/// A step function normalized so that its modular is at most `fill ≤ 1`.
fn unit_ball_function(fam: &ModularFamily, values: Vec<f64>, fill: f64) -> BoundaryFunction {
    let grid = CircleGrid::uniform(values.len()).unwrap();
    let f = BoundaryFunction::new(grid, values).unwrap();
    if f.max() == 0.0 {
        return f;
    }
    let norm = luxemburg_norm(fam, &f, 1.0).unwrap();
    f.scaled(fill / norm).unwrap()
}

fn ancestors(tree: &LevelTree, mut k: usize) -> Vec<usize> {
    let mut path = vec![k];
    while let Some(p) = tree.nodes[k].parent {
        path.push(p);
        k = p;
    }
    path.reverse();
    path
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn tree_structure(
        fam in family(),
        values in prop::collection::vec(0.0f64..4.0, 8..=128),
        fill in 0.05f64..1.0,
        h in 1.5f64..6.0,
    ) {
        let f = unit_ball_function(&fam, values, fill);
        let n = f.n_cells();
        let tree = build_tree(&f, &fam, h, -8, 200).unwrap();

        let rc_total: f64 = tree.nodes.iter().map(|nd| nd.rc_measure).sum();
        prop_assert!((rc_total - TAU).abs() < 1e-12);

        for (k, nd) in tree.nodes.iter().enumerate() {
            prop_assert!(nd.level >= nd.first_level);
            if let Some(p) = nd.parent {
                let parent = &tree.nodes[p];
                prop_assert!(nd.first_level > parent.level, "node {}", k);
                prop_assert!(nd.run.cells(n).all(|c| parent.run.contains(c, n)));
            }
        }

        let levels = tree.cell_levels();
        for c in 0..n {
            let memberships: i32 = tree
                .nodes
                .iter()
                .filter(|nd| nd.run.contains(c, n))
                .map(|nd| nd.level - nd.first_level.max(tree.m0) + 1)
                .sum();
            prop_assert_eq!(memberships, levels[c] - tree.m0 + 1, "cell {}", c);
        }

        for k in 0..tree.nodes.len() {
            let lambdas: Vec<f64> = ancestors(&tree, k).into_iter().flat_map(|a| tree.nodes[a].lambdas.clone()).collect();
            prop_assert!(lambdas.windows(2).all(|w| w[0] <= w[1] * (1.0 + 1e-12)), "{:?}", lambdas);
        }
    }

    #[test]
    fn sandwich_bounds_hold(
        fam in family(),
        values in prop::collection::vec(0.0f64..4.0, 8..=256),
        fill in 0.05f64..1.0,
    ) {
        let f = unit_ball_function(&fam, values, fill);
        prop_assert!(modular(&fam, &f) <= 1.0 + 1e-9);
        let tree = build_tree(&f, &fam, 4.0, -8, 200).unwrap();
        prop_assert!(f.max() == 0.0 || tree.nodes.len() > 1);
        let report = lemma_sums(&tree, &fam, &f);
        prop_assert!(report.passed(), "{:?}", report);
    }
}
