//! Recursive level-set decomposition of a function on the circle.
//!
//! The root is the whole circle at level `m0`. The children of a node `I` at
//! level `n` are the maximal arcs of `{x ∈ I : Φ_{I,+}(f(x)) > h^n}`, placed at
//! level `n + 1`. A child covering all of `I` is the same arc again, so it is
//! recorded by raising the level of `I` instead of adding a node.

mod lemmas;

pub use lemmas::{
    goodlambda_check, lemma_sums, theorem_norm_comparison, ComparisonReport, GoodLambdaParams,
    GoodLambdaReport, LevelTally, PointwiseViolation, TreeReport,
};

use serde::Serialize;

use crate::circle::{Arc, BoundaryFunction, CellRun, CircleGrid};
use crate::error::{Error, Result};
use crate::modular::{inverse, Bound, Envelope, ModularFamily, ModularFunction};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Node {
    pub run: CellRun,
    pub arc: Arc,
    /// Level at which the arc first appears.
    pub first_level: i32,
    /// Highest level containing the arc, `lv(I)`.
    pub level: i32,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// `λ_I` for each membership level `n` in `max(first_level, m0+1)..=level`.
    pub lambdas: Vec<f64>,
    /// `m(rc(I))`: measure of the cells in `I` outside every child.
    pub rc_measure: f64,
}

impl Node {
    /// Membership levels `n > m0` paired with their thresholds `λ`.
    pub fn memberships(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        let first = self.level - self.lambdas.len() as i32 + 1;
        self.lambdas.iter().enumerate().map(move |(k, &l)| (first + k as i32, l))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelTree {
    pub h: f64,
    pub m0: i32,
    /// Nodes in breadth-first order; node 0 is the root.
    pub nodes: Vec<Node>,
    /// Deepest node containing each cell; the cell lies in `rc` of that node.
    pub cell_node: Vec<usize>,
    #[serde(skip)]
    grid: CircleGrid,
}

impl LevelTree {
    pub fn grid(&self) -> &CircleGrid {
        &self.grid
    }

    pub fn root(&self) -> &Node {
        &self.nodes[0]
    }

    /// `lv(x)` for every cell.
    pub fn cell_levels(&self) -> Vec<i32> {
        self.cell_node.iter().map(|&k| self.nodes[k].level).collect()
    }

    pub fn depth(&self) -> i32 {
        self.nodes.iter().map(|n| n.level).max().unwrap_or(self.m0)
    }

    /// The arc one level up from membership `(node, n)`: the parent at the
    /// first membership, the node itself for repeated ones.
    pub fn predecessor(&self, node: usize, n: i32) -> usize {
        let nd = &self.nodes[node];
        if n == nd.first_level {
            nd.parent.unwrap_or(node)
        } else {
            node
        }
    }
}

/// Build the level tree of `f` for the family `fam`.
pub fn build_tree(f: &BoundaryFunction, fam: &ModularFamily, h: f64, m0: i32, max_level: i32) -> Result<LevelTree> {
    if !(h > 1.0 && h.is_finite()) {
        return Err(Error::InvalidParameter { name: "h", reason: format!("must exceed 1, got {h}") });
    }
    if let Some(j) = f.values().iter().position(|&v| v < 0.0) {
        return Err(Error::InvalidParameter { name: "f", reason: format!("negative value at cell {j}") });
    }
    let grid = f.grid().clone();
    let n_cells = grid.n_cells();
    let values = f.values();
    let t_max = 2.0 * f.max() + 1.0;

    let root = grid.full_run();
    let mut nodes = vec![Node {
        run: root,
        arc: Arc::full(),
        first_level: m0,
        level: m0,
        parent: None,
        children: Vec::new(),
        lambdas: Vec::new(),
        rc_measure: 0.0,
    }];
    let mut cell_node = vec![0usize; n_cells];

    let mut k = 0;
    while k < nodes.len() {
        loop {
            let run = nodes[k].run;
            let n = nodes[k].level;
            let env = fam.envelope_on_run(&grid, run, Bound::Upper);
            let threshold = h.powi(n);
            let runs = grid.runs_where(run, |j| env.eval(values[j]) > threshold);
            if runs.is_empty() {
                break;
            }
            if n + 1 > max_level {
                return Err(Error::TreeTooDeep { max_level });
            }
            let lambda = threshold_inverse(&env, threshold, t_max)?;
            if runs.len() == 1 && runs[0].len == run.len {
                nodes[k].level = n + 1;
                nodes[k].lambdas.push(lambda);
                continue;
            }
            for r in runs {
                let idx = nodes.len();
                for j in r.cells(n_cells) {
                    cell_node[j] = idx;
                }
                nodes.push(Node {
                    run: r,
                    arc: grid.run_arc(r),
                    first_level: n + 1,
                    level: n + 1,
                    parent: Some(k),
                    children: Vec::new(),
                    lambdas: vec![lambda],
                    rc_measure: 0.0,
                });
                nodes[k].children.push(idx);
            }
            break;
        }
        k += 1;
    }
    for (j, &node) in cell_node.iter().enumerate() {
        nodes[node].rc_measure += grid.cell_measure(j);
    }
    Ok(LevelTree { h, m0, nodes, cell_node, grid })
}

/// `λ = sup{t : Φ(t) ≤ y}`, with `0` when `y` lies below `Φ(0)`.
fn threshold_inverse(env: &Envelope<'_>, y: f64, t_max: f64) -> Result<f64> {
    match inverse(env, y, t_max) {
        Err(Error::BelowRange { .. }) => Ok(0.0),
        r => r,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular::{Exponent, Scalar};
    use std::f64::consts::{FRAC_PI_2, TAU};

    fn identity_family() -> ModularFamily {
        ModularFamily::scalar(Scalar::Identity)
    }

    #[test]
    fn zero_function_is_root_only() {
        let f = BoundaryFunction::constant(CircleGrid::uniform(16).unwrap(), 0.0).unwrap();
        let tree = build_tree(&f, &identity_family(), 2.0, 0, 64).unwrap();
        assert_eq!(tree.nodes.len(), 1);
        assert!((tree.root().rc_measure - TAU).abs() < 1e-12);
    }

    #[test]
    fn quarter_indicator_hand_recursion() {
        let grid = CircleGrid::uniform(4).unwrap();
        let f = BoundaryFunction::new(grid, vec![4.0, 0.0, 0.0, 0.0]).unwrap();
        let tree = build_tree(&f, &identity_family(), 2.0, 0, 64).unwrap();
        // level 1 from {f > 1}, repeated at level 2 from {f > 2}; {f > 4} is empty
        assert_eq!(tree.nodes.len(), 2);
        let child = &tree.nodes[1];
        assert_eq!((child.first_level, child.level), (1, 2));
        assert!((child.arc.start() - 0.0).abs() < 1e-15 && (child.arc.length() - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(tree.depth(), 2);
        let l: Vec<_> = child.memberships().collect();
        assert!((l[0].1 - 1.0).abs() < 1e-11 && (l[1].1 - 2.0).abs() < 1e-11);
        assert_eq!(l[0].0, 1);
        assert_eq!(l[1].0, 2);
    }

    #[test]
    fn rc_partitions_and_levels_count_memberships() {
        let grid = CircleGrid::uniform(64).unwrap();
        let f = BoundaryFunction::from_fn(grid, |x| 3.5 + 2.5 * (3.0 * x).sin() + (7.0 * x).cos()).unwrap();
        let fam = ModularFamily::var_exp(Exponent::smooth(1.5, 2.5).unwrap());
        let tree = build_tree(&f, &fam, 2.0, -2, 64).unwrap();
        let total: f64 = tree.nodes.iter().map(|n| n.rc_measure).sum();
        assert!((total - TAU).abs() < 1e-12);
        let levels = tree.cell_levels();
        for j in 0..64 {
            let memberships: i32 = tree
                .nodes
                .iter()
                .filter(|n| n.run.contains(j, 64))
                .map(|n| n.level - n.first_level + 1)
                .sum();
            assert_eq!(memberships, levels[j] - tree.m0 + 1);
        }
    }

    #[test]
    fn too_deep_is_reported() {
        let f = BoundaryFunction::constant(CircleGrid::uniform(4).unwrap(), 1e6).unwrap();
        let err = build_tree(&f, &identity_family(), 2.0, 0, 5).unwrap_err();
        assert_eq!(err, Error::TreeTooDeep { max_level: 5 });
    }
}
