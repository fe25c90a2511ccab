use std::collections::BTreeMap;

use serde::Serialize;

use crate::circle::BoundaryFunction;
use crate::error::{Error, Result};
use crate::modular::{
    doubling_constant, luxemburg_norm_of, ratio, Bound, CellModular, DoublingSearch, ModularFamily, ModularFunction,
};

use super::{build_tree, LevelTree};

/// Relative slack for floating-point comparisons in the sandwich checks.
const SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelTally {
    pub level: i32,
    /// Arcs with a membership at this level.
    pub arcs: usize,
    /// `Σ m(I)` over those arcs.
    pub measure: f64,
    /// `Σ m(rc(I))` over arcs with `lv(I)` equal to this level.
    pub rc_measure: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointwiseViolation {
    pub cell: usize,
    pub node: usize,
    pub level: i32,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeReport {
    pub h: f64,
    pub m0: i32,
    /// `ρ_Φ(f)`.
    pub integral: f64,
    /// `Σ_{lv(I) > m0} h^{lv(I)} m(rc(I))`.
    pub sum_rc_strict: f64,
    /// `Σ_I h^{lv(I)} m(rc(I))`, including arcs with `lv(I) = m0`.
    pub sum_rc_incl: f64,
    /// `Σ_{n > m0} Σ_{I ∈ 𝓘_n} h^n m(I)`.
    pub sum_full_strict: f64,
    /// `Σ_{n ≥ m0} Σ_{I ∈ 𝓘_n} h^n m(I)`.
    pub sum_full_incl: f64,
    /// `h^{m0}·2π`, the root contribution dropped by the strict sums.
    pub tail: f64,
    /// Largest `Φ_{pr,+}(λ)/Φ_{pr,-}(λ)` over the memberships of the tree.
    pub c_hat: f64,
    /// Largest `m(pr)·Φ_{pr,-}(λ)`, the modulus at which `c_hat` is an SCI ratio.
    pub implied_modulus: f64,
    /// `sum_rc_strict / (Ĉh) ≤ integral ≤ sum_rc_incl`.
    pub small_sandwich: bool,
    /// `(h-1)/(Ĉh²)·sum_full_strict ≤ integral ≤ sum_full_incl`.
    pub big_sandwich: bool,
    pub violations: Vec<PointwiseViolation>,
    /// `f` is identically zero or the tree has no levels above `m0`.
    pub degenerate: bool,
    pub tallies: Vec<LevelTally>,
}

impl TreeReport {
    pub fn passed(&self) -> bool {
        self.small_sandwich && self.big_sandwich && self.violations.is_empty()
    }

    /// `integral / sum_rc_strict`; the small lemma puts this at or above `1/(Ĉh)`.
    pub fn small_lower_ratio(&self) -> f64 {
        ratio(self.integral, self.sum_rc_strict)
    }

    /// `integral / sum_rc_incl`; at most 1.
    pub fn small_upper_ratio(&self) -> f64 {
        ratio(self.integral, self.sum_rc_incl)
    }

    /// `integral / sum_full_strict`; at or above `(h-1)/(Ĉh²)`.
    pub fn big_lower_ratio(&self) -> f64 {
        ratio(self.integral, self.sum_full_strict)
    }

    /// `integral / sum_full_incl`; at most 1.
    pub fn big_upper_ratio(&self) -> f64 {
        ratio(self.integral, self.sum_full_incl)
    }
}

/// Both sandwich sums, the realized constant `Ĉ` and the pointwise level bounds.
pub fn lemma_sums(tree: &LevelTree, fam: &ModularFamily, f: &BoundaryFunction) -> TreeReport {
    let grid = tree.grid();
    let h = tree.h;
    let cm = CellModular::new(fam, grid);
    let integral = cm.eval(f.values());

    let mut c_hat: f64 = 1.0;
    let mut implied_modulus: f64 = 0.0;
    let mut sum_rc_strict = 0.0;
    let mut sum_rc_incl = 0.0;
    let mut sum_full_strict = 0.0;
    let mut sum_full_incl = 0.0;
    let mut by_level: BTreeMap<i32, LevelTally> = BTreeMap::new();
    for (k, node) in tree.nodes.iter().enumerate() {
        let m = grid.run_measure(node.run);
        let rc = h.powi(node.level) * node.rc_measure;
        sum_rc_incl += rc;
        if node.level > tree.m0 {
            sum_rc_strict += rc;
        }
        by_level
            .entry(node.level)
            .or_insert(LevelTally { level: node.level, arcs: 0, measure: 0.0, rc_measure: 0.0 })
            .rc_measure += node.rc_measure;
        for n in node.first_level..=node.level {
            let term = h.powi(n) * m;
            sum_full_incl += term;
            if n > tree.m0 {
                sum_full_strict += term;
            }
            let t = by_level.entry(n).or_insert(LevelTally { level: n, arcs: 0, measure: 0.0, rc_measure: 0.0 });
            t.arcs += 1;
            t.measure += m;
        }
        for (n, lambda) in node.memberships() {
            let pr = &tree.nodes[tree.predecessor(k, n)];
            let upper = fam.envelope_on_run(grid, pr.run, Bound::Upper).eval(lambda);
            let lower = fam.envelope_on_run(grid, pr.run, Bound::Lower).eval(lambda);
            c_hat = c_hat.max(ratio(upper, lower));
            implied_modulus = implied_modulus.max(grid.run_measure(pr.run) * lower);
        }
    }

    let mut violations = Vec::new();
    for (j, &node) in tree.cell_node.iter().enumerate() {
        let lv = tree.nodes[node].level;
        let value = fam.point_eval(grid.midpoint(j), f.values()[j]);
        let upper = h.powi(lv);
        let lower = if lv > tree.m0 { h.powi(lv - 1) / c_hat } else { 0.0 };
        if value > upper * (1.0 + SLACK) || value < lower * (1.0 - SLACK) {
            violations.push(PointwiseViolation { cell: j, node, level: lv, value, lower, upper });
        }
    }

    let small_sandwich =
        sum_rc_strict / (c_hat * h) <= integral * (1.0 + SLACK) && integral <= sum_rc_incl * (1.0 + SLACK);
    let big_sandwich = (h - 1.0) / (c_hat * h * h) * sum_full_strict <= integral * (1.0 + SLACK)
        && integral <= sum_full_incl * (1.0 + SLACK);
    let degenerate = f.values().iter().all(|&v| v == 0.0) || sum_rc_strict == 0.0;

    TreeReport {
        h,
        m0: tree.m0,
        integral,
        sum_rc_strict,
        sum_rc_incl,
        sum_full_strict,
        sum_full_incl,
        tail: h.powi(tree.m0) * grid.total_measure(),
        c_hat,
        implied_modulus,
        small_sandwich,
        big_sandwich,
        violations,
        degenerate,
        tallies: by_level.into_values().collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GoodLambdaParams {
    pub beta: f64,
    pub gamma: f64,
    /// Target for the measured `δ̂`.
    pub delta: f64,
    pub h: f64,
}

impl GoodLambdaParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("beta", self.beta), ("gamma", self.gamma), ("delta", self.delta)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter { name, reason: format!("must be positive, got {v}") });
            }
        }
        if !(self.h > 1.0 && self.h.is_finite()) {
            return Err(Error::InvalidParameter { name: "h", reason: format!("must exceed 1, got {}", self.h) });
        }
        Ok(())
    }

    /// `max(2, ⌈C′_β⌉)` with `C′_β` the measured dilation constant at factor `β`.
    pub fn default_h(fam: &ModularFamily, beta: f64) -> Result<f64> {
        let c = doubling_constant(fam, &DoublingSearch { factor: beta, ..Default::default() })?;
        Ok(c.constant.ceil().max(2.0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoodLambdaReport {
    pub beta: f64,
    pub gamma: f64,
    /// `max m{x ∈ I : f > βλ_I, g < γλ_I} / m(I)` over memberships above `m0`.
    pub delta_hat: f64,
    /// Node and level attaining `delta_hat`.
    pub worst: Option<(usize, i32)>,
    pub memberships: usize,
    pub passed: bool,
}

pub fn goodlambda_check(
    f: &BoundaryFunction,
    g: &BoundaryFunction,
    tree: &LevelTree,
    params: &GoodLambdaParams,
) -> Result<GoodLambdaReport> {
    params.validate()?;
    let grid = tree.grid();
    if g.n_cells() != grid.n_cells() {
        return Err(Error::LengthMismatch { expected: grid.n_cells(), got: g.n_cells() });
    }
    let n_cells = grid.n_cells();
    let (fv, gv) = (f.values(), g.values());
    let mut delta_hat: f64 = 0.0;
    let mut worst = None;
    let mut memberships = 0;
    for (k, node) in tree.nodes.iter().enumerate() {
        let m = grid.run_measure(node.run);
        for (n, lambda) in node.memberships() {
            memberships += 1;
            let bad: f64 = node
                .run
                .cells(n_cells)
                .filter(|&j| fv[j] > params.beta * lambda && gv[j] < params.gamma * lambda)
                .map(|j| grid.cell_measure(j))
                .fold(0.0, |a, b| a + b);
            let d = bad / m;
            if d > delta_hat || worst.is_none() {
                delta_hat = delta_hat.max(d);
                worst = Some((k, n));
            }
        }
    }
    Ok(GoodLambdaReport {
        beta: params.beta,
        gamma: params.gamma,
        delta_hat,
        worst,
        memberships,
        passed: delta_hat <= params.delta,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    /// `‖f‖_(1)`.
    pub norm_f: f64,
    /// `‖g‖_(1/K)`.
    pub norm_g: f64,
    pub k: f64,
    /// Smallest `K` for which the comparison holds: `1/ρ(g/‖f‖)`.
    pub empirical_k: f64,
    pub delta_hat: f64,
    pub c_hat: f64,
    /// Measured doubling constant `C′`.
    pub doubling: f64,
    /// Measured dilation constant at factor `1/γ`.
    pub dilation_inv_gamma: f64,
    /// `2δ̂Ĉ(2β)^{2 log₂ C′}`.
    pub feasibility: f64,
    pub passed: bool,
}

/// Check `‖f‖_(1) ≤ ‖g‖_(1/K)` with `K` assembled from measured constants.
///
/// The tree is built for `f/‖f‖_(1)`, so the sandwich hypotheses `ρ ≤ 1` hold.
pub fn theorem_norm_comparison(
    f: &BoundaryFunction,
    g: &BoundaryFunction,
    fam: &ModularFamily,
    params: &GoodLambdaParams,
    m0: i32,
    max_level: i32,
) -> Result<ComparisonReport> {
    params.validate()?;
    if g.n_cells() != f.n_cells() {
        return Err(Error::LengthMismatch { expected: f.n_cells(), got: g.n_cells() });
    }
    let cm = CellModular::new(fam, f.grid());
    let norm_f = luxemburg_norm_of(&cm, f.values(), 1.0)?;
    let doubling = doubling_constant(fam, &DoublingSearch::default())?.constant;
    if norm_f == 0.0 {
        return Ok(ComparisonReport {
            norm_f,
            norm_g: luxemburg_norm_of(&cm, g.values(), 1.0)?,
            k: 1.0,
            empirical_k: 0.0,
            delta_hat: 0.0,
            c_hat: 1.0,
            doubling,
            dilation_inv_gamma: 1.0,
            feasibility: 0.0,
            passed: true,
        });
    }
    let fn_ = f.scaled(1.0 / norm_f)?;
    let gn = g.scaled(1.0 / norm_f)?;
    let tree = build_tree(&fn_, fam, params.h, m0, max_level)?;
    let report = lemma_sums(&tree, fam, &fn_);
    let gl = goodlambda_check(&fn_, &gn, &tree, params)?;
    let c_hat = report.c_hat;
    let feasibility = 2.0 * gl.delta_hat * c_hat * (2.0 * params.beta).powf(2.0 * doubling.log2());
    if !(feasibility < 1.0) {
        return Err(Error::Infeasible { value: feasibility });
    }
    let dilation_inv_gamma =
        doubling_constant(fam, &DoublingSearch { factor: 1.0 / params.gamma, ..Default::default() })?.constant;
    let k = c_hat * dilation_inv_gamma * params.h * params.h / (1.0 - feasibility);
    let norm_g = luxemburg_norm_of(&cm, g.values(), 1.0 / k)?;
    let empirical_k = 1.0 / cm.eval(gn.values());
    Ok(ComparisonReport {
        norm_f,
        norm_g,
        k,
        empirical_k,
        delta_hat: gl.delta_hat,
        c_hat,
        doubling,
        dilation_inv_gamma,
        feasibility,
        passed: norm_f <= norm_g * (1.0 + SLACK),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::CircleGrid;
    use crate::modular::{Exponent, Scalar};

    fn step(values: &[f64]) -> BoundaryFunction {
        BoundaryFunction::new(CircleGrid::uniform(values.len()).unwrap(), values.to_vec()).unwrap()
    }

    #[test]
    fn identity_family_has_unit_c_hat() {
        let fam = ModularFamily::scalar(Scalar::Identity);
        let f = step(&[0.05, 0.3, 0.01, 0.0, 0.2, 0.12, 0.07, 0.02]);
        let tree = build_tree(&f, &fam, 2.0, -8, 64).unwrap();
        let r = lemma_sums(&tree, &fam, &f);
        assert_eq!(r.c_hat, 1.0);
        assert!(r.passed(), "{r:?}");
        assert!(r.small_lower_ratio() >= 0.5 - 1e-12);
        assert!(r.small_upper_ratio() <= 1.0 + 1e-12);
    }

    #[test]
    fn zero_function_is_degenerate() {
        let fam = ModularFamily::var_exp(Exponent::constant(2.0).unwrap());
        let f = step(&[0.0; 8]);
        let tree = build_tree(&f, &fam, 4.0, 0, 64).unwrap();
        let r = lemma_sums(&tree, &fam, &f);
        assert!(r.degenerate);
        assert_eq!(r.integral, 0.0);
        assert_eq!(r.sum_rc_strict, 0.0);
        assert!((r.sum_rc_incl - r.tail).abs() < 1e-12);
    }

    #[test]
    fn good_lambda_with_g_equal_f_is_zero() {
        let fam = ModularFamily::var_exp(Exponent::smooth(1.5, 2.5).unwrap());
        let f = step(&[0.1, 0.9, 2.0, 0.4, 0.0, 1.3, 0.2, 0.6]);
        let tree = build_tree(&f, &fam, 2.0, -2, 64).unwrap();
        let params = GoodLambdaParams { beta: 2.0, gamma: 1.0, delta: 1e-12, h: 2.0 };
        let r = goodlambda_check(&f, &f, &tree, &params).unwrap();
        assert_eq!(r.delta_hat, 0.0);
        assert!(r.passed);
    }

    #[test]
    fn good_lambda_with_zero_g_is_level_ratio() {
        let fam = ModularFamily::scalar(Scalar::Identity);
        let f = step(&[1.0, 3.0, 0.0, 5.0, 2.0, 0.5, 0.0, 9.0]);
        let g = step(&[0.0; 8]);
        let tree = build_tree(&f, &fam, 2.0, 0, 64).unwrap();
        let params = GoodLambdaParams { beta: 2.0, gamma: 1.0, delta: 1.0, h: 2.0 };
        let r = goodlambda_check(&f, &g, &tree, &params).unwrap();
        // brute force: every membership's fraction of cells with f > 2λ
        let mut want: f64 = 0.0;
        for node in &tree.nodes {
            for (_, lambda) in node.memberships() {
                let cells: Vec<_> = node.run.cells(8).collect();
                let hit = cells.iter().filter(|&&j| f.values()[j] > 2.0 * lambda).count();
                want = want.max(hit as f64 / cells.len() as f64);
            }
        }
        assert!((r.delta_hat - want).abs() < 1e-15);
    }

    #[test]
    fn comparison_with_itself_passes() {
        let fam = ModularFamily::scalar(Scalar::Identity);
        let f = step(&[1.0, 3.0, 0.0, 5.0, 2.0, 0.5, 0.0, 9.0]);
        let params = GoodLambdaParams { beta: 2.0, gamma: 1.0, delta: 1.0, h: 2.0 };
        let r = theorem_norm_comparison(&f, &f, &fam, &params, -4, 64).unwrap();
        assert!(r.passed);
        assert!(r.k >= 1.0);
        let zero = step(&[0.0; 8]);
        assert!(theorem_norm_comparison(&zero, &f, &fam, &params, -4, 64).unwrap().passed);
    }
}
