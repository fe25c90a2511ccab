use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::Serialize;

use crate::circle::Arc;
use crate::error::{Error, Result};

use super::{inverse_unbounded, Bound, ModularFamily, ModularFunction};

/// Growth between successive refinements beyond which an estimate is treated
/// as unbounded.
pub const DIVERGENCE_GROWTH: f64 = 1.5;

/// `num/den` with `0/0 = 1`, `x/0 = ∞` and non-finite numerators mapped to `∞`.
pub fn ratio(num: f64, den: f64) -> f64 {
    if !num.is_finite() {
        return f64::INFINITY;
    }
    if den == 0.0 {
        return if num == 0.0 { 1.0 } else { f64::INFINITY };
    }
    num / den
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoublingSearch {
    /// Multiplier in `Φ(factor·t) ≤ C Φ(t)`; 2 for the doubling constant.
    pub factor: f64,
    /// Refinement `d` searches `t ∈ [10^-d, 10^d]`, for `d = 1..=max_decades`.
    pub max_decades: u32,
    pub points_per_decade: usize,
    pub x_samples: usize,
    /// Dyadic envelope arcs of levels `0..=arc_levels` are included.
    pub arc_levels: u32,
}

impl Default for DoublingSearch {
    fn default() -> Self {
        Self { factor: 2.0, max_decades: 6, points_per_decade: 32, x_samples: 256, arc_levels: 5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoublingReport {
    pub factor: f64,
    /// Final (largest search range) estimate.
    pub constant: f64,
    /// Estimate after each refinement.
    pub profile: Vec<f64>,
    pub diverging: bool,
}

impl DoublingReport {
    /// Bound `(2β)^{log₂ C′}` on the dilation constant at `β`, valid for `β ≥ 1/2`.
    pub fn dilation_bound(&self, beta: f64) -> f64 {
        (2.0 * beta).powf(self.constant.log2())
    }
}

/// `sup Φ(factor·t)/Φ(t)` over points, dyadic-arc envelopes and a log `t` grid.
pub fn doubling_constant(fam: &ModularFamily, search: &DoublingSearch) -> Result<DoublingReport> {
    if !(search.factor > 0.0) || search.max_decades == 0 || search.points_per_decade == 0 || search.x_samples == 0 {
        return Err(Error::InvalidParameter { name: "search", reason: "empty doubling search grid".into() });
    }
    // exponent ranges to test: single points, then dyadic arcs (both envelopes)
    let mut ranges: Vec<(f64, f64)> = (0..search.x_samples)
        .map(|k| {
            let p = fam.exponent.eval(TAU * k as f64 / search.x_samples as f64);
            (p, p)
        })
        .collect();
    let step = TAU / f64::from(1u32 << (search.arc_levels + 4));
    for level in 0..=search.arc_levels {
        let count = 1usize << level;
        for j in 0..count {
            let arc = Arc::new(TAU * j as f64 / count as f64, TAU / count as f64)?;
            ranges.push(fam.exponent.range_on_arc(&arc, step));
        }
    }
    ranges.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ranges.dedup();

    let mut profile = Vec::with_capacity(search.max_decades as usize);
    for d in 1..=search.max_decades {
        let n_t = 2 * d as usize * search.points_per_decade + 1;
        let lo = -(d as f64);
        let span = 2.0 * d as f64;
        let sup = ranges
            .par_iter()
            .map(|&(p_lo, p_hi)| {
                let mut best: f64 = 1.0;
                for bound in [Bound::Upper, Bound::Lower] {
                    let env = fam.envelope_from_range(p_lo, p_hi, bound);
                    for k in 0..n_t {
                        let t = 10f64.powf(lo + span * k as f64 / (n_t - 1) as f64);
                        best = best.max(ratio(env.eval(search.factor * t), env.eval(t)));
                    }
                    if p_lo == p_hi {
                        break;
                    }
                }
                best
            })
            .reduce(|| 1.0, f64::max);
        profile.push(sup);
    }
    let constant = *profile.last().unwrap();
    Ok(DoublingReport { factor: search.factor, constant, diverging: diverging(&profile), profile })
}

fn diverging(profile: &[f64]) -> bool {
    match profile {
        [] => false,
        [.., last] if !last.is_finite() => true,
        [.., prev, last] => ratio(*last, *prev) > DIVERGENCE_GROWTH,
        _ => false,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SciSearch {
    /// Dyadic arcs of levels `0..=levels` (level `k` has `2^k` arcs).
    pub levels: u32,
    /// Log-spaced `w` samples per arc.
    pub w_points: usize,
    /// Smallest tested `w`.
    pub w_floor: f64,
    /// Exponent samples per finest-level arc when forming envelopes.
    pub samples_per_arc: u32,
}

impl Default for SciSearch {
    fn default() -> Self {
        Self { levels: 10, w_points: 48, w_floor: 1.0, samples_per_arc: 32 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SciReport {
    pub modulus: f64,
    /// Final cumulative estimate of `C(B)`.
    pub constant: f64,
    /// Sup over the arcs of each level.
    pub per_level: Vec<f64>,
    /// Sup over all levels up to each level.
    pub cumulative: Vec<f64>,
    /// `cumulative[k] / cumulative[k-1]`.
    pub growth: Vec<f64>,
    pub diverging: bool,
}

/// `sup_I sup_{w_floor ≤ w ≤ Φ_{I,-}^{-1}(B/m(I))} Φ_{I,+}(w)/Φ_{I,-}(w)` over dyadic arcs.
pub fn sci_constant(fam: &ModularFamily, modulus: f64, search: &SciSearch) -> Result<SciReport> {
    if !(modulus > 0.0 && modulus.is_finite()) {
        return Err(Error::InvalidParameter { name: "B", reason: format!("modulus must be positive, got {modulus}") });
    }
    if search.w_points < 2 || !(search.w_floor > 0.0) {
        return Err(Error::InvalidParameter { name: "search", reason: "need ≥ 2 positive w samples".into() });
    }
    // a common sampling lattice keeps sample sets of nested dyadic arcs nested
    let step = TAU / (f64::from(search.samples_per_arc) * 2f64.powi(search.levels as i32));
    let mut per_level = Vec::with_capacity(search.levels as usize + 1);
    for level in 0..=search.levels {
        let count = 1usize << level;
        let sup = (0..count)
            .into_par_iter()
            .map(|j| -> Result<f64> {
                let arc = Arc::new(TAU * j as f64 / count as f64, TAU / count as f64)?;
                arc_ratio(fam, &arc, step, modulus, search)
            })
            .try_reduce(|| 1.0, |a, b| Ok(a.max(b)))?;
        per_level.push(sup);
    }
    let mut cumulative = Vec::with_capacity(per_level.len());
    let mut running: f64 = 1.0;
    for &v in &per_level {
        running = running.max(v);
        cumulative.push(running);
    }
    let growth: Vec<f64> = cumulative.windows(2).map(|w| ratio(w[1], w[0])).collect();
    let constant = *cumulative.last().unwrap();
    let diverging = !constant.is_finite() || growth.last().is_some_and(|&g| g > DIVERGENCE_GROWTH);
    Ok(SciReport { modulus, constant, per_level, cumulative, growth, diverging })
}

fn arc_ratio(fam: &ModularFamily, arc: &Arc, step: f64, modulus: f64, search: &SciSearch) -> Result<f64> {
    let (p_lo, p_hi) = fam.exponent.range_on_arc(arc, step);
    let upper = fam.envelope_from_range(p_lo, p_hi, Bound::Upper);
    let lower = fam.envelope_from_range(p_lo, p_hi, Bound::Lower);
    let w_max = match inverse_unbounded(&lower, modulus / arc.length()) {
        Ok(w) => w,
        Err(Error::BelowRange { .. }) => return Ok(1.0),
        Err(e) => return Err(e),
    };
    if w_max < search.w_floor {
        return Ok(1.0);
    }
    let span = (w_max / search.w_floor).ln();
    let mut best: f64 = 1.0;
    for k in 0..search.w_points {
        let w = search.w_floor * (span * k as f64 / (search.w_points - 1) as f64).exp();
        best = best.max(ratio(upper.eval(w), lower.eval(w)));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular::{Exponent, Scalar};

    #[test]
    fn ratio_conventions() {
        assert_eq!(ratio(0.0, 0.0), 1.0);
        assert_eq!(ratio(1.0, 0.0), f64::INFINITY);
        assert_eq!(ratio(f64::INFINITY, f64::INFINITY), f64::INFINITY);
        assert_eq!(ratio(6.0, 3.0), 2.0);
    }

    #[test]
    fn doubling_of_square_is_four() {
        let fam = ModularFamily::var_exp(Exponent::constant(2.0).unwrap());
        let r = doubling_constant(&fam, &DoublingSearch::default()).unwrap();
        assert!((r.constant - 4.0).abs() < 1e-12);
        assert!(!r.diverging);
        assert!((r.dilation_bound(2.0) - 16.0).abs() < 1e-9);
    }

    #[test]
    fn doubling_of_step_exponent_is_eight() {
        let fam = ModularFamily::var_exp(Exponent::step(1.0, 3.0).unwrap());
        let r = doubling_constant(&fam, &DoublingSearch::default()).unwrap();
        assert!((r.constant - 8.0).abs() < 1e-12);
    }

    #[test]
    fn exponential_is_not_doubling() {
        let fam = ModularFamily::scalar(Scalar::Exp);
        let r = doubling_constant(&fam, &DoublingSearch::default()).unwrap();
        assert!(r.diverging);
    }

    #[test]
    fn constant_exponent_sci_is_one() {
        let fam = ModularFamily::var_exp(Exponent::constant(2.0).unwrap());
        let r = sci_constant(&fam, 1.0, &SciSearch { levels: 6, ..Default::default() }).unwrap();
        assert!(r.per_level.iter().all(|&c| c == 1.0));
        assert!(!r.diverging);
    }

    #[test]
    fn sci_discriminates_step_from_smooth() {
        let search = SciSearch::default();
        let smooth = ModularFamily::var_exp(Exponent::smooth(1.5, 2.5).unwrap());
        let rs = sci_constant(&smooth, 1.0, &search).unwrap();
        assert!(!rs.diverging, "{rs:?}");
        assert!(*rs.growth.last().unwrap() < 1.1);
        let step = ModularFamily::var_exp(Exponent::step(1.0, 3.0).unwrap());
        let rt = sci_constant(&step, 1.0, &search).unwrap();
        assert!(rt.diverging, "{rt:?}");
    }
}
