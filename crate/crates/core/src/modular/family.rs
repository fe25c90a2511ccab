use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::circle::{Arc, CellRun, CircleGrid};
use crate::error::{Error, Result};

use super::ModularFunction;

/// Exponent functions `p(x)` on the circle.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Exponent {
    Constant { p: f64 },
    /// `p(x) = (lo + hi)/2 + (hi - lo)/2 · cos x`; Lipschitz, hence log-Hölder.
    Smooth { lo: f64, hi: f64 },
    /// `lo` on `[0, π)`, `hi` on `[π, 2π)`.
    Step { lo: f64, hi: f64 },
    /// `p(x) = lo + (hi - lo)·|sin(x/2)|^{1/s}`, Hölder of order `1/s`.
    Holder { lo: f64, hi: f64, s: f64 },
}

impl Exponent {
    pub fn constant(p: f64) -> Result<Self> {
        check_range(p, p)?;
        Ok(Self::Constant { p })
    }

    pub fn smooth(lo: f64, hi: f64) -> Result<Self> {
        check_range(lo, hi)?;
        Ok(Self::Smooth { lo, hi })
    }

    pub fn step(lo: f64, hi: f64) -> Result<Self> {
        check_range(lo, hi)?;
        Ok(Self::Step { lo, hi })
    }

    pub fn holder(lo: f64, hi: f64, s: f64) -> Result<Self> {
        check_range(lo, hi)?;
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidExponent(format!("Hölder order parameter s = {s} must be positive")));
        }
        Ok(Self::Holder { lo, hi, s })
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Self::Constant { p } => p,
            Self::Smooth { lo, hi } => 0.5 * (lo + hi) + 0.5 * (hi - lo) * x.cos(),
            Self::Step { lo, hi } => {
                if x.rem_euclid(TAU) < PI {
                    lo
                } else {
                    hi
                }
            }
            Self::Holder { lo, hi, s } => lo + (hi - lo) * (0.5 * x).sin().abs().powf(1.0 / s),
        }
    }

    /// Essential infimum over the circle.
    pub fn min(&self) -> f64 {
        match *self {
            Self::Constant { p } => p,
            Self::Smooth { lo, .. } | Self::Step { lo, .. } | Self::Holder { lo, .. } => lo,
        }
    }

    pub fn max(&self) -> f64 {
        match *self {
            Self::Constant { p } => p,
            Self::Smooth { hi, .. } | Self::Step { hi, .. } | Self::Holder { hi, .. } => hi,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Self::Constant { .. })
    }

    /// Range of `p` over the closure of a cell run: every cell edge and midpoint.
    ///
    /// Sample sets of nested runs are nested, so envelopes inherit nesting.
    pub fn range_on_run(&self, grid: &CircleGrid, run: CellRun) -> (f64, f64) {
        if let Self::Constant { p } = *self {
            return (p, p);
        }
        let n = grid.n_cells();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut visit = |x: f64| {
            let p = self.eval(x);
            lo = lo.min(p);
            hi = hi.max(p);
        };
        for j in run.cells(n) {
            let (a, _) = grid.cell(j);
            visit(a);
            visit(grid.midpoint(j));
        }
        let last = (run.start + run.len + n - 1) % n;
        visit(grid.cell(last).1);
        (lo, hi)
    }

    /// Range of `p` over the closure of an arbitrary arc, sampled with at
    /// most `step` spacing plus both endpoints.
    pub fn range_on_arc(&self, arc: &Arc, step: f64) -> (f64, f64) {
        if let Self::Constant { p } = *self {
            return (p, p);
        }
        let pieces = (arc.length() / step).ceil().max(1.0) as usize;
        let h = arc.length() / pieces as f64;
        (0..=pieces)
            .map(|k| self.eval(arc.start() + k as f64 * h))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p), hi.max(p)))
    }
}

fn check_range(lo: f64, hi: f64) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::InvalidExponent("exponent bounds must be finite".into()));
    }
    if lo < 0.0 {
        return Err(Error::InvalidExponent(format!("exponent takes the negative value {lo}")));
    }
    if lo > hi {
        return Err(Error::InvalidExponent(format!("lower bound {lo} exceeds upper bound {hi}")));
    }
    Ok(())
}

/// Scalar (x-independent) increasing functions on `[0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Scalar {
    Identity,
    /// `t^a`
    Power { a: f64 },
    /// `t` on `[0, 1]`, `t^a` beyond.
    PiecewisePower { a: f64 },
    /// `(log⁺ t)^a`
    LogPlusPower { a: f64 },
    /// `e^t`
    Exp,
}

impl Scalar {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Self::Identity => t,
            Self::Power { a } => t.powf(a),
            Self::PiecewisePower { a } => {
                if t <= 1.0 {
                    t
                } else {
                    t.powf(a)
                }
            }
            Self::LogPlusPower { a } => log_plus(t).powf(a),
            Self::Exp => t.exp(),
        }
    }
}

pub fn log_plus(t: f64) -> f64 {
    if t > 1.0 {
        t.ln()
    } else {
        0.0
    }
}

/// How `Φ_x(t)` depends on `t` once `p = p(x)` is fixed.
///
/// Every variant is monotone in `p` for fixed `t`, so the sup/inf of `Φ_x`
/// over a set of points is attained at the extreme exponents of that set.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Profile {
    /// `t^p`
    Power,
    /// `max(1, t^p)`
    FlooredPower,
    /// `1` on `[0, 1]`, `max(t^p, (1 + log t)^s)` beyond.
    LogType { s: f64 },
    /// `max(exp(t·p·s/q), (1 + t)^s)`
    ExpFamily { q: f64, s: f64 },
    /// `exp(rate·p·t)`
    Exponential { rate: f64 },
    /// Ignores `p`.
    Scalar { f: Scalar },
    /// `outer(inner(p, t))`
    Compose { outer: Scalar, inner: Box<Profile> },
    /// `inner(p, t)^k`
    Pow { k: f64, inner: Box<Profile> },
    /// `inner(p, g(t))`
    Precompose { g: Scalar, inner: Box<Profile> },
    /// `inner(p, log⁺ t)`
    PrecomposeLogPlus { inner: Box<Profile> },
    /// `factor · inner(p, t)`
    Scaled { factor: f64, inner: Box<Profile> },
}

impl Profile {
    pub fn eval(&self, p: f64, t: f64) -> f64 {
        match self {
            Self::Power => t.powf(p),
            Self::FlooredPower => t.powf(p).max(1.0),
            Self::LogType { s } => {
                if t <= 1.0 {
                    1.0
                } else {
                    t.powf(p).max((1.0 + t.ln()).powf(*s))
                }
            }
            Self::ExpFamily { q, s } => (t * p * s / q).exp().max((1.0 + t).powf(*s)),
            Self::Exponential { rate } => (rate * p * t).exp(),
            Self::Scalar { f } => f.eval(t),
            Self::Compose { outer, inner } => outer.eval(inner.eval(p, t)),
            Self::Pow { k, inner } => inner.eval(p, t).powf(*k),
            Self::Precompose { g, inner } => inner.eval(p, g.eval(t)),
            Self::PrecomposeLogPlus { inner } => inner.eval(p, log_plus(t)),
            Self::Scaled { factor, inner } => factor * inner.eval(p, t),
        }
    }
}

/// Which side of the interval envelope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Bound {
    /// `Φ_{I,+}`
    Upper,
    /// `Φ_{I,-}`
    Lower,
}

/// A modular family `x ↦ Φ_x(t) = profile(p(x), t)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModularFamily {
    pub exponent: Exponent,
    pub profile: Profile,
}

impl ModularFamily {
    pub fn new(exponent: Exponent, profile: Profile) -> Self {
        Self { exponent, profile }
    }

    /// `Φ_x(t) = t^{p(x)}`
    pub fn var_exp(exponent: Exponent) -> Self {
        Self::new(exponent, Profile::Power)
    }

    /// `Φ_x(t) = max(1, t^{p(x)})`
    pub fn var_exp_floored(exponent: Exponent) -> Self {
        Self::new(exponent, Profile::FlooredPower)
    }

    pub fn log_type(exponent: Exponent, s: f64) -> Result<Self> {
        positive("s", s)?;
        Ok(Self::new(exponent, Profile::LogType { s }))
    }

    pub fn exp_family(exponent: Exponent, q: f64, s: f64) -> Result<Self> {
        positive("q", q)?;
        positive("s", s)?;
        Ok(Self::new(exponent, Profile::ExpFamily { q, s }))
    }

    /// `Φ_x(t) = exp(rate·p(x)·t)`
    pub fn exponential(exponent: Exponent, rate: f64) -> Result<Self> {
        positive("rate", rate)?;
        Ok(Self::new(exponent, Profile::Exponential { rate }))
    }

    /// A family with no x-dependence.
    pub fn scalar(f: Scalar) -> Self {
        Self::new(Exponent::Constant { p: 0.0 }, Profile::Scalar { f })
    }

    /// `Ψ ∘ Φ_x`
    pub fn compose_outer(self, outer: Scalar) -> Self {
        Self::new(self.exponent, Profile::Compose { outer, inner: Box::new(self.profile) })
    }

    /// `Φ_x ∘ g`, the composition that preserves slow change on intervals.
    pub fn compose(self, g: Scalar) -> Self {
        Self::new(self.exponent, Profile::Precompose { g, inner: Box::new(self.profile) })
    }

    /// `Φ_x^k` for `k > 1`.
    pub fn power(self, k: f64) -> Result<Self> {
        if !(k > 1.0 && k.is_finite()) {
            return Err(Error::InvalidParameter { name: "k", reason: format!("power must exceed 1, got {k}") });
        }
        Ok(Self::new(self.exponent, Profile::Pow { k, inner: Box::new(self.profile) }))
    }

    /// `Φ_x ∘ log⁺`
    pub fn precompose_log_plus(self) -> Self {
        Self::new(self.exponent, Profile::PrecomposeLogPlus { inner: Box::new(self.profile) })
    }

    /// `Φ_x ∘ exp`
    pub fn precompose_exp(self) -> Self {
        self.compose(Scalar::Exp)
    }

    /// `a · Φ_x`
    pub fn scaled(self, factor: f64) -> Result<Self> {
        positive("factor", factor)?;
        Ok(Self::new(self.exponent, Profile::Scaled { factor, inner: Box::new(self.profile) }))
    }

    pub fn point_eval(&self, x: f64, t: f64) -> f64 {
        self.profile.eval(self.exponent.eval(x), t)
    }

    pub fn at(&self, x: f64) -> PointFunction<'_> {
        PointFunction { profile: &self.profile, p: self.exponent.eval(x) }
    }

    /// Envelope from a known exponent range `[p_lo, p_hi]`.
    pub fn envelope_from_range(&self, p_lo: f64, p_hi: f64, bound: Bound) -> Envelope<'_> {
        Envelope { profile: &self.profile, p_lo, p_hi, bound }
    }

    /// `Φ_{I,±}` for a run of grid cells (sup/inf over the closure samples).
    pub fn envelope_on_run(&self, grid: &CircleGrid, run: CellRun, bound: Bound) -> Envelope<'_> {
        let (lo, hi) = self.exponent.range_on_run(grid, run);
        self.envelope_from_range(lo, hi, bound)
    }

    /// `Φ_{I,±}` for an arbitrary arc, sampling its closure at spacing `step`.
    pub fn envelope_on_arc(&self, arc: &Arc, step: f64, bound: Bound) -> Envelope<'_> {
        let (lo, hi) = self.exponent.range_on_arc(arc, step);
        self.envelope_from_range(lo, hi, bound)
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, reason: format!("must be positive and finite, got {v}") })
    }
}

/// `Φ_x` for a fixed point `x`.
#[derive(Debug, Clone, Copy)]
pub struct PointFunction<'a> {
    profile: &'a Profile,
    p: f64,
}

impl ModularFunction for PointFunction<'_> {
    fn eval(&self, t: f64) -> f64 {
        self.profile.eval(self.p, t)
    }
}

/// `Φ_{I,+}` or `Φ_{I,-}` for an interval whose exponent range is `[p_lo, p_hi]`.
#[derive(Debug, Clone, Copy)]
pub struct Envelope<'a> {
    profile: &'a Profile,
    pub p_lo: f64,
    pub p_hi: f64,
    pub bound: Bound,
}

impl ModularFunction for Envelope<'_> {
    fn eval(&self, t: f64) -> f64 {
        let a = self.profile.eval(self.p_lo, t);
        if self.p_lo == self.p_hi {
            return a;
        }
        let b = self.profile.eval(self.p_hi, t);
        match self.bound {
            Bound::Upper => a.max(b),
            Bound::Lower => a.min(b),
        }
    }
}

/// The three families of a composed Hardy-space gauge `Θ = Ψ ∘ Φ ∘ log⁺`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HardyFamilies {
    pub theta: ModularFamily,
    pub psi: ModularFamily,
    pub phi: ModularFamily,
}

impl HardyFamilies {
    /// Variable exponent gauge: `Ψ(t) = t^{p₋/q}`, `Φ_x(t) = e^{t p(x) q / p₋}`,
    /// giving `Θ_x(t) = max(1, t^{p(x)})`. Requires `0 < q < p₋`.
    pub fn variable_exponent(exponent: Exponent, q: f64) -> Result<Self> {
        let p_minus = exponent.min();
        if !(q > 0.0 && q < p_minus) {
            return Err(Error::InvalidParameter { name: "q", reason: format!("need 0 < q < p₋ = {p_minus}, got {q}") });
        }
        let psi = ModularFamily::scalar(Scalar::Power { a: p_minus / q });
        let phi = ModularFamily::exponential(exponent.clone(), q / p_minus)?;
        let theta = ModularFamily::new(
            exponent,
            Profile::PrecomposeLogPlus {
                inner: Box::new(Profile::Compose {
                    outer: Scalar::Power { a: p_minus / q },
                    inner: Box::new(Profile::Exponential { rate: q / p_minus }),
                }),
            },
        );
        Ok(Self { theta, psi, phi })
    }

    /// Log-corrected gauge: `Φ_x(t) = max(e^{t p(x) s/q}, (1+t)^s)`, `Ψ` the
    /// piecewise power `t ↦ t^{q/s}` above 1. Requires `1 < s < q`.
    pub fn log_corrected(exponent: Exponent, s: f64, q: f64) -> Result<Self> {
        if !(1.0 < s && s < q) {
            return Err(Error::InvalidParameter { name: "s", reason: format!("need 1 < s < q, got s = {s}, q = {q}") });
        }
        let psi = ModularFamily::scalar(Scalar::PiecewisePower { a: q / s });
        let phi = ModularFamily::exp_family(exponent.clone(), q, s)?;
        let theta = ModularFamily::new(
            exponent,
            Profile::PrecomposeLogPlus {
                inner: Box::new(Profile::Compose {
                    outer: Scalar::PiecewisePower { a: q / s },
                    inner: Box::new(Profile::ExpFamily { q, s }),
                }),
            },
        );
        Ok(Self { theta, psi, phi })
    }
}
