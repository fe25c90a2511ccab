//! Unit-circle geometry.
//!
//! The circle is identified with `[0, 2π)` carrying plain Lebesgue measure
//! (total mass `2π`). Functions are piecewise constant on the cells of a
//! [`CircleGrid`], so level sets are finite unions of cells and integrals are
//! exact sums.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::error::{Error, Result};

/// A half-open arc `[start, start + length)` taken modulo `2π`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Arc {
    start: f64,
    length: f64,
}

impl Arc {
    pub fn new(start: f64, length: f64) -> Result<Self> {
        // lengths summed from cell widths can overshoot 2π by a few ulps
        let length = if length > TAU && length <= TAU * (1.0 + 8.0 * f64::EPSILON) { TAU } else { length };
        if !start.is_finite() || !(length > 0.0 && length <= TAU) {
            return Err(Error::InvalidArc { start, length });
        }
        let mut start = start.rem_euclid(TAU);
        if start >= TAU {
            start = 0.0;
        }
        Ok(Self { start, length })
    }

    pub fn full() -> Self {
        Self { start: 0.0, length: TAU }
    }

    /// Arc of the given length centred at `center`.
    pub fn centered(center: f64, length: f64) -> Result<Self> {
        Self::new(center - 0.5 * length, length)
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// End point `start + length`; may exceed `2π` when the arc wraps.
    pub fn end(&self) -> f64 {
        self.start + self.length
    }

    pub fn is_full(&self) -> bool {
        self.length >= TAU
    }

    pub fn contains(&self, x: f64) -> bool {
        (x - self.start).rem_euclid(TAU) < self.length
    }

    /// Splits the arc into at most two non-wrapping intervals of `[0, 2π]`.
    pub(crate) fn linear_pieces(&self) -> Vec<(f64, f64)> {
        if self.is_full() {
            return vec![(0.0, TAU)];
        }
        let end = self.end();
        if end <= TAU {
            vec![(self.start, end)]
        } else {
            vec![(self.start, TAU), (0.0, end - TAU)]
        }
    }
}

/// Lebesgue measure of an arc.
pub fn measure(arc: &Arc) -> f64 {
    arc.length
}

/// Partition of the circle into cells `[e_j, e_{j+1})`.
///
/// Uniform grids have `e_j = 2πj/N`; breakpoint grids allow arbitrary cell
/// edges so that sets of prescribed measure can be represented exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleGrid {
    edges: Vec<f64>,
    uniform: bool,
}

impl CircleGrid {
    pub fn uniform(n_cells: usize) -> Result<Self> {
        if n_cells == 0 {
            return Err(Error::InvalidGrid("grid needs at least one cell".into()));
        }
        let width = TAU / n_cells as f64;
        let mut edges: Vec<f64> = (0..n_cells).map(|j| j as f64 * width).collect();
        edges.push(TAU);
        Ok(Self { edges, uniform: true })
    }

    /// Grid whose interior cell edges are `breakpoints` (strictly increasing in `(0, 2π)`).
    pub fn from_breakpoints(breakpoints: &[f64]) -> Result<Self> {
        let mut edges = Vec::with_capacity(breakpoints.len() + 2);
        edges.push(0.0);
        for &b in breakpoints {
            let last = *edges.last().unwrap();
            if !(b > last && b < TAU) {
                return Err(Error::InvalidGrid(format!(
                    "breakpoint {b} is not strictly increasing inside (0, 2π)"
                )));
            }
            edges.push(b);
        }
        edges.push(TAU);
        Ok(Self { edges, uniform: false })
    }

    pub fn n_cells(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn is_uniform(&self) -> bool {
        self.uniform
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn cell(&self, j: usize) -> (f64, f64) {
        (self.edges[j], self.edges[j + 1])
    }

    pub fn cell_measure(&self, j: usize) -> f64 {
        if self.uniform {
            TAU / self.n_cells() as f64
        } else {
            self.edges[j + 1] - self.edges[j]
        }
    }

    pub fn midpoint(&self, j: usize) -> f64 {
        0.5 * (self.edges[j] + self.edges[j + 1])
    }

    pub fn midpoints(&self) -> Vec<f64> {
        (0..self.n_cells()).map(|j| self.midpoint(j)).collect()
    }

    pub fn total_measure(&self) -> f64 {
        (0..self.n_cells()).map(|j| self.cell_measure(j)).sum()
    }

    /// Index of the cell containing the angle `x` (taken mod `2π`).
    pub fn cell_of(&self, x: f64) -> usize {
        let x = x.rem_euclid(TAU);
        let n = self.n_cells();
        if self.uniform {
            ((x / TAU * n as f64) as usize).min(n - 1)
        } else {
            (self.edges.partition_point(|&e| e <= x) - 1).min(n - 1)
        }
    }

    pub fn full_run(&self) -> CellRun {
        CellRun { start: 0, len: self.n_cells() }
    }

    /// Measure of a run of cells.
    pub fn run_measure(&self, run: CellRun) -> f64 {
        let n = self.n_cells();
        if run.len == n {
            return TAU;
        }
        let end = run.start + run.len;
        if self.uniform {
            run.len as f64 * TAU / n as f64
        } else if end <= n {
            self.edges[end] - self.edges[run.start]
        } else {
            TAU - self.edges[run.start] + self.edges[end - n]
        }
    }

    pub fn run_arc(&self, run: CellRun) -> Arc {
        let length = self.run_measure(run);
        Arc { start: self.edges[run.start], length }
    }

    /// The run of cells whose midpoints lie in `arc`.
    ///
    /// Cell-aligned arcs map to exactly their cells; other arcs are snapped.
    /// Returns `None` when no midpoint is covered.
    pub fn run_for_arc(&self, arc: &Arc) -> Option<CellRun> {
        let n = self.n_cells();
        if arc.is_full() {
            return Some(self.full_run());
        }
        let first = self.cell_of(arc.start());
        let mut start = None;
        let mut len = 0;
        for k in 0..n {
            let j = (first + k) % n;
            if arc.contains(self.midpoint(j)) {
                if start.is_none() {
                    start = Some(j);
                }
                len += 1;
            } else if start.is_some() {
                break;
            }
        }
        start.map(|start| CellRun { start, len })
    }

    /// Maximal runs of consecutive cells inside `within` satisfying `pred`.
    ///
    /// Runs never straddle the seam of `within`; when `within` is the whole
    /// circle the traversal starts at a cell failing `pred`, so a run
    /// crossing angle 0 stays in one piece.
    pub(crate) fn runs_where(&self, within: CellRun, pred: impl Fn(usize) -> bool) -> Vec<CellRun> {
        let n = self.n_cells();
        let mut origin = within.start;
        if within.len == n {
            match (0..n).find(|&j| !pred(j)) {
                Some(j) => origin = j,
                None => return vec![within],
            }
        }
        let mut runs = Vec::new();
        let mut current: Option<CellRun> = None;
        for k in 0..within.len {
            let j = (origin + k) % n;
            if pred(j) {
                match current.as_mut() {
                    Some(run) => run.len += 1,
                    None => current = Some(CellRun { start: j, len: 1 }),
                }
            } else if let Some(run) = current.take() {
                runs.push(run);
            }
        }
        runs.extend(current);
        runs
    }
}

/// Consecutive cells `start, start+1, …` (mod N), `len` of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct CellRun {
    pub start: usize,
    pub len: usize,
}

impl CellRun {
    pub fn cells(self, n_cells: usize) -> impl Iterator<Item = usize> {
        (0..self.len).map(move |k| (self.start + k) % n_cells)
    }

    pub fn contains(self, cell: usize, n_cells: usize) -> bool {
        (cell + n_cells - self.start) % n_cells < self.len
    }
}

/// A real function on the circle, constant on each grid cell.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFunction {
    grid: CircleGrid,
    values: Vec<f64>,
}

impl BoundaryFunction {
    pub fn new(grid: CircleGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_cells() {
            return Err(Error::LengthMismatch { expected: grid.n_cells(), got: values.len() });
        }
        if let Some((cell, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { cell, value });
        }
        Ok(Self { grid, values })
    }

    pub fn constant(grid: CircleGrid, c: f64) -> Result<Self> {
        let values = vec![c; grid.n_cells()];
        Self::new(grid, values)
    }

    /// Samples `f` at cell midpoints.
    pub fn from_fn(grid: CircleGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..grid.n_cells()).map(|j| f(grid.midpoint(j))).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &CircleGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n_cells(&self) -> usize {
        self.values.len()
    }

    pub fn value_at(&self, x: f64) -> f64 {
        self.values[self.grid.cell_of(x)]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.grid.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        self.map(|v| c * v)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Exact integral of the piecewise-constant function over `arc`.
    pub fn integrate(&self, arc: &Arc) -> f64 {
        if arc.is_full() {
            return (0..self.n_cells()).map(|j| self.values[j] * self.grid.cell_measure(j)).sum();
        }
        let mut total = 0.0;
        for (x0, x1) in arc.linear_pieces() {
            let mut j = self.grid.cell_of(x0);
            loop {
                let (a, b) = self.grid.cell(j);
                let overlap = b.min(x1) - a.max(x0);
                if overlap > 0.0 {
                    total += self.values[j] * overlap;
                }
                j += 1;
                if j >= self.n_cells() || self.grid.edges[j] >= x1 {
                    break;
                }
            }
        }
        total
    }

    /// Maximal arcs of `{x ∈ within : f(x) > λ}`, sorted by start.
    ///
    /// `within` is snapped to the cells whose midpoints it contains.
    pub fn level_set_arcs(&self, lambda: f64, within: &Arc) -> Vec<Arc> {
        let Some(run) = self.grid.run_for_arc(within) else {
            return Vec::new();
        };
        let mut arcs: Vec<Arc> = self
            .grid
            .runs_where(run, |j| self.values[j] > lambda)
            .into_iter()
            .map(|r| self.grid.run_arc(r))
            .collect();
        arcs.sort_by(|a, b| a.start.total_cmp(&b.start));
        arcs
    }
}

/// Free-function form of [`BoundaryFunction::integrate`].
pub fn integrate(f: &BoundaryFunction, over: &Arc) -> f64 {
    f.integrate(over)
}

/// Free-function form of [`BoundaryFunction::level_set_arcs`].
pub fn level_set_arcs(f: &BoundaryFunction, lambda: f64, within: &Arc) -> Vec<Arc> {
    f.level_set_arcs(lambda, within)
}
