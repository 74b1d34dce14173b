//! Expected buying price `E[X] = mu0 + mu1(S)` for arbitrary strategies.

use std::sync::Arc;

use rayon::prelude::*;

use super::DecisionModel;
use crate::error::{Error, Result};
use crate::first_mover::FirstMoverKernel;
use crate::pricing::PriceRange;
use crate::quadrature::try_integrate_knots;

/// Piecewise-constant acceptance probability on a uniform grid of the
/// support. Row-major by first-period price `v`; with a single column the
/// strategy ignores the second-period price.
#[derive(Debug, Clone, PartialEq)]
pub struct AcceptanceTable {
    v_cells: usize,
    w_cells: usize,
    values: Vec<f64>,
}

impl AcceptanceTable {
    pub fn new(v_cells: usize, w_cells: usize, values: Vec<f64>) -> Result<Self> {
        if v_cells == 0 || w_cells == 0 || values.len() != v_cells * w_cells {
            return Err(Error::InvalidParameter(format!(
                "acceptance table of {v_cells}x{w_cells} cells needs {} values, got {}",
                v_cells * w_cells,
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidParameter(format!(
                "acceptance probabilities must lie in [0, 1], got {bad}"
            )));
        }
        Ok(AcceptanceTable {
            v_cells,
            w_cells,
            values,
        })
    }

    /// Table over the first-period price only.
    pub fn guess_free(values: Vec<f64>) -> Result<Self> {
        Self::new(values.len(), 1, values)
    }

    /// One row per first-period price cell, comma-separated columns per
    /// second-period price cell. Blank lines and `#` comments are skipped.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row = line
                .split(',')
                .map(|cell| {
                    cell.trim().parse::<f64>().map_err(|e| {
                        Error::InvalidParameter(format!(
                            "acceptance table line {}: {cell:?}: {e}",
                            lineno + 1
                        ))
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            if let Some(first) = rows.first() {
                if first.len() != row.len() {
                    return Err(Error::InvalidParameter(format!(
                        "acceptance table line {}: expected {} columns, got {}",
                        lineno + 1,
                        first.len(),
                        row.len()
                    )));
                }
            }
            rows.push(row);
        }
        let v_cells = rows.len();
        let w_cells = rows.first().map_or(0, Vec::len);
        Self::new(v_cells, w_cells, rows.concat())
    }

    pub fn v_cells(&self) -> usize {
        self.v_cells
    }

    pub fn w_cells(&self) -> usize {
        self.w_cells
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn depends_on_guess(&self) -> bool {
        self.w_cells > 1
    }

    fn cell(n: usize, x: f64, range: &PriceRange) -> usize {
        let i = (range.standardize(x) * n as f64).floor();
        (i.max(0.0) as usize).min(n - 1)
    }

    /// Acceptance probability at `(v, w)`; `w` is ignored for guess-free tables.
    pub fn probability(&self, v: f64, w: f64, range: &PriceRange) -> f64 {
        let i = Self::cell(self.v_cells, v, range);
        let j = if self.w_cells == 1 {
            0
        } else {
            Self::cell(self.w_cells, w, range)
        };
        self.values[i * self.w_cells + j]
    }
}

/// A buyer strategy `S_w(v)` / `S(v)`: probability of accepting a
/// first-period offer `v`.
#[derive(Debug, Clone, PartialEq)]
pub enum StrategySpec {
    /// Accept iff `v <= v0`.
    Threshold(f64),
    /// Accept iff `h(v, w) <= 0`, with `w` the guessed second-period price.
    GuessingSurface,
    AlwaysAccept,
    AlwaysReject,
    Tabulated(AcceptanceTable),
}

impl StrategySpec {
    pub fn validate(&self, range: &PriceRange) -> Result<()> {
        match self {
            StrategySpec::Threshold(v0) => range.check("threshold", *v0),
            _ => Ok(()),
        }
    }

    /// Whether the strategy needs the second-period price.
    pub fn uses_guess(&self) -> bool {
        match self {
            StrategySpec::GuessingSurface => true,
            StrategySpec::Tabulated(table) => table.depends_on_guess(),
            _ => false,
        }
    }

    /// Probability of accepting offer `v` given guess `w`.
    ///
    /// The guessing surface is evaluated through its sign law: inside the
    /// support `h(v, w) <= 0` exactly when `v <= w`.
    pub fn acceptance(&self, v: f64, guess: Option<f64>, range: &PriceRange) -> Result<f64> {
        let indicator = |b: bool| if b { 1.0 } else { 0.0 };
        match self {
            StrategySpec::Threshold(v0) => Ok(indicator(v <= *v0)),
            StrategySpec::GuessingSurface => {
                guess.map(|w| indicator(v <= w)).ok_or(Error::MissingGuess)
            }
            StrategySpec::AlwaysAccept => Ok(1.0),
            StrategySpec::AlwaysReject => Ok(0.0),
            StrategySpec::Tabulated(table) => {
                if table.depends_on_guess() {
                    guess
                        .map(|w| table.probability(v, w, range))
                        .ok_or(Error::MissingGuess)
                } else {
                    Ok(table.probability(v, v, range))
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectedPriceBreakdown {
    /// Strategy-free part.
    pub mu0: f64,
    /// Strategy-dependent part.
    pub mu1: f64,
    pub total: f64,
}

impl<K: FirstMoverKernel> DecisionModel<K> {
    /// `mu0 = ∬ (x (1 - p(x, y)) + y p(x, y)) f(x, y) dx dy`, the expected
    /// price of always waiting. Memoized.
    pub fn mu0(&self) -> Result<f64> {
        if let Some(&mu0) = self.memo.mu0.get() {
            return Ok(mu0);
        }
        let range = self.market.range;
        let outer = [range.x_min(), range.x_max()];
        let mu0 = try_integrate_knots(
            |y| {
                try_integrate_knots(
                    |x| -> Result<f64> {
                        let f = self.joint(x, y)?;
                        if f == 0.0 {
                            return Ok(0.0);
                        }
                        let p = self.first_mover.prob(x, y)?;
                        Ok((x * (1.0 - p) + y * p) * f)
                    },
                    &self.knots(y),
                    &self.quad_2d,
                )
            },
            &outer,
            &self.quad_2d,
        )?;
        // Racing initializers compute identical values.
        let _ = self.memo.mu0.set(mu0);
        Ok(mu0)
    }

    /// `∫_{a}^{b} h(v) dv`.
    fn h_curve_integral(&self, a: f64, b: f64) -> Result<f64> {
        if b <= a {
            return Ok(0.0);
        }
        try_integrate_knots(|v| self.h_curve(v), &[a, b], &self.quad_2d)
    }

    /// `∬ h(v, w)` over `[va, vb] x [wa, wb]`, keeping `f`'s kink at `v = w`
    /// on a knot, with `h` passed through `clip`.
    fn h_surface_integral(
        &self,
        (va, vb): (f64, f64),
        (wa, wb): (f64, f64),
        clip: fn(f64) -> f64,
    ) -> Result<f64> {
        try_integrate_knots(
            |w| {
                let knots: Vec<f64> = if w > va && w < vb {
                    vec![va, w, vb]
                } else {
                    vec![va, vb]
                };
                try_integrate_knots(
                    |v| Ok::<_, Error>(clip(self.h_surface(v, w)?)),
                    &knots,
                    &self.quad_2d,
                )
            },
            &[wa, wb],
            &self.quad_2d,
        )
    }

    /// Integrals of `h` over the cells of a `v_cells x w_cells` table (or of
    /// `h(v)` over `v` cells when `w_cells == 1`). Memoized per grid size.
    fn cell_integrals(&self, v_cells: usize, w_cells: usize) -> Result<Arc<Vec<f64>>> {
        let key = (v_cells, w_cells);
        if let Some(cells) = self.memo.cells.lock().expect("memo lock").get(&key) {
            return Ok(Arc::clone(cells));
        }
        let range = self.market.range;
        let edges = |n: usize| range.grid(n + 1);
        let (v_edges, w_edges) = (edges(v_cells), edges(w_cells));
        let cells = (0..v_cells * w_cells)
            .into_par_iter()
            .map(|k| {
                let (i, j) = (k / w_cells, k % w_cells);
                let v_cell = (v_edges[i], v_edges[i + 1]);
                if w_cells == 1 {
                    self.h_curve_integral(v_cell.0, v_cell.1)
                } else {
                    self.h_surface_integral(v_cell, (w_edges[j], w_edges[j + 1]), |h| h)
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        let cells = Arc::new(cells);
        self.memo
            .cells
            .lock()
            .expect("memo lock")
            .insert(key, Arc::clone(&cells));
        Ok(cells)
    }

    /// `mu1(S)`.
    pub fn strategy_term(&self, strategy: &StrategySpec) -> Result<f64> {
        let range = self.market.range;
        strategy.validate(&range)?;
        match strategy {
            StrategySpec::AlwaysReject => Ok(0.0),
            StrategySpec::AlwaysAccept => self.h_curve_integral(range.x_min(), range.x_max()),
            StrategySpec::Threshold(v0) => self.h_curve_integral(range.x_min(), *v0),
            StrategySpec::GuessingSurface => self.h_surface_integral(
                (range.x_min(), range.x_max()),
                (range.x_min(), range.x_max()),
                |h| h.min(0.0),
            ),
            StrategySpec::Tabulated(table) => {
                let cells = self.cell_integrals(table.v_cells(), table.w_cells())?;
                Ok(table
                    .values()
                    .iter()
                    .zip(cells.iter())
                    .map(|(s, h)| s * h)
                    .sum())
            }
        }
    }

    pub fn expected_price(&self, strategy: &StrategySpec) -> Result<ExpectedPriceBreakdown> {
        let mu1 = self.strategy_term(strategy)?;
        let mu0 = self.mu0()?;
        Ok(ExpectedPriceBreakdown {
            mu0,
            mu1,
            total: mu0 + mu1,
        })
    }
}
