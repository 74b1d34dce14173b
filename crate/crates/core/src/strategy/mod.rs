//! Strategy functions and the accept/reject rules built on them.
//!
//! For a first-period offer `v` and a (guessed) second-period price `w`:
//!
//! ```text
//! h(v, w) = (v - w) p(v, w) f(v, w) + (v - w) (1 - p(w, v)) f(w, v)
//! h(v)    = ∫ (v - w) p(v, w) f(v, w) dw + ∫ (v - w) (1 - p(w, v)) f(w, v) dw
//! ```
//!
//! where `f` is the joint density of `(X_L, X_H)` and `p` the first-mover
//! probability. The expected buying price of any strategy `S` splits into a
//! strategy-free part `mu0` and `mu1(S) = ∬ S_w(v) h(v, w) dv dw`, so accepting
//! exactly where `h <= 0` is optimal.

mod expected;

pub use expected::{AcceptanceTable, ExpectedPriceBreakdown, StrategySpec};

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::first_mover::{FirstMoverKernel, FirstMoverModel};
use crate::pricing::{joint_pdf, MarketModel};
use crate::quadrature::{try_find_root, try_integrate_knots, QuadratureSettings};

/// Grid points scanned for sign changes of `h(v)` before bisecting.
pub const DEFAULT_SCAN_POINTS: usize = 64;

/// Default half-width of the band around zero reported as a boundary decision.
pub const DEFAULT_ZERO_BAND: f64 = 1e-10;

/// Per-cell integrals of `h`, keyed by `(v_cells, w_cells)`.
type CellCache = HashMap<(usize, usize), Arc<Vec<f64>>>;

#[derive(Debug, Default)]
struct Memo {
    mu0: OnceLock<f64>,
    cells: Mutex<CellCache>,
}

/// Joint price model plus first-mover kernel and numerical settings.
///
/// Immutable once built; derived quantities that do not depend on the
/// strategy (`mu0`, per-cell integrals of `h`) are memoized per instance.
#[derive(Debug, Clone)]
pub struct DecisionModel<K = FirstMoverModel> {
    market: MarketModel,
    first_mover: K,
    quad: QuadratureSettings,
    quad_2d: QuadratureSettings,
    zero_band: f64,
    memo: Arc<Memo>,
}

impl DecisionModel<FirstMoverModel> {
    pub fn new(
        market: MarketModel,
        first_mover: FirstMoverModel,
        quad: QuadratureSettings,
    ) -> Result<Self> {
        if market.range != *first_mover.range() {
            return Err(Error::InvalidParameter(
                "market and first-mover model must share the same price range".into(),
            ));
        }
        Self::with_kernel(market, first_mover, quad)
    }
}

impl<K: FirstMoverKernel> DecisionModel<K> {
    /// Model with an arbitrary first-mover kernel.
    pub fn with_kernel(
        market: MarketModel,
        first_mover: K,
        quad: QuadratureSettings,
    ) -> Result<Self> {
        quad.validate()?;
        // Area integrals default to 100x looser than line integrals.
        let quad_2d = quad.scaled(100.0);
        Ok(DecisionModel {
            market,
            first_mover,
            quad,
            quad_2d,
            zero_band: DEFAULT_ZERO_BAND,
            memo: Arc::default(),
        })
    }

    pub fn with_quad_2d(self, quad_2d: QuadratureSettings) -> Result<Self> {
        quad_2d.validate()?;
        Ok(DecisionModel {
            quad_2d,
            memo: Arc::default(),
            ..self
        })
    }

    pub fn with_zero_band(self, zero_band: f64) -> Result<Self> {
        if !(zero_band >= 0.0 && zero_band.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "zero_band must be >= 0, got {zero_band}"
            )));
        }
        Ok(DecisionModel { zero_band, ..self })
    }

    pub fn market(&self) -> &MarketModel {
        &self.market
    }

    pub fn first_mover(&self) -> &K {
        &self.first_mover
    }

    pub fn quad(&self) -> &QuadratureSettings {
        &self.quad
    }

    pub fn quad_2d(&self) -> &QuadratureSettings {
        &self.quad_2d
    }

    pub fn zero_band(&self) -> f64 {
        self.zero_band
    }

    /// Joint density `f(x, y)` of `(X_L, X_H)`.
    pub fn joint(&self, x: f64, y: f64) -> Result<f64> {
        joint_pdf(x, y, &self.market, &self.quad)
    }

    /// Knots for an integral over the support with a kink at `at`.
    fn knots(&self, at: f64) -> Vec<f64> {
        let range = &self.market.range;
        if at > range.x_min() && at < range.x_max() {
            vec![range.x_min(), at, range.x_max()]
        } else {
            vec![range.x_min(), range.x_max()]
        }
    }

    /// Guessing-strategy surface `h(v, w)`.
    pub fn h_surface(&self, v: f64, w: f64) -> Result<f64> {
        let diff = v - w;
        if diff == 0.0 {
            return Ok(0.0);
        }
        let mut h = 0.0;
        let f_vw = self.joint(v, w)?;
        if f_vw > 0.0 {
            h += diff * self.first_mover.prob(v, w)? * f_vw;
        }
        let f_wv = self.joint(w, v)?;
        if f_wv > 0.0 {
            h += diff * (1.0 - self.first_mover.prob(w, v)?) * f_wv;
        }
        Ok(h)
    }

    /// `h(v, w)` in the form valid when `p(v, w) = 1 - p(w, v)`:
    /// `(v - w) p(v, w) (f(v, w) + f(w, v))`.
    pub fn h_surface_symmetric(&self, v: f64, w: f64) -> Result<f64> {
        let diff = v - w;
        if diff == 0.0 {
            return Ok(0.0);
        }
        let mass = self.joint(v, w)? + self.joint(w, v)?;
        if mass == 0.0 {
            return Ok(0.0);
        }
        Ok(diff * self.first_mover.prob(v, w)? * mass)
    }

    /// No-guessing strategy function `h(v)`, integrated term by term.
    pub fn h_curve(&self, v: f64) -> Result<f64> {
        let knots = self.knots(v);
        let offered_by_low = try_integrate_knots(
            |w| -> Result<f64> {
                let f = self.joint(v, w)?;
                if f == 0.0 {
                    return Ok(0.0);
                }
                Ok((v - w) * self.first_mover.prob(v, w)? * f)
            },
            &knots,
            &self.quad,
        )?;
        let offered_by_high = try_integrate_knots(
            |w| -> Result<f64> {
                let f = self.joint(w, v)?;
                if f == 0.0 {
                    return Ok(0.0);
                }
                Ok((v - w) * (1.0 - self.first_mover.prob(w, v)?) * f)
            },
            &knots,
            &self.quad,
        )?;
        Ok(offered_by_low + offered_by_high)
    }

    /// `∫ h(v, w) dw` over the support; equals [`Self::h_curve`].
    pub fn h_curve_via_surface(&self, v: f64) -> Result<f64> {
        try_integrate_knots(|w| self.h_surface(v, w), &self.knots(v), &self.quad)
    }

    /// Locates the crossing of `h(v)` on the support: grid scan, then bisection
    /// of the leftmost bracketing cell.
    pub fn find_threshold(&self, x_tol: f64) -> Result<Threshold> {
        self.find_threshold_with_scan(x_tol, DEFAULT_SCAN_POINTS)
    }

    pub fn find_threshold_with_scan(&self, x_tol: f64, scan_points: usize) -> Result<Threshold> {
        if scan_points < 2 {
            return Err(Error::InvalidParameter(
                "threshold scan needs at least 2 points".into(),
            ));
        }
        let range = &self.market.range;
        // Interior points only: h vanishes identically at both reservation prices.
        let grid: Vec<f64> = (1..=scan_points)
            .map(|i| range.x_min() + range.rho() * i as f64 / (scan_points + 1) as f64)
            .collect();
        let values = grid
            .par_iter()
            .map(|&v| self.h_curve(v))
            .collect::<Result<Vec<f64>>>()?;
        let accepts: Vec<bool> = values.iter().map(|&h| h <= 0.0).collect();
        let changes: Vec<usize> = (0..grid.len() - 1)
            .filter(|&i| accepts[i] != accepts[i + 1])
            .collect();
        let Some(&first) = changes.first() else {
            let verdict = if accepts[0] {
                Verdict::Accept
            } else {
                Verdict::Reject
            };
            return Ok(Threshold::NoSignChange(verdict));
        };
        let bracket = (grid[first], grid[first + 1]);
        let v0 = try_find_root(|v| self.h_curve(v), bracket.0, bracket.1, x_tol)?;
        Ok(Threshold::Crossing {
            v0,
            bracket,
            sign_changes: changes.len(),
            accept_left: accepts[first],
        })
    }

    /// Rule without a guess: accept iff `h(v) <= 0`.
    pub fn decide(&self, v: f64) -> Result<Decision> {
        self.market.range.check("price", v)?;
        Ok(Decision::from_h(self.h_curve(v)?, self.zero_band))
    }

    /// Rule with a guess `w` for the second-period price: accept iff `h(v, w) <= 0`.
    pub fn decide_with_guess(&self, v: f64, w: f64) -> Result<Decision> {
        self.market.range.check("price", v)?;
        self.market.range.check("guess", w)?;
        Ok(Decision::from_h(self.h_surface(v, w)?, self.zero_band))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Accept,
    Reject,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Accept => "ACCEPT",
            Verdict::Reject => "REJECT",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub verdict: Verdict,
    pub h_value: f64,
    /// `|h|` fell inside the zero band; the verdict is a tie broken toward Accept.
    pub boundary: bool,
}

impl Decision {
    pub fn from_h(h_value: f64, zero_band: f64) -> Self {
        Decision {
            verdict: if h_value <= 0.0 {
                Verdict::Accept
            } else {
                Verdict::Reject
            },
            h_value,
            boundary: h_value.abs() < zero_band || h_value == 0.0,
        }
    }
}

/// Outcome of [`DecisionModel::find_threshold`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    Crossing {
        v0: f64,
        /// Scan cell that was bisected.
        bracket: (f64, f64),
        /// Sign changes seen by the scan; more than one means the acceptance
        /// region is not a single interval and `v0` is the leftmost crossing.
        sign_changes: usize,
        /// Whether `h <= 0` to the left of `v0`.
        accept_left: bool,
    },
    /// `h` is single-signed on the scan; the verdict applies to every price.
    NoSignChange(Verdict),
}

impl Threshold {
    pub fn v0(&self) -> Option<f64> {
        match *self {
            Threshold::Crossing { v0, .. } => Some(v0),
            Threshold::NoSignChange(_) => None,
        }
    }

    pub fn multiple_roots(&self) -> bool {
        matches!(*self, Threshold::Crossing { sign_changes, .. } if sign_changes > 1)
    }

    /// The strategy the threshold induces: accept at or below `v0`, or a
    /// constant verdict when there is no crossing. `None` when the crossing
    /// runs the other way (reject below, accept above).
    pub fn strategy(&self) -> Option<StrategySpec> {
        match *self {
            Threshold::Crossing {
                v0,
                accept_left: true,
                ..
            } => Some(StrategySpec::Threshold(v0)),
            Threshold::Crossing {
                accept_left: false, ..
            } => None,
            Threshold::NoSignChange(Verdict::Accept) => Some(StrategySpec::AlwaysAccept),
            Threshold::NoSignChange(Verdict::Reject) => Some(StrategySpec::AlwaysReject),
        }
    }
}
