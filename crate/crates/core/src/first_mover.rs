//! Probability that the low-price seller makes the first-period offer.
//!
//! `p(x, y) = F(x - y)` where `F` is the cdf of a symmetric beta law with
//! shape `(gamma, gamma)` stretched onto `[-rho, rho]`.

use crate::error::{Error, Result};
use crate::pricing::{regularized_incomplete_beta, BetaShape, PriceRange};

/// `p(x, y)`: probability that `L` moves first given `X_L = x`, `X_H = y`.
pub trait FirstMoverKernel: Send + Sync {
    fn prob(&self, x: f64, y: f64) -> Result<f64>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstMoverModel {
    gamma: f64,
    range: PriceRange,
    shape: BetaShape,
}

impl FirstMoverModel {
    pub fn new(gamma: f64, range: PriceRange) -> Result<Self> {
        let shape = BetaShape::new(gamma, gamma).map_err(|_| {
            Error::InvalidParameter(format!("gamma must be positive and finite, got {gamma}"))
        })?;
        Ok(FirstMoverModel {
            gamma,
            range,
            shape,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn range(&self) -> &PriceRange {
        &self.range
    }

    /// `F(d)` for a price difference `d` in `[-rho, rho]`.
    ///
    /// Both signs are evaluated through the lower tail at `(rho - |d|) / (2 rho)`
    /// so that `F(d) + F(-d) = 1` and `F(0) = 1/2` hold exactly.
    pub fn difference_cdf(&self, d: f64) -> Result<f64> {
        let rho = self.range.rho();
        if !(d.abs() <= rho) {
            return Err(Error::OutOfDomain {
                what: "x - y",
                value: d,
                domain: format!("[-{rho}, {rho}]"),
            });
        }
        if d == 0.0 {
            return Ok(0.5);
        }
        let tail = regularized_incomplete_beta((rho - d.abs()) / (2.0 * rho), &self.shape);
        Ok(if d > 0.0 { 1.0 - tail } else { tail })
    }
}

impl FirstMoverKernel for FirstMoverModel {
    fn prob(&self, x: f64, y: f64) -> Result<f64> {
        self.difference_cdf(x - y)
    }
}

pub fn first_mover_prob(x: f64, y: f64, model: &FirstMoverModel) -> Result<f64> {
    model.prob(x, y)
}
