//! Price model: beta-distributed base prices of the two sellers, modulated by a
//! multiplicative beta background factor.
//!
//! With standardized base prices `Z_L`, `Z_H` and background `Z`, all
//! independent on `[0, 1]`, the observed prices are
//! `X_L = Z_L * Z * rho + x_min` and `X_H = Z_H * Z * rho + x_min`.
//! Conditioning on `Z = t` gives the marginal and joint densities as single
//! integrals over `t`.

mod beta;
mod hypergeometric;

pub(crate) use beta::regularized_incomplete_beta;
pub use beta::{beta_cdf, beta_pdf, beta_quantile, ln_beta, ln_gamma, BetaShape};
pub use hypergeometric::hyp2f1;

use crate::error::{Error, Result};
use crate::quadrature::{try_integrate_1d, QuadratureSettings};

/// Reservation prices `[x_min, x_max]`; every offered price lies in here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceRange {
    x_min: f64,
    x_max: f64,
    rho: f64,
}

impl PriceRange {
    pub fn new(x_min: f64, x_max: f64) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_min >= x_max {
            return Err(Error::InvalidParameter(format!(
                "price range needs finite x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        Ok(PriceRange {
            x_min,
            x_max,
            rho: x_max - x_min,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    /// Width `x_max - x_min`.
    pub fn rho(&self) -> f64 {
        self.rho
    }

    #[inline]
    pub fn standardize(&self, x: f64) -> f64 {
        (x - self.x_min) / self.rho
    }

    pub fn contains(&self, x: f64) -> bool {
        (self.x_min..=self.x_max).contains(&x)
    }

    /// `n` equally spaced points from `x_min` to `x_max` inclusive.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        match n {
            0 => Vec::new(),
            1 => vec![self.x_min],
            _ => (0..n)
                .map(|i| {
                    if i == n - 1 {
                        self.x_max
                    } else {
                        self.x_min + self.rho * i as f64 / (n - 1) as f64
                    }
                })
                .collect(),
        }
    }

    pub(crate) fn check(&self, what: &'static str, x: f64) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::OutOfDomain {
                what,
                value: x,
                domain: format!("[{}, {}]", self.x_min, self.x_max),
            })
        }
    }
}

/// The two kinds of salesperson.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Seller {
    /// Tends to offer larger discounts.
    Low,
    /// Tends to offer smaller discounts.
    High,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketModel {
    pub low: BetaShape,
    pub high: BetaShape,
    pub background: BetaShape,
    pub range: PriceRange,
}

impl MarketModel {
    pub fn new(low: BetaShape, high: BetaShape, background: BetaShape, range: PriceRange) -> Self {
        MarketModel {
            low,
            high,
            background,
            range,
        }
    }

    pub fn shape(&self, seller: Seller) -> &BetaShape {
        match seller {
            Seller::Low => &self.low,
            Seller::High => &self.high,
        }
    }
}

/// Density of a beta law stretched onto the price range.
pub fn scaled_beta_pdf(x: f64, shape: &BetaShape, range: &PriceRange) -> f64 {
    shape.density(range.standardize(x)) / range.rho()
}

/// Marginal density of the observed price of `seller`.
pub fn marginal_pdf(
    x: f64,
    seller: Seller,
    model: &MarketModel,
    settings: &QuadratureSettings,
) -> Result<f64> {
    let range = &model.range;
    let tx = range.standardize(x);
    if !(tx > 0.0 && tx < 1.0 - settings.edge_inset) {
        return Ok(0.0);
    }
    let base = model.shape(seller);
    let background = &model.background;
    let (a, b) = (base.alpha() - 1.0, base.beta() - 1.0);
    let (a0, b0) = (background.alpha() - 1.0, background.beta() - 1.0);
    let ln_norm = base.ln_norm() + background.ln_norm();
    let integral = try_integrate_1d(
        |t: f64| -> Result<f64> {
            let s = tx / t;
            if !(s < 1.0 && t < 1.0) {
                return Ok(0.0);
            }
            let ln_t = t.ln();
            Ok(
                (a * s.ln() + b * (-s).ln_1p() - ln_t + a0 * ln_t + b0 * (-t).ln_1p() - ln_norm)
                    .exp(),
            )
        },
        tx,
        1.0,
        settings,
    )?;
    Ok(integral / range.rho())
}

/// Closed form of [`marginal_pdf`] via the Gauss hypergeometric function:
///
/// `f(x) = Γ(α+β)Γ(α₀+β₀) / (Γ(β+β₀)Γ(α)Γ(α₀)) · t^(α-1) (1-t)^(β+β₀-1)
///        · 2F1(β₀, α+β-α₀; β+β₀; 1-t) / ρ`, with `t = (x - x_min)/ρ`.
///
/// Only used to cross-check the quadrature route.
pub fn marginal_pdf_closed_form(x: f64, seller: Seller, model: &MarketModel) -> Result<f64> {
    let range = &model.range;
    let tx = range.standardize(x);
    if !(tx > 0.0 && tx < 1.0) {
        return Err(Error::OutOfDomain {
            what: "x",
            value: x,
            domain: format!("({}, {})", range.x_min(), range.x_max()),
        });
    }
    let base = model.shape(seller);
    let (a, b) = (base.alpha(), base.beta());
    let (a0, b0) = (model.background.alpha(), model.background.beta());
    let ln_coef =
        ln_gamma(a + b) + ln_gamma(a0 + b0) - ln_gamma(b + b0) - ln_gamma(a) - ln_gamma(a0);
    let series = hyp2f1(b0, a + b - a0, b + b0, 1.0 - tx, 1e-10)?;
    let kernel = ((a - 1.0) * tx.ln() + (b + b0 - 1.0) * (-tx).ln_1p() + ln_coef).exp();
    Ok(kernel * series / range.rho())
}

/// Joint density of `(X_L, X_H)` at `(x, y)`.
pub fn joint_pdf(
    x: f64,
    y: f64,
    model: &MarketModel,
    settings: &QuadratureSettings,
) -> Result<f64> {
    let range = &model.range;
    let (sx, sy) = (range.standardize(x), range.standardize(y));
    if !(sx > 0.0 && sy > 0.0) {
        return Ok(0.0);
    }
    let lower = sx.max(sy);
    if lower >= 1.0 - settings.edge_inset {
        return Ok(0.0);
    }
    let (al, bl) = (model.low.alpha() - 1.0, model.low.beta() - 1.0);
    let (ah, bh) = (model.high.alpha() - 1.0, model.high.beta() - 1.0);
    let (a0, b0) = (
        model.background.alpha() - 1.0,
        model.background.beta() - 1.0,
    );
    let ln_norm = model.low.ln_norm() + model.high.ln_norm() + model.background.ln_norm();
    let (ln_sx, ln_sy) = (sx.ln(), sy.ln());
    let integral = try_integrate_1d(
        |t: f64| -> Result<f64> {
            let (u, w) = (sx / t, sy / t);
            if !(u < 1.0 && w < 1.0 && t < 1.0) {
                return Ok(0.0);
            }
            let ln_t = t.ln();
            let ln_val =
                al * (ln_sx - ln_t) + bl * (-u).ln_1p() + ah * (ln_sy - ln_t) + bh * (-w).ln_1p()
                    - 2.0 * ln_t
                    + a0 * ln_t
                    + b0 * (-t).ln_1p()
                    - ln_norm;
            Ok(ln_val.exp())
        },
        lower,
        1.0,
        settings,
    )?;
    Ok(integral / (range.rho() * range.rho()))
}

/// The model used throughout the worked example: prices in `[1400, 1600]`,
/// low seller `(2.5, 4.5)`, high seller `(4.5, 1.5)`, background `(2.5, 2.5)`.
pub fn reference_market() -> MarketModel {
    MarketModel::new(
        BetaShape::new(2.5, 4.5).expect("valid"),
        BetaShape::new(4.5, 1.5).expect("valid"),
        BetaShape::new(2.5, 2.5).expect("valid"),
        PriceRange::new(1400.0, 1600.0).expect("valid"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::try_integrate_knots;

    fn settings() -> QuadratureSettings {
        QuadratureSettings::default()
    }

    #[test]
    fn price_range_validation() {
        assert!(PriceRange::new(1600.0, 1400.0).is_err());
        assert!(PriceRange::new(1400.0, 1400.0).is_err());
        let r = PriceRange::new(1400.0, 1600.0).unwrap();
        assert_eq!(r.rho(), 200.0);
        let g = r.grid(5);
        assert_eq!(g, vec![1400.0, 1450.0, 1500.0, 1550.0, 1600.0]);
    }

    #[test]
    fn scaled_pdf_examples() {
        let m = reference_market();
        assert_eq!(scaled_beta_pdf(1399.0, &m.low, &m.range), 0.0);
        let uniform = BetaShape::new(1.0, 1.0).unwrap();
        assert!((scaled_beta_pdf(1473.0, &uniform, &m.range) - 0.005).abs() < 1e-15);
        let mass = crate::quadrature::integrate_1d(
            |x| scaled_beta_pdf(x, &m.low, &m.range),
            1400.0,
            1600.0,
            &settings(),
        )
        .unwrap();
        assert!((mass - 1.0).abs() < 1e-8);
    }

    // Frozen from scipy: quad of the conditional-on-Z integrand at epsrel 1e-12.
    const MARGINAL_ORACLE: [(f64, Seller, f64); 4] = [
        (1420.0, Seller::Low, 0.019_866_380_869_482_46),
        (1500.0, Seller::Low, 0.001_056_836_181_017_248_5),
        (1450.0, Seller::High, 0.009_875_986_041_172_147),
        (1580.0, Seller::High, 0.000_135_106_812_708_352_86),
    ];

    #[test]
    fn marginal_matches_frozen_oracle() {
        let m = reference_market();
        for &(x, seller, expected) in &MARGINAL_ORACLE {
            let v = marginal_pdf(x, seller, &m, &settings()).unwrap();
            assert!(
                (v - expected).abs() <= 1e-8 * expected,
                "{x} {seller:?}: {v} vs {expected}"
            );
        }
        assert_eq!(
            marginal_pdf(1399.0, Seller::Low, &m, &settings()).unwrap(),
            0.0
        );
        assert_eq!(
            marginal_pdf(1600.5, Seller::High, &m, &settings()).unwrap(),
            0.0
        );
    }

    #[test]
    fn closed_form_agrees_with_quadrature() {
        let m = reference_market();
        for &x in &[1420.0, 1450.0, 1500.0, 1550.0] {
            for seller in [Seller::Low, Seller::High] {
                let quad = marginal_pdf(x, seller, &m, &settings()).unwrap();
                let closed = marginal_pdf_closed_form(x, seller, &m).unwrap();
                assert!(
                    (quad - closed).abs() <= 1e-6 * quad,
                    "{x} {seller:?}: {quad} vs {closed}"
                );
            }
        }
        assert!(marginal_pdf_closed_form(1400.0, Seller::Low, &m).is_err());
    }

    #[test]
    fn closed_form_near_upper_end_is_leading_kernel() {
        let m = reference_market();
        let x = 1600.0 - 1e-9;
        let tx = m.range.standardize(x);
        let (a, b, b0) = (m.low.alpha(), m.low.beta(), m.background.beta());
        let a0 = m.background.alpha();
        let ln_coef =
            ln_gamma(a + b) + ln_gamma(a0 + b0) - ln_gamma(b + b0) - ln_gamma(a) - ln_gamma(a0);
        let kernel = ((a - 1.0) * tx.ln() + (b + b0 - 1.0) * (1.0 - tx).ln() + ln_coef).exp()
            / m.range.rho();
        let closed = marginal_pdf_closed_form(x, Seller::Low, &m).unwrap();
        assert!((closed - kernel).abs() <= 1e-9 * kernel.abs().max(1e-300));
    }

    // Frozen from scipy nested quad (epsrel 1e-10).
    const JOINT_ORACLE: [(f64, f64, f64); 5] = [
        (1450.0, 1500.0, 1.164_867_944_999_562_7e-4),
        (1500.0, 1450.0, 1.454_481_396_635_916_6e-6),
        (1470.0, 1430.0, 2.729_019_201_551_239_4e-6),
        (1420.0, 1410.0, 1.011_163_618_904_187_9e-5),
        (1550.0, 1580.0, 8.520_245_303_126_85e-8),
    ];

    #[test]
    fn joint_matches_frozen_oracle() {
        let m = reference_market();
        for &(x, y, expected) in &JOINT_ORACLE {
            let v = joint_pdf(x, y, &m, &settings()).unwrap();
            assert!(
                (v - expected).abs() <= 1e-7 * expected,
                "({x},{y}): {v} vs {expected}"
            );
        }
    }

    #[test]
    fn joint_support() {
        let m = reference_market();
        assert_eq!(joint_pdf(1600.0, 1500.0, &m, &settings()).unwrap(), 0.0);
        assert_eq!(joint_pdf(1500.0, 1399.0, &m, &settings()).unwrap(), 0.0);
        assert_eq!(joint_pdf(1400.0, 1500.0, &m, &settings()).unwrap(), 0.0);
        assert_eq!(joint_pdf(1700.0, 1500.0, &m, &settings()).unwrap(), 0.0);
    }

    #[test]
    fn marginal_consistency_with_joint() {
        let m = reference_market();
        let s = settings();
        for &x in &[1410.0, 1430.0, 1460.0, 1500.0, 1550.0] {
            let along_y =
                try_integrate_knots(|y| joint_pdf(x, y, &m, &s), &[1400.0, x, 1600.0], &s).unwrap();
            let low = marginal_pdf(x, Seller::Low, &m, &s).unwrap();
            assert!(
                (along_y - low).abs() <= 10.0 * s.abs_tol.max(s.rel_tol * low),
                "L at {x}: {along_y} vs {low}"
            );
            let along_x =
                try_integrate_knots(|v| joint_pdf(v, x, &m, &s), &[1400.0, x, 1600.0], &s).unwrap();
            let high = marginal_pdf(x, Seller::High, &m, &s).unwrap();
            assert!(
                (along_x - high).abs() <= 10.0 * s.abs_tol.max(s.rel_tol * high),
                "H at {x}: {along_x} vs {high}"
            );
        }
    }
}
