//! Beta-law primitives: log-gamma, density, regularized incomplete beta and
//! its inverse.

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection.
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin().abs()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Positive shape pair `(alpha, beta)` of a beta law on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaShape {
    alpha: f64,
    beta: f64,
    ln_norm: f64,
}

impl BetaShape {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) || !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "beta shape parameters must be positive and finite, got ({alpha}, {beta})"
            )));
        }
        Ok(BetaShape {
            alpha,
            beta,
            ln_norm: ln_beta(alpha, beta),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `ln B(alpha, beta)`.
    pub fn ln_norm(&self) -> f64 {
        self.ln_norm
    }

    pub fn mean(&self) -> f64 {
        self.alpha / (self.alpha + self.beta)
    }

    /// Density on the open interval; zero at and beyond the endpoints.
    #[inline]
    pub(crate) fn density(&self, t: f64) -> f64 {
        if t > 0.0 && t < 1.0 {
            ((self.alpha - 1.0) * t.ln() + (self.beta - 1.0) * (-t).ln_1p() - self.ln_norm).exp()
        } else {
            0.0
        }
    }
}

fn check_unit(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::OutOfDomain {
            what: "t",
            value: t,
            domain: "[0, 1]".into(),
        })
    }
}

fn endpoint_density(exponent: f64, ln_norm: f64) -> f64 {
    // A zero exponent leaves a finite limit; any other exponent gives 0 here,
    // including the integrable singular case.
    if exponent == 0.0 {
        (-ln_norm).exp()
    } else {
        0.0
    }
}

/// `t^(a-1) (1-t)^(b-1) / B(a, b)`.
pub fn beta_pdf(t: f64, shape: &BetaShape) -> Result<f64> {
    check_unit(t)?;
    Ok(if t == 0.0 {
        // (1 - 0)^(b - 1) = 1
        endpoint_density(shape.alpha - 1.0, shape.ln_norm)
    } else if t == 1.0 {
        endpoint_density(shape.beta - 1.0, shape.ln_norm)
    } else {
        shape.density(t)
    })
}

const CF_MAX_ITER: usize = 10_000;
const CF_EPS: f64 = 1e-16;
const CF_TINY: f64 = 1e-300;

/// Continued fraction for the incomplete beta (modified Lentz).
fn incomplete_beta_cf(a: f64, b: f64, x: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < CF_TINY {
        d = CF_TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < CF_TINY {
            d = CF_TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < CF_TINY {
            c = CF_TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < CF_TINY {
            d = CF_TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < CF_TINY {
            c = CF_TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() <= CF_EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta `I_t(alpha, beta)` on the open interval.
#[inline]
pub(crate) fn regularized_incomplete_beta(t: f64, shape: &BetaShape) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let (a, b) = (shape.alpha, shape.beta);
    let ln_front = a * t.ln() + b * (-t).ln_1p() - shape.ln_norm;
    let value = if t < (a + 1.0) / (a + b + 2.0) {
        ln_front.exp() * incomplete_beta_cf(a, b, t) / a
    } else {
        1.0 - ln_front.exp() * incomplete_beta_cf(b, a, 1.0 - t) / b
    };
    value.clamp(0.0, 1.0)
}

/// Beta cdf `I_t(alpha, beta)` for `t` in `[0, 1]`.
pub fn beta_cdf(t: f64, shape: &BetaShape) -> Result<f64> {
    check_unit(t)?;
    Ok(regularized_incomplete_beta(t, shape))
}

/// Inverse of [`beta_cdf`]: safeguarded Newton inside a shrinking bracket.
pub fn beta_quantile(u: f64, shape: &BetaShape) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::OutOfDomain {
            what: "u",
            value: u,
            domain: "[0, 1]".into(),
        });
    }
    if u == 0.0 {
        return Ok(0.0);
    }
    if u == 1.0 {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut x = shape.mean();
    for _ in 0..200 {
        let diff = regularized_incomplete_beta(x, shape) - u;
        if diff == 0.0 {
            return Ok(x);
        }
        if diff < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let slope = shape.density(x);
        let mut next = x - diff / slope;
        if !(slope > 0.0) || !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 4.0 * f64::EPSILON * x.max(f64::MIN_POSITIVE)
            || hi - lo <= 4.0 * f64::EPSILON * hi
        {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}
