use crate::error::{Error, Result};

const MAX_TERMS: usize = 200_000;

/// Gauss hypergeometric series `2F1(a, b; c; z)` for `0 <= z < 1`.
///
/// Terms are summed until the geometric tail bound `|term| / (1 - z)` falls
/// below `rel_tol * |sum|`.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64, rel_tol: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&z) || (c <= 0.0 && c.fract() == 0.0) {
        return Err(Error::SeriesDivergence { z, terms: 0 });
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..MAX_TERMS {
        let k = n as f64;
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
        sum += term;
        // Ratio of consecutive terms tends to z from below once k is past
        // the parameters, so the tail is bounded by term / (1 - z).
        if term == 0.0
            || (k > a.abs() + b.abs() + c.abs() && term.abs() / (1.0 - z) <= rel_tol * sum.abs())
        {
            return Ok(sum);
        }
        if !sum.is_finite() {
            break;
        }
    }
    Err(Error::SeriesDivergence {
        z,
        terms: MAX_TERMS,
    })
}
