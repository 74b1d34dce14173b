//! Adaptive numerical integration and bracketed root finding.
//!
//! Integration is globally adaptive 15-point Gauss–Kronrod: the interval with
//! the largest error estimate is bisected until the summed estimate meets
//! `max(abs_tol, rel_tol * |I|)`. Integrands are only ever evaluated at interior
//! Kronrod nodes of an interval shrunk by `edge_inset`, so densities carrying
//! `1/t` factors or endpoint power singularities are never evaluated at the
//! endpoints themselves.
//!
//! Two-dimensional integrals are nested 1D integrals, outer over the second
//! coordinate and inner over the first.

use thiserror::Error;

/// Hard cap on the number of live subintervals in one 1D integral.
const MAX_SEGMENTS: usize = 4096;

/// Errors raised by the integrators and the root finder.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum QuadError {
    #[error("integrand returned non-finite value {value} at x = {x}")]
    NonFinite { x: f64, value: f64 },
    #[error("tolerance not reached within depth cap: estimate {estimate}, error {error}")]
    DepthExceeded { estimate: f64, error: f64 },
    #[error("root not bracketed: f({a}) = {fa}, f({b}) = {fb}")]
    NoBracket { a: f64, b: f64, fa: f64, fb: f64 },
    #[error("invalid interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error("invalid quadrature settings: {0}")]
    InvalidSettings(&'static str),
}

impl QuadError {
    /// Best available estimate carried by a `DepthExceeded` error.
    pub fn estimate(&self) -> Option<f64> {
        match *self {
            QuadError::DepthExceeded { estimate, .. } => Some(estimate),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
    /// Relative inset applied to both ends of the integration interval.
    pub edge_inset: f64,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings {
            abs_tol: 1e-8,
            rel_tol: 1e-8,
            max_depth: 40,
            edge_inset: 1e-12,
        }
    }
}

impl QuadratureSettings {
    pub fn new(
        abs_tol: f64,
        rel_tol: f64,
        max_depth: u32,
        edge_inset: f64,
    ) -> Result<Self, QuadError> {
        let settings = QuadratureSettings {
            abs_tol,
            rel_tol,
            max_depth,
            edge_inset,
        };
        settings.validate()?;
        Ok(settings)
    }

    /// Default settings for the outer levels of 2D integrals.
    pub fn default_2d() -> Self {
        QuadratureSettings {
            abs_tol: 1e-6,
            rel_tol: 1e-6,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), QuadError> {
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(QuadError::InvalidSettings("abs_tol must be positive"));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(QuadError::InvalidSettings("rel_tol must be positive"));
        }
        if self.max_depth < 1 {
            return Err(QuadError::InvalidSettings("max_depth must be at least 1"));
        }
        if !(0.0..0.01).contains(&self.edge_inset) {
            return Err(QuadError::InvalidSettings(
                "edge_inset must lie in [0, 0.01)",
            ));
        }
        Ok(())
    }

    /// Same settings with both tolerances multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        QuadratureSettings {
            abs_tol: self.abs_tol * factor,
            rel_tol: self.rel_tol * factor,
            ..*self
        }
    }
}

// Kronrod abscissae and weights for the 7/15 pair (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
    /// Either at the depth cap or too narrow to split further.
    frozen: bool,
}

fn eval<E, F>(f: &mut F, x: f64) -> Result<f64, E>
where
    F: FnMut(f64) -> Result<f64, E>,
    E: From<QuadError>,
{
    let value = f(x)?;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(QuadError::NonFinite { x, value }.into())
    }
}

fn kronrod15<E, F>(f: &mut F, a: f64, b: f64, depth: u32, max_depth: u32) -> Result<Segment, E>
where
    F: FnMut(f64) -> Result<f64, E>,
    E: From<QuadError>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = eval(f, center)?;
    let mut res_g = fc * WG[3];
    let mut res_k = fc * WGK[7];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = eval(f, center - dx)?;
        let f2 = eval(f, center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    let narrow = half.abs() <= 64.0 * f64::EPSILON * center.abs().max(f64::MIN_POSITIVE);
    Ok(Segment {
        a,
        b,
        value,
        error,
        depth,
        frozen: depth >= max_depth || narrow,
    })
}

/// Fallible integrand over `knots[0]..knots[last]`, with the interior knots as
/// initial subdivision points (kinks and jumps of the integrand belong there).
pub fn try_integrate_knots<E, F>(
    mut f: F,
    knots: &[f64],
    settings: &QuadratureSettings,
) -> Result<f64, E>
where
    F: FnMut(f64) -> Result<f64, E>,
    E: From<QuadError>,
{
    settings.validate()?;
    let (a, b) = match (knots.first(), knots.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return Ok(0.0),
    };
    if !(a.is_finite() && b.is_finite()) || a > b || knots.windows(2).any(|w| w[0] > w[1]) {
        return Err(QuadError::InvalidInterval { a, b }.into());
    }
    if a == b {
        return Ok(0.0);
    }
    let inset = settings.edge_inset * (b - a);
    let (lo, hi) = (a + inset, b - inset);
    let mut points = Vec::with_capacity(knots.len());
    points.push(lo);
    points.extend(knots.iter().copied().filter(|&k| k > lo && k < hi));
    points.push(hi);

    let mut segments = Vec::with_capacity(32);
    for w in points.windows(2) {
        if w[1] > w[0] {
            segments.push(kronrod15(&mut f, w[0], w[1], 0, settings.max_depth)?);
        }
    }
    loop {
        let total: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        if error <= settings.abs_tol.max(settings.rel_tol * total.abs()) {
            return Ok(total);
        }
        let worst = segments.iter().enumerate().filter(|(_, s)| !s.frozen).fold(
            None::<(usize, f64)>,
            |best, (i, s)| match best {
                Some((_, e)) if e >= s.error => best,
                _ => Some((i, s.error)),
            },
        );
        let index = match worst {
            Some((i, _)) if segments.len() < MAX_SEGMENTS => i,
            _ => {
                return Err(QuadError::DepthExceeded {
                    estimate: total,
                    error,
                }
                .into())
            }
        };
        let seg = segments[index];
        let mid = 0.5 * (seg.a + seg.b);
        let left = kronrod15(&mut f, seg.a, mid, seg.depth + 1, settings.max_depth)?;
        let right = kronrod15(&mut f, mid, seg.b, seg.depth + 1, settings.max_depth)?;
        segments[index] = left;
        segments.push(right);
    }
}

pub fn try_integrate_1d<E, F>(f: F, a: f64, b: f64, settings: &QuadratureSettings) -> Result<f64, E>
where
    F: FnMut(f64) -> Result<f64, E>,
    E: From<QuadError>,
{
    try_integrate_knots(f, &[a, b], settings)
}

/// Integrates `f` over `[a, b]`.
///
/// On `DepthExceeded` the error still carries the best estimate
/// (see [`QuadError::estimate`]).
pub fn integrate_1d<F>(
    f: F,
    a: f64,
    b: f64,
    settings: &QuadratureSettings,
) -> Result<f64, QuadError>
where
    F: Fn(f64) -> f64,
{
    try_integrate_1d(|x| Ok::<_, QuadError>(f(x)), a, b, settings)
}

/// Integrates `f(v, w)` over `[a, b] x [c, d]`, outer over `w`, inner over `v`.
pub fn try_integrate_2d<E, F>(
    f: F,
    (a, b): (f64, f64),
    (c, d): (f64, f64),
    settings: &QuadratureSettings,
) -> Result<f64, E>
where
    F: Fn(f64, f64) -> Result<f64, E>,
    E: From<QuadError>,
{
    if a > b {
        return Err(QuadError::InvalidInterval { a, b }.into());
    }
    try_integrate_1d(
        |w| try_integrate_1d(|v| f(v, w), a, b, settings),
        c,
        d,
        settings,
    )
}

pub fn integrate_2d<F>(
    f: F,
    v_range: (f64, f64),
    w_range: (f64, f64),
    settings: &QuadratureSettings,
) -> Result<f64, QuadError>
where
    F: Fn(f64, f64) -> f64,
{
    try_integrate_2d(
        |v, w| Ok::<_, QuadError>(f(v, w)),
        v_range,
        w_range,
        settings,
    )
}

/// Bisection on a fallible function. The returned point lies within `x_tol`
/// of a sign change of `f`.
pub fn try_find_root<E, F>(mut f: F, a: f64, b: f64, x_tol: f64) -> Result<f64, E>
where
    F: FnMut(f64) -> Result<f64, E>,
    E: From<QuadError>,
{
    if !(a.is_finite() && b.is_finite()) || a > b || !(x_tol > 0.0) {
        return Err(QuadError::InvalidInterval { a, b }.into());
    }
    let (mut lo, mut hi) = (a, b);
    let mut f_lo = eval(&mut f, lo)?;
    let f_hi = eval(&mut f, hi)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(QuadError::NoBracket {
            a,
            b,
            fa: f_lo,
            fb: f_hi,
        }
        .into());
    }
    // 200 halvings exhaust any f64 interval.
    for _ in 0..200 {
        if hi - lo <= 2.0 * x_tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = eval(&mut f, mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

pub fn find_root<F>(f: F, a: f64, b: f64, x_tol: f64) -> Result<f64, QuadError>
where
    F: Fn(f64) -> f64,
{
    try_find_root(|x| Ok::<_, QuadError>(f(x)), a, b, x_tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn tol() -> QuadratureSettings {
        QuadratureSettings::default()
    }

    #[test]
    fn polynomial_and_sine() {
        let v = integrate_1d(|t| t * t, 0.0, 1.0, &tol()).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-12);
        let v = integrate_1d(f64::sin, 0.0, PI, &tol()).unwrap();
        assert!((v - 2.0).abs() < 1e-10);
    }

    #[test]
    fn endpoint_singularities() {
        // 1/sqrt(t) on (0,1] integrates to 2; Kronrod nodes never touch the endpoint.
        let no_inset = QuadratureSettings {
            edge_inset: 0.0,
            max_depth: 64,
            ..tol()
        };
        let v = integrate_1d(|t| 1.0 / t.sqrt(), 0.0, 1.0, &no_inset).unwrap();
        assert!((v - 2.0).abs() < 1e-7, "{v}");
        // With the default inset the first 1e-12 of the interval is dropped.
        let v = integrate_1d(|t| 1.0 / t.sqrt(), 0.0, 1.0, &tol()).unwrap();
        assert!((v - (2.0 - 2e-6)).abs() < 1e-7, "{v}");
        // sqrt(1 - t) has a derivative singularity at t = 1.
        let v = integrate_1d(|t| (1.0 - t).sqrt(), 0.0, 1.0, &tol()).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-8, "{v}");
    }

    #[test]
    fn rectangles() {
        let s = QuadratureSettings::default_2d();
        let one = integrate_2d(|_, _| 1.0, (0.0, 1.0), (0.0, 1.0), &s).unwrap();
        assert!((one - 1.0).abs() < 1e-10);
        let xy = integrate_2d(|x, y| x * y, (0.0, 1.0), (0.0, 1.0), &s).unwrap();
        assert!((xy - 0.25).abs() < 1e-10);
    }

    #[test]
    fn empty_and_reversed_intervals() {
        assert_eq!(integrate_1d(|t| t, 2.0, 2.0, &tol()).unwrap(), 0.0);
        assert!(matches!(
            integrate_1d(|t| t, 2.0, 1.0, &tol()),
            Err(QuadError::InvalidInterval { .. })
        ));
    }

    #[test]
    fn non_finite_integrand_is_reported() {
        let err =
            integrate_1d(|t| if t > 0.5 { f64::NAN } else { 1.0 }, 0.0, 1.0, &tol()).unwrap_err();
        assert!(matches!(err, QuadError::NonFinite { .. }));
    }

    #[test]
    fn depth_cap_returns_estimate() {
        let shallow = QuadratureSettings {
            abs_tol: 1e-14,
            rel_tol: 1e-14,
            max_depth: 1,
            edge_inset: 0.0,
        };
        let err = integrate_1d(|t| (t - 0.3).abs().sqrt(), 0.0, 1.0, &shallow).unwrap_err();
        let estimate = err.estimate().expect("estimate carried");
        let exact = 2.0 / 3.0 * (0.3f64.powf(1.5) + 0.7f64.powf(1.5));
        assert!((estimate - exact).abs() < 1e-2, "{estimate} vs {exact}");
    }

    #[test]
    fn settings_validation() {
        assert!(QuadratureSettings::new(0.0, 1e-8, 10, 0.0).is_err());
        assert!(QuadratureSettings::new(1e-8, -1.0, 10, 0.0).is_err());
        assert!(QuadratureSettings::new(1e-8, 1e-8, 0, 0.0).is_err());
        assert!(QuadratureSettings::new(1e-8, 1e-8, 10, 0.02).is_err());
        assert!(QuadratureSettings::new(1e-8, 1e-8, 10, 1e-12).is_ok());
    }

    #[test]
    fn roots() {
        let r = find_root(|x| x * x - 2.0, 0.0, 2.0, 1e-9).unwrap();
        assert!((r - 2f64.sqrt()).abs() <= 1e-9);
        let r = find_root(|x| x, -1.0, 1.0, 1e-12).unwrap();
        assert!(r.abs() <= 1e-12);
        assert!(matches!(
            find_root(|x| x * x + 1.0, -1.0, 1.0, 1e-9),
            Err(QuadError::NoBracket { .. })
        ));
        assert!(matches!(
            find_root(
                |x| if x > 0.9 { f64::INFINITY } else { -1.0 },
                0.0,
                1.0,
                1e-9
            ),
            Err(QuadError::NonFinite { .. })
        ));
    }

    #[test]
    fn deterministic() {
        let f = |t: f64| (3.0 * t).exp() * (1.0 - t).sqrt();
        let a = integrate_1d(f, 0.0, 1.0, &tol()).unwrap();
        let b = integrate_1d(f, 0.0, 1.0, &tol()).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    fn poly(coeffs: &[f64], x: f64) -> f64 {
        coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    proptest! {
        #[test]
        fn linearity(
            f in prop::collection::vec(-5.0..5.0f64, 1..6),
            g in prop::collection::vec(-5.0..5.0f64, 1..6),
            alpha in -3.0..3.0f64,
            beta in -3.0..3.0f64,
        ) {
            let s = tol();
            let combo = integrate_1d(|x| alpha * poly(&f, x) + beta * poly(&g, x), -1.0, 2.0, &s).unwrap();
            let parts = alpha * integrate_1d(|x| poly(&f, x), -1.0, 2.0, &s).unwrap()
                + beta * integrate_1d(|x| poly(&g, x), -1.0, 2.0, &s).unwrap();
            let bound = 2.0 * s.abs_tol.max(s.rel_tol * combo.abs()) * (1.0 + alpha.abs() + beta.abs());
            prop_assert!((combo - parts).abs() <= bound);
        }

        #[test]
        fn interval_additivity(split in 0.01..0.99f64) {
            let s = tol();
            let f = |x: f64| (2.0 * x).cos() + x.powi(3);
            let whole = integrate_1d(f, 0.0, 3.0, &s).unwrap();
            let m = 3.0 * split;
            let sum = integrate_1d(f, 0.0, m, &s).unwrap() + integrate_1d(f, m, 3.0, &s).unwrap();
            prop_assert!((whole - sum).abs() <= 2.0 * s.abs_tol.max(s.rel_tol * whole.abs()));
        }

        #[test]
        fn root_invariant_under_positive_scaling(scale in 1e-3..1e3f64, shift in -0.9..0.9f64) {
            let x_tol = 1e-10;
            let r1 = find_root(|x| (x - shift).powi(3), -1.0, 1.0, x_tol).unwrap();
            let r2 = find_root(|x| scale * (x - shift).powi(3), -1.0, 1.0, x_tol).unwrap();
            prop_assert!((r1 - r2).abs() <= x_tol);
        }
    }
}
