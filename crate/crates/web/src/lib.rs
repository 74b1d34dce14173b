//! WebAssembly bindings for the browser explorer in `www/`.
//!
//! [`Explorer`] holds the plain-Rust logic and is tested natively;
//! [`WebExplorer`] is the thin JS-facing wrapper.

use twoperiod::config::{ModelConfig, RangeConfig, ShapeConfig};
use twoperiod::grid::{compute_grid, GridKind};
use twoperiod::strategy::{DecisionModel, Verdict};
use wasm_bindgen::prelude::*;

/// Largest grid the page may request per axis.
pub const MAX_RESOLUTION: usize = 201;

/// Model parameters as set by the page's sliders.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub x_min: f64,
    pub x_max: f64,
    pub low: (f64, f64),
    pub high: (f64, f64),
    pub background: (f64, f64),
    pub gamma: f64,
}

impl Default for Params {
    fn default() -> Self {
        let c = ModelConfig::default();
        Params {
            x_min: c.price_range.x_min,
            x_max: c.price_range.x_max,
            low: (c.low_shape.alpha, c.low_shape.beta),
            high: (c.high_shape.alpha, c.high_shape.beta),
            background: (c.background_shape.alpha, c.background_shape.beta),
            gamma: c.gamma,
        }
    }
}

impl Params {
    fn config(&self) -> ModelConfig {
        let shape = |(alpha, beta): (f64, f64)| ShapeConfig { alpha, beta };
        ModelConfig {
            price_range: RangeConfig {
                x_min: self.x_min,
                x_max: self.x_max,
            },
            low_shape: shape(self.low),
            high_shape: shape(self.high),
            background_shape: shape(self.background),
            gamma: self.gamma,
            // Interactive use: coarser than the command-line defaults.
            quadrature: twoperiod::config::QuadratureConfig {
                abs_tol: 1e-7,
                rel_tol: 1e-7,
                ..Default::default()
            },
            ..ModelConfig::default()
        }
    }
}

#[wasm_bindgen]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionView {
    pub accept: bool,
    pub h: f64,
    pub boundary: bool,
}

pub struct Explorer {
    model: DecisionModel,
}

fn check_resolution(n: usize) -> Result<(), String> {
    if (2..=MAX_RESOLUTION).contains(&n) {
        Ok(())
    } else {
        Err(format!(
            "resolution must be between 2 and {MAX_RESOLUTION}, got {n}"
        ))
    }
}

impl Explorer {
    pub fn new(params: &Params) -> Result<Self, String> {
        let model = params.config().build().map_err(|e| e.to_string())?;
        Ok(Explorer { model })
    }

    /// `h(v)` on `n` points: interleaved `[v0, h0, v1, h1, ...]`.
    pub fn curve(&self, n: usize) -> Result<Vec<f64>, String> {
        check_resolution(n)?;
        let grid = compute_grid(&self.model, GridKind::HCurve, n).map_err(|e| e.to_string())?;
        Ok(grid.rows.concat())
    }

    /// Leftmost crossing of `h(v)`, if any.
    pub fn threshold(&self) -> Result<Option<f64>, String> {
        let t = self.model.find_threshold(1e-4).map_err(|e| e.to_string())?;
        Ok(t.v0())
    }

    pub fn decide(&self, price: f64, guess: Option<f64>) -> Result<DecisionView, String> {
        let d = match guess {
            Some(w) => self.model.decide_with_guess(price, w),
            None => self.model.decide(price),
        }
        .map_err(|e| e.to_string())?;
        Ok(DecisionView {
            accept: d.verdict == Verdict::Accept,
            h: d.h_value,
            boundary: d.boundary,
        })
    }

    /// Row-major `n x n` values of `h-surface`, `joint-pdf` or `p-surface`.
    pub fn surface(&self, kind: &str, n: usize) -> Result<Vec<f64>, String> {
        check_resolution(n)?;
        let kind: GridKind = kind.parse().map_err(|e: twoperiod::Error| e.to_string())?;
        if !kind.is_surface() {
            return Err(format!("{kind} is not a surface"));
        }
        let grid = compute_grid(&self.model, kind, n).map_err(|e| e.to_string())?;
        Ok(grid.rows.iter().map(|r| r[2]).collect())
    }
}

/// JS handle on a model built from slider values.
#[wasm_bindgen]
pub struct WebExplorer {
    inner: Explorer,
}

#[wasm_bindgen]
impl WebExplorer {
    #[wasm_bindgen(constructor)]
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        x_min: f64,
        x_max: f64,
        low_alpha: f64,
        low_beta: f64,
        high_alpha: f64,
        high_beta: f64,
        background_alpha: f64,
        background_beta: f64,
        gamma: f64,
    ) -> Result<WebExplorer, JsError> {
        let params = Params {
            x_min,
            x_max,
            low: (low_alpha, low_beta),
            high: (high_alpha, high_beta),
            background: (background_alpha, background_beta),
            gamma,
        };
        Ok(WebExplorer {
            inner: Explorer::new(&params).map_err(|e| JsError::new(&e))?,
        })
    }

    pub fn curve(&self, n: usize) -> Result<Vec<f64>, JsError> {
        self.inner.curve(n).map_err(|e| JsError::new(&e))
    }

    /// `NaN` when `h` keeps one sign.
    pub fn threshold(&self) -> Result<f64, JsError> {
        Ok(self
            .inner
            .threshold()
            .map_err(|e| JsError::new(&e))?
            .unwrap_or(f64::NAN))
    }

    pub fn decide(&self, price: f64, guess: Option<f64>) -> Result<DecisionView, JsError> {
        self.inner
            .decide(price, guess)
            .map_err(|e| JsError::new(&e))
    }

    pub fn surface(&self, kind: &str, n: usize) -> Result<Vec<f64>, JsError> {
        self.inner.surface(kind, n).map_err(|e| JsError::new(&e))
    }
}
