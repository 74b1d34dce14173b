//! TOML model configuration.
//!
//! Every key is optional; omitted keys take the reference-model values.
//!
//! ```toml
//! gamma = 10.0
//! zero_band = 1e-10
//!
//! [price_range]
//! x_min = 1400.0
//! x_max = 1600.0
//!
//! [low_shape]
//! alpha = 2.5
//! beta = 4.5
//!
//! [high_shape]
//! alpha = 4.5
//! beta = 1.5
//!
//! [background_shape]
//! alpha = 2.5
//! beta = 2.5
//!
//! [quadrature]
//! abs_tol = 1e-8
//! rel_tol = 1e-8
//! max_depth = 40
//! edge_inset = 1e-12
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::first_mover::FirstMoverModel;
use crate::pricing::{BetaShape, MarketModel, PriceRange};
use crate::quadrature::QuadratureSettings;
use crate::strategy::{DecisionModel, DEFAULT_ZERO_BAND};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid configuration: {0}")]
    Validation(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RangeConfig {
    pub x_min: f64,
    pub x_max: f64,
}

impl Default for RangeConfig {
    fn default() -> Self {
        RangeConfig {
            x_min: 1400.0,
            x_max: 1600.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeConfig {
    pub alpha: f64,
    pub beta: f64,
}

impl ShapeConfig {
    const fn new(alpha: f64, beta: f64) -> Self {
        ShapeConfig { alpha, beta }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
    pub edge_inset: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        let q = QuadratureSettings::default();
        QuadratureConfig {
            abs_tol: q.abs_tol,
            rel_tol: q.rel_tol,
            max_depth: q.max_depth,
            edge_inset: q.edge_inset,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub price_range: RangeConfig,
    pub low_shape: ShapeConfig,
    pub high_shape: ShapeConfig,
    pub background_shape: ShapeConfig,
    pub gamma: f64,
    pub quadrature: QuadratureConfig,
    pub zero_band: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            price_range: RangeConfig::default(),
            low_shape: ShapeConfig::new(2.5, 4.5),
            high_shape: ShapeConfig::new(4.5, 1.5),
            background_shape: ShapeConfig::new(2.5, 2.5),
            gamma: 10.0,
            quadrature: QuadratureConfig::default(),
            zero_band: DEFAULT_ZERO_BAND,
        }
    }
}

fn shape(name: &str, s: ShapeConfig) -> Result<BetaShape, ConfigError> {
    BetaShape::new(s.alpha, s.beta).map_err(|_| {
        ConfigError::Validation(format!(
            "{name}: alpha and beta must be positive and finite, got ({}, {})",
            s.alpha, s.beta
        ))
    })
}

impl ModelConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        Self::parse(text, Path::new("<string>"))
    }

    fn parse(text: &str, path: &Path) -> Result<Self, ConfigError> {
        let config: ModelConfig = toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: path.to_owned(),
            message: e.to_string(),
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.market()?;
        self.quadrature_settings()?;
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(ConfigError::Validation(format!(
                "gamma must be positive, got {}",
                self.gamma
            )));
        }
        if !(self.zero_band >= 0.0 && self.zero_band.is_finite()) {
            return Err(ConfigError::Validation(format!(
                "zero_band must be >= 0, got {}",
                self.zero_band
            )));
        }
        Ok(())
    }

    pub fn market(&self) -> Result<MarketModel, ConfigError> {
        let r = self.price_range;
        let range = PriceRange::new(r.x_min, r.x_max).map_err(|_| {
            ConfigError::Validation(format!(
                "price_range: need x_min < x_max, got [{}, {}]",
                r.x_min, r.x_max
            ))
        })?;
        Ok(MarketModel::new(
            shape("low_shape", self.low_shape)?,
            shape("high_shape", self.high_shape)?,
            shape("background_shape", self.background_shape)?,
            range,
        ))
    }

    pub fn quadrature_settings(&self) -> Result<QuadratureSettings, ConfigError> {
        let q = self.quadrature;
        QuadratureSettings::new(q.abs_tol, q.rel_tol, q.max_depth, q.edge_inset)
            .map_err(|e| ConfigError::Validation(format!("quadrature: {e}")))
    }

    pub fn build(&self) -> Result<DecisionModel, ConfigError> {
        let market = self.market()?;
        let fm = FirstMoverModel::new(self.gamma, market.range)
            .map_err(|e| ConfigError::Validation(e.to_string()))?;
        DecisionModel::new(market, fm, self.quadrature_settings()?)
            .and_then(|m| m.with_zero_band(self.zero_band))
            .map_err(|e| ConfigError::Validation(e.to_string()))
    }
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ModelConfig, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_owned(),
        source,
    })?;
    ModelConfig::parse(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_reference_model() {
        let c = ModelConfig::from_toml_str("").unwrap();
        assert_eq!(c, ModelConfig::default());
        assert_eq!(c.market().unwrap(), crate::pricing::reference_market());
        assert_eq!(c.quadrature.abs_tol, 1e-8);
        assert_eq!(c.quadrature.rel_tol, 1e-8);
    }

    #[test]
    fn partial_blocks_keep_other_defaults() {
        let c = ModelConfig::from_toml_str("gamma = 4\n[quadrature]\nabs_tol = 1e-9\n").unwrap();
        assert_eq!(c.gamma, 4.0);
        assert_eq!(c.quadrature.abs_tol, 1e-9);
        assert_eq!(c.quadrature.rel_tol, 1e-8);
        assert_eq!(c.low_shape, ShapeConfig::new(2.5, 4.5));
    }

    #[test]
    fn validation_errors_name_the_field() {
        let bad = [
            ("[price_range]\nx_min = 1600\nx_max = 1600\n", "price_range"),
            ("[low_shape]\nalpha = 0\nbeta = 1\n", "low_shape"),
            ("gamma = -1\n", "gamma"),
            ("zero_band = -1e-3\n", "zero_band"),
            ("[quadrature]\nrel_tol = 0\nabs_tol = 0\n", "quadrature"),
        ];
        for (text, field) in bad {
            match ModelConfig::from_toml_str(text) {
                Err(ConfigError::Validation(msg)) => assert!(msg.contains(field), "{msg}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn parse_errors_carry_location() {
        let err =
            ModelConfig::from_toml_str("gamma = 10\n[low_shape]\nalpha = \"x\"\n").unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, ConfigError::Parse { .. }));
        assert!(msg.contains("line 3"), "{msg}");
        assert!(ModelConfig::from_toml_str("gama = 10\n").is_err());
        // A shape block must give both parameters.
        assert!(ModelConfig::from_toml_str("[low_shape]\nalpha = 2\n").is_err());
    }
}
