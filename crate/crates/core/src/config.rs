//! Global configuration: quadrature layout, coefficient windows, solver
//! grids and tolerances, all loadable from a TOML file and overridable
//! field by field (missing entries keep their defaults).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{HoromapError, Result};
use crate::quad::QuadratureSpec;

/// Coefficient-window sizing.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelConfig {
    /// Half-width of the coefficient window: |k| <= window for mu > 0,
    /// n <= k <= n + window for the discrete series.
    pub window: i64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig { window: crate::models::DEFAULT_WINDOW }
    }
}

/// Solver grid, tolerance and removal-order settings.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveConfig {
    /// Target sup-norm tolerance for residual checks.
    pub tol: f64,
    /// Default jet-removal order.
    pub order: usize,
    /// Half-width of the uniform output grid.
    pub grid_extent: f64,
    /// Output grid spacing.
    pub grid_step: f64,
    /// Obstructions are screened at frequencies k/T for |k| <= tracked.
    pub tracked: i64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            tol: crate::solver::DEFAULT_SOLVE_TOL,
            order: 4,
            grid_extent: 8.0,
            grid_step: 1.0 / 16.0,
            tracked: 2,
        }
    }
}

/// Verification-battery settings.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct VerifyConfig {
    /// Seed for the random function battery.
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { seed: 7 }
    }
}

/// Top-level configuration document.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    pub quad: QuadratureSpec,
    pub model: ModelConfig,
    pub solve: SolveConfig,
    pub verify: VerifyConfig,
}

impl Config {
    /// Parse a TOML document, falling back to defaults for absent fields.
    pub fn from_toml(text: &str) -> Result<Config> {
        let cfg: Config =
            toml::from_str(text).map_err(|e| HoromapError::Config(format!("config parse: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Load a TOML config file.
    pub fn load(path: &Path) -> Result<Config> {
        Config::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.quad.validate()?;
        if self.model.window < 1 {
            return Err(HoromapError::Config(format!(
                "coefficient window {} must be positive",
                self.model.window
            )));
        }
        if !(self.solve.tol > 0.0) || !self.solve.tol.is_finite() {
            return Err(HoromapError::Config(format!("solve tolerance {} invalid", self.solve.tol)));
        }
        if !(self.solve.grid_extent > 0.0) || !(self.solve.grid_step > 0.0) {
            return Err(HoromapError::Config(format!(
                "solve grid extent {} / step {} must be positive",
                self.solve.grid_extent, self.solve.grid_step
            )));
        }
        if self.solve.grid_step > self.solve.grid_extent {
            return Err(HoromapError::Config(format!(
                "solve grid step {} exceeds extent {}",
                self.solve.grid_step, self.solve.grid_extent
            )));
        }
        if self.solve.tracked < 0 {
            return Err(HoromapError::Config(format!(
                "tracked frequency count {} must be nonnegative",
                self.solve.tracked
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        let cfg = Config::default();
        let text = toml::to_string(&cfg).unwrap();
        let back = Config::from_toml(&text).unwrap();
        assert_eq!(back.model.window, cfg.model.window);
        assert_eq!(back.solve.grid_step, cfg.solve.grid_step);
        assert_eq!(back.quad.extent, cfg.quad.extent);
        assert_eq!(back.verify.seed, cfg.verify.seed);
    }

    #[test]
    fn partial_document_keeps_defaults() {
        let cfg = Config::from_toml("[solve]\ntol = 1e-8\n").unwrap();
        assert_eq!(cfg.solve.tol, 1e-8);
        assert_eq!(cfg.solve.order, 4);
        assert_eq!(cfg.model.window, crate::models::DEFAULT_WINDOW);
        assert_eq!(cfg.quad.panels, 64);
    }

    #[test]
    fn invalid_values_rejected() {
        assert!(Config::from_toml("[model]\nwindow = 0\n").is_err());
        assert!(Config::from_toml("[solve]\ngrid_step = -0.1\n").is_err());
        assert!(Config::from_toml("[quad]\nextent = 0.0\n").is_err());
        assert!(Config::from_toml("not toml at all [").is_err());
    }
}
