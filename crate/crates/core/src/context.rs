use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numeric tuning shared by every evaluator.
///
/// All fields are validated on construction; the `with_*` setters re-validate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalContext {
    series_radius: f64,
    shift_threshold: f64,
    asym_terms: usize,
    quad_rel_tol: f64,
    horizon: f64,
}

impl Default for EvalContext {
    fn default() -> Self {
        Self {
            series_radius: 0.5,
            shift_threshold: 16.0,
            asym_terms: 10,
            quad_rel_tol: 1e-10,
            horizon: 60.0,
        }
    }
}

impl EvalContext {
    pub fn new(
        series_radius: f64,
        shift_threshold: f64,
        asym_terms: usize,
        quad_rel_tol: f64,
        horizon: f64,
    ) -> Result<Self> {
        let ctx = Self {
            series_radius,
            shift_threshold,
            asym_terms,
            quad_rel_tol,
            horizon,
        };
        ctx.validate()?;
        Ok(ctx)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.series_radius > 0.0 && self.series_radius <= 1.0) {
            return Err(Error::InvalidContext(format!(
                "series_radius must lie in (0, 1], got {}",
                self.series_radius
            )));
        }
        if !(self.shift_threshold >= 1.0 && self.shift_threshold.is_finite()) {
            return Err(Error::InvalidContext(format!(
                "shift_threshold must be >= 1, got {}",
                self.shift_threshold
            )));
        }
        let max_terms = crate::bernoulli::MAX_CORRECTION_TERMS;
        if self.asym_terms < 3 || self.asym_terms > max_terms {
            return Err(Error::InvalidContext(format!(
                "asym_terms must lie in 3..={max_terms}, got {}",
                self.asym_terms
            )));
        }
        if !(self.quad_rel_tol > 0.0 && self.quad_rel_tol < 1.0) {
            return Err(Error::InvalidContext(format!(
                "quad_rel_tol must lie in (0, 1), got {}",
                self.quad_rel_tol
            )));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::InvalidContext(format!(
                "horizon must be positive, got {}",
                self.horizon
            )));
        }
        Ok(())
    }

    pub fn series_radius(&self) -> f64 {
        self.series_radius
    }

    pub fn shift_threshold(&self) -> f64 {
        self.shift_threshold
    }

    /// Number of Bernoulli correction terms kept in asymptotic expansions.
    pub fn asym_terms(&self) -> usize {
        self.asym_terms
    }

    pub fn quad_rel_tol(&self) -> f64 {
        self.quad_rel_tol
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn with_series_radius(mut self, value: f64) -> Result<Self> {
        self.series_radius = value;
        self.validate().map(|_| self)
    }

    pub fn with_shift_threshold(mut self, value: f64) -> Result<Self> {
        self.shift_threshold = value;
        self.validate().map(|_| self)
    }

    pub fn with_asym_terms(mut self, value: usize) -> Result<Self> {
        self.asym_terms = value;
        self.validate().map(|_| self)
    }

    pub fn with_quad_rel_tol(mut self, value: f64) -> Result<Self> {
        self.quad_rel_tol = value;
        self.validate().map(|_| self)
    }

    pub fn with_horizon(mut self, value: f64) -> Result<Self> {
        self.horizon = value;
        self.validate().map(|_| self)
    }

    /// Upper truncation point for Laplace-type integrals `∫₀^∞ g(t) e^{-xt} dt`.
    ///
    /// Never shorter than `80 / x`, which keeps `e^{-xT}` below `1e-34`.
    pub fn horizon_for(&self, x: f64) -> f64 {
        self.horizon.max(80.0 / x)
    }
}
