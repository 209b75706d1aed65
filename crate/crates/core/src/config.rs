use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shared tolerance knobs.
///
/// The band and step fields are *relative* scale factors: each consumer
/// multiplies by the natural length of its input (curve diameter, image
/// diameter, search-box diagonal). `newton_tol` and `containment_tol` are absolute.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToleranceConfig {
    /// Exclusion band around a curve, as a fraction of its diameter.
    pub boundary_band: f64,
    /// Exclusion band around the image of a curve, as a fraction of the
    /// image diameter.
    pub image_band: f64,
    /// Corrector tolerance for preimage tracing, as a fraction of the
    /// diameter of the target curve.
    pub trace_tol: f64,
    /// Absolute residual target for Newton refinement of zeros and poles.
    pub newton_tol: f64,
    /// Smallest subdivision cell, as a fraction of the search-box diagonal.
    pub min_cell: f64,
    /// Absolute bound on dist(f(z), gamma) over the sampled curve for the
    /// direct containment check during classification.
    pub containment_tol: f64,
    /// Seed for every random choice (sampling, grid jitter).
    pub seed: u64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            boundary_band: 1e-9,
            image_band: 1e-6,
            trace_tol: 1e-9,
            newton_tol: 1e-10,
            min_cell: 1e-8,
            containment_tol: 1e-8,
            seed: 0,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("boundary_band", self.boundary_band),
            ("image_band", self.image_band),
            ("trace_tol", self.trace_tol),
            ("newton_tol", self.newton_tol),
            ("min_cell", self.min_cell),
            ("containment_tol", self.containment_tol),
        ];
        for (name, v) in fields {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Config(format!(
                    "tolerance `{name}` must be positive and finite, got {v}"
                )));
            }
            if v >= 1.0 {
                return Err(Error::Config(format!(
                    "tolerance `{name}` must be below 1, got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}
