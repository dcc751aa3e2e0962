//! JSON configuration file.
//!
//! ```json
//! {
//!   "pipeline": {
//!     "smooth_se": {"width": 3, "height": 4},
//!     "openclose_se": {"width": 5, "height": 1},
//!     "edgeclose_se": {"width": 5, "height": 1},
//!     "threshold_factor": 1.0,
//!     "allow_any_threshold_factor": false,
//!     "min_aspect": 1.5,
//!     "min_density": 0.1,
//!     "connectivity": 8
//!   },
//!   "train": {"c": 1.0, "tol": 0.001, "max_epochs": 1000, "seed": 0}
//! }
//! ```
//!
//! Every key is optional and unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::candidates::{Connectivity, PipelineConfig};
use crate::classifier::TrainConfig;
use crate::error::{Error, Result};
use crate::morphology::StructuringElement;

/// Flat rectangular element given by its extent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RectSe {
    pub width: usize,
    pub height: usize,
}

impl RectSe {
    fn build(self) -> Result<StructuringElement> {
        StructuringElement::rect(self.width, self.height)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineSection {
    pub smooth_se: RectSe,
    pub openclose_se: RectSe,
    pub edgeclose_se: RectSe,
    pub threshold_factor: f64,
    pub allow_any_threshold_factor: bool,
    pub min_aspect: f64,
    pub min_density: f64,
    pub connectivity: Connectivity,
}

impl Default for PipelineSection {
    fn default() -> Self {
        let d = PipelineConfig::default();
        let se = |s: &StructuringElement| RectSe {
            width: s.width(),
            height: s.height(),
        };
        Self {
            smooth_se: se(&d.smooth_se),
            openclose_se: se(&d.openclose_se),
            edgeclose_se: se(&d.edgeclose_se),
            threshold_factor: d.threshold_factor,
            allow_any_threshold_factor: d.allow_any_threshold_factor,
            min_aspect: d.min_aspect,
            min_density: d.min_density,
            connectivity: d.connectivity,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub pipeline: PipelineSection,
    pub train: TrainConfig,
}

impl ConfigFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ConfigFile = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.pipeline_config()?;
        cfg.train.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Loads `path` when given, defaults otherwise.
    pub fn load_or_default(path: Option<&Path>) -> Result<Self> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }

    pub fn pipeline_config(&self) -> Result<PipelineConfig> {
        let p = &self.pipeline;
        let cfg = PipelineConfig {
            smooth_se: p.smooth_se.build()?,
            openclose_se: p.openclose_se.build()?,
            edgeclose_se: p.edgeclose_se.build()?,
            threshold_factor: p.threshold_factor,
            allow_any_threshold_factor: p.allow_any_threshold_factor,
            min_aspect: p.min_aspect,
            min_density: p.min_density,
            connectivity: p.connectivity,
        };
        cfg.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_is_default() {
        let cfg = ConfigFile::from_json("{}").unwrap();
        assert_eq!(cfg, ConfigFile::default());
        assert_eq!(cfg.pipeline_config().unwrap(), PipelineConfig::default());
    }

    #[test]
    fn round_trips_through_json() {
        let mut cfg = ConfigFile::default();
        cfg.pipeline.threshold_factor = 0.9;
        cfg.pipeline.connectivity = Connectivity::Four;
        cfg.train.c = 4.0;
        assert_eq!(ConfigFile::from_json(&cfg.to_json()).unwrap(), cfg);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(ConfigFile::from_json(r#"{"pipeline": {"treshold_factor": 1.0}}"#).is_err());
        assert!(ConfigFile::from_json(r#"{"extra": 1}"#).is_err());
        assert!(ConfigFile::from_json(r#"{"pipeline": {"smooth_se": {"width": 3, "height": 4, "depth": 1}}}"#).is_err());
    }

    #[test]
    fn out_of_range_values_rejected() {
        assert!(ConfigFile::from_json(r#"{"pipeline": {"threshold_factor": 2.0}}"#).is_err());
        assert!(ConfigFile::from_json(r#"{"pipeline": {"threshold_factor": 2.0, "allow_any_threshold_factor": true}}"#).is_ok());
        assert!(ConfigFile::from_json(r#"{"pipeline": {"connectivity": 6}}"#).is_err());
        assert!(ConfigFile::from_json(r#"{"pipeline": {"smooth_se": {"width": 0, "height": 4}}}"#).is_err());
        assert!(ConfigFile::from_json(r#"{"train": {"c": -1}}"#).is_err());
    }
}
