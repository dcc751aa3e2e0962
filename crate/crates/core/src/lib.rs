//! Real-time text localization in grayscale scene images.
//!
//! Localization runs in two stages:
//!
//! 1. [`candidates::extract_candidates`] smooths the image, takes the
//!    difference of a horizontal opening and closing as a contrast response,
//!    bridges gaps between characters, thresholds at a multiple of the mean
//!    response and keeps wide, reasonably dense connected components.
//! 2. [`features::extract_features`] describes each candidate crop by the
//!    mean, variance and third central moment of its LH, HL and HH Haar
//!    subbands, and a linear [`classifier::SvmModel`] accepts or rejects it.
//!
//! [`detector::Detector`] wires both stages together. [`evaluation`] scores
//! detections (recall, false-alarm rate, images per second) and
//! [`synthetic`] produces seeded scenes with exact ground truth.
//!
//! ```
//! use textloc::{candidates::extract_candidates, GrayImage, PipelineConfig};
//!
//! let img = GrayImage::filled(64, 48, 128).unwrap();
//! assert!(extract_candidates(&img, &PipelineConfig::default()).unwrap().is_empty());
//! ```

pub mod app;
pub mod candidates;
pub mod classifier;
pub mod config;
pub mod detector;
pub mod error;
pub mod evaluation;
pub mod features;
pub mod geometry;
pub mod image;
pub mod io;
pub mod morphology;
pub mod synthetic;

pub use candidates::{Connectivity, PipelineConfig, Region};
pub use classifier::{Label, SvmModel, TrainConfig, TrainingSet};
pub use config::ConfigFile;
pub use detector::{Detection, Detector};
pub use error::{Error, Result};
pub use features::FeatureVector;
pub use geometry::Rect;
pub use image::{BinaryImage, GrayImage};
pub use morphology::StructuringElement;
