//! Tooling for measuring and correcting class-level biases introduced by
//! data augmentation.
//!
//! The crate is organised around the analysis pipeline:
//!
//! * [`data`] holds prediction logs and annotation sets,
//! * [`metrics`] turns them into per-class accuracy, FP/FN and confusion curves,
//! * [`taxonomy`] scores confused class pairs and assigns confusion categories,
//! * [`policy`] builds class-conditional augmentation policies,
//! * [`augment`] implements the transforms those policies drive,
//! * [`sim`] is a small deterministic simulator that reproduces the effect end to end,
//! * [`io`] covers file formats, run manifests and markdown reports.

pub mod augment;
pub mod data;
pub mod error;
pub mod io;
pub mod metrics;
pub mod pipeline;
pub mod policy;
pub mod sim;
pub mod taxonomy;
pub mod types;

pub use data::{AnnotationSet, PredictionLog, PredictionRecord};
pub use error::{Error, Result};
pub use types::{ClassId, LabelMode, Strength};
