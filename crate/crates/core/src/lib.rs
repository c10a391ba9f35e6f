//! Motion synergetic decoding, pose-based clip curation, keyframe sampling
//! and caption evaluation, all driven from serialized inputs.

pub mod curation;
pub mod error;
pub mod format;
pub mod keyframe;
pub mod metrics;
pub mod model;
pub mod msd;
pub mod sim;

pub use error::{Error, ErrorClass, Result};
pub use model::*;
