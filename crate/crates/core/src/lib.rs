//! Decoder-free segmentation substrate: binary masks as ordered point
//! trajectories in a normalized coordinate text grammar, plus the rewards and
//! metrics needed to train and score a point-predicting model.

pub mod codec;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod grammar;
pub mod metrics;
pub mod par;
pub mod reward;
pub mod rollout;

pub use codec::{rasterize, roundtrip, simplify, trace_contours, ContourSet, SimplifyTolerance};
pub use error::{Error, Result};
pub use geometry::{BBox, BinaryMask, ImageSize, PixelPolygon, Point};
