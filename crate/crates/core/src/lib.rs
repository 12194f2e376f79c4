//! Bolt identification from binary silhouettes.
//!
//! [`imagecore`] holds rasters and binarization, [`geometry`] the contour and
//! rectangle primitives, [`pipeline`] the measurement chain, [`identify`]
//! the lookup table and [`synth`] a parametric renderer used as ground truth.

pub mod geometry;
pub mod identify;
pub mod imagecore;
pub mod pipeline;
pub mod synth;
