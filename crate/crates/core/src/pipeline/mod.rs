//! Bolt measurement chain.
//!
//! A single-component silhouette goes through [`orient`] (upright,
//! landscape, head on the left), [`measure_axes`], [`remove_head`],
//! [`classify_threading`] and [`estimate_pitch`]. [`extract_features`] runs
//! the whole chain; [`measure_frame`] first splits a frame into components.

mod head;
mod orient;
mod pitch;
mod threading;

pub use head::{remove_head, HeadCut};
pub use orient::{measure_axes, orient, OrientedBolt};
pub use pitch::{estimate_pitch, PitchTrace};
pub use threading::classify_threading;

use std::fmt;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{arc_length, trace_contour, GeometryError, DEFAULT_CONVEX_TOL};
use crate::imagecore::{connected_components, filter_min_area, BinaryImage, Component};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ThreadingType {
    FullThread,
    HalfThread,
}

impl ThreadingType {
    /// Two-letter code used in tables and file names.
    pub fn code(self) -> &'static str {
        match self {
            ThreadingType::FullThread => "FT",
            ThreadingType::HalfThread => "HT",
        }
    }

    pub fn from_code(s: &str) -> Option<Self> {
        match s {
            "FT" => Some(ThreadingType::FullThread),
            "HT" => Some(ThreadingType::HalfThread),
            _ => None,
        }
    }
}

impl fmt::Display for ThreadingType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// Tunables of the measurement chain. Lengths are in pixels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    /// Columns removed past the detected shoulder.
    pub thresh: usize,
    /// Rows the pitch scan line sits below the slice's top edge.
    pub nudge: usize,
    /// Right/left perimeter ratio above which a body is half threaded.
    pub perim_ratio: f64,
    /// Fill fraction of the left body half above which it is half threaded.
    pub fill_frac: f64,
    /// Largest head length as a fraction of the bolt length.
    pub head_frac: f64,
    /// Right part of the body scanned for pitch.
    pub thread_slice_frac: f64,
    /// Pitch is only measured on bolts longer than this.
    pub min_pitch_len_px: f64,
    /// Components below this many pixels are dropped as noise.
    pub min_component_area: usize,
    pub convex_tol: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            thresh: 5,
            nudge: 2,
            perim_ratio: 1.15,
            fill_frac: 0.97,
            head_frac: 0.2,
            thread_slice_frac: 0.3,
            min_pitch_len_px: 200.0,
            min_component_area: 50,
            convex_tol: DEFAULT_CONVEX_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Stage {
    Orient,
    MeasureAxes,
    RemoveHead,
    ClassifyThreading,
    EstimatePitch,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Orient => "orient",
            Stage::MeasureAxes => "measure_axes",
            Stage::RemoveHead => "remove_head",
            Stage::ClassifyThreading => "classify_threading",
            Stage::EstimatePitch => "estimate_pitch",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PipelineError {
    #[error("empty-input at {0}")]
    EmptyInput(Stage),
    #[error("malformed-bolt at {stage}: {detail}")]
    MalformedBolt { stage: Stage, detail: String },
    #[error("insufficient-data at {stage}: {columns} columns")]
    InsufficientData { stage: Stage, columns: usize },
    #[error("insufficient-crests at estimate_pitch: {crests} complete crests on the scan line")]
    InsufficientCrests { crests: usize },
    #[error("parity at estimate_pitch: odd crossing count {n} in {crossings:?}")]
    Parity { n: usize, crossings: Vec<f64> },
    #[error("geometry at {stage}: {source}")]
    Geometry { stage: Stage, source: GeometryError },
}

impl PipelineError {
    pub fn stage(&self) -> Stage {
        match self {
            PipelineError::EmptyInput(s) => *s,
            PipelineError::MalformedBolt { stage, .. }
            | PipelineError::InsufficientData { stage, .. }
            | PipelineError::Geometry { stage, .. } => *stage,
            PipelineError::InsufficientCrests { .. } | PipelineError::Parity { .. } => Stage::EstimatePitch,
        }
    }

    pub(crate) fn geometry(stage: Stage) -> impl FnOnce(GeometryError) -> PipelineError {
        move |source| match source {
            GeometryError::EmptyInput(_) => PipelineError::EmptyInput(stage),
            source => PipelineError::Geometry { stage, source },
        }
    }
}

/// The classification vector of one bolt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoltFeatures {
    pub major_px: f64,
    pub minor_px: f64,
    pub threading: ThreadingType,
    pub pitch_px: Option<f64>,
    pub area_px: f64,
    pub perimeter_px: f64,
    /// Head cut found by the shoulder search (false: cut at `thresh`).
    pub shoulder_found: bool,
}

/// Wall time spent per stage of one [`extract_features_timed`] call.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageTimings {
    pub orient: Duration,
    pub measure_axes: Duration,
    pub area_perimeter: Duration,
    pub remove_head: Duration,
    pub classify_threading: Duration,
    pub estimate_pitch: Duration,
}

impl StageTimings {
    pub fn named(&self) -> [(&'static str, Duration); 6] {
        [
            ("orient", self.orient),
            ("measure_axes", self.measure_axes),
            ("area_perimeter", self.area_perimeter),
            ("remove_head", self.remove_head),
            ("classify_threading", self.classify_threading),
            ("estimate_pitch", self.estimate_pitch),
        ]
    }

    pub fn total(&self) -> Duration {
        self.named().iter().map(|(_, d)| *d).sum()
    }
}

pub fn extract_features(component: &BinaryImage, cfg: &PipelineConfig) -> Result<BoltFeatures, PipelineError> {
    extract_features_timed(component, cfg).map(|(f, _)| f)
}

pub fn extract_features_timed(
    component: &BinaryImage,
    cfg: &PipelineConfig,
) -> Result<(BoltFeatures, StageTimings), PipelineError> {
    let mut t = StageTimings::default();
    let mut clock = Instant::now();
    let mut lap = |slot: &mut Duration| {
        let now = Instant::now();
        *slot = now - clock;
        clock = now;
    };

    let bolt = orient(component)?;
    lap(&mut t.orient);
    let (major_px, minor_px) = measure_axes(&bolt)?;
    lap(&mut t.measure_axes);
    let area_px = component.count_white() as f64;
    let perimeter_px = arc_length(&trace_contour(component).map_err(PipelineError::geometry(Stage::Orient))?);
    lap(&mut t.area_perimeter);
    let cut = remove_head(&bolt, minor_px, cfg.thresh, cfg.head_frac)?;
    lap(&mut t.remove_head);
    let threading = classify_threading(&cut.body, minor_px, cfg)?;
    lap(&mut t.classify_threading);
    let pitch_px = if major_px > cfg.min_pitch_len_px {
        match estimate_pitch(&cut.body, cfg.nudge, cfg.thread_slice_frac) {
            Ok(trace) => Some(trace.pitch_px),
            Err(PipelineError::InsufficientCrests { crests }) => {
                log::debug!("no pitch: {crests} complete crests");
                None
            }
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    lap(&mut t.estimate_pitch);

    Ok((
        BoltFeatures {
            major_px,
            minor_px,
            threading,
            pitch_px,
            area_px,
            perimeter_px,
            shoulder_found: cut.shoulder_found,
        },
        t,
    ))
}

/// One component of a frame and what the chain made of it.
#[derive(Debug, Clone)]
pub struct FrameBolt {
    pub component: Component,
    pub features: Result<BoltFeatures, PipelineError>,
}

/// Splits a frame into components above `min_component_area` and measures
/// each, in row-major order of their bounding rects.
pub fn measure_frame(img: &BinaryImage, cfg: &PipelineConfig) -> Vec<FrameBolt> {
    filter_min_area(connected_components(img), cfg.min_component_area)
        .into_iter()
        .map(|component| {
            let features = extract_features(&component.mask, cfg);
            FrameBolt { component, features }
        })
        .collect()
}
