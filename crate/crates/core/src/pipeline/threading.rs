use super::{PipelineConfig, PipelineError, Stage, ThreadingType};
use crate::geometry::{arc_length, is_contour_convex, trace_contour, Contour};
use crate::imagecore::{connected_components, BinaryImage};

fn largest_contour(img: &BinaryImage) -> Result<Contour, PipelineError> {
    let largest = connected_components(img)
        .into_iter()
        .max_by_key(|c| c.area)
        .ok_or(PipelineError::MalformedBolt {
            stage: Stage::ClassifyThreading,
            detail: "body half is empty".into(),
        })?;
    trace_contour(&largest.mask).map_err(PipelineError::geometry(Stage::ClassifyThreading))
}

/// Full or half thread from a headless body, threads (if partial) on the
/// right.
///
/// The body is split at its middle column. Any of these makes it a half
/// thread: the left half's outline is convex; the right half's perimeter
/// exceeds the left's by more than `perim_ratio`; the left half fills at
/// least `fill_frac` of a `d`-high box. A smooth cylinder therefore reads as
/// half threaded.
pub fn classify_threading(body: &BinaryImage, d: f64, cfg: &PipelineConfig) -> Result<ThreadingType, PipelineError> {
    let bw = body.width();
    if bw < 4 {
        return Err(PipelineError::InsufficientData {
            stage: Stage::ClassifyThreading,
            columns: bw,
        });
    }
    let half = bw / 2;
    let crop = |a, b| {
        body.crop_columns(a, b).map_err(|e| PipelineError::MalformedBolt {
            stage: Stage::ClassifyThreading,
            detail: e.to_string(),
        })
    };
    let (left, right) = (crop(0, half)?, crop(half, bw)?);
    let left_contour = largest_contour(&left)?;

    if is_contour_convex(&left_contour, cfg.convex_tol) {
        return Ok(ThreadingType::HalfThread);
    }
    let left_perim = arc_length(&left_contour);
    let right_perim = arc_length(&largest_contour(&right)?);
    if left_perim > 0.0 && right_perim / left_perim > cfg.perim_ratio {
        return Ok(ThreadingType::HalfThread);
    }
    if left.count_white() as f64 >= cfg.fill_frac * d * half as f64 {
        return Ok(ThreadingType::HalfThread);
    }
    Ok(ThreadingType::FullThread)
}
