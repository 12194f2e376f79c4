use serde::{Deserialize, Serialize};

use super::{PipelineError, Stage};
use crate::geometry::{region_rect, upright_frame, warp_frame};
use crate::imagecore::BinaryImage;

/// Scan-line pitch estimate: `pitch_px = (b - a) / (n / 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PitchTrace {
    pub a: f64,
    pub b: f64,
    pub n: usize,
    pub pitch_px: f64,
}

impl PitchTrace {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self, PipelineError> {
        if n % 2 == 1 {
            return Err(PipelineError::Parity {
                n,
                crossings: Vec::new(),
            });
        }
        if n < 4 {
            return Err(PipelineError::InsufficientCrests { crests: n / 2 });
        }
        if b < a {
            return Err(PipelineError::MalformedBolt {
                stage: Stage::EstimatePitch,
                detail: format!("last crossing {b} precedes first {a}"),
            });
        }
        Ok(Self {
            a,
            b,
            n,
            pitch_px: (b - a) / (n / 2) as f64,
        })
    }

    /// Trace over raw crossing columns: `a` first, `b` last, `n` their count.
    pub fn from_crossings(crossings: &[f64]) -> Result<Self, PipelineError> {
        if crossings.len() % 2 == 1 {
            return Err(PipelineError::Parity {
                n: crossings.len(),
                crossings: crossings.to_vec(),
            });
        }
        match (crossings.first(), crossings.last()) {
            (Some(&a), Some(&b)) => Self::new(a, b, crossings.len()),
            _ => Err(PipelineError::InsufficientCrests { crests: 0 }),
        }
    }
}

/// Maximal white runs `[start, end)` of a row.
fn runs(row: &[bool]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    for (x, &p) in row.iter().enumerate() {
        match (p, start) {
            (true, None) => start = Some(x),
            (false, Some(s)) => {
                out.push((s, x));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, row.len()));
    }
    out
}

/// Folds single-pixel runs into a neighbor one pixel away: upright
/// resampling of a tilted flank leaves such jags beside a crest.
fn merge_jags(runs: Vec<(usize, usize)>) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = Vec::with_capacity(runs.len());
    for r in runs {
        if let Some(last) = out.last_mut() {
            let single = last.1 - last.0 == 1 || r.1 - r.0 == 1;
            if r.0 == last.1 + 1 && single {
                last.1 = r.1;
                continue;
            }
        }
        out.push(r);
    }
    out
}

/// Pitch from the right `slice_frac` of a headless body.
///
/// The slice is re-squared through its min-area rect and scanned `nudge`
/// rows below its top edge, where each crest shows up as one run of white
/// pixels (two crossings) once resampling jags are folded back into their
/// crest. Runs cut by the slice borders are dropped since
/// their centers are unknown. `a` and `b` are the centers of the first and
/// last complete crests and `n` counts the crossings of the `c - 1` thread
/// periods between them, so `(b - a) / (n / 2)` is the mean crest spacing.
/// At least three complete crests are required.
pub fn estimate_pitch(body: &BinaryImage, nudge: usize, slice_frac: f64) -> Result<PitchTrace, PipelineError> {
    let bw = body.width();
    let sw = ((bw as f64 * slice_frac).ceil() as usize).clamp(1, bw);
    let slice = body
        .crop_columns(bw - sw, bw)
        .map_err(|e| PipelineError::MalformedBolt {
            stage: Stage::EstimatePitch,
            detail: e.to_string(),
        })?;
    let rect = region_rect(&slice).map_err(PipelineError::geometry(Stage::EstimatePitch))?;
    let frame = upright_frame(&rect).map_err(PipelineError::geometry(Stage::EstimatePitch))?;
    let upright = warp_frame(&slice, &frame).map_err(PipelineError::geometry(Stage::EstimatePitch))?;
    let scale = frame.src_width / frame.width as f64;

    let row = upright.row(nudge.min(upright.height() - 1));
    let centers: Vec<f64> = merge_jags(runs(row))
        .into_iter()
        .filter(|&(s, e)| s > 0 && e < row.len())
        .map(|(s, e)| (s + e) as f64 / 2.0 * scale)
        .collect();
    if centers.len() < 3 {
        return Err(PipelineError::InsufficientCrests { crests: centers.len() });
    }
    PitchTrace::new(centers[0], centers[centers.len() - 1], 2 * (centers.len() - 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equation_arithmetic() {
        let t = PitchTrace::new(100.0, 412.0, 16).unwrap();
        assert_eq!(t.pitch_px, 39.0);
        let xs = [100.0, 104.0, 139.0, 143.0, 178.0, 182.0, 412.0, 416.0];
        let t = PitchTrace::from_crossings(&xs).unwrap();
        assert_eq!((t.a, t.b, t.n), (100.0, 416.0, 8));
        assert_eq!(t.pitch_px, 79.0);
    }

    #[test]
    fn odd_crossings_are_a_parity_error() {
        let xs = [1.0, 2.0, 5.0];
        match PitchTrace::from_crossings(&xs).unwrap_err() {
            PipelineError::Parity { n, crossings } => {
                assert_eq!(n, 3);
                assert_eq!(crossings, xs);
            }
            e => panic!("{e}"),
        }
        assert!(matches!(
            PitchTrace::new(0.0, 10.0, 7),
            Err(PipelineError::Parity { n: 7, .. })
        ));
        assert!(matches!(
            PitchTrace::new(0.0, 10.0, 2),
            Err(PipelineError::InsufficientCrests { crests: 1 })
        ));
    }

    #[test]
    fn runs_of_a_row() {
        let row: Vec<bool> = "##..#.###".chars().map(|c| c == '#').collect();
        assert_eq!(runs(&row), vec![(0, 2), (4, 5), (6, 9)]);
    }

    #[test]
    fn jags_fold_into_crests() {
        let row: Vec<bool> = "#.####....##.#....#.#...##.##".chars().map(|c| c == '#').collect();
        assert_eq!(
            merge_jags(runs(&row)),
            vec![(0, 6), (10, 14), (18, 21), (24, 26), (27, 29)]
        );
    }

    #[test]
    fn square_wave_body() {
        // crests 3 px wide every 10 columns along the top edge
        let mut body = BinaryImage::black(200, 30);
        for x in 0..200 {
            let top = if x % 10 < 3 { 0 } else { 4 };
            for y in top..30 {
                body.set(x, y, true);
            }
        }
        let t = estimate_pitch(&body, 2, 0.3).unwrap();
        assert!((t.pitch_px - 10.0).abs() < 1e-9);
        assert_eq!(t.pitch_px, (t.b - t.a) / (t.n / 2) as f64);
    }

    #[test]
    fn smooth_body_has_no_crests() {
        assert!(matches!(
            estimate_pitch(&BinaryImage::white(100, 20), 2, 0.3),
            Err(PipelineError::InsufficientCrests { crests: 0 })
        ));
    }
}
