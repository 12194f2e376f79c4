use super::{OrientedBolt, PipelineError, Stage};
use crate::geometry::region_rect;
use crate::imagecore::BinaryImage;

/// Result of the shoulder search.
#[derive(Debug, Clone, PartialEq)]
pub struct HeadCut {
    /// First column of the body proper; 0 when no shoulder was found.
    pub shoulder: usize,
    /// Column `h` where the body image starts: `shoulder + thresh_used`.
    pub cut: usize,
    pub thresh_used: usize,
    pub shoulder_found: bool,
    /// Columns `cut..l`.
    pub body: BinaryImage,
    /// Columns `0..shoulder`, if any.
    pub head: Option<BinaryImage>,
}

/// Binary search for the head/body boundary over columns `0..=head_frac·l`.
///
/// The part right of `mid` is measured by its min-area rect; when that
/// width is at least as close to the head width `w` as to the body width
/// `d`, the head still reaches `mid` and the search moves right. Otherwise
/// `mid - 1` is probed: if the head reaches it, `mid` is the shoulder.
pub fn remove_head(bolt: &OrientedBolt, d: f64, thresh: usize, head_frac: f64) -> Result<HeadCut, PipelineError> {
    let img = &bolt.img;
    let l = img.width();
    let w = img.height() as f64;
    let head_at = |mid: usize| -> Result<bool, PipelineError> {
        let part = img.crop_columns(mid, l).map_err(|e| PipelineError::MalformedBolt {
            stage: Stage::RemoveHead,
            detail: e.to_string(),
        })?;
        let w1 = region_rect(&part)
            .map_err(PipelineError::geometry(Stage::RemoveHead))?
            .vertical_extent();
        Ok((w1 - w).abs() <= (w1 - d).abs())
    };

    let upper_limit = ((head_frac * l as f64).floor() as usize).min(l.saturating_sub(1));
    let (mut lower, mut upper) = (0usize, upper_limit as isize);
    let mut shoulder = None;
    while lower as isize <= upper {
        let mid = (lower + upper as usize) / 2;
        if head_at(mid)? {
            lower = mid + 1;
        } else if mid > 0 && head_at(mid - 1)? {
            shoulder = Some(mid);
            break;
        } else {
            upper = mid as isize - 1;
        }
    }

    let shoulder_found = shoulder.is_some();
    let shoulder = shoulder.unwrap_or(0);
    let cut = shoulder + thresh;
    if cut + 1 > l {
        return Err(PipelineError::InsufficientData {
            stage: Stage::RemoveHead,
            columns: l,
        });
    }
    let crop = |a, b| {
        img.crop_columns(a, b).map_err(|e| PipelineError::MalformedBolt {
            stage: Stage::RemoveHead,
            detail: e.to_string(),
        })
    };
    Ok(HeadCut {
        shoulder,
        cut,
        thresh_used: thresh,
        shoulder_found,
        body: crop(cut, l)?,
        head: if shoulder > 0 { Some(crop(0, shoulder)?) } else { None },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::{measure_axes, orient};

    fn bolt(head_len: usize, len: usize) -> BinaryImage {
        let mut img = BinaryImage::black(len, 20);
        for y in 0..20 {
            for x in 0..len {
                if x < head_len || (6..14).contains(&y) {
                    img.set(x, y, true);
                }
            }
        }
        img
    }

    #[test]
    fn finds_every_shoulder_in_range() {
        for head_len in 1..=20 {
            let b = orient(&bolt(head_len, 100)).unwrap();
            let (_, d) = measure_axes(&b).unwrap();
            assert!((d - 8.0).abs() < 1e-9);
            let cut = remove_head(&b, d, 0, 0.2).unwrap();
            assert!(cut.shoulder_found, "head {head_len}");
            assert_eq!(cut.shoulder, head_len);
            assert_eq!(cut.body.width(), 100 - head_len);
            assert_eq!(cut.head.as_ref().unwrap().width(), head_len);
            let cut = remove_head(&b, d, 5, 0.2).unwrap();
            assert_eq!(cut.cut, head_len + 5);
        }
    }

    #[test]
    fn headless_cylinder_is_flagged() {
        let b = orient(&BinaryImage::white(60, 10)).unwrap();
        let (_, d) = measure_axes(&b).unwrap();
        let cut = remove_head(&b, d, 5, 0.2).unwrap();
        assert!(!cut.shoulder_found);
        assert_eq!(cut.cut, 5);
        assert!(cut.head.is_none());
        assert_eq!(cut.body.width(), 55);
    }

    #[test]
    fn head_past_search_range_is_not_found() {
        let b = orient(&bolt(30, 100)).unwrap();
        let cut = remove_head(&b, 8.0, 5, 0.2).unwrap();
        assert!(!cut.shoulder_found);
        assert!(cut.cut as f64 <= 0.2 * 100.0 + 5.0);
    }
}
