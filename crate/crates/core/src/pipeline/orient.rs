use super::{PipelineError, Stage};
use crate::geometry::{pixel_rect, region_rect, upright_frame, warp_frame, PointF};
use crate::imagecore::{BinaryImage, PixelPoint};

/// An upright, landscape silhouette with the head on the left.
#[derive(Debug, Clone, PartialEq)]
pub struct OrientedBolt {
    pub img: BinaryImage,
    /// Bolt length `l`: the unrounded long side of the min-area rect.
    pub major_px: f64,
    /// Head width `w`: the unrounded short side.
    pub head_w_px: f64,
    /// Source pixels per oriented pixel along x and y.
    pub scale: (f64, f64),
    /// The input silhouette, kept so measurements can avoid resampling.
    pub source: BinaryImage,
    /// Source-image center of the min-area rect.
    pub source_center: PointF,
    /// Oriented +x and +y (head to tip, and across) as source unit vectors.
    pub source_axes: (PointF, PointF),
}

fn half_counts(img: &BinaryImage) -> (usize, usize) {
    let (w, half) = (img.width(), img.width() / 2);
    let mut left = 0;
    let mut right = 0;
    for y in 0..img.height() {
        let row = img.row(y);
        left += row[..half].iter().filter(|&&p| p).count();
        right += row[w - half..].iter().filter(|&&p| p).count();
    }
    (left, right)
}

/// Warps the component upright through its min-area rect, turns it
/// landscape and puts the heavier half (the head) on the left.
///
/// For a square rect the landscape turn is skipped and only the head rule
/// applies.
pub fn orient(component: &BinaryImage) -> Result<OrientedBolt, PipelineError> {
    let rect = region_rect(component).map_err(PipelineError::geometry(Stage::Orient))?;
    let frame = upright_frame(&rect).map_err(PipelineError::geometry(Stage::Orient))?;
    let mut img = warp_frame(component, &frame).map_err(PipelineError::geometry(Stage::Orient))?;
    let mut scale = (
        frame.src_width / frame.width as f64,
        frame.src_height / frame.height as f64,
    );
    let (mut major, mut minor) = (frame.src_width, frame.src_height);
    let (mut ax, mut ay) = (frame.x_axis, frame.y_axis);
    if img.height() > img.width() {
        img = img.rotate90();
        scale = (scale.1, scale.0);
        std::mem::swap(&mut major, &mut minor);
        (ax, ay) = (ay.scale(-1.0), ax);
    }
    let (left, right) = half_counts(&img);
    if right > left {
        img = img.rotate180();
        (ax, ay) = (ax.scale(-1.0), ay.scale(-1.0));
    }
    Ok(OrientedBolt {
        img,
        major_px: major,
        head_w_px: minor,
        scale,
        source: component.clone(),
        source_center: rect.center,
        source_axes: (ax, ay),
    })
}

/// Per row, the outermost white pixels whose centers lie on the `dir` side
/// of the line through `origin` perpendicular to `dir`.
fn half_plane_extremes(img: &BinaryImage, origin: PointF, dir: PointF) -> Vec<PixelPoint> {
    let mut out = Vec::new();
    for y in 0..img.height() {
        let dy = (y as f64 + 0.5 - origin.y) * dir.y;
        // columns with (x + 0.5 - origin.x)·dir.x + dy >= 0
        let (x0, x1) = if dir.x.abs() < 1e-12 {
            if dy >= 0.0 {
                (0, img.width())
            } else {
                continue;
            }
        } else {
            let bound = origin.x - dy / dir.x - 0.5;
            if dir.x > 0.0 {
                ((bound.ceil().max(0.0) as usize).min(img.width()), img.width())
            } else {
                (0, ((bound.floor() + 1.0).max(0.0) as usize).min(img.width()))
            }
        };
        let row = &img.row(y)[x0..x1];
        if let Some(first) = row.iter().position(|&p| p) {
            let last = row.iter().rposition(|&p| p).unwrap_or(first);
            out.push(PixelPoint::new(x0 + first, y));
            if last != first {
                out.push(PixelPoint::new(x0 + last, y));
            }
        }
    }
    out
}

/// Major axis (bolt length) and minor axis `d`: the width of the min-area
/// rect of the tip half, which never holds the head.
///
/// The tip half is taken from the source pixels rather than the upright
/// resample, which would widen a tilted outline by up to half a pixel per
/// side.
pub fn measure_axes(bolt: &OrientedBolt) -> Result<(f64, f64), PipelineError> {
    let (ax, ay) = bolt.source_axes;
    let tip = half_plane_extremes(&bolt.source, bolt.source_center, ax);
    let rect = pixel_rect(&tip).map_err(|_| PipelineError::MalformedBolt {
        stage: Stage::MeasureAxes,
        detail: "right half is empty".into(),
    })?;
    Ok((bolt.major_px, rect.extent_along(ay)))
}
