use super::{homography_from_quad, GeometryError, Homography, PointF, RotatedRect};
use crate::imagecore::BinaryImage;

/// Output frame of an upright warp.
///
/// The output x-axis is whichever rectangle side direction lies closest to
/// the image +x axis, the y-axis is that direction turned +90° (downward on
/// screen). `to_source` maps output coordinates (pixel corners at integers)
/// to input coordinates. `src_width` and `src_height` are the unrounded
/// extents the output width and height stand for; `x_axis` and `y_axis` are
/// the output axes as unit vectors in the input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UprightFrame {
    pub width: usize,
    pub height: usize,
    pub x_axis: PointF,
    pub y_axis: PointF,
    pub src_width: f64,
    pub src_height: f64,
    pub to_source: Homography,
}

pub fn upright_frame(r: &RotatedRect) -> Result<UprightFrame, GeometryError> {
    let (e1, e2) = r.axes();
    let (x_axis, along, across) = if r.angle > -45.0 {
        (e1, r.size_w, r.size_h)
    } else {
        (e2, r.size_h, r.size_w)
    };
    let (width, height) = (along.round(), across.round());
    if width < 1.0 || height < 1.0 {
        return Err(GeometryError::DegenerateRect {
            w: r.size_w,
            h: r.size_h,
        });
    }
    let y_axis = PointF::new(-x_axis.y, x_axis.x);
    let hx = x_axis.scale(along / 2.0);
    let hy = y_axis.scale(across / 2.0);
    let c = r.center;
    let src = [c - hx - hy, c + hx - hy, c + hx + hy, c - hx + hy];
    let dst = [
        PointF::new(0.0, 0.0),
        PointF::new(width, 0.0),
        PointF::new(width, height),
        PointF::new(0.0, height),
    ];
    Ok(UprightFrame {
        width: width as usize,
        height: height as usize,
        x_axis,
        y_axis,
        src_width: along,
        src_height: across,
        to_source: homography_from_quad(&dst, &src)?,
    })
}

/// Resamples the content of `r` into an axis-aligned image.
///
/// Output size is the rounded rectangle extent, long or short side first
/// depending on which side runs closer to horizontal. Each output pixel
/// center is mapped back through the homography and takes the value of the
/// source pixel it lands in; samples outside the source are black.
pub fn warp_to_upright(img: &BinaryImage, r: &RotatedRect) -> Result<BinaryImage, GeometryError> {
    warp_frame(img, &upright_frame(r)?)
}

/// Resamples `img` into a precomputed frame.
pub fn warp_frame(img: &BinaryImage, frame: &UprightFrame) -> Result<BinaryImage, GeometryError> {
    let mut out = BinaryImage::black(frame.width, frame.height);
    for v in 0..frame.height {
        for u in 0..frame.width {
            let p = frame.to_source.apply(PointF::new(u as f64 + 0.5, v as f64 + 0.5));
            if img.get_signed(p.x.floor() as i64, p.y.floor() as i64) {
                out.set(u, v, true);
            }
        }
    }
    Ok(out)
}
