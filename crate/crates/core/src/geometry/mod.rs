//! Planar geometry on binary silhouettes.
//!
//! Contours are traced on pixel indices. Extents (the min-area rectangle,
//! the warp) work on pixel centers `(x + 0.5, y + 0.5)` plus a margin that
//! is half a pixel for axis-aligned sides (see [`pixel_rect`]), so a solid
//! `w × h` block measures exactly `w × h` and a single pixel `1 × 1`.

mod calipers;
mod contour;
mod convexity;
mod homography;
mod hull;
mod warp;

pub use calipers::{min_area_rect, min_area_rect_points, pixel_rect, region_rect, row_extremes};
pub use contour::{arc_length, trace_contour, Contour};
pub use convexity::{is_contour_convex, max_hull_deviation, DEFAULT_CONVEX_TOL};
pub use homography::{homography_from_quad, Homography};
pub use hull::convex_hull;
pub use warp::{upright_frame, warp_frame, warp_to_upright, UprightFrame};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("degenerate quadrilateral: {0}")]
    Singular(&'static str),
    #[error("degenerate rectangle {w:.3}x{h:.3}")]
    DegenerateRect { w: f64, h: f64 },
}

/// Real-valued image-plane point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PointF {
    pub x: f64,
    pub y: f64,
}

impl PointF {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, o: PointF) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 2D cross product.
    pub fn cross(self, o: PointF) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn scale(self, s: f64) -> PointF {
        PointF::new(self.x * s, self.y * s)
    }
}

impl std::ops::Add for PointF {
    type Output = PointF;
    fn add(self, o: PointF) -> PointF {
        PointF::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for PointF {
    type Output = PointF;
    fn sub(self, o: PointF) -> PointF {
        PointF::new(self.x - o.x, self.y - o.y)
    }
}

/// Rotated rectangle.
///
/// `size_w` runs along the unit vector at `angle` degrees from the +x axis
/// (y pointing down, so negative angles tilt the edge upward on screen);
/// `size_h` runs along that vector turned by +90°. The angle is normalized
/// to `[-90, 0)`, which means an axis-aligned rectangle reports `-90` with
/// `size_w` holding its vertical extent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotatedRect {
    pub center: PointF,
    pub size_w: f64,
    pub size_h: f64,
    pub angle: f64,
}

impl RotatedRect {
    /// Builds a rect from an arbitrary direction and the extents along it and
    /// its normal, normalizing the angle.
    pub fn from_axes(center: PointF, dir: PointF, along: f64, across: f64) -> Self {
        let mut angle = dir.y.atan2(dir.x).to_degrees();
        // fold into [-90, 90)
        while angle >= 90.0 {
            angle -= 180.0;
        }
        while angle < -90.0 {
            angle += 180.0;
        }
        let (mut w, mut h) = (along, across);
        if angle >= 0.0 {
            angle -= 90.0;
            std::mem::swap(&mut w, &mut h);
        }
        Self {
            center,
            size_w: w,
            size_h: h,
            angle,
        }
    }

    pub fn area(&self) -> f64 {
        self.size_w * self.size_h
    }

    /// Unit vectors along `size_w` and `size_h`.
    pub fn axes(&self) -> (PointF, PointF) {
        let (s, c) = self.angle.to_radians().sin_cos();
        (PointF::new(c, s), PointF::new(-s, c))
    }

    /// Corners in order: start, +w, +w+h, +h.
    pub fn corners(&self) -> [PointF; 4] {
        let (e1, e2) = self.axes();
        let hw = e1.scale(self.size_w / 2.0);
        let hh = e2.scale(self.size_h / 2.0);
        let c = self.center;
        [c - hw - hh, c + hw - hh, c + hw + hh, c - hw + hh]
    }

    /// Size of the side running closest to `dir`.
    pub fn extent_along(&self, dir: PointF) -> f64 {
        let (e1, e2) = self.axes();
        if e1.dot(dir).abs() > e2.dot(dir).abs() {
            self.size_w
        } else {
            self.size_h
        }
    }

    /// Size of the side running closest to vertical.
    pub fn vertical_extent(&self) -> f64 {
        self.extent_along(PointF::new(0.0, 1.0))
    }

    /// The shorter side.
    pub fn short_side(&self) -> f64 {
        self.size_w.min(self.size_h)
    }

    pub fn long_side(&self) -> f64 {
        self.size_w.max(self.size_h)
    }

    /// The same rect with `margin` added on every side.
    pub fn grown(&self, margin: f64) -> RotatedRect {
        RotatedRect {
            size_w: self.size_w + 2.0 * margin,
            size_h: self.size_h + 2.0 * margin,
            ..*self
        }
    }

    /// True if `p` lies inside the rect grown by `margin` on every side.
    pub fn contains(&self, p: PointF, margin: f64) -> bool {
        let (e1, e2) = self.axes();
        let d = p - self.center;
        d.dot(e1).abs() <= self.size_w / 2.0 + margin && d.dot(e2).abs() <= self.size_h / 2.0 + margin
    }
}
