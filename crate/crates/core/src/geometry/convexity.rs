use super::hull::convex_hull;
use super::{Contour, PointF};

/// Default slack for pixelated edges, in pixels.
pub const DEFAULT_CONVEX_TOL: f64 = 1.5;

fn dist_to_segment(q: PointF, a: PointF, b: PointF) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return (q - a).norm();
    }
    let t = ((q - a).dot(ab) / len2).clamp(0.0, 1.0);
    (q - (a + ab.scale(t))).norm()
}

/// Largest distance from a contour point to the boundary of the contour's
/// convex hull. Zero for a convex contour.
pub fn max_hull_deviation(c: &Contour) -> f64 {
    let pts: Vec<PointF> = c.points.iter().map(|p| PointF::new(p.x as f64, p.y as f64)).collect();
    let Ok(hull) = convex_hull(&pts) else {
        return 0.0;
    };
    if hull.len() < 3 {
        return 0.0;
    }
    pts.iter()
        .map(|&q| {
            (0..hull.len())
                .map(|i| dist_to_segment(q, hull[i], hull[(i + 1) % hull.len()]))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Convexity with tolerance for digitization noise.
///
/// A pixel contour is convex when every turn has the same sign; here a turn
/// of the wrong sign is tolerated when the dent it makes lies within `tol`
/// pixels of the convex hull. Fewer than three distinct points count as
/// convex.
pub fn is_contour_convex(c: &Contour, tol: f64) -> bool {
    max_hull_deviation(c) <= tol
}
