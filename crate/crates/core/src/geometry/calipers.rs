//! Minimum-area enclosing rectangle by rotating calipers.
//!
//! The optimal rectangle has one side flush with a hull edge, so it suffices
//! to visit each hull edge once while four support pointers (edge start,
//! farthest along the edge, farthest from the edge, least along the edge)
//! advance monotonically around the hull.

use super::hull::convex_hull;
use super::{Contour, GeometryError, PointF, RotatedRect};
use crate::imagecore::{BinaryImage, PixelPoint};

/// Minimum-area rectangle enclosing a point set.
///
/// One point gives a zero-size rect; collinear points give a zero-height rect
/// along the segment.
pub fn min_area_rect_points(points: &[PointF]) -> Result<RotatedRect, GeometryError> {
    let hull = convex_hull(points)?;
    Ok(calipers(&hull).0)
}

/// Minimum-area rectangle of a set of pixels.
///
/// The rectangle is fitted to pixel centers and then grown on every side by
/// half the spacing between the lines of pixel centers that run parallel to
/// its sides. That is half a pixel for an axis-aligned rect, so a solid
/// `w × h` block measures exactly `w × h` and a single pixel `1 × 1`; for a
/// tilted side the lattice lines lie closer together, and so does the true
/// edge to the outermost center.
pub fn pixel_rect(pixels: &[PixelPoint]) -> Result<RotatedRect, GeometryError> {
    let centers: Vec<PointF> = pixels
        .iter()
        .map(|p| PointF::new(p.x as f64 + 0.5, p.y as f64 + 0.5))
        .collect();
    let hull = convex_hull(&centers)?;
    let (rect, edge) = calipers(&hull);
    Ok(rect.grown(lattice_margin(edge)))
}

/// Half the distance between adjacent lattice lines parallel to `edge`,
/// where `edge` joins two pixel centers.
fn lattice_margin(edge: PointF) -> f64 {
    let (mut p, mut q) = (edge.x.round().abs() as u64, edge.y.round().abs() as u64);
    if p == 0 && q == 0 {
        return 0.5;
    }
    let (mut a, mut b) = (p, q);
    while b != 0 {
        (a, b) = (b, a % b);
    }
    p /= a;
    q /= a;
    0.5 / (p as f64).hypot(q as f64)
}

/// Minimum-area rectangle of a traced contour, with the [`pixel_rect`]
/// convention.
pub fn min_area_rect(c: &Contour) -> Result<RotatedRect, GeometryError> {
    if c.is_empty() {
        return Err(GeometryError::EmptyInput("min-area rect of an empty contour"));
    }
    pixel_rect(&c.points)
}

/// Each row's leftmost and rightmost white pixel among columns `x0..x1`.
pub fn row_extremes(img: &BinaryImage, x0: usize, x1: usize) -> Vec<PixelPoint> {
    let mut out = Vec::new();
    for y in 0..img.height() {
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

/// Minimum-area rectangle of every white pixel in `img`, with the
/// [`pixel_rect`] convention.
///
/// Equals [`min_area_rect`] of the outer contour for a single component, but
/// needs no tracing: the hull of the white set is the hull of each row's
/// leftmost and rightmost pixels.
pub fn region_rect(img: &BinaryImage) -> Result<RotatedRect, GeometryError> {
    let extremes = row_extremes(img, 0, img.width());
    if extremes.is_empty() {
        return Err(GeometryError::EmptyInput("min-area rect of a black image"));
    }
    pixel_rect(&extremes)
}

/// Returns the rectangle and the hull edge it is flush with.
fn calipers(hull: &[PointF]) -> (RotatedRect, PointF) {
    match hull.len() {
        0 => unreachable!("convex_hull rejects empty input"),
        1 => {
            let x = PointF::new(1.0, 0.0);
            return (RotatedRect::from_axes(hull[0], x, 0.0, 0.0), PointF::new(0.0, 0.0));
        }
        2 => {
            let d = hull[1] - hull[0];
            let len = d.norm();
            let center = (hull[0] + hull[1]).scale(0.5);
            return (RotatedRect::from_axes(center, d.scale(1.0 / len), len, 0.0), d);
        }
        _ => {}
    }

    // work relative to the first vertex for precision
    let origin = hull[0];
    let p: Vec<PointF> = hull.iter().map(|&q| q - origin).collect();
    let n = p.len();
    let at = |i: usize| p[i % n];

    let (mut far, mut top, mut near) = (1usize, 1usize, 1usize);
    let mut best: Option<(f64, usize, PointF, f64, f64, f64, f64)> = None;
    for i in 0..n {
        let edge = at(i + 1) - at(i);
        let u = edge.scale(1.0 / edge.norm());
        // inward normal: the hull is positively oriented, interior on the left
        let v = PointF::new(-u.y, u.x);

        if i == 0 {
            far = 1;
        }
        while at(far + 1).dot(u) > at(far).dot(u) {
            far += 1;
        }
        if i == 0 {
            top = far;
        }
        while at(top + 1).dot(v) > at(top).dot(v) {
            top += 1;
        }
        if i == 0 {
            near = top;
        }
        while at(near + 1).dot(u) < at(near).dot(u) {
            near += 1;
        }

        let (a_min, a_max) = (at(near).dot(u), at(far).dot(u));
        let (b_min, b_max) = (at(i).dot(v), at(top).dot(v));
        let area = (a_max - a_min) * (b_max - b_min);
        if best.is_none_or(|b| area < b.0) {
            best = Some((area, i, u, a_min, a_max, b_min, b_max));
        }
    }

    let (_, i, u, a_min, a_max, b_min, b_max) = best.expect("hull has at least three edges");
    let v = PointF::new(-u.y, u.x);
    let center = origin + u.scale((a_min + a_max) / 2.0) + v.scale((b_min + b_max) / 2.0);
    (
        RotatedRect::from_axes(center, u, a_max - a_min, b_max - b_min),
        at(i + 1) - at(i),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::trace_contour;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Exhaustive orientation sweep in 0.05° steps over [0°, 90°).
    fn brute_force_area(points: &[PointF]) -> f64 {
        let mut best = f64::INFINITY;
        for k in 0..1800 {
            let t = (k as f64 * 0.05).to_radians();
            let (s, c) = t.sin_cos();
            let (mut a0, mut a1, mut b0, mut b1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
            for q in points {
                let a = q.x * c + q.y * s;
                let b = -q.x * s + q.y * c;
                a0 = a0.min(a);
                a1 = a1.max(a);
                b0 = b0.min(b);
                b1 = b1.max(b);
            }
            best = best.min((a1 - a0) * (b1 - b0));
        }
        best
    }

    #[test]
    fn axis_aligned_block() {
        let mut img = BinaryImage::black(30, 16);
        for y in 3..13 {
            for x in 5..25 {
                img.set(x, y, true);
            }
        }
        let r = min_area_rect(&trace_contour(&img).unwrap()).unwrap();
        assert_eq!(r.angle, -90.0);
        assert!((r.size_w - 10.0).abs() < 1e-9 && (r.size_h - 20.0).abs() < 1e-9);
        assert!((r.center.x - 15.0).abs() < 1e-9 && (r.center.y - 8.0).abs() < 1e-9);
        assert_eq!(region_rect(&img).unwrap(), r);
    }

    #[test]
    fn single_pixel_is_unit_square() {
        let mut img = BinaryImage::black(4, 4);
        img.set(1, 2, true);
        let r = min_area_rect(&trace_contour(&img).unwrap()).unwrap();
        assert!((r.size_w - 1.0).abs() < 1e-12 && (r.size_h - 1.0).abs() < 1e-12);
        assert!((r.center.x - 1.5).abs() < 1e-12 && (r.center.y - 2.5).abs() < 1e-12);
    }

    #[test]
    fn lattice_margins() {
        assert_eq!(lattice_margin(PointF::new(0.0, 0.0)), 0.5);
        assert_eq!(lattice_margin(PointF::new(-7.0, 0.0)), 0.5);
        assert!((lattice_margin(PointF::new(3.0, 3.0)) - 0.5 / 2f64.sqrt()).abs() < 1e-12);
        assert!((lattice_margin(PointF::new(4.0, -2.0)) - 0.5 / 5f64.sqrt()).abs() < 1e-12);
        // a diagonal run of three pixels
        let r = pixel_rect(&[PixelPoint::new(0, 0), PixelPoint::new(1, 1), PixelPoint::new(2, 2)]).unwrap();
        let m = 0.5 / 2f64.sqrt();
        assert!((r.long_side() - (8f64.sqrt() + 2.0 * m)).abs() < 1e-9);
        assert!((r.short_side() - 2.0 * m).abs() < 1e-9);
    }

    #[test]
    fn rotated_rectangle_measures_true_size() {
        // pixels whose centers fall inside a 120 × 30 rectangle tilted 23°
        let (s, c) = 23f64.to_radians().sin_cos();
        let mut pixels = Vec::new();
        for y in 0..200 {
            for x in 0..200 {
                let (dx, dy) = (x as f64 + 0.5 - 100.0, y as f64 + 0.5 - 100.0);
                if (dx * c + dy * s).abs() <= 60.0 && (-dx * s + dy * c).abs() <= 15.0 {
                    pixels.push(PixelPoint::new(x, y));
                }
            }
        }
        let r = pixel_rect(&pixels).unwrap();
        assert!((r.long_side() - 120.0).abs() < 0.3, "{r:?}");
        assert!((r.short_side() - 30.0).abs() < 0.3, "{r:?}");
    }

    #[test]
    fn degenerate_point_sets() {
        let r = min_area_rect_points(&[PointF::new(2.0, 3.0)]).unwrap();
        assert_eq!((r.size_w, r.size_h), (0.0, 0.0));
        let r = min_area_rect_points(&[PointF::new(0.0, 0.0), PointF::new(3.0, 4.0)]).unwrap();
        assert!((r.long_side() - 5.0).abs() < 1e-12 && r.short_side() == 0.0);
        assert!(min_area_rect_points(&[]).is_err());
    }

    #[test]
    fn matches_brute_force_sweep() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xB01D);
        for _ in 0..100 {
            let n = rng.random_range(3..=50);
            let pts: Vec<PointF> = (0..n)
                .map(|_| PointF::new(rng.random_range(0.0..100.0), rng.random_range(0.0..60.0)))
                .collect();
            let r = min_area_rect_points(&pts).unwrap();
            let brute = brute_force_area(&pts);
            assert!(
                r.area() <= brute * (1.0 + 1e-9),
                "calipers {} > sweep {}",
                r.area(),
                brute
            );
            assert!((r.area() - brute).abs() <= 0.005 * brute);
            for q in &pts {
                assert!(r.contains(*q, 1e-6));
            }
        }
    }

    #[test]
    fn never_larger_than_upright_box() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let pts: Vec<PointF> = (0..20)
                .map(|_| PointF::new(rng.random_range(-9.0..9.0), rng.random_range(-4.0..4.0)))
                .collect();
            let (x0, x1) = pts
                .iter()
                .fold((f64::MAX, f64::MIN), |a, q| (a.0.min(q.x), a.1.max(q.x)));
            let (y0, y1) = pts
                .iter()
                .fold((f64::MAX, f64::MIN), |a, q| (a.0.min(q.y), a.1.max(q.y)));
            let r = min_area_rect_points(&pts).unwrap();
            assert!(r.area() <= (x1 - x0) * (y1 - y0) + 1e-9);
            // quarter-turn invariance
            let turned: Vec<PointF> = pts.iter().map(|q| PointF::new(-q.y, q.x)).collect();
            let rt = min_area_rect_points(&turned).unwrap();
            assert!((rt.area() - r.area()).abs() <= 0.01 * r.area());
        }
    }
}
