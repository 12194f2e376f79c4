use super::{GeometryError, PointF};

/// Convex hull by Andrew's monotone chain.
///
/// Returns the hull counter-clockwise in the mathematical sense (positive
/// shoelace area on raw `(x, y)`; on a y-down screen this reads clockwise),
/// starting from the lowest-x, lowest-y point. Collinear points are dropped,
/// so all-collinear input yields its two extremes and a single distinct point
/// yields one vertex.
pub fn convex_hull(points: &[PointF]) -> Result<Vec<PointF>, GeometryError> {
    if points.is_empty() {
        return Err(GeometryError::EmptyInput("convex hull of no points"));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return Ok(pts);
    }

    let turn = |o: PointF, a: PointF, b: PointF| (a - o).cross(b - o);
    let mut hull: Vec<PointF> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    Ok(hull)
}

/// Twice the signed area.
#[cfg(test)]
fn signed_area2(poly: &[PointF]) -> f64 {
    (0..poly.len()).map(|i| poly[i].cross(poly[(i + 1) % poly.len()])).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(x: f64, y: f64) -> PointF {
        PointF::new(x, y)
    }

    #[test]
    fn square_with_center() {
        let hull = convex_hull(&[p(0., 0.), p(2., 0.), p(2., 2.), p(0., 2.), p(1., 1.)]).unwrap();
        assert_eq!(hull, vec![p(0., 0.), p(2., 0.), p(2., 2.), p(0., 2.)]);
        assert!(signed_area2(&hull) > 0.0);
    }

    #[test]
    fn collinear_gives_extremes() {
        let hull = convex_hull(&[p(1., 1.), p(3., 3.), p(0., 0.), p(2., 2.)]).unwrap();
        assert_eq!(hull, vec![p(0., 0.), p(3., 3.)]);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(convex_hull(&[]).is_err());
        assert_eq!(convex_hull(&[p(1., 2.), p(1., 2.)]).unwrap(), vec![p(1., 2.)]);
    }

    #[test]
    fn random_points_inside_hull() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pts: Vec<PointF> = (0..200)
            .map(|_| p(rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0)))
            .collect();
        let hull = convex_hull(&pts).unwrap();
        for q in &pts {
            for i in 0..hull.len() {
                let (a, b) = (hull[i], hull[(i + 1) % hull.len()]);
                assert!((b - a).cross(*q - a) >= -1e-9, "point outside hull edge");
            }
        }
        // strictly convex: no collinear triples remain
        for i in 0..hull.len() {
            let (a, b, c) = (hull[i], hull[(i + 1) % hull.len()], hull[(i + 2) % hull.len()]);
            assert!((b - a).cross(c - b) > 0.0);
        }
    }
}
