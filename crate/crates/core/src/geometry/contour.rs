use serde::{Deserialize, Serialize};

use super::GeometryError;
use crate::imagecore::{BinaryImage, PixelPoint};

/// Closed outer boundary of one white region, as pixel indices.
///
/// Consecutive points (and the last/first pair) are 8-neighbors. The loop
/// runs with positive shoelace area on raw coordinates, i.e. rightward along
/// the top edge first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contour {
    pub points: Vec<PixelPoint>,
}

impl Contour {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Moore neighborhood, clockwise on screen starting at west.
const NEIGHBORS: [(i64, i64); 8] = [(-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1)];

fn dir_index(dx: i64, dy: i64) -> usize {
    NEIGHBORS
        .iter()
        .position(|&d| d == (dx, dy))
        .expect("backtrack is always an 8-neighbor")
}

/// Moore-neighbor boundary following.
///
/// Starts at the topmost-then-leftmost white pixel with the backtrack at its
/// west neighbor. The walk is a deterministic function of (pixel, backtrack),
/// so it stops when the very first transition out of the start pixel is about
/// to repeat; this also closes loops that pass through the start pixel more
/// than once. Holes are ignored. With several components present, the first
/// in raster order is traced.
pub fn trace_contour(img: &BinaryImage) -> Result<Contour, GeometryError> {
    let start_idx = img
        .as_slice()
        .iter()
        .position(|&p| p)
        .ok_or(GeometryError::EmptyInput("no white pixels to trace"))?;
    let start = ((start_idx % img.width()) as i64, (start_idx / img.width()) as i64);

    let mut points = vec![PixelPoint::new(start.0 as usize, start.1 as usize)];
    let (mut cur, mut back) = (start, (start.0 - 1, start.1));
    let mut first_move = None;
    let limit = 4 * img.count_white() + 8;
    loop {
        let first = dir_index(back.0 - cur.0, back.1 - cur.1);
        let mut prev = back;
        let mut next = None;
        for k in 0..8 {
            let (dx, dy) = NEIGHBORS[(first + k) % 8];
            let cand = (cur.0 + dx, cur.1 + dy);
            if img.get_signed(cand.0, cand.1) {
                next = Some(cand);
                break;
            }
            prev = cand;
        }
        let Some(next) = next else {
            // isolated pixel
            break;
        };
        if cur == start {
            match first_move {
                None => first_move = Some((next, prev)),
                Some(m) if m == (next, prev) => break,
                Some(_) => {}
            }
        }
        points.push(PixelPoint::new(next.0 as usize, next.1 as usize));
        cur = next;
        back = prev;
        if points.len() > limit {
            break;
        }
    }
    // the walk re-entered the start pixel before stopping
    if points.len() > 1 && points.last() == points.first() {
        points.pop();
    }
    Ok(Contour { points })
}

/// Closed polyline length: 1 per axial step, √2 per diagonal step.
pub fn arc_length(c: &Contour) -> f64 {
    let n = c.points.len();
    if n < 2 {
        return 0.0;
    }
    (0..n)
        .map(|i| {
            let (a, b) = (c.points[i], c.points[(i + 1) % n]);
            let dx = a.x.abs_diff(b.x) as f64;
            let dy = a.y.abs_diff(b.y) as f64;
            dx.hypot(dy)
        })
        .sum()
}
