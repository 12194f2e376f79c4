//! 8-connected foreground labeling over horizontal runs.
//!
//! Each row is split into maximal white runs; runs in adjacent rows are merged
//! with a union-find when their column ranges touch, diagonals included.

use super::{AxisRect, BinaryImage};

/// One connected white region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    /// Tight bounding rect in the source image.
    pub rect: AxisRect,
    /// Mask of size `rect.w × rect.h` holding only this component's pixels.
    pub mask: BinaryImage,
    /// White pixel count.
    pub area: usize,
}

#[derive(Debug, Clone, Copy)]
struct Run {
    y: usize,
    x0: usize,
    /// exclusive
    x1: usize,
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }
}

fn row_runs(img: &BinaryImage, y: usize, out: &mut Vec<Run>) {
    let row = img.row(y);
    let mut x = 0;
    while x < row.len() {
        if row[x] {
            let start = x;
            while x < row.len() && row[x] {
                x += 1;
            }
            out.push(Run { y, x0: start, x1: x });
        } else {
            x += 1;
        }
    }
}

/// Labels all 8-connected white regions.
///
/// Components are ordered by the top-left corner of their bounding rect
/// (row first, then column); ties fall back to the first pixel in raster
/// order. Components touching the border are kept.
pub fn connected_components(img: &BinaryImage) -> Vec<Component> {
    let mut runs = Vec::new();
    let mut row_start = Vec::with_capacity(img.height() + 1);
    for y in 0..img.height() {
        row_start.push(runs.len());
        row_runs(img, y, &mut runs);
    }
    row_start.push(runs.len());

    let mut uf = UnionFind::new(runs.len());
    for y in 1..img.height() {
        let prev = row_start[y - 1]..row_start[y];
        let cur = row_start[y]..row_start[y + 1];
        let (mut i, mut j) = (prev.start, cur.start);
        while i < prev.end && j < cur.end {
            let (p, c) = (runs[i], runs[j]);
            // ranges [x0, x1) touch diagonally when p.x0 <= c.x1 and c.x0 <= p.x1
            if p.x0 <= c.x1 && c.x0 <= p.x1 {
                uf.union(i, j);
            }
            if p.x1 < c.x1 {
                i += 1;
            } else {
                j += 1;
            }
        }
    }

    // group runs by root, preserving raster order of first appearance
    let mut slot_of_root = vec![usize::MAX; runs.len()];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for idx in 0..runs.len() {
        let root = uf.find(idx);
        if slot_of_root[root] == usize::MAX {
            slot_of_root[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot_of_root[root]].push(idx);
    }

    let mut comps: Vec<Component> = groups
        .into_iter()
        .map(|members| {
            let (mut x0, mut x1) = (usize::MAX, 0);
            let y0 = runs[members[0]].y;
            let mut y1 = y0;
            let mut area = 0;
            for &m in &members {
                let r = runs[m];
                x0 = x0.min(r.x0);
                x1 = x1.max(r.x1);
                y1 = y1.max(r.y);
                area += r.x1 - r.x0;
            }
            let rect = AxisRect::new(x0, y0, x1 - x0, y1 - y0 + 1);
            let mut mask = BinaryImage::black(rect.w, rect.h);
            for &m in &members {
                let r = runs[m];
                for x in r.x0..r.x1 {
                    mask.set(x - x0, r.y - y0, true);
                }
            }
            Component { rect, mask, area }
        })
        .collect();
    // stable sort keeps raster order of first pixel for equal corners
    comps.sort_by_key(|c| (c.rect.y, c.rect.x));
    comps
}

/// Drops components smaller than `min_area` pixels.
pub fn filter_min_area(components: Vec<Component>, min_area: usize) -> Vec<Component> {
    components.into_iter().filter(|c| c.area >= min_area).collect()
}
