use nalgebra::{Matrix3, SMatrix, SVector, Vector3};

use super::{GeometryError, PointF};

/// Projective map of the plane, normalized so the bottom-right entry is 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Homography {
    m: Matrix3<f64>,
}

impl Homography {
    pub fn identity() -> Self {
        Self { m: Matrix3::identity() }
    }

    /// Row-major entries.
    pub fn from_rows(rows: [[f64; 3]; 3]) -> Result<Self, GeometryError> {
        let m = Matrix3::from_fn(|r, c| rows[r][c]);
        Self::normalized(m)
    }

    fn normalized(m: Matrix3<f64>) -> Result<Self, GeometryError> {
        let s = m[(2, 2)];
        if s.abs() < 1e-12 {
            return Err(GeometryError::Singular("homography has zero scale entry"));
        }
        let m = m / s;
        if m.fixed_view::<2, 2>(0, 0).determinant().abs() < 1e-12 && m.determinant().abs() < 1e-12 {
            return Err(GeometryError::Singular("homography is not invertible"));
        }
        Ok(Self { m })
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.m[(row, col)]
    }

    pub fn apply(&self, p: PointF) -> PointF {
        let v = self.m * Vector3::new(p.x, p.y, 1.0);
        PointF::new(v.x / v.z, v.y / v.z)
    }

    pub fn inverse(&self) -> Result<Homography, GeometryError> {
        let inv = self
            .m
            .try_inverse()
            .ok_or(GeometryError::Singular("homography is not invertible"))?;
        Self::normalized(inv)
    }

    /// Largest absolute entry difference.
    pub fn max_abs_diff(&self, other: &Homography) -> f64 {
        (self.m - other.m).abs().max()
    }
}

fn has_collinear_triple(q: &[PointF; 4]) -> bool {
    let scale = q
        .iter()
        .flat_map(|a| q.iter().map(move |b| (*a - *b).norm()))
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return true;
    }
    for i in 0..4 {
        for j in i + 1..4 {
            for k in j + 1..4 {
                if (q[j] - q[i]).cross(q[k] - q[i]).abs() <= 1e-9 * scale * scale {
                    return true;
                }
            }
        }
    }
    false
}

/// Exact 8-DOF homography sending `src[i]` to `dst[i]`.
///
/// Solves the standard 8×8 system with the bottom-right entry fixed at 1.
pub fn homography_from_quad(src: &[PointF; 4], dst: &[PointF; 4]) -> Result<Homography, GeometryError> {
    if has_collinear_triple(src) {
        return Err(GeometryError::Singular("source quad has three collinear corners"));
    }
    if has_collinear_triple(dst) {
        return Err(GeometryError::Singular("destination quad has three collinear corners"));
    }
    let mut a = SMatrix::<f64, 8, 8>::zeros();
    let mut b = SVector::<f64, 8>::zeros();
    for i in 0..4 {
        let (x, y) = (src[i].x, src[i].y);
        let (u, v) = (dst[i].x, dst[i].y);
        let r = 2 * i;
        a.set_row(
            r,
            &SMatrix::<f64, 1, 8>::from_row_slice(&[x, y, 1.0, 0.0, 0.0, 0.0, -x * u, -y * u]),
        );
        a.set_row(
            r + 1,
            &SMatrix::<f64, 1, 8>::from_row_slice(&[0.0, 0.0, 0.0, x, y, 1.0, -x * v, -y * v]),
        );
        b[r] = u;
        b[r + 1] = v;
    }
    let h = a
        .lu()
        .solve(&b)
        .ok_or(GeometryError::Singular("quad correspondence system is singular"))?;
    Homography::normalized(Matrix3::new(h[0], h[1], h[2], h[3], h[4], h[5], h[6], h[7], 1.0))
}
