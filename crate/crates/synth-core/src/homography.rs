//! Plane projective transforms fitted from four point correspondences.

use crate::math::{solve_linear, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum HomographyError {
    #[error("the four corners are degenerate (collinear or coincident)")]
    DegenerateCorners,
}

/// 3x3 projective transform, row-major, normalized so `m[2][2] = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Homography {
    pub m: [[f64; 3]; 3],
}

impl Homography {
    pub const IDENTITY: Homography = Homography {
        m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    };

    /// Fit the homography mapping `src[i]` to `dst[i]` by the direct
    /// linear method (8 unknowns, one 8x8 solve).
    pub fn from_correspondences(
        src: &[Vec2; 4],
        dst: &[Vec2; 4],
    ) -> Result<Homography, HomographyError> {
        let mut a = [0.0; 64];
        let mut b = [0.0; 8];
        for i in 0..4 {
            let (x, y) = (src[i].x, src[i].y);
            let (u, v) = (dst[i].x, dst[i].y);
            let r = 2 * i;
            a[r * 8..r * 8 + 8]
                .copy_from_slice(&[x, y, 1.0, 0.0, 0.0, 0.0, -x * u, -y * u]);
            b[r] = u;
            let r = r + 1;
            a[r * 8..r * 8 + 8]
                .copy_from_slice(&[0.0, 0.0, 0.0, x, y, 1.0, -x * v, -y * v]);
            b[r] = v;
        }
        solve_linear(&mut a, &mut b, 8).ok_or(HomographyError::DegenerateCorners)?;
        Ok(Homography {
            m: [
                [b[0], b[1], b[2]],
                [b[3], b[4], b[5]],
                [b[6], b[7], 1.0],
            ],
        })
    }

    /// Homography taking the unit square (0,0),(1,0),(1,1),(0,1) to the
    /// given corners (same ordering).
    pub fn unit_square_to(corners: &[Vec2; 4]) -> Result<Homography, HomographyError> {
        let unit = [
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 1.0),
        ];
        Self::from_correspondences(&unit, corners)
    }

    pub fn apply(&self, p: Vec2) -> Vec2 {
        let m = &self.m;
        let w = m[2][0] * p.x + m[2][1] * p.y + m[2][2];
        Vec2::new(
            (m[0][0] * p.x + m[0][1] * p.y + m[0][2]) / w,
            (m[1][0] * p.x + m[1][1] * p.y + m[1][2]) / w,
        )
    }

    pub fn inverse(&self) -> Result<Homography, HomographyError> {
        let m = &self.m;
        let c00 = m[1][1] * m[2][2] - m[1][2] * m[2][1];
        let c01 = m[1][2] * m[2][0] - m[1][0] * m[2][2];
        let c02 = m[1][0] * m[2][1] - m[1][1] * m[2][0];
        let det = m[0][0] * c00 + m[0][1] * c01 + m[0][2] * c02;
        if libm::fabs(det) < 1e-15 {
            return Err(HomographyError::DegenerateCorners);
        }
        let adj = [
            [c00, m[0][2] * m[2][1] - m[0][1] * m[2][2], m[0][1] * m[1][2] - m[0][2] * m[1][1]],
            [c01, m[0][0] * m[2][2] - m[0][2] * m[2][0], m[0][2] * m[1][0] - m[0][0] * m[1][2]],
            [c02, m[0][1] * m[2][0] - m[0][0] * m[2][1], m[0][0] * m[1][1] - m[0][1] * m[1][0]],
        ];
        let norm = adj[2][2] / det;
        if norm == 0.0 {
            return Err(HomographyError::DegenerateCorners);
        }
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = adj[i][j] / det / norm;
            }
        }
        Ok(Homography { m: out })
    }

    /// True when the transform is a translation by `(dx, dy)` within `eps`
    /// on every matrix entry.
    pub fn is_translation(&self, eps: f64) -> Option<Vec2> {
        let m = &self.m;
        let affine_ok = libm::fabs(m[0][0] - 1.0) < eps
            && libm::fabs(m[0][1]) < eps
            && libm::fabs(m[1][0]) < eps
            && libm::fabs(m[1][1] - 1.0) < eps
            && libm::fabs(m[2][0]) < eps
            && libm::fabs(m[2][1]) < eps;
        affine_ok.then(|| Vec2::new(m[0][2], m[1][2]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_fit() {
        let pts = [
            Vec2::new(0.0, 0.0),
            Vec2::new(5.0, 0.0),
            Vec2::new(5.0, 3.0),
            Vec2::new(0.0, 3.0),
        ];
        let h = Homography::from_correspondences(&pts, &pts).unwrap();
        for p in pts {
            let q = h.apply(p);
            assert!((q - p).norm() < 1e-9);
        }
        assert!(h.is_translation(1e-9).is_some());
    }

    #[test]
    fn translation_fit_recovers_offset() {
        let src = [
            Vec2::new(1.0, 1.0),
            Vec2::new(9.0, 1.0),
            Vec2::new(9.0, 7.0),
            Vec2::new(1.0, 7.0),
        ];
        let dst = src.map(|p| p + Vec2::new(5.0, -3.0));
        let h = Homography::from_correspondences(&src, &dst).unwrap();
        let t = h.is_translation(1e-9).unwrap();
        assert!((t.x - 5.0).abs() < 1e-9 && (t.y + 3.0).abs() < 1e-9);
    }

    #[test]
    fn general_fit_maps_corners_exactly() {
        let src = [
            Vec2::new(0.0, 0.0),
            Vec2::new(100.0, 0.0),
            Vec2::new(100.0, 60.0),
            Vec2::new(0.0, 60.0),
        ];
        let dst = [
            Vec2::new(3.0, -2.0),
            Vec2::new(97.0, 8.0),
            Vec2::new(104.0, 55.0),
            Vec2::new(-6.0, 63.0),
        ];
        let h = Homography::from_correspondences(&src, &dst).unwrap();
        for i in 0..4 {
            assert!((h.apply(src[i]) - dst[i]).norm() < 1e-6);
        }
        let inv = h.inverse().unwrap();
        for i in 0..4 {
            assert!((inv.apply(dst[i]) - src[i]).norm() < 1e-6);
        }
    }

    #[test]
    fn collinear_corners_rejected() {
        let src = [
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(2.0, 2.0),
            Vec2::new(3.0, 3.0),
        ];
        let dst = src;
        assert_eq!(
            Homography::from_correspondences(&src, &dst),
            Err(HomographyError::DegenerateCorners)
        );
    }
}
