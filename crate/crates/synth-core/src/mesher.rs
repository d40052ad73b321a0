//! Printed-photo region cropping and planar mesh construction.
//!
//! The annotated quad is treated as the perspective image of a planar
//! rectangle, so rectification resamples through a 4-point homography.
//! The rectified texture is then spanned by a uniform grid mesh whose
//! cells are split along the top-left to bottom-right diagonal, which is
//! a valid (deterministic) Delaunay triangulation of a uniform grid.

use alloc::vec::Vec;

use crate::homography::Homography;
use crate::image::{quantize, RgbImage};
use crate::math::{Vec2, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum MeshError {
    #[error("quad corners are not a strictly convex positive-area polygon")]
    DegenerateQuad,
    #[error("output texture dimensions must be at least 2x2")]
    EmptyOutput,
    #[error("grid must be at least 2x2 anchors")]
    InvalidGrid,
    #[error("mesh extent must be positive")]
    InvalidExtent,
}

/// Four ordered corner anchors of the printed-photo region, in source
/// image pixel coordinates: top-left, top-right, bottom-right,
/// bottom-left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quad {
    pub corners: [Vec2; 4],
}

impl Quad {
    /// Validates strict convexity, consistent winding, positive area and
    /// pairwise corner separation (> 1 px).
    pub fn new(corners: [Vec2; 4]) -> Result<Quad, MeshError> {
        for i in 0..4 {
            for j in i + 1..4 {
                if (corners[i] - corners[j]).norm() <= 1.0 {
                    return Err(MeshError::DegenerateQuad);
                }
            }
        }
        // Cross products at every corner must share a sign (strict
        // convexity, no self-intersection).
        let mut sign = 0.0_f64;
        for i in 0..4 {
            let a = corners[i];
            let b = corners[(i + 1) % 4];
            let c = corners[(i + 2) % 4];
            let cross = (b.x - a.x) * (c.y - b.y) - (b.y - a.y) * (c.x - b.x);
            if cross == 0.0 || (sign != 0.0 && cross.signum() != sign) {
                return Err(MeshError::DegenerateQuad);
            }
            sign = cross.signum();
        }
        if Self::shoelace_area(&corners) <= 0.0 {
            return Err(MeshError::DegenerateQuad);
        }
        Ok(Quad { corners })
    }

    fn shoelace_area(corners: &[Vec2; 4]) -> f64 {
        let mut s = 0.0;
        for i in 0..4 {
            let a = corners[i];
            let b = corners[(i + 1) % 4];
            s += a.x * b.y - b.x * a.y;
        }
        libm::fabs(s) * 0.5
    }

    pub fn area(&self) -> f64 {
        Self::shoelace_area(&self.corners)
    }

    pub fn centroid(&self) -> Vec2 {
        let mut c = Vec2::default();
        for p in self.corners {
            c = c + p;
        }
        c * 0.25
    }

    /// Default rectified texture size: rounded average of opposite edge
    /// lengths, floored at 2.
    pub fn default_out_dims(&self) -> (u32, u32) {
        let [tl, tr, br, bl] = self.corners;
        let w = ((tr - tl).norm() + (br - bl).norm()) * 0.5;
        let h = ((bl - tl).norm() + (br - tr).norm()) * 0.5;
        ((libm::round(w) as u32).max(2), (libm::round(h) as u32).max(2))
    }
}

/// Gridded triangle mesh with per-vertex position (object units) and
/// texture coordinates. Vertex `(i, j)` of the `m x n` grid lives at
/// index `j * m + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh3D {
    pub vertices: Vec<Vec3>,
    pub uvs: Vec<Vec2>,
    pub triangles: Vec<[u32; 3]>,
    /// (m columns, n rows) of grid anchors.
    pub grid_dims: (u32, u32),
    /// (width l, height h) in object units.
    pub extent: (f64, f64),
}

impl Mesh3D {
    pub fn centroid(&self) -> Vec3 {
        let mut c = Vec3::default();
        for v in &self.vertices {
            c = c + *v;
        }
        c * (1.0 / self.vertices.len() as f64)
    }

    /// Indices of the four grid-corner vertices in quad order
    /// (top-left, top-right, bottom-right, bottom-left).
    pub fn corner_indices(&self) -> [usize; 4] {
        let (m, n) = (self.grid_dims.0 as usize, self.grid_dims.1 as usize);
        [0, m - 1, m * n - 1, m * (n - 1)]
    }

    /// Sum of triangle areas in 3D.
    pub fn surface_area(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let a = self.vertices[t[0] as usize];
                let b = self.vertices[t[1] as usize];
                let c = self.vertices[t[2] as usize];
                (b - a).cross(c - a).norm() * 0.5
            })
            .sum()
    }
}

/// Resample the quad region of `image` into a `W x H` texture through the
/// homography that maps the unit square onto the quad. Texel centers map
/// to `((i+0.5)/W, (j+0.5)/H)` in the unit square; samples outside the
/// source clamp to the nearest edge pixel.
pub fn rectify_region(
    image: &RgbImage,
    quad: &Quad,
    out_dims: (u32, u32),
) -> Result<RgbImage, MeshError> {
    let (w, h) = out_dims;
    if w < 2 || h < 2 {
        return Err(MeshError::EmptyOutput);
    }
    let hom = Homography::unit_square_to(&quad.corners).map_err(|_| MeshError::DegenerateQuad)?;
    let mut out = RgbImage::new(w, h);
    for j in 0..h {
        for i in 0..w {
            let u = (i as f64 + 0.5) / w as f64;
            let v = (j as f64 + 0.5) / h as f64;
            let p = hom.apply(Vec2::new(u, v));
            let s = image.sample_bilinear(p.x, p.y);
            out.put(i, j, [quantize(s[0]), quantize(s[1]), quantize(s[2])]);
        }
    }
    Ok(out)
}

/// Build a planar `m x n` anchor grid spanning `x in [0, l]`,
/// `y in [0, h]`, `z = 0`, with uv `(i/(m-1), j/(n-1))` and a
/// per-cell diagonal split.
pub fn build_planar_mesh(extent: (f64, f64), grid: (u32, u32)) -> Result<Mesh3D, MeshError> {
    let (l, h) = extent;
    let (m, n) = grid;
    if m < 2 || n < 2 {
        return Err(MeshError::InvalidGrid);
    }
    if !(l > 0.0) || !(h > 0.0) {
        return Err(MeshError::InvalidExtent);
    }
    let (mu, nu) = (m as usize, n as usize);
    let mut vertices = Vec::with_capacity(mu * nu);
    let mut uvs = Vec::with_capacity(mu * nu);
    for j in 0..nu {
        for i in 0..mu {
            let u = i as f64 / (mu - 1) as f64;
            let v = j as f64 / (nu - 1) as f64;
            vertices.push(Vec3::new(u * l, v * h, 0.0));
            uvs.push(Vec2::new(u, v));
        }
    }
    let mut triangles = Vec::with_capacity(2 * (mu - 1) * (nu - 1));
    for j in 0..nu - 1 {
        for i in 0..mu - 1 {
            let a = (j * mu + i) as u32;
            let b = a + 1;
            let c = a + 1 + m;
            let d = a + m;
            // diagonal a-c (top-left to bottom-right)
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }
    Ok(Mesh3D {
        vertices,
        uvs,
        triangles,
        grid_dims: grid,
        extent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeMap;

    fn rect_quad(x0: f64, y0: f64, x1: f64, y1: f64) -> Quad {
        Quad::new([
            Vec2::new(x0, y0),
            Vec2::new(x1, y0),
            Vec2::new(x1, y1),
            Vec2::new(x0, y1),
        ])
        .unwrap()
    }

    fn gradient_image(w: u32, h: u32) -> RgbImage {
        let mut img = RgbImage::new(w, h);
        for y in 0..h {
            for x in 0..w {
                img.put(x, y, [(x % 256) as u8, (y % 256) as u8, ((x + 2 * y) % 256) as u8]);
            }
        }
        img
    }

    #[test]
    fn coincident_corners_rejected() {
        let r = Quad::new([
            Vec2::new(0.0, 0.0),
            Vec2::new(0.0, 0.0),
            Vec2::new(10.0, 10.0),
            Vec2::new(0.0, 10.0),
        ]);
        assert_eq!(r, Err(MeshError::DegenerateQuad));
    }

    #[test]
    fn concave_quad_rejected() {
        let r = Quad::new([
            Vec2::new(0.0, 0.0),
            Vec2::new(10.0, 0.0),
            Vec2::new(3.0, 3.0),
            Vec2::new(0.0, 10.0),
        ]);
        assert_eq!(r, Err(MeshError::DegenerateQuad));
    }

    #[test]
    fn axis_aligned_rectify_equals_direct_crop() {
        let img = gradient_image(160, 100);
        let quad = rect_quad(10.0, 10.0, 110.0, 60.0);
        let tex = rectify_region(&img, &quad, (100, 50)).unwrap();
        for j in 0..50 {
            for i in 0..100 {
                let got = tex.get(i, j);
                let want = img.get(10 + i, 10 + j);
                for c in 0..3 {
                    assert!(
                        (got[c] as i16 - want[c] as i16).abs() <= 1,
                        "texel ({i},{j}) channel {c}: {got:?} vs {want:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn rotated_square_matches_inverse_homography_oracle() {
        // 30 degree in-plane rotation of a square about its center.
        let img = gradient_image(200, 200);
        let (cx, cy, r) = (100.0, 100.0, 40.0);
        let ang = 30.0_f64.to_radians();
        let base = [(-r, -r), (r, -r), (r, r), (-r, r)];
        let corners = base.map(|(x, y)| {
            Vec2::new(
                cx + x * ang.cos() - y * ang.sin(),
                cy + x * ang.sin() + y * ang.cos(),
            )
        });
        let quad = Quad::new(corners).unwrap();
        let tex = rectify_region(&img, &quad, (64, 64)).unwrap();

        // Oracle: solve the 4-point homography directly (normal equations
        // on the standard DLT rows are overkill for 4 exact points; direct
        // linear solve suffices) and resample per pixel.
        let unit = [
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 1.0),
        ];
        let hom = Homography::from_correspondences(&unit, &corners).unwrap();
        for j in 0..64u32 {
            for i in 0..64u32 {
                let p = hom.apply(Vec2::new((i as f64 + 0.5) / 64.0, (j as f64 + 0.5) / 64.0));
                let s = img.sample_bilinear(p.x, p.y);
                let got = tex.get(i, j);
                for c in 0..3 {
                    assert!(
                        (got[c] as f64 - s[c]).abs() <= 2.0,
                        "texel ({i},{j}) channel {c}"
                    );
                }
            }
        }
    }

    #[test]
    fn rectify_rejects_tiny_output() {
        let img = gradient_image(32, 32);
        let quad = rect_quad(2.0, 2.0, 30.0, 30.0);
        assert_eq!(rectify_region(&img, &quad, (1, 50)), Err(MeshError::EmptyOutput));
    }

    #[test]
    fn default_out_dims_of_rectangle() {
        let quad = rect_quad(10.0, 10.0, 110.0, 60.0);
        assert_eq!(quad.default_out_dims(), (100, 50));
    }

    #[test]
    fn minimal_grid_counts_and_corner_uvs() {
        let mesh = build_planar_mesh((200.0, 150.0), (2, 2)).unwrap();
        assert_eq!(mesh.vertices.len(), 4);
        assert_eq!(mesh.triangles.len(), 2);
        let uvs: Vec<(f64, f64)> = mesh
            .corner_indices()
            .iter()
            .map(|&i| (mesh.uvs[i].x, mesh.uvs[i].y))
            .collect();
        assert_eq!(uvs, vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
    }

    #[test]
    fn triangle_count_law() {
        let mesh = build_planar_mesh((10.0, 10.0), (5, 4)).unwrap();
        assert_eq!(mesh.vertices.len(), 20);
        assert_eq!(mesh.triangles.len(), 24);
    }

    #[test]
    fn center_vertex_of_3x3() {
        let mesh = build_planar_mesh((100.0, 100.0), (3, 3)).unwrap();
        let v = mesh.vertices[4];
        assert_eq!((v.x, v.y, v.z), (50.0, 50.0, 0.0));
        assert_eq!((mesh.uvs[4].x, mesh.uvs[4].y), (0.5, 0.5));
    }

    #[test]
    fn invalid_params_rejected() {
        assert_eq!(build_planar_mesh((10.0, 10.0), (1, 4)), Err(MeshError::InvalidGrid));
        assert_eq!(build_planar_mesh((0.0, 10.0), (4, 4)), Err(MeshError::InvalidExtent));
        assert_eq!(build_planar_mesh((10.0, -1.0), (4, 4)), Err(MeshError::InvalidExtent));
    }

    #[test]
    fn surface_area_equals_extent_product() {
        for (m, n) in [(2u32, 2u32), (5, 7), (32, 32)] {
            let mesh = build_planar_mesh((123.0, 45.0), (m, n)).unwrap();
            let rel = (mesh.surface_area() - 123.0 * 45.0).abs() / (123.0 * 45.0);
            assert!(rel < 1e-9, "grid {m}x{n}: rel err {rel}");
        }
    }

    #[test]
    fn grid_is_watertight() {
        // every interior edge shared by exactly 2 triangles, boundary by 1
        let mesh = build_planar_mesh((10.0, 10.0), (6, 5)).unwrap();
        let mut edges: BTreeMap<(u32, u32), u32> = BTreeMap::new();
        for t in &mesh.triangles {
            for k in 0..3 {
                let a = t[k];
                let b = t[(k + 1) % 3];
                *edges.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        let m = 6u32;
        for (&(a, b), &count) in &edges {
            let (ax, ay) = (a % m, a / m);
            let (bx, by) = (b % m, b / m);
            let boundary = (ay == 0 && by == 0)
                || (ay == 4 && by == 4)
                || (ax == 0 && bx == 0)
                || (ax == 5 && bx == 5);
            if boundary {
                assert_eq!(count, 1, "boundary edge {a}-{b}");
            } else {
                assert_eq!(count, 2, "interior edge {a}-{b}");
            }
        }
    }

    #[test]
    fn triangles_consistently_oriented_in_uv() {
        let mesh = build_planar_mesh((10.0, 10.0), (4, 4)).unwrap();
        for t in &mesh.triangles {
            let a = mesh.uvs[t[0] as usize];
            let b = mesh.uvs[t[1] as usize];
            let c = mesh.uvs[t[2] as usize];
            let cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
            assert!(cross > 0.0);
        }
    }
}
