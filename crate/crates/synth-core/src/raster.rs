//! Software triangle rasterizer with Z-buffer hidden-surface removal.
//!
//! Pixel centers sit at half-integer coordinates. Coverage follows the
//! top-left fill rule so adjacent triangles never write the same pixel
//! twice. Triangles are iterated in index order and the depth test is a
//! strict less-than, so output is bit-identical across runs. Texture
//! coordinates are interpolated in screen space by default
//! (perspective-correct interpolation is available behind an option).

use alloc::vec;
use alloc::vec::Vec;

use crate::camera::ProjectedMesh;
use crate::image::{quantize, RgbImage};
use crate::math::Vec2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum RasterError {
    #[error("viewport must be at least 1x1")]
    EmptyViewport,
}

/// Target window in projection space: layer pixel `(px, py)` has its
/// center at `origin + (px + 0.5, py + 0.5)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Viewport {
    pub width: u32,
    pub height: u32,
    pub origin: Vec2,
}

impl Viewport {
    /// Smallest integer-origin viewport containing all projected points,
    /// expanded by `pad` pixels on every side.
    pub fn around(points: &[Vec2], pad: u32) -> Viewport {
        let mut min = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut max = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in points {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
        }
        let ox = libm::floor(min.x) - pad as f64;
        let oy = libm::floor(min.y) - pad as f64;
        Viewport {
            width: (libm::ceil(max.x) - ox) as u32 + pad,
            height: (libm::ceil(max.y) - oy) as u32 + pad,
            origin: Vec2::new(ox, oy),
        }
    }
}

/// Rendered photo layer: color, binary coverage, depth buffer and the
/// layer's offset in the enclosing coordinate frame.
#[derive(Debug, Clone, PartialEq)]
pub struct RenderLayer {
    pub color: RgbImage,
    pub coverage: Vec<bool>,
    pub zbuffer: Vec<f64>,
    pub origin: Vec2,
}

impl RenderLayer {
    pub fn blank(width: u32, height: u32, origin: Vec2) -> RenderLayer {
        RenderLayer {
            color: RgbImage::new(width, height),
            coverage: vec![false; (width * height) as usize],
            zbuffer: vec![f64::INFINITY; (width * height) as usize],
            origin,
        }
    }

    pub fn width(&self) -> u32 {
        self.color.width()
    }

    pub fn height(&self) -> u32 {
        self.color.height()
    }

    #[inline]
    pub fn idx(&self, x: u32, y: u32) -> usize {
        (y * self.width() + x) as usize
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RasterOptions {
    pub perspective_correct: bool,
}

#[inline]
fn orient(a: Vec2, b: Vec2, p: Vec2) -> f64 {
    (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x)
}

/// Top-left rule for an edge `a -> b` of a positively wound triangle
/// (y grows downward): horizontal top edges run rightward, left edges
/// run upward.
#[inline]
fn edge_is_top_left(a: Vec2, b: Vec2) -> bool {
    (a.y == b.y && b.x > a.x) || b.y < a.y
}

pub fn rasterize(
    pm: &ProjectedMesh,
    tex: &RgbImage,
    viewport: Viewport,
) -> Result<RenderLayer, RasterError> {
    rasterize_with(pm, tex, viewport, RasterOptions::default())
}

pub fn rasterize_with(
    pm: &ProjectedMesh,
    tex: &RgbImage,
    viewport: Viewport,
    opts: RasterOptions,
) -> Result<RenderLayer, RasterError> {
    if viewport.width == 0 || viewport.height == 0 {
        return Err(RasterError::EmptyViewport);
    }
    let mut layer = RenderLayer::blank(viewport.width, viewport.height, viewport.origin);
    let (w, h) = (viewport.width as i64, viewport.height as i64);

    for tri in &pm.triangles {
        // local copies, reordered to positive winding
        let mut idx = [tri[0] as usize, tri[1] as usize, tri[2] as usize];
        let local = |i: usize| pm.points[i] - viewport.origin;
        let mut area = orient(local(idx[0]), local(idx[1]), local(idx[2]));
        if area == 0.0 {
            continue;
        }
        if area < 0.0 {
            idx.swap(1, 2);
            area = -area;
        }
        let [a, b, c] = [local(idx[0]), local(idx[1]), local(idx[2])];
        let [za, zb, zc] = [pm.depths[idx[0]], pm.depths[idx[1]], pm.depths[idx[2]]];
        let [ua, ub, uc] = [pm.uvs[idx[0]], pm.uvs[idx[1]], pm.uvs[idx[2]]];

        let x0 = (libm::floor(a.x.min(b.x).min(c.x)) as i64).clamp(0, w - 1);
        let x1 = (libm::ceil(a.x.max(b.x).max(c.x)) as i64).clamp(0, w - 1);
        let y0 = (libm::floor(a.y.min(b.y).min(c.y)) as i64).clamp(0, h - 1);
        let y1 = (libm::ceil(a.y.max(b.y).max(c.y)) as i64).clamp(0, h - 1);

        let tl = [
            edge_is_top_left(b, c),
            edge_is_top_left(c, a),
            edge_is_top_left(a, b),
        ];
        for py in y0..=y1 {
            for px in x0..=x1 {
                let p = Vec2::new(px as f64 + 0.5, py as f64 + 0.5);
                let ws = [orient(b, c, p), orient(c, a, p), orient(a, b, p)];
                let inside = ws
                    .iter()
                    .zip(&tl)
                    .all(|(&wv, &top_left)| wv > 0.0 || (wv == 0.0 && top_left));
                if !inside {
                    continue;
                }
                let l0 = ws[0] / area;
                let l1 = ws[1] / area;
                let l2 = ws[2] / area;
                let depth = l0 * za + l1 * zb + l2 * zc;
                let i = layer.idx(px as u32, py as u32);
                if depth >= layer.zbuffer[i] {
                    continue;
                }
                let (u, v) = if opts.perspective_correct {
                    let iz = l0 / za + l1 / zb + l2 / zc;
                    (
                        (l0 * ua.x / za + l1 * ub.x / zb + l2 * uc.x / zc) / iz,
                        (l0 * ua.y / za + l1 * ub.y / zb + l2 * uc.y / zc) / iz,
                    )
                } else {
                    (
                        l0 * ua.x + l1 * ub.x + l2 * uc.x,
                        l0 * ua.y + l1 * ub.y + l2 * uc.y,
                    )
                };
                let s = tex.sample_bilinear(u * tex.width() as f64, v * tex.height() as f64);
                layer.zbuffer[i] = depth;
                layer.coverage[i] = true;
                layer
                    .color
                    .put(px as u32, py as u32, [quantize(s[0]), quantize(s[1]), quantize(s[2])]);
            }
        }
    }
    Ok(layer)
}
