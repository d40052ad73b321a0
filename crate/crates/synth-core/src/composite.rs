//! Layer re-alignment and seam-feathered compositing.
//!
//! `realign_corners` fits the 4-point homography taking the projected
//! mesh corners onto the annotated quad corners and warps the rendered
//! layer by it, so the synthetic photo fully overlaps the original
//! printed-photo region. `feather_blend` pastes the layer into the
//! source image with an alpha ramp obtained by Gaussian-blurring the
//! coverage mask inside a band around the coverage boundary; everything
//! outside that band is a hard paste.

use alloc::vec;
use alloc::vec::Vec;

use crate::homography::{Homography, HomographyError};
use crate::image::{quantize, RgbImage};
use crate::math::Vec2;
use crate::mesher::Quad;
use crate::raster::RenderLayer;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum CompositeError {
    #[error("projected corners are collinear or coincident")]
    DegenerateCorners,
}

impl From<HomographyError> for CompositeError {
    fn from(_: HomographyError) -> Self {
        CompositeError::DegenerateCorners
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompositeConfig {
    /// Gaussian std-dev of the edge feather, px. 0 disables feathering.
    pub feather_sigma: f64,
    /// Half-width of the blend band around the coverage boundary, px.
    pub feather_band: f64,
    pub realign: bool,
}

impl Default for CompositeConfig {
    fn default() -> Self {
        CompositeConfig {
            feather_sigma: 2.0,
            feather_band: 6.0,
            realign: true,
        }
    }
}

/// Warp `layer` (color, coverage, zbuffer) into the frame of `hom`,
/// where `hom` maps layer-local continuous coordinates to destination
/// coordinates. The output origin is integral.
pub fn warp_layer(layer: &RenderLayer, hom: &Homography) -> Result<RenderLayer, CompositeError> {
    // Integral pure translations move buffers without resampling.
    if let Some(t) = hom.is_translation(1e-12) {
        if libm::fabs(t.x - libm::round(t.x)) < 1e-9 && libm::fabs(t.y - libm::round(t.y)) < 1e-9 {
            let mut out = layer.clone();
            out.origin = Vec2::new(libm::round(t.x), libm::round(t.y));
            return Ok(out);
        }
    }
    let inv = hom.inverse()?;
    let (w, h) = (layer.width() as f64, layer.height() as f64);
    let rect = [
        Vec2::new(0.0, 0.0),
        Vec2::new(w, 0.0),
        Vec2::new(w, h),
        Vec2::new(0.0, h),
    ];
    let mut min = Vec2::new(f64::INFINITY, f64::INFINITY);
    let mut max = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in rect {
        let q = hom.apply(p);
        min.x = min.x.min(q.x);
        min.y = min.y.min(q.y);
        max.x = max.x.max(q.x);
        max.y = max.y.max(q.y);
    }
    let ox = libm::floor(min.x) - 1.0;
    let oy = libm::floor(min.y) - 1.0;
    let ow = (libm::ceil(max.x) - ox) as u32 + 1;
    let oh = (libm::ceil(max.y) - oy) as u32 + 1;
    let mut out = RenderLayer::blank(ow, oh, Vec2::new(ox, oy));
    for y in 0..oh {
        for x in 0..ow {
            let dst = Vec2::new(ox + x as f64 + 0.5, oy + y as f64 + 0.5);
            let src = inv.apply(dst);
            if src.x < 0.0 || src.y < 0.0 || src.x > w || src.y > h {
                continue;
            }
            let cov = sample_mask(&layer.coverage, layer.width(), layer.height(), src);
            if cov < 0.5 {
                continue;
            }
            let i = out.idx(x, y);
            out.coverage[i] = true;
            let c = layer.color.sample_bilinear(src.x, src.y);
            out.color.put(x, y, [quantize(c[0]), quantize(c[1]), quantize(c[2])]);
            out.zbuffer[i] =
                sample_depth(&layer.zbuffer, &layer.coverage, layer.width(), layer.height(), src);
        }
    }
    Ok(out)
}

/// Bilinear sample of a binary mask, zero-extended outside the buffer.
fn sample_mask(mask: &[bool], w: u32, h: u32, p: Vec2) -> f64 {
    let fx = p.x - 0.5;
    let fy = p.y - 0.5;
    let x0 = libm::floor(fx) as i64;
    let y0 = libm::floor(fy) as i64;
    let tx = fx - x0 as f64;
    let ty = fy - y0 as f64;
    let at = |x: i64, y: i64| -> f64 {
        if x < 0 || y < 0 || x >= w as i64 || y >= h as i64 {
            0.0
        } else {
            mask[(y as u32 * w + x as u32) as usize] as u8 as f64
        }
    };
    let top = at(x0, y0) * (1.0 - tx) + at(x0 + 1, y0) * tx;
    let bot = at(x0, y0 + 1) * (1.0 - tx) + at(x0 + 1, y0 + 1) * tx;
    top * (1.0 - ty) + bot * ty
}

/// Bilinear depth sample restricted to covered texels (weights of
/// uncovered neighbors are dropped and the rest renormalized).
fn sample_depth(z: &[f64], mask: &[bool], w: u32, h: u32, p: Vec2) -> f64 {
    let fx = p.x - 0.5;
    let fy = p.y - 0.5;
    let x0 = libm::floor(fx) as i64;
    let y0 = libm::floor(fy) as i64;
    let tx = fx - x0 as f64;
    let ty = fy - y0 as f64;
    let mut acc = 0.0;
    let mut wsum = 0.0;
    for (dx, dy, wgt) in [
        (0, 0, (1.0 - tx) * (1.0 - ty)),
        (1, 0, tx * (1.0 - ty)),
        (0, 1, (1.0 - tx) * ty),
        (1, 1, tx * ty),
    ] {
        let (x, y) = (x0 + dx, y0 + dy);
        if x < 0 || y < 0 || x >= w as i64 || y >= h as i64 {
            continue;
        }
        let i = (y as u32 * w + x as u32) as usize;
        if mask[i] {
            acc += z[i] * wgt;
            wsum += wgt;
        }
    }
    if wsum > 0.0 {
        acc / wsum
    } else {
        f64::INFINITY
    }
}

/// Re-align the rendered layer so its four grid corners land exactly on
/// the annotated quad corners. `projected_corners` are given in the same
/// coordinate frame as `layer.origin`; the output layer lives in source
/// image coordinates.
pub fn realign_corners(
    layer: &RenderLayer,
    projected_corners: &[Vec2; 4],
    quad: &Quad,
) -> Result<RenderLayer, CompositeError> {
    let local = projected_corners.map(|p| p - layer.origin);
    let hom = Homography::from_correspondences(&local, &quad.corners)?;
    warp_layer(layer, &hom)
}

/// Place the layer by pure translation (realign off): the projection
/// principal point goes to the quad centroid, rounded to an integral
/// pixel offset so no resampling happens.
pub fn place_by_translation(layer: &RenderLayer, quad: &Quad) -> RenderLayer {
    let c = quad.centroid();
    let t = Vec2::new(
        libm::round(layer.origin.x + c.x),
        libm::round(layer.origin.y + c.y),
    );
    let mut out = layer.clone();
    out.origin = t;
    out
}

/// Sampled Gaussian kernel truncated at 3 sigma, normalized.
fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = libm::ceil(3.0 * sigma) as i64;
    let mut k: Vec<f64> = (-radius..=radius)
        .map(|i| libm::exp(-(i as f64 * i as f64) / (2.0 * sigma * sigma)))
        .collect();
    let sum: f64 = k.iter().sum();
    for v in &mut k {
        *v /= sum;
    }
    k
}

/// Pixels within `band` (Chebyshev) steps of the coverage boundary.
fn boundary_band(mask: &[bool], w: usize, h: usize, band: usize) -> Vec<bool> {
    let at = |x: i64, y: i64| -> bool {
        x >= 0 && y >= 0 && x < w as i64 && y < h as i64 && mask[y as usize * w + x as usize]
    };
    let mut cur = vec![false; w * h];
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let c = at(x, y);
            let edge = [(1, 0), (-1, 0), (0, 1), (0, -1)]
                .iter()
                .any(|&(dx, dy)| at(x + dx, y + dy) != c);
            // uncovered pixels adjacent to the layer edge are not a seam
            if edge && (c || [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)]
                .iter()
                .any(|&(dx, dy)| at(x + dx, y + dy)))
            {
                cur[(y as usize) * w + x as usize] = true;
            }
        }
    }
    for _ in 1..band.max(1) {
        let prev = cur.clone();
        for y in 0..h as i64 {
            for x in 0..w as i64 {
                if prev[y as usize * w + x as usize] {
                    continue;
                }
                let near = (-1..=1).any(|dy: i64| {
                    (-1..=1).any(|dx: i64| {
                        let (nx, ny) = (x + dx, y + dy);
                        nx >= 0
                            && ny >= 0
                            && nx < w as i64
                            && ny < h as i64
                            && prev[ny as usize * w + nx as usize]
                    })
                });
                if near {
                    cur[y as usize * w + x as usize] = true;
                }
            }
        }
    }
    cur
}

/// Separable Gaussian blur of the coverage mask, zero-extended.
fn blur_mask(mask: &[bool], w: usize, h: usize, sigma: f64) -> Vec<f64> {
    let k = gaussian_kernel(sigma);
    let radius = (k.len() / 2) as i64;
    let mut tmp = vec![0.0f64; w * h];
    for y in 0..h {
        for x in 0..w as i64 {
            let mut acc = 0.0;
            for (ki, &kw) in k.iter().enumerate() {
                let sx = x + ki as i64 - radius;
                if sx >= 0 && sx < w as i64 && mask[y * w + sx as usize] {
                    acc += kw;
                }
            }
            tmp[y * w + x as usize] = acc;
        }
    }
    let mut out = vec![0.0f64; w * h];
    for y in 0..h as i64 {
        for x in 0..w {
            let mut acc = 0.0;
            for (ki, &kw) in k.iter().enumerate() {
                let sy = y + ki as i64 - radius;
                if sy >= 0 && sy < h as i64 {
                    acc += kw * tmp[sy as usize * w + x];
                }
            }
            out[y as usize * w + x] = acc;
        }
    }
    out
}

/// Blend the layer into the source image. Output dimensions equal the
/// source; layer parts outside the source are clipped.
pub fn feather_blend(source: &RgbImage, layer: &RenderLayer, cfg: &CompositeConfig) -> RgbImage {
    let mut out = source.clone();
    let (lw, lh) = (layer.width() as usize, layer.height() as usize);
    let (ox, oy) = (layer.origin.x as i64, layer.origin.y as i64);
    let feather = cfg.feather_sigma > 0.0 && cfg.feather_band > 0.0;
    let (band, alpha, extended) = if feather {
        let band = boundary_band(
            &layer.coverage,
            lw,
            lh,
            libm::ceil(cfg.feather_band) as usize,
        );
        let alpha = blur_mask(&layer.coverage, lw, lh, cfg.feather_sigma);
        let steps = libm::ceil(cfg.feather_band + 3.0 * cfg.feather_sigma) as usize;
        let extended = extend_colors(layer, steps);
        (band, alpha, extended)
    } else {
        (Vec::new(), Vec::new(), Vec::new())
    };
    for ly in 0..lh {
        for lx in 0..lw {
            let fx = ox + lx as i64;
            let fy = oy + ly as i64;
            if fx < 0 || fy < 0 || fx >= source.width() as i64 || fy >= source.height() as i64 {
                continue;
            }
            let i = ly * lw + lx;
            let a = if feather && band[i] {
                alpha[i]
            } else if layer.coverage[i] {
                1.0
            } else {
                0.0
            };
            if a <= 0.0 {
                continue;
            }
            let (fx, fy) = (fx as u32, fy as u32);
            if a >= 1.0 {
                out.put(fx, fy, layer.color.get(lx as u32, ly as u32));
                continue;
            }
            // off coverage the layer has no color; fade toward the
            // nearest rendered content, extended outward from the seam
            let lc = match extended[i] {
                Some(c) => c,
                None => continue,
            };
            let sc = out.get(fx, fy);
            let mut px = [0u8; 3];
            for c in 0..3 {
                px[c] = quantize(lc[c] as f64 * a + sc[c] as f64 * (1.0 - a));
            }
            out.put(fx, fy, px);
        }
    }
    out
}

/// Layer colors extended outward from the coverage boundary: each
/// uncovered pixel takes the mean of its colored 8-neighbors, repeated
/// for `steps` rounds. Pixels still unreached stay `None`.
fn extend_colors(layer: &RenderLayer, steps: usize) -> Vec<Option<[u8; 3]>> {
    let (w, h) = (layer.width() as usize, layer.height() as usize);
    let mut cur: Vec<Option<[u8; 3]>> = (0..w * h)
        .map(|i| {
            layer.coverage[i]
                .then(|| layer.color.get((i % w) as u32, (i / w) as u32))
        })
        .collect();
    for _ in 0..steps {
        let prev = cur.clone();
        for y in 0..h as i64 {
            for x in 0..w as i64 {
                let i = y as usize * w + x as usize;
                if prev[i].is_some() {
                    continue;
                }
                let mut acc = [0u32; 3];
                let mut n = 0u32;
                for dy in -1i64..=1 {
                    for dx in -1i64..=1 {
                        let (nx, ny) = (x + dx, y + dy);
                        if nx >= 0 && ny >= 0 && nx < w as i64 && ny < h as i64 {
                            if let Some(c) = prev[ny as usize * w + nx as usize] {
                                for k in 0..3 {
                                    acc[k] += c[k] as u32;
                                }
                                n += 1;
                            }
                        }
                    }
                }
                if n > 0 {
                    cur[i] = Some([
                        (acc[0] / n) as u8,
                        (acc[1] / n) as u8,
                        (acc[2] / n) as u8,
                    ]);
                }
            }
        }
    }
    cur
}
