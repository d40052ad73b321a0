//! Owned RGB8 image buffer with bilinear sampling.
//!
//! Convention used throughout the crate: pixel `(i, j)` occupies the unit
//! square `[i, i+1) x [j, j+1)` and its center sits at `(i + 0.5, j + 0.5)`
//! in continuous image coordinates.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: u32,
    height: u32,
    data: Vec<u8>, // RGB, row-major
}

impl RgbImage {
    pub fn new(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            data: vec![0; (width as usize) * (height as usize) * 3],
        }
    }

    pub fn from_raw(width: u32, height: u32, data: Vec<u8>) -> Option<Self> {
        if data.len() != (width as usize) * (height as usize) * 3 {
            return None;
        }
        Some(Self {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn as_raw(&self) -> &[u8] {
        &self.data
    }

    pub fn into_raw(self) -> Vec<u8> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> [u8; 3] {
        let i = ((y as usize) * (self.width as usize) + x as usize) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    #[inline]
    pub fn put(&mut self, x: u32, y: u32, px: [u8; 3]) {
        let i = ((y as usize) * (self.width as usize) + x as usize) * 3;
        self.data[i..i + 3].copy_from_slice(&px);
    }

    /// Texel value with integer coordinates clamped to the image bounds.
    #[inline]
    pub fn get_clamped(&self, x: i64, y: i64) -> [u8; 3] {
        let x = x.clamp(0, self.width as i64 - 1) as u32;
        let y = y.clamp(0, self.height as i64 - 1) as u32;
        self.get(x, y)
    }

    /// Bilinear sample at a continuous position; out-of-range positions
    /// clamp to the nearest edge pixel. A position exactly on a pixel
    /// center returns that pixel unchanged.
    pub fn sample_bilinear(&self, x: f64, y: f64) -> [f64; 3] {
        let fx = x - 0.5;
        let fy = y - 0.5;
        let x0 = libm::floor(fx) as i64;
        let y0 = libm::floor(fy) as i64;
        let tx = fx - x0 as f64;
        let ty = fy - y0 as f64;
        let p00 = self.get_clamped(x0, y0);
        let p10 = self.get_clamped(x0 + 1, y0);
        let p01 = self.get_clamped(x0, y0 + 1);
        let p11 = self.get_clamped(x0 + 1, y0 + 1);
        let mut out = [0.0; 3];
        for c in 0..3 {
            let top = p00[c] as f64 * (1.0 - tx) + p10[c] as f64 * tx;
            let bot = p01[c] as f64 * (1.0 - tx) + p11[c] as f64 * tx;
            out[c] = top * (1.0 - ty) + bot * ty;
        }
        out
    }
}

/// Round an interpolated channel value to u8 with clamping.
#[inline]
pub fn quantize(v: f64) -> u8 {
    libm::round(v.clamp(0.0, 255.0)) as u8
}
