//! PNG/JPEG load and save for the core RGB buffer type.

use std::path::Path;

use anyhow::{Context, Result};
use synth_core::image::RgbImage;

pub fn load(path: &Path) -> Result<RgbImage> {
    let img = image::open(path)
        .with_context(|| format!("cannot read image {path:?}"))?
        .to_rgb8();
    let (w, h) = img.dimensions();
    RgbImage::from_raw(w, h, img.into_raw()).context("inconsistent image buffer")
}

pub fn save(path: &Path, img: &RgbImage) -> Result<()> {
    let buf: image::RgbImage =
        image::ImageBuffer::from_raw(img.width(), img.height(), img.as_raw().to_vec())
            .context("inconsistent image buffer")?;
    buf.save(path)
        .with_context(|| format!("cannot write image {path:?}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn png_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.png");
        let mut img = RgbImage::new(7, 5);
        img.put(3, 2, [1, 2, 3]);
        save(&path, &img).unwrap();
        let back = load(&path).unwrap();
        assert_eq!(back, img);
    }
}
