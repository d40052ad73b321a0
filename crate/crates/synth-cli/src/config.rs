//! Key-value configuration file for the synthesis pipeline.
//!
//! Format: one `key = value` pair per line, `#` starts a comment.
//! Recognized keys (all optional, defaults in parentheses):
//!
//! ```text
//! camera.f_px            focal length in px (derived as s * d_z_mm)
//! camera.d_z_mm          camera-to-photo standoff depth (400)
//! camera.d_r_mm          real inter-eye distance (63)
//! camera.projection      perspective | weak (perspective)
//! composite.feather_sigma  Gaussian seam std-dev, px (2)
//! composite.band         blend band half-width, px (3 * sigma)
//! composite.realign      on | off (on)
//! mesher.grid            anchor grid, "MxN" (32x32)
//! raster.perspective_correct  on | off (off)
//! pipeline.bend_axis     vertical | horizontal (vertical)
//! pipeline.mirror_yaw    on | off (off) - mirror the yaw sign with p=1/2
//! ```

use std::path::Path;

use anyhow::{bail, Context, Result};
use synth_core::composite::CompositeConfig;
use synth_core::deform::BendAxis;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Projection {
    Perspective,
    Weak,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub f_px: Option<f64>,
    pub d_z_mm: f64,
    pub d_r_mm: f64,
    pub projection: Projection,
    pub feather_sigma: f64,
    pub feather_band: Option<f64>,
    pub realign: bool,
    pub grid: (u32, u32),
    pub perspective_correct: bool,
    pub bend_axis: BendAxis,
    pub mirror_yaw: bool,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            f_px: None,
            d_z_mm: 400.0,
            d_r_mm: 63.0,
            projection: Projection::Perspective,
            feather_sigma: 2.0,
            feather_band: None,
            realign: true,
            grid: (32, 32),
            perspective_correct: false,
            bend_axis: BendAxis::Vertical,
            mirror_yaw: false,
        }
    }
}

impl SynthConfig {
    pub fn composite(&self) -> CompositeConfig {
        CompositeConfig {
            feather_sigma: self.feather_sigma,
            feather_band: self.feather_band.unwrap_or(3.0 * self.feather_sigma),
            realign: self.realign,
        }
    }

    pub fn load(path: &Path) -> Result<SynthConfig> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("cannot read config {path:?}"))?;
        Self::parse(&text).with_context(|| format!("in config {path:?}"))
    }

    pub fn parse(text: &str) -> Result<SynthConfig> {
        let mut cfg = SynthConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .with_context(|| format!("line {}: expected key = value", lineno + 1))?;
            let (key, value) = (key.trim(), value.trim());
            let ctx = || format!("line {}: bad value for {key}", lineno + 1);
            match key {
                "camera.f_px" => cfg.f_px = Some(value.parse().with_context(ctx)?),
                "camera.d_z_mm" => cfg.d_z_mm = value.parse().with_context(ctx)?,
                "camera.d_r_mm" => cfg.d_r_mm = value.parse().with_context(ctx)?,
                "camera.projection" => {
                    cfg.projection = match value {
                        "perspective" => Projection::Perspective,
                        "weak" => Projection::Weak,
                        _ => bail!("line {}: unknown projection {value:?}", lineno + 1),
                    }
                }
                "composite.feather_sigma" => cfg.feather_sigma = value.parse().with_context(ctx)?,
                "composite.band" => cfg.feather_band = Some(value.parse().with_context(ctx)?),
                "composite.realign" => cfg.realign = parse_switch(value).with_context(ctx)?,
                "mesher.grid" => {
                    let (m, n) = value
                        .split_once('x')
                        .with_context(|| format!("line {}: grid must be MxN", lineno + 1))?;
                    cfg.grid = (m.trim().parse().with_context(ctx)?, n.trim().parse().with_context(ctx)?);
                }
                "raster.perspective_correct" => {
                    cfg.perspective_correct = parse_switch(value).with_context(ctx)?
                }
                "pipeline.bend_axis" => {
                    cfg.bend_axis = match value {
                        "vertical" => BendAxis::Vertical,
                        "horizontal" => BendAxis::Horizontal,
                        _ => bail!("line {}: unknown bend axis {value:?}", lineno + 1),
                    }
                }
                "pipeline.mirror_yaw" => cfg.mirror_yaw = parse_switch(value).with_context(ctx)?,
                _ => bail!("line {}: unknown config key {key:?}", lineno + 1),
            }
        }
        Ok(cfg)
    }
}

fn parse_switch(v: &str) -> Result<bool> {
    match v {
        "on" | "true" | "1" => Ok(true),
        "off" | "false" | "0" => Ok(false),
        _ => bail!("expected on/off"),
    }
}
