//! Region annotation records: one JSON object per sample.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use synth_core::math::Vec2;
use synth_core::mesher::Quad;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleLabel {
    Live,
    Print,
    Replay,
}

impl SampleLabel {
    pub fn is_spoof(self) -> bool {
        !matches!(self, SampleLabel::Live)
    }
}

/// One annotated sample: `{"image": path, "corners": [[x,y] x 4],
/// "eye_px_dist": number, "label": "live"|"print"|"replay"}`.
/// Corner order: top-left, top-right, bottom-right, bottom-left.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegionAnnotation {
    pub image: String,
    pub corners: [[f64; 2]; 4],
    pub eye_px_dist: f64,
    pub label: SampleLabel,
}

impl RegionAnnotation {
    pub fn quad(&self) -> Result<Quad> {
        Quad::new(self.corners.map(|[x, y]| Vec2::new(x, y)))
            .with_context(|| format!("invalid corner annotation for {}", self.image))
    }
}

/// Read a JSONL dataset manifest of annotations; blank lines are skipped.
pub fn load_annotations(path: &Path) -> Result<Vec<RegionAnnotation>> {
    let file = File::open(path).with_context(|| format!("cannot open manifest {path:?}"))?;
    let mut out = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: RegionAnnotation = serde_json::from_str(&line)
            .with_context(|| format!("bad annotation at {path:?}:{}", lineno + 1))?;
        out.push(rec);
    }
    Ok(out)
}

/// Parse corners from the CLI form `"x,y;x,y;x,y;x,y"`.
pub fn parse_corners(s: &str) -> Result<[[f64; 2]; 4]> {
    let parts: Vec<&str> = s.split(';').collect();
    anyhow::ensure!(parts.len() == 4, "expected 4 corners separated by ';'");
    let mut out = [[0.0; 2]; 4];
    for (i, p) in parts.iter().enumerate() {
        let (x, y) = p
            .split_once(',')
            .with_context(|| format!("corner {i}: expected x,y"))?;
        out[i] = [x.trim().parse()?, y.trim().parse()?];
    }
    Ok(out)
}
