//! Output manifest records (JSONL) and live-pool merging.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use crate::pipeline::SynthesisParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordLabel {
    Live,
    Print,
    Replay,
    SyntheticSpoof,
}

/// One output manifest line. Synthetic records carry `params` and
/// `parent_id` (the index of the source record in the input manifest);
/// pass-through originals carry neither.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRecord {
    pub source_path: String,
    pub output_path: String,
    pub label: RecordLabel,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub params: Option<SynthesisParams>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub parent_id: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub origin: Option<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum MergeError {
    #[error("external manifest contains a non-live record: {0}")]
    NonLiveExternal(String),
}

/// Union of a base manifest and an external all-live pool; external
/// records are tagged `origin = "external"`.
pub fn merge_external_live(
    base: &[ManifestRecord],
    external: &[ManifestRecord],
) -> Result<Vec<ManifestRecord>, MergeError> {
    if let Some(bad) = external.iter().find(|r| r.label != RecordLabel::Live) {
        return Err(MergeError::NonLiveExternal(bad.source_path.clone()));
    }
    let mut out = base.to_vec();
    out.extend(external.iter().map(|r| ManifestRecord {
        origin: Some("external".into()),
        ..r.clone()
    }));
    Ok(out)
}

pub fn write_manifest(path: &Path, records: &[ManifestRecord]) -> Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {path:?}"))?;
    let mut w = BufWriter::new(file);
    for rec in records {
        serde_json::to_writer(&mut w, rec)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestRecord>> {
    let file = File::open(path).with_context(|| format!("cannot open manifest {path:?}"))?;
    let mut out = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: ManifestRecord = serde_json::from_str(&line)
            .with_context(|| format!("bad record at {path:?}:{}", lineno + 1))?;
        out.push(rec);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn live(n: usize) -> Vec<ManifestRecord> {
        (0..n)
            .map(|i| ManifestRecord {
                source_path: format!("live{i}.png"),
                output_path: format!("live{i}.png"),
                label: RecordLabel::Live,
                params: None,
                seed: 0,
                parent_id: None,
                origin: None,
            })
            .collect()
    }

    #[test]
    fn merge_counts_are_additive() {
        let base = live(240);
        let ext = live(8120);
        let merged = merge_external_live(&base, &ext).unwrap();
        assert_eq!(merged.len(), 8360);
        assert_eq!(
            merged.iter().filter(|r| r.origin.as_deref() == Some("external")).count(),
            8120
        );
    }

    #[test]
    fn empty_external_is_identity() {
        let base = live(5);
        let merged = merge_external_live(&base, &[]).unwrap();
        assert_eq!(merged, base);
    }

    #[test]
    fn non_live_external_rejected() {
        let base = live(1);
        let mut ext = live(2);
        ext[1].label = RecordLabel::Print;
        assert!(matches!(
            merge_external_live(&base, &ext),
            Err(MergeError::NonLiveExternal(_))
        ));
    }

    #[test]
    fn jsonl_round_trip_skips_absent_fields() {
        let rec = &live(1)[0];
        let line = serde_json::to_string(rec).unwrap();
        assert!(!line.contains("params"));
        assert!(!line.contains("parent_id"));
        let back: ManifestRecord = serde_json::from_str(&line).unwrap();
        assert_eq!(&back, rec);
    }
}
