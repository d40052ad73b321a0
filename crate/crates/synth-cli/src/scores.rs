//! CSV score files for the evaluation commands.
//!
//! Columns: `sample_id,score,truth,attack_type,split`. `truth` is
//! `live` or `spoof`; `attack_type` is `none`, `plane_print`,
//! `bent_print`, or `replay`; `split` is free-form (conventionally
//! `train`, `dev`, or `test`).

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use synth_core::metrics::{AttackType, ScoreRecord, Truth};

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Row {
    sample_id: String,
    score: f64,
    truth: String,
    attack_type: String,
    split: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitScore {
    pub record: ScoreRecord,
    pub split: String,
}

fn parse_truth(s: &str) -> Result<Truth> {
    match s {
        "live" => Ok(Truth::Live),
        "spoof" => Ok(Truth::Spoof),
        _ => bail!("unknown truth {s:?}"),
    }
}

fn parse_attack(s: &str) -> Result<AttackType> {
    match s {
        "none" => Ok(AttackType::None),
        "plane_print" => Ok(AttackType::PlanePrint),
        "bent_print" => Ok(AttackType::BentPrint),
        "replay" => Ok(AttackType::Replay),
        _ => bail!("unknown attack type {s:?}"),
    }
}

fn truth_str(t: Truth) -> &'static str {
    match t {
        Truth::Live => "live",
        Truth::Spoof => "spoof",
    }
}

fn attack_str(a: AttackType) -> &'static str {
    match a {
        AttackType::None => "none",
        AttackType::PlanePrint => "plane_print",
        AttackType::BentPrint => "bent_print",
        AttackType::Replay => "replay",
    }
}

pub fn read_scores(path: &Path) -> Result<Vec<SplitScore>> {
    let mut reader = csv::Reader::from_path(path)
        .with_context(|| format!("cannot open score file {path:?}"))?;
    let mut out = Vec::new();
    for (i, row) in reader.deserialize::<Row>().enumerate() {
        let row = row.with_context(|| format!("bad score row {} in {path:?}", i + 2))?;
        out.push(SplitScore {
            record: ScoreRecord {
                sample_id: row.sample_id,
                score: row.score,
                truth: parse_truth(&row.truth)?,
                attack_type: parse_attack(&row.attack_type)?,
            },
            split: row.split,
        });
    }
    Ok(out)
}

pub fn write_scores(path: &Path, scores: &[SplitScore]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)
        .with_context(|| format!("cannot create score file {path:?}"))?;
    for s in scores {
        writer.serialize(Row {
            sample_id: s.record.sample_id.clone(),
            score: s.record.score,
            truth: truth_str(s.record.truth).into(),
            attack_type: attack_str(s.record.attack_type).into(),
            split: s.split.clone(),
        })?;
    }
    writer.flush()?;
    Ok(())
}

/// Records of one split, without the split tag.
pub fn of_split<'a>(scores: &'a [SplitScore], split: &str) -> Vec<ScoreRecord> {
    scores
        .iter()
        .filter(|s| s.split == split)
        .map(|s| s.record.clone())
        .collect()
}
