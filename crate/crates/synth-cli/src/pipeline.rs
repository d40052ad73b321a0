//! Batch synthesis orchestration with deterministic seeding.
//!
//! Per printed-photo spoof the recipe emits ten synthetic samples (five
//! rotated and bent, five rotated only); per replay spoof, five rotated
//! samples (replay devices cannot be bent). Yaw is drawn uniformly from
//! [0, 40] degrees, pitch from [-10, 10], bending from [30, 60].
//!
//! Each (record, slot) pair owns an RNG stream derived from the run
//! seed, so output is byte-identical regardless of worker count.

use std::path::{Path, PathBuf};
use std::sync::Mutex;

use anyhow::{Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use synth_core::camera::{pixel_scale, project_perspective, project_weak, to_world};
use synth_core::composite::{feather_blend, place_by_translation, realign_corners};
use synth_core::deform::{bend_horizontal, bend_vertical, rotate, BendAxis, RotationSpec};
use synth_core::image::RgbImage;
use synth_core::math::Vec2;
use synth_core::mesher::{build_planar_mesh, rectify_region};
use synth_core::raster::{rasterize_with, RasterOptions, RenderLayer, Viewport};

use crate::annot::{RegionAnnotation, SampleLabel};
use crate::config::{Projection, SynthConfig};
use crate::imageio;
use crate::manifest::{write_manifest, ManifestRecord, RecordLabel};

pub const YAW_RANGE_DEG: (f64, f64) = (0.0, 40.0);
pub const PITCH_RANGE_DEG: (f64, f64) = (-10.0, 10.0);
pub const BEND_RANGE_DEG: (f64, f64) = (30.0, 60.0);
pub const PRINT_SLOTS: u32 = 10;
pub const REPLAY_SLOTS: u32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthMode {
    RotateOnly,
    RotateAndBend,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BendAxisParam {
    Vertical,
    Horizontal,
}

impl From<BendAxisParam> for BendAxis {
    fn from(a: BendAxisParam) -> BendAxis {
        match a {
            BendAxisParam::Vertical => BendAxis::Vertical,
            BendAxisParam::Horizontal => BendAxis::Horizontal,
        }
    }
}

impl From<BendAxis> for BendAxisParam {
    fn from(a: BendAxis) -> BendAxisParam {
        match a {
            BendAxis::Vertical => BendAxisParam::Vertical,
            BendAxis::Horizontal => BendAxisParam::Horizontal,
        }
    }
}

/// One sample's transformation parameters, in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthesisParams {
    pub yaw_deg: f64,
    pub pitch_deg: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bend_deg: Option<f64>,
    pub bend_axis: BendAxisParam,
    pub mode: SynthMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum ParamError {
    #[error("slot out of range for this label")]
    SlotOutOfRange,
}

/// Number of synthesis slots for a spoof label; live samples get none.
pub fn slots_for(label: SampleLabel) -> u32 {
    match label {
        SampleLabel::Print => PRINT_SLOTS,
        SampleLabel::Replay => REPLAY_SLOTS,
        SampleLabel::Live => 0,
    }
}

/// The per-sample RNG stream for (run seed, record index, slot).
pub fn sample_rng(seed: u64, record_idx: u64, slot: u32) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(record_idx * 64 + slot as u64 + 1);
    rng
}

/// Draw one parameter set. Print slots 0-4 are rotate-and-bend, slots
/// 5-9 rotate only; replay slots 0-4 rotate only. Draw order is fixed:
/// yaw, pitch, then bend for bent slots, then the yaw mirror sign when
/// enabled. The bend axis comes from configuration, not the stream.
pub fn sample_params(
    rng: &mut impl Rng,
    label: SampleLabel,
    slot: u32,
    bend_axis: BendAxis,
    mirror_yaw: bool,
) -> Result<SynthesisParams, ParamError> {
    if slot >= slots_for(label) {
        return Err(ParamError::SlotOutOfRange);
    }
    let mode = if label == SampleLabel::Print && slot < 5 {
        SynthMode::RotateAndBend
    } else {
        SynthMode::RotateOnly
    };
    let mut yaw_deg = rng.random_range(YAW_RANGE_DEG.0..=YAW_RANGE_DEG.1);
    let pitch_deg = rng.random_range(PITCH_RANGE_DEG.0..=PITCH_RANGE_DEG.1);
    let bend_deg = (mode == SynthMode::RotateAndBend)
        .then(|| rng.random_range(BEND_RANGE_DEG.0..=BEND_RANGE_DEG.1));
    if mirror_yaw && rng.random_bool(0.5) {
        yaw_deg = -yaw_deg;
    }
    Ok(SynthesisParams {
        yaw_deg,
        pitch_deg,
        bend_deg,
        bend_axis: bend_axis.into(),
        mode,
    })
}

/// Intermediate render products, kept for `--dump-layers`.
pub struct RenderArtifacts {
    pub texture: RgbImage,
    pub layer: RenderLayer,
    pub placed: RenderLayer,
}

/// Run the full per-sample chain: rectify, mesh, bend, rotate, move to
/// world space, project, rasterize, re-align, feather-blend.
pub fn synthesize_one(
    image: &RgbImage,
    annotation: &RegionAnnotation,
    params: &SynthesisParams,
    cfg: &SynthConfig,
) -> Result<(RgbImage, RenderArtifacts)> {
    anyhow::ensure!(
        annotation.label.is_spoof(),
        "refusing to synthesize from a live sample ({})",
        annotation.image
    );
    let quad = annotation.quad()?;
    let (tw, th) = quad.default_out_dims();
    let texture = rectify_region(image, &quad, (tw, th))
        .with_context(|| format!("rectifying {}", annotation.image))?;

    // the mesh lives in pixel units until to_world converts to mm
    let [tl, tr, br, bl] = quad.corners;
    let extent = (
        ((tr - tl).norm() + (br - bl).norm()) * 0.5,
        ((bl - tl).norm() + (br - tr).norm()) * 0.5,
    );
    let mut mesh = build_planar_mesh(extent, cfg.grid)?;
    if let Some(bend_deg) = params.bend_deg {
        let theta = bend_deg.to_radians();
        mesh = match params.bend_axis.into() {
            BendAxis::Vertical => bend_vertical(&mesh, theta)?,
            BendAxis::Horizontal => bend_horizontal(&mesh, theta)?,
        };
    }
    mesh = rotate(
        &mesh,
        &RotationSpec {
            yaw: params.yaw_deg.to_radians(),
            pitch: params.pitch_deg.to_radians(),
            roll: 0.0,
        },
    );

    let s = pixel_scale(annotation.eye_px_dist, cfg.d_r_mm)
        .with_context(|| format!("bad eye distance for {}", annotation.image))?;
    let world = to_world(&mesh, s, cfg.d_z_mm)?;
    let f = cfg.f_px.unwrap_or(s * cfg.d_z_mm);
    let pm = match cfg.projection {
        Projection::Perspective => project_perspective(&world, f)?,
        Projection::Weak => project_weak(&world, f)?,
    };

    let viewport = Viewport::around(&pm.points, 2);
    let layer = rasterize_with(
        &pm,
        &texture,
        viewport,
        RasterOptions {
            perspective_correct: cfg.perspective_correct,
        },
    )?;

    let corners: [Vec2; 4] = mesh.corner_indices().map(|i| pm.points[i]);
    let placed = if cfg.realign {
        realign_corners(&layer, &corners, &quad)?
    } else {
        place_by_translation(&layer, &quad)
    };
    let fused = feather_blend(image, &placed, &cfg.composite());
    Ok((
        fused,
        RenderArtifacts {
            texture,
            layer,
            placed,
        },
    ))
}

pub struct BatchOutcome {
    pub records: Vec<ManifestRecord>,
    pub failures: Vec<(usize, String)>,
    pub manifest_path: PathBuf,
}

/// Synthesize every spoof record of the dataset manifest into `out_dir`,
/// pass originals through, and write `manifest.jsonl`. Per-record
/// failures are collected, not fatal.
pub fn run_batch(
    annotations: &[RegionAnnotation],
    cfg: &SynthConfig,
    seed: u64,
    jobs: usize,
    out_dir: &Path,
) -> Result<BatchOutcome> {
    std::fs::create_dir_all(out_dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .context("cannot build worker pool")?;

    type Keyed = (usize, u32, ManifestRecord);
    let results: Mutex<Vec<Keyed>> = Mutex::new(Vec::new());
    let failures: Mutex<Vec<(usize, String)>> = Mutex::new(Vec::new());

    pool.in_place_scope(|scope| {
        for (idx, annotation) in annotations.iter().enumerate() {
            let results = &results;
            let failures = &failures;
            scope.spawn(move |_| match process_record(idx, annotation, cfg, seed, out_dir) {
                Ok(records) => results.lock().unwrap().extend(records),
                Err(e) => failures
                    .lock()
                    .unwrap()
                    .push((idx, format!("record {idx} ({}): {e:#}", annotation.image))),
            });
        }
    });

    let mut keyed = results.into_inner().unwrap();
    keyed.sort_by_key(|(idx, slot, _)| (*idx, *slot));
    let records: Vec<ManifestRecord> = keyed.into_iter().map(|(_, _, r)| r).collect();
    let mut failures = failures.into_inner().unwrap();
    failures.sort();

    let manifest_path = out_dir.join("manifest.jsonl");
    write_manifest(&manifest_path, &records)?;
    Ok(BatchOutcome {
        records,
        failures,
        manifest_path,
    })
}

fn process_record(
    idx: usize,
    annotation: &RegionAnnotation,
    cfg: &SynthConfig,
    seed: u64,
    out_dir: &Path,
) -> Result<Vec<(usize, u32, ManifestRecord)>> {
    let passthrough_label = match annotation.label {
        SampleLabel::Live => RecordLabel::Live,
        SampleLabel::Print => RecordLabel::Print,
        SampleLabel::Replay => RecordLabel::Replay,
    };
    let mut records = vec![(idx, 0u32, ManifestRecord {
        source_path: annotation.image.clone(),
        output_path: annotation.image.clone(),
        label: passthrough_label,
        params: None,
        seed,
        parent_id: None,
        origin: None,
    })];
    let slots = slots_for(annotation.label);
    if slots == 0 {
        return Ok(records);
    }
    let image = imageio::load(Path::new(&annotation.image))?;
    for slot in 0..slots {
        let mut rng = sample_rng(seed, idx as u64, slot);
        let params = sample_params(&mut rng, annotation.label, slot, cfg.bend_axis, cfg.mirror_yaw)?;
        let (fused, _) = synthesize_one(&image, annotation, &params, cfg)
            .with_context(|| format!("slot {slot}"))?;
        let out_path = out_dir.join(format!("{idx:05}_{slot:02}.png"));
        imageio::save(&out_path, &fused)?;
        records.push((idx, slot + 1, ManifestRecord {
            source_path: annotation.image.clone(),
            output_path: out_path.to_string_lossy().into_owned(),
            label: RecordLabel::SyntheticSpoof,
            params: Some(params),
            seed,
            parent_id: Some(idx as u64),
            origin: None,
        }));
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn print_gets_ten_slots_five_bent() {
        let mut bent = 0;
        for slot in 0..10 {
            let mut rng = sample_rng(7, 0, slot);
            let p = sample_params(&mut rng, SampleLabel::Print, slot, BendAxis::Vertical, false)
                .unwrap();
            if p.bend_deg.is_some() {
                bent += 1;
                assert_eq!(p.mode, SynthMode::RotateAndBend);
            } else {
                assert_eq!(p.mode, SynthMode::RotateOnly);
            }
        }
        assert_eq!(bent, 5);
    }

    #[test]
    fn replay_gets_five_unbent_slots() {
        for slot in 0..5 {
            let mut rng = sample_rng(7, 3, slot);
            let p = sample_params(&mut rng, SampleLabel::Replay, slot, BendAxis::Vertical, false)
                .unwrap();
            assert_eq!(p.bend_deg, None);
        }
        let mut rng = sample_rng(7, 3, 5);
        assert_eq!(
            sample_params(&mut rng, SampleLabel::Replay, 5, BendAxis::Vertical, false),
            Err(ParamError::SlotOutOfRange)
        );
    }

    #[test]
    fn live_has_no_slots() {
        let mut rng = sample_rng(7, 0, 0);
        assert_eq!(
            sample_params(&mut rng, SampleLabel::Live, 0, BendAxis::Vertical, false),
            Err(ParamError::SlotOutOfRange)
        );
    }

    #[test]
    fn draws_stay_in_ranges_and_are_roughly_uniform() {
        // 1e5 draws; 10-bin frequency check within +-5% absolute of the
        // expected 10% per bin
        let mut yaw_bins = [0u32; 10];
        let mut pitch_bins = [0u32; 10];
        let mut bend_bins = [0u32; 10];
        let n = 100_000u64;
        for i in 0..n {
            let slot = (i % 5) as u32; // bent slots only
            let mut rng = sample_rng(99, i / 5, slot);
            let p = sample_params(&mut rng, SampleLabel::Print, slot, BendAxis::Vertical, false)
                .unwrap();
            assert!((0.0..=40.0).contains(&p.yaw_deg));
            assert!((-10.0..=10.0).contains(&p.pitch_deg));
            let b = p.bend_deg.unwrap();
            assert!((30.0..=60.0).contains(&b));
            yaw_bins[((p.yaw_deg / 40.0 * 10.0) as usize).min(9)] += 1;
            pitch_bins[(((p.pitch_deg + 10.0) / 20.0 * 10.0) as usize).min(9)] += 1;
            bend_bins[(((b - 30.0) / 30.0 * 10.0) as usize).min(9)] += 1;
        }
        for bins in [yaw_bins, pitch_bins, bend_bins] {
            for &count in &bins {
                let frac = count as f64 / n as f64;
                assert!((frac - 0.1).abs() < 0.05, "bin fraction {frac}");
            }
        }
    }

    #[test]
    fn same_stream_same_params() {
        let a = sample_params(&mut sample_rng(5, 2, 3), SampleLabel::Print, 3, BendAxis::Vertical, false);
        let b = sample_params(&mut sample_rng(5, 2, 3), SampleLabel::Print, 3, BendAxis::Vertical, false);
        assert_eq!(a, b);
        let c = sample_params(&mut sample_rng(6, 2, 3), SampleLabel::Print, 3, BendAxis::Vertical, false);
        assert_ne!(a, c);
    }
}
