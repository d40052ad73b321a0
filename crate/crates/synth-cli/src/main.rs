use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use synth_cli::annot::{self, RegionAnnotation, SampleLabel};
use synth_cli::config::SynthConfig;
use synth_cli::manifest::{self, RecordLabel};
use synth_cli::obj;
use synth_cli::pipeline::{self, BendAxisParam, SynthMode, SynthesisParams};
use synth_cli::scores;
use synth_core::deform::{bend_horizontal, bend_vertical, rotate, BendAxis, RotationSpec};
use synth_core::mesher::build_planar_mesh;
use synth_core::metrics;
use synth_core::schedule::make_schedule;

#[derive(Parser)]
#[command(name = "synth", about = "Planar-mesh spoof synthesis and evaluation tools")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Synthesize the full dataset described by an annotation manifest.
    Batch {
        /// JSONL annotation manifest (image, corners, eye_px_dist, label).
        #[arg(long)]
        manifest: PathBuf,
        /// Optional key = value configuration file.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads; output is identical for any value.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Synthesize a single sample with explicit parameters.
    One {
        #[arg(long)]
        image: PathBuf,
        /// Region corners as "x,y;x,y;x,y;x,y" (TL;TR;BR;BL).
        #[arg(long)]
        corners: String,
        /// Inter-eye distance in the photographed face, px.
        #[arg(long)]
        eye_px_dist: f64,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        yaw: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        pitch: f64,
        /// Bending angle in degrees; omit for rotation only.
        #[arg(long)]
        bend: Option<f64>,
        #[arg(long, value_parser = parse_axis, default_value = "vertical")]
        axis: BendAxis,
        #[arg(long)]
        out: PathBuf,
        /// Also write the rectified texture and raw render next to `out`.
        #[arg(long)]
        dump_layers: bool,
    },
    /// Write a bent/rotated mesh as a Wavefront OBJ for inspection.
    PreviewMesh {
        /// Mesh extent "WxH" in px.
        #[arg(long, default_value = "200x260")]
        extent: String,
        /// Anchor grid "MxN".
        #[arg(long, default_value = "32x32")]
        grid: String,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        yaw: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        pitch: f64,
        #[arg(long)]
        bend: Option<f64>,
        #[arg(long, value_parser = parse_axis, default_value = "vertical")]
        axis: BendAxis,
        #[arg(long)]
        out: PathBuf,
    },
    /// EER / HTER / APCER / BPCER / ACER / Top-1 from a score CSV.
    Metrics {
        #[arg(long)]
        scores: PathBuf,
        #[arg(long, default_value = "dev")]
        dev_split: String,
        #[arg(long, default_value = "test")]
        test_split: String,
    },
    /// Print a balanced mini-batch schedule from an output manifest.
    Schedule {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value_t = 64)]
        batch: usize,
        /// live:spoof ratio, e.g. "1:3".
        #[arg(long, default_value = "1:3")]
        ratio: String,
        #[arg(long, default_value_t = 1)]
        epochs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parse_axis(s: &str) -> Result<BendAxis, String> {
    match s {
        "vertical" => Ok(BendAxis::Vertical),
        "horizontal" => Ok(BendAxis::Horizontal),
        _ => Err("expected vertical or horizontal".into()),
    }
}

fn parse_pair(s: &str, sep: char) -> Result<(u32, u32)> {
    let (a, b) = s
        .split_once(sep)
        .with_context(|| format!("expected two values separated by {sep:?} in {s:?}"))?;
    Ok((a.trim().parse()?, b.trim().parse()?))
}

fn load_config(path: &Option<PathBuf>) -> Result<SynthConfig> {
    match path {
        Some(p) => SynthConfig::load(p),
        None => Ok(SynthConfig::default()),
    }
}

fn main() -> Result<()> {
    match Cli::parse().cmd {
        Cmd::Batch {
            manifest,
            config,
            seed,
            jobs,
            out,
        } => {
            let cfg = load_config(&config)?;
            let annotations = annot::load_annotations(&manifest)?;
            let outcome = pipeline::run_batch(&annotations, &cfg, seed, jobs, &out)?;
            let synthetic = outcome
                .records
                .iter()
                .filter(|r| r.label == RecordLabel::SyntheticSpoof)
                .count();
            println!(
                "wrote {} synthetic samples ({} records total) to {}",
                synthetic,
                outcome.records.len(),
                outcome.manifest_path.display()
            );
            if !outcome.failures.is_empty() {
                for (_, msg) in &outcome.failures {
                    eprintln!("failed: {msg}");
                }
                bail!("{} record(s) failed", outcome.failures.len());
            }
        }
        Cmd::One {
            image,
            corners,
            eye_px_dist,
            config,
            yaw,
            pitch,
            bend,
            axis,
            out,
            dump_layers,
        } => {
            let cfg = load_config(&config)?;
            let img = synth_cli::imageio::load(&image)?;
            let annotation = RegionAnnotation {
                image: image.to_string_lossy().into_owned(),
                corners: annot::parse_corners(&corners)?,
                eye_px_dist,
                label: SampleLabel::Print,
            };
            let params = SynthesisParams {
                yaw_deg: yaw,
                pitch_deg: pitch,
                bend_deg: bend,
                bend_axis: BendAxisParam::from(axis),
                mode: if bend.is_some() {
                    SynthMode::RotateAndBend
                } else {
                    SynthMode::RotateOnly
                },
            };
            let (fused, artifacts) = pipeline::synthesize_one(&img, &annotation, &params, &cfg)?;
            synth_cli::imageio::save(&out, &fused)?;
            println!("wrote {}", out.display());
            if dump_layers {
                let stem = out.with_extension("");
                let tex_path = PathBuf::from(format!("{}_texture.png", stem.display()));
                let layer_path = PathBuf::from(format!("{}_layer.png", stem.display()));
                synth_cli::imageio::save(&tex_path, &artifacts.texture)?;
                synth_cli::imageio::save(&layer_path, &artifacts.layer.color)?;
                println!("wrote {}", tex_path.display());
                println!("wrote {}", layer_path.display());
            }
        }
        Cmd::PreviewMesh {
            extent,
            grid,
            yaw,
            pitch,
            bend,
            axis,
            out,
        } => {
            let (w, h) = parse_pair(&extent, 'x')?;
            let grid = parse_pair(&grid, 'x')?;
            let mut mesh = build_planar_mesh((w as f64, h as f64), grid)?;
            if let Some(bend) = bend {
                let theta = bend.to_radians();
                mesh = match axis {
                    BendAxis::Vertical => bend_vertical(&mesh, theta)?,
                    BendAxis::Horizontal => bend_horizontal(&mesh, theta)?,
                };
            }
            mesh = rotate(
                &mesh,
                &RotationSpec {
                    yaw: yaw.to_radians(),
                    pitch: pitch.to_radians(),
                    roll: 0.0,
                },
            );
            obj::write_obj(&out, &mesh)?;
            println!(
                "wrote {} ({} vertices, {} triangles)",
                out.display(),
                mesh.vertices.len(),
                mesh.triangles.len()
            );
        }
        Cmd::Metrics {
            scores: scores_path,
            dev_split,
            test_split,
        } => {
            let all = scores::read_scores(&scores_path)?;
            let dev = scores::of_split(&all, &dev_split);
            let test = scores::of_split(&all, &test_split);
            if dev.is_empty() {
                bail!("no records in split {dev_split:?}");
            }
            let (eer_val, threshold) = metrics::eer(&dev)?;
            println!("dev   EER    {:6.2}%  (threshold {threshold})", eer_val * 100.0);
            let eval = if test.is_empty() { &dev } else { &test };
            let split_name = if test.is_empty() { &dev_split } else { &test_split };
            if !test.is_empty() {
                println!("test  HTER   {:6.2}%", metrics::hter(&dev, &test)? * 100.0);
            }
            let pad = metrics::pad_metrics(eval, threshold)?;
            println!("{split_name}  APCER  {:6.2}%", pad.apcer * 100.0);
            for (ty, v) in &pad.apcer_by_type {
                println!("{split_name}    {ty:?}: {:.2}%", v * 100.0);
            }
            println!("{split_name}  BPCER  {:6.2}%", pad.bpcer * 100.0);
            println!("{split_name}  ACER   {:6.2}%", pad.acer * 100.0);
            println!("{split_name}  Top-1  {:6.2}%", pad.top1 * 100.0);
        }
        Cmd::Schedule {
            manifest,
            batch,
            ratio,
            epochs,
            seed,
        } => {
            let (rl, rs) = parse_pair(&ratio, ':')?;
            let records = manifest::read_manifest(&manifest)?;
            let mut live = Vec::new();
            let mut spoof = Vec::new();
            for r in &records {
                if r.label == RecordLabel::Live {
                    live.push(r.output_path.clone());
                } else {
                    spoof.push(r.output_path.clone());
                }
            }
            let sched = make_schedule(&live, &spoof, batch, (rl as usize, rs as usize), epochs, seed)?;
            println!(
                "# {} batches of {} ({} live + {} spoof each)",
                sched.batches.len(),
                sched.batch_size,
                sched.ratio.0,
                sched.ratio.1
            );
            for (i, b) in sched.batches.iter().enumerate() {
                let ids: Vec<&str> = b.iter().map(|(id, _)| id.as_str()).collect();
                println!("{i}\t{}", ids.join(" "));
            }
        }
    }
    Ok(())
}
