//! Smoke tests for the `synth` binary.

use std::path::Path;
use std::process::Command;

fn synth() -> Command {
    Command::new(env!("CARGO_BIN_EXE_synth"))
}

fn asset(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../assets")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

#[test]
fn one_writes_an_image() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sample.png");
    let status = synth()
        .args([
            "one",
            "--image",
            &asset("scene_portrait.png"),
            "--corners",
            "60,50;220,50;220,170;60,170",
            "--eye-px-dist",
            "80",
            "--yaw",
            "25",
            "--pitch",
            "-5",
            "--bend",
            "45",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(out.exists());
}

#[test]
fn batch_then_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let annot = dir.path().join("annot.jsonl");
    let img = asset("scene_gradient.png");
    std::fs::write(
        &annot,
        format!(
            concat!(
                r#"{{"image":"{0}","corners":[[60,50],[200,55],[205,165],[62,168]],"eye_px_dist":80,"label":"print"}}"#,
                "\n",
                r#"{{"image":"{0}","corners":[[60,50],[200,55],[205,165],[62,168]],"eye_px_dist":80,"label":"live"}}"#,
                "\n"
            ),
            img
        ),
    )
    .unwrap();
    let cfg = dir.path().join("synth.cfg");
    std::fs::write(&cfg, "mesher.grid = 8x8\n").unwrap();
    let out = dir.path().join("out");
    let status = synth()
        .args(["batch", "--manifest"])
        .arg(&annot)
        .args(["--config"])
        .arg(&cfg)
        .args(["--seed", "3", "--jobs", "2", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let manifest = out.join("manifest.jsonl");
    assert!(manifest.exists());

    let output = synth()
        .args(["schedule", "--manifest"])
        .arg(&manifest)
        .args(["--batch", "4", "--ratio", "1:3", "--epochs", "2", "--seed", "1"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    assert!(text.lines().next().unwrap().contains("1 live + 3 spoof"));
}

#[test]
fn metrics_reports_rates() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("scores.csv");
    let mut text = String::from("sample_id,score,truth,attack_type,split\n");
    for i in 0..10 {
        text += &format!("l{i},0.{},live,none,dev\n", 6 + i % 4);
        text += &format!("s{i},0.{},spoof,bent_print,dev\n", i % 4);
        text += &format!("tl{i},0.9,live,none,test\n");
        text += &format!("ts{i},0.1,spoof,replay,test\n");
    }
    std::fs::write(&csv, text).unwrap();
    let output = synth().args(["metrics", "--scores"]).arg(&csv).output().unwrap();
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    assert!(text.contains("EER"), "{text}");
    assert!(text.contains("ACER"), "{text}");
}
