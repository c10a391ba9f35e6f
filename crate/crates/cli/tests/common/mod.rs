#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use msd_core::format::{write_logit_stream, write_pose_track, LogitStream};
use msd_core::{body18, BoundingBox, DualStepInput, Keypoint, PersonDetection, PoseFrame, PoseTrack};

pub fn msd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_msd")).args(args).output().expect("spawn msd")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

pub fn person(dx_limbs: f64) -> PersonDetection {
    let limbs: Vec<usize> = body18::ARMS.iter().chain(&body18::LEGS).copied().collect();
    let keypoints = std::array::from_fn(|i| {
        let dx = if limbs.contains(&i) { dx_limbs } else { 0.0 };
        Keypoint::new(120.0 + 3.0 * i as f64 + dx, 110.0 + 10.0 * i as f64, 0.9).unwrap()
    });
    PersonDetection::new(keypoints, BoundingBox::new(100.0, 100.0, 200.0, 300.0).unwrap())
}

/// One person per frame, limbs swinging by `swing` pixels on odd frames.
pub fn swinging_track(id: &str, frames: usize, fps: f64, swing: f64) -> PoseTrack {
    let frames = (0..frames)
        .map(|i| PoseFrame { index: i as u64, persons: vec![person(if i % 2 == 1 { swing } else { 0.0 })] })
        .collect();
    PoseTrack::new(frames, fps, 640, 480, id).unwrap()
}

pub fn crowd_track(id: &str, frames: usize, fps: f64) -> PoseTrack {
    let frames = (0..frames)
        .map(|i| PoseFrame { index: i as u64, persons: vec![person(0.0), person(5.0)] })
        .collect();
    PoseTrack::new(frames, fps, 640, 480, id).unwrap()
}

pub fn write_track(dir: &Path, track: &PoseTrack) -> PathBuf {
    let path = dir.join(format!("{}.jsonl", track.source_id));
    let mut buf = Vec::new();
    write_pose_track(track, &mut buf).unwrap();
    std::fs::write(&path, buf).unwrap();
    path
}

pub fn write_stream(dir: &Path, name: &str, vocab: &[&str], steps: Vec<(Vec<f64>, Vec<f64>)>) -> PathBuf {
    let stream = LogitStream {
        vocab: vocab.iter().map(|s| s.to_string()).collect(),
        steps: steps.into_iter().enumerate().map(|(i, (v, m))| DualStepInput::new(i, v, m).unwrap()).collect(),
    };
    let path = dir.join(name);
    let mut buf = Vec::new();
    write_logit_stream(&stream, &mut buf).unwrap();
    std::fs::write(&path, buf).unwrap();
    path
}

pub fn write_text(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

/// Contested second step: vision prefers "foot", motion prefers "hand".
pub fn contested_stream(dir: &Path) -> PathBuf {
    write_stream(
        dir,
        "contested.jsonl",
        &["foot", "hand"],
        vec![(vec![0.1, 0.0], vec![0.1, 0.0]), (vec![0.2, 0.0], vec![0.0, 1.1])],
    )
}

pub fn judge_line(id: &str, v: [f64; 5]) -> String {
    format!(
        r#"{{"id":"{id}","scores":{{"details_of_movements":{},"interaction_with_environment":{},"motivation_and_reason":{},"micro_expressions_and_emotions":{},"character_attributes":{}}}}}"#,
        v[0], v[1], v[2], v[3], v[4]
    )
}

pub fn json_lines(text: &str) -> Vec<serde_json::Value> {
    text.lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}
