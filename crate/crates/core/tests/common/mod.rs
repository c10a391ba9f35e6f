#![allow(dead_code)]

use msd_core::{body18, BoundingBox, Keypoint, PersonDetection, PoseFrame, PoseTrack};

pub fn person(points: &[(f64, f64, f64)], bbox: [f64; 4]) -> PersonDetection {
    assert_eq!(points.len(), body18::COUNT);
    let keypoints: [Keypoint; body18::COUNT] =
        std::array::from_fn(|i| Keypoint::new(points[i].0, points[i].1, points[i].2).unwrap());
    PersonDetection::new(keypoints, BoundingBox::new(bbox[0], bbox[1], bbox[2], bbox[3]).unwrap())
}

/// A fully visible standing figure inside a 100 x 200 box at (100, 100).
pub fn standing() -> Vec<(f64, f64, f64)> {
    (0..body18::COUNT)
        .map(|i| (120.0 + 3.0 * i as f64, 110.0 + 10.0 * i as f64, 0.9))
        .collect()
}

pub const STANDING_BOX: [f64; 4] = [100.0, 100.0, 200.0, 300.0];

pub fn frame(index: u64, persons: Vec<PersonDetection>) -> PoseFrame {
    PoseFrame { index, persons }
}

pub fn track(frames: Vec<PoseFrame>, fps: f64) -> PoseTrack {
    PoseTrack::new(frames, fps, 640, 480, "clip").unwrap()
}

/// Moves the keypoints listed in `parts` by `dx` in image units.
pub fn shifted(points: &[(f64, f64, f64)], parts: &[usize], dx: f64) -> Vec<(f64, f64, f64)> {
    let mut out = points.to_vec();
    for &i in parts {
        out[i].0 += dx;
    }
    out
}
