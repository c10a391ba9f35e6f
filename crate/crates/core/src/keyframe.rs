//! Keypoint-driven keyframe sampling: one frame per one-second segment.
//!
//! The first keyframe is the frame of segment 0 farthest, in total, from
//! every frame of its segment. Each later keyframe is the frame of its
//! segment farthest from the previous keyframe.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{body18, PoseFrame, PoseTrack};

/// Flattened `(x, y)` coordinates of the 18 keypoints and a visibility bitmask.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameVector {
    pub coords: [f64; 2 * body18::COUNT],
    pub mask: u32,
}

impl FrameVector {
    pub fn visible_count(&self) -> u32 {
        self.mask.count_ones()
    }
}

/// `None` unless the frame holds exactly one person.
pub fn frame_vector(frame: &PoseFrame) -> Option<FrameVector> {
    let person = frame.single_person()?;
    let mut coords = [0.0; 2 * body18::COUNT];
    let mut mask = 0u32;
    for (i, k) in person.keypoints.iter().enumerate() {
        coords[2 * i] = k.x;
        coords[2 * i + 1] = k.y;
        if k.is_visible() {
            mask |= 1 << i;
        }
    }
    Some(FrameVector { coords, mask })
}

/// Euclidean distance over keypoints visible in both frames, divided by the
/// number of such keypoints. Zero when none are shared.
pub fn pair_distance(a: &FrameVector, b: &FrameVector) -> f64 {
    let common = a.mask & b.mask;
    if common == 0 {
        return 0.0;
    }
    let sq: f64 = (0..body18::COUNT)
        .filter(|i| common & (1 << i) != 0)
        .map(|i| {
            let dx = a.coords[2 * i] - b.coords[2 * i];
            let dy = a.coords[2 * i + 1] - b.coords[2 * i + 1];
            dx * dx + dy * dy
        })
        .sum();
    sq.sqrt() / f64::from(common.count_ones())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KeyframeSelection {
    #[serde(rename = "segment")]
    pub segment_index: usize,
    #[serde(rename = "frame")]
    pub frame_index: u64,
    pub score: f64,
}

/// Sizes of `n_segments` near-equal runs covering `n_items`; earlier runs
/// take the remainder.
pub fn segment_sizes(n_items: usize, n_segments: usize) -> Vec<usize> {
    let base = n_items / n_segments;
    let rem = n_items % n_segments;
    (0..n_segments).map(|s| base + usize::from(s < rem)).collect()
}

pub fn sample_keyframes(track: &PoseTrack) -> Result<Vec<KeyframeSelection>> {
    let singles: Vec<(u64, FrameVector)> = track
        .frames
        .iter()
        .filter_map(|f| frame_vector(f).map(|v| (f.index, v)))
        .collect();
    if singles.is_empty() {
        return Err(Error::Input(format!("{}: no single-person frames to sample", track.source_id)));
    }
    let n_segments = (track.duration_seconds().ceil() as usize).max(1);

    let mut selections: Vec<KeyframeSelection> = Vec::with_capacity(n_segments);
    let mut previous: Option<FrameVector> = None;
    let mut start = 0;
    for (segment_index, size) in segment_sizes(singles.len(), n_segments).into_iter().enumerate() {
        let segment = &singles[start..start + size];
        start += size;
        if segment.is_empty() {
            continue;
        }
        let score_of = |v: &FrameVector| match &previous {
            None => segment.iter().map(|(_, other)| pair_distance(other, v)).sum::<f64>(),
            Some(prev) => pair_distance(v, prev),
        };
        let mut best = (segment[0].0, segment[0].1, score_of(&segment[0].1));
        for (index, v) in &segment[1..] {
            let s = score_of(v);
            if s > best.2 {
                best = (*index, *v, s);
            }
        }
        selections.push(KeyframeSelection { segment_index, frame_index: best.0, score: best.2 });
        previous = Some(best.1);
    }
    Ok(selections)
}

/// Output line of the keyframe command.
#[derive(Debug, Clone, Serialize)]
pub struct KeyframeReport {
    pub source_id: String,
    pub keyframes: Vec<KeyframeSelection>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BoundingBox, Keypoint, PersonDetection};

    fn person(offset: f64, conf: impl Fn(usize) -> f64) -> PersonDetection {
        let mut kps = [Keypoint { x: 0.0, y: 0.0, confidence: 0.0 }; 18];
        for (i, k) in kps.iter_mut().enumerate() {
            *k = Keypoint { x: i as f64 + offset, y: 2.0 * i as f64, confidence: conf(i) };
        }
        PersonDetection::new(kps, BoundingBox::new(-1000.0, -1000.0, 1000.0, 1000.0).unwrap())
    }

    fn frame(index: u64, p: PersonDetection) -> PoseFrame {
        PoseFrame { index, persons: vec![p] }
    }

    #[test]
    fn masks() {
        let all = frame_vector(&frame(0, person(0.0, |_| 0.9))).unwrap();
        assert_eq!(all.mask, (1 << 18) - 1);
        let five = frame_vector(&frame(0, person(0.0, |i| if i < 5 { 0.9 } else { 0.2 }))).unwrap();
        assert_eq!(five.visible_count(), 5);
        assert!(frame_vector(&PoseFrame { index: 0, persons: vec![] }).is_none());
    }

    #[test]
    fn disjoint_visibility_distance_is_zero() {
        let a = frame_vector(&frame(0, person(0.0, |i| if i < 9 { 0.9 } else { 0.0 }))).unwrap();
        let b = frame_vector(&frame(1, person(50.0, |i| if i >= 9 { 0.9 } else { 0.0 }))).unwrap();
        assert_eq!(pair_distance(&a, &b), 0.0);
    }

    #[test]
    fn distance_cases() {
        let a = frame_vector(&frame(0, person(0.0, |i| if i == 3 { 0.9 } else { 0.0 }))).unwrap();
        let mut p = person(0.0, |i| if i == 3 { 0.9 } else { 0.0 });
        p.keypoints[3].x += 3.0;
        p.keypoints[3].y += 4.0;
        let b = frame_vector(&frame(1, p)).unwrap();
        assert_eq!(pair_distance(&a, &b), 5.0);
        assert_eq!(pair_distance(&b, &a), 5.0);
        assert_eq!(pair_distance(&a, &a), 0.0);
    }

    #[test]
    fn identical_frames_pick_first() {
        let frames = (0..30).map(|i| frame(i, person(0.0, |_| 0.9))).collect();
        let t = PoseTrack::new(frames, 30.0, 640, 480, "s").unwrap();
        let sel = sample_keyframes(&t).unwrap();
        assert_eq!(sel, vec![KeyframeSelection { segment_index: 0, frame_index: 0, score: 0.0 }]);
    }

    #[test]
    fn displaced_frame_wins_each_segment() {
        // 2 s at 10 fps; frame 4 is displaced in segment 0 and frame 17 far
        // from it in segment 1.
        let frames = (0..20)
            .map(|i| {
                let off = match i {
                    4 => 40.0,
                    17 => -60.0,
                    _ => 0.0,
                };
                frame(i, person(off, |_| 0.9))
            })
            .collect();
        let t = PoseTrack::new(frames, 10.0, 640, 480, "d").unwrap();
        let sel = sample_keyframes(&t).unwrap();
        assert_eq!(sel.iter().map(|s| s.frame_index).collect::<Vec<_>>(), vec![4, 17]);
    }

    #[test]
    fn sizes_and_empty_segments() {
        assert_eq!(segment_sizes(10, 3), vec![4, 3, 3]);
        assert_eq!(segment_sizes(2, 4), vec![1, 1, 0, 0]);
        // 4 s track with only 2 single-person frames yields 2 selections
        let frames = (0..40)
            .map(|i| if i < 2 { frame(i, person(i as f64, |_| 0.9)) } else { PoseFrame { index: i, persons: vec![] } })
            .collect();
        let t = PoseTrack::new(frames, 10.0, 640, 480, "e").unwrap();
        assert_eq!(sample_keyframes(&t).unwrap().len(), 2);
    }

    #[test]
    fn no_single_person_frames() {
        let frames = (0..5)
            .map(|i| PoseFrame { index: i, persons: vec![person(0.0, |_| 0.9), person(1.0, |_| 0.9)] })
            .collect();
        let t = PoseTrack::new(frames, 10.0, 640, 480, "m").unwrap();
        assert!(matches!(sample_keyframes(&t), Err(Error::Input(_))));
    }

    #[test]
    fn twenty_five_seconds_gives_twenty_five() {
        let frames = (0..750).map(|i| frame(i, person((i % 7) as f64, |_| 0.9))).collect();
        let t = PoseTrack::new(frames, 30.0, 640, 480, "l").unwrap();
        let sel = sample_keyframes(&t).unwrap();
        assert_eq!(sel.len(), 25);
        assert!(sel.windows(2).all(|w| w[0].frame_index < w[1].frame_index));
    }
}
