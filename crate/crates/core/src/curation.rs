//! Clip curation from pose keypoints: caption keyword gating, fixed-length
//! segment splitting, per-frame and per-clip visibility criteria, and a
//! body-part movement test.

use std::collections::BTreeMap;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{body18, PersonDetection, PoseFrame, PoseTrack};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterConfig {
    pub keywords: Vec<String>,
    pub single_person_ratio: f64,
    pub bbox_area_fraction: f64,
    pub min_keypoints: usize,
    pub min_face_keypoints: usize,
    pub quality_frame_ratio: f64,
    pub max_segment_seconds: f64,
    pub min_segment_seconds: f64,
    pub movement_frame_ratio: f64,
    /// Minimum mean displacement of a part, in bbox-normalized units.
    pub movement_threshold_tau: f64,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            keywords: ["people", "person", "man", "woman", "men", "women", "boy", "girl", "human"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            single_person_ratio: 0.9,
            bbox_area_fraction: 1.0 / 50.0,
            min_keypoints: 12,
            min_face_keypoints: 2,
            quality_frame_ratio: 0.7,
            max_segment_seconds: 10.0,
            min_segment_seconds: 2.0,
            movement_frame_ratio: 0.5,
            movement_threshold_tau: 0.02,
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<()> {
        let ratios = [
            ("single_person_ratio", self.single_person_ratio),
            ("bbox_area_fraction", self.bbox_area_fraction),
            ("quality_frame_ratio", self.quality_frame_ratio),
            ("movement_frame_ratio", self.movement_frame_ratio),
        ];
        for (name, r) in ratios {
            if !(r > 0.0 && r <= 1.0) {
                return Err(Error::Config(format!("{name} must lie in (0, 1], got {r}")));
            }
        }
        let positive = [
            ("max_segment_seconds", self.max_segment_seconds),
            ("min_segment_seconds", self.min_segment_seconds),
            ("movement_threshold_tau", self.movement_threshold_tau),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.min_keypoints == 0 || self.min_keypoints > body18::COUNT {
            return Err(Error::Config(format!("min_keypoints must lie in 1..=18, got {}", self.min_keypoints)));
        }
        if self.min_face_keypoints == 0 || self.min_face_keypoints > body18::FACE.len() {
            return Err(Error::Config(format!("min_face_keypoints must lie in 1..=5, got {}", self.min_face_keypoints)));
        }
        if self.keywords.iter().any(|k| k.is_empty() || *k != k.to_lowercase()) {
            return Err(Error::Config("keywords must be non-empty lowercase words".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Criterion {
    pub measured: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FilterVerdict {
    pub pass: bool,
    pub criteria: BTreeMap<String, Criterion>,
}

impl FilterVerdict {
    fn from_criteria(criteria: BTreeMap<String, Criterion>) -> Self {
        FilterVerdict { pass: criteria.values().all(|c| c.pass), criteria }
    }

    pub fn criterion(&self, name: &str) -> Option<&Criterion> {
        self.criteria.get(name)
    }
}

/// Whole-word, case-insensitive keyword match.
pub fn keyword_gate(caption: &str, cfg: &FilterConfig) -> bool {
    caption
        .to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .any(|w| !w.is_empty() && cfg.keywords.iter().any(|k| k == w))
}

/// A contiguous run of frames cut from a track.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    /// Positions of the run within the parent's frame list.
    pub range: Range<usize>,
    pub retained: bool,
    pub track: PoseTrack,
}

impl Segment {
    /// First and last frame numbers, inclusive.
    pub fn frame_span(&self) -> Option<[u64; 2]> {
        Some([self.track.frames.first()?.index, self.track.frames.last()?.index])
    }
}

/// Cuts `n_frames` into greedy fixed-length runs of `max_segment_seconds`
/// and flags runs shorter than `min_segment_seconds` as discarded.
pub fn plan_segments(n_frames: usize, fps: f64, cfg: &FilterConfig) -> Vec<(Range<usize>, bool)> {
    let per_segment = ((cfg.max_segment_seconds * fps + 1e-9).floor() as usize).max(1);
    (0..n_frames)
        .step_by(per_segment)
        .map(|start| {
            let end = (start + per_segment).min(n_frames);
            let seconds = (end - start) as f64 / fps;
            (start..end, seconds >= cfg.min_segment_seconds)
        })
        .collect()
}

/// Every run of the track, retained and discarded, in order.
pub fn split_all(track: &PoseTrack, cfg: &FilterConfig) -> Vec<Segment> {
    plan_segments(track.frames.len(), track.fps, cfg)
        .into_iter()
        .map(|(range, retained)| Segment {
            track: track.with_frames(track.frames[range.clone()].to_vec()),
            range,
            retained,
        })
        .collect()
}

/// Retained segments only.
pub fn split_segments(track: &PoseTrack, cfg: &FilterConfig) -> Vec<Segment> {
    split_all(track, cfg).into_iter().filter(|s| s.retained).collect()
}

/// Visibility test for a frame holding exactly one person.
pub fn frame_quality(frame: &PoseFrame, cfg: &FilterConfig) -> Result<bool> {
    let person = frame.single_person().ok_or_else(|| {
        Error::Contract(format!(
            "frame {} has {} persons, frame quality needs exactly one",
            frame.index,
            frame.persons.len()
        ))
    })?;
    Ok(person_quality(person, cfg))
}

fn person_quality(person: &PersonDetection, cfg: &FilterConfig) -> bool {
    let face = body18::FACE.iter().filter(|&&i| person.keypoints[i].is_visible()).count();
    person.visible_count() >= cfg.min_keypoints && face >= cfg.min_face_keypoints
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn video_quality(track: &PoseTrack, cfg: &FilterConfig) -> FilterVerdict {
    let singles: Vec<&PersonDetection> = track.frames.iter().filter_map(PoseFrame::single_person).collect();

    let single_ratio = ratio(singles.len(), track.frames.len());
    let mean_area = if singles.is_empty() {
        0.0
    } else {
        singles.iter().map(|p| p.bbox.area()).sum::<f64>() / singles.len() as f64
    };
    let area_fraction = mean_area / track.image_area();
    let good = singles.iter().filter(|p| person_quality(p, cfg)).count();
    let quality_ratio = ratio(good, singles.len());

    let mut criteria = BTreeMap::new();
    criteria.insert(
        "single_person_ratio".to_string(),
        Criterion {
            measured: single_ratio,
            threshold: cfg.single_person_ratio,
            pass: single_ratio >= cfg.single_person_ratio,
        },
    );
    criteria.insert(
        "bbox_area_fraction".to_string(),
        Criterion {
            measured: area_fraction,
            threshold: cfg.bbox_area_fraction,
            pass: area_fraction > cfg.bbox_area_fraction,
        },
    );
    criteria.insert(
        "quality_frame_ratio".to_string(),
        Criterion {
            measured: quality_ratio,
            threshold: cfg.quality_frame_ratio,
            pass: quality_ratio >= cfg.quality_frame_ratio,
        },
    );
    FilterVerdict::from_criteria(criteria)
}

/// Body-part groups used by the movement test.
pub const BODY_PARTS: [(&str, &[usize]); 4] = [
    ("face", &body18::FACE),
    ("arms", &body18::ARMS),
    ("torso", &body18::TORSO),
    ("legs", &body18::LEGS),
];

/// Movement assessment of one pair of consecutive single-person frames.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairMovement {
    pub visible_parts: usize,
    pub moving_parts: usize,
    pub meets: bool,
}

fn normalized(person: &PersonDetection, i: usize) -> (f64, f64) {
    let k = person.keypoints[i];
    let b = person.bbox;
    ((k.x - b.x_min) / b.width(), (k.y - b.y_min) / b.height())
}

pub fn pair_movement(a: &PersonDetection, b: &PersonDetection, tau: f64) -> PairMovement {
    let mut visible_parts = 0;
    let mut moving_parts = 0;
    for (_, members) in BODY_PARTS {
        let common: Vec<usize> = members
            .iter()
            .copied()
            .filter(|&i| a.keypoints[i].is_visible() && b.keypoints[i].is_visible())
            .collect();
        if common.len() < 2 {
            continue;
        }
        visible_parts += 1;
        let mean = common
            .iter()
            .map(|&i| {
                let (ax, ay) = normalized(a, i);
                let (bx, by) = normalized(b, i);
                (ax - bx).hypot(ay - by)
            })
            .sum::<f64>()
            / common.len() as f64;
        if mean >= tau {
            moving_parts += 1;
        }
    }
    let meets = match visible_parts {
        4 => moving_parts >= 2,
        3 => moving_parts == 3,
        _ => false,
    };
    PairMovement { visible_parts, moving_parts, meets }
}

pub fn motion_quality(track: &PoseTrack, cfg: &FilterConfig) -> FilterVerdict {
    let singles: Vec<&PersonDetection> = track.frames.iter().filter_map(PoseFrame::single_person).collect();
    let mut criteria = BTreeMap::new();
    if singles.len() < 2 {
        criteria.insert(
            "insufficient_frames".to_string(),
            Criterion { measured: singles.len() as f64, threshold: 2.0, pass: false },
        );
        return FilterVerdict::from_criteria(criteria);
    }
    let pairs = singles.len() - 1;
    let met = singles
        .windows(2)
        .filter(|w| pair_movement(w[0], w[1], cfg.movement_threshold_tau).meets)
        .count();
    let measured = ratio(met, pairs);
    criteria.insert(
        "movement_frame_ratio".to_string(),
        Criterion { measured, threshold: cfg.movement_frame_ratio, pass: measured >= cfg.movement_frame_ratio },
    );
    FilterVerdict::from_criteria(criteria)
}

/// One manifest line per retained segment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ManifestRow {
    pub source_id: String,
    pub segment: [u64; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub keyword_gate: Option<bool>,
    pub video_quality: FilterVerdict,
    pub motion_quality: FilterVerdict,
    pub pass: bool,
}

/// Splits a track and evaluates both quality verdicts on every retained
/// segment. When a caption is supplied the keyword gate also applies.
pub fn curate_track(track: &PoseTrack, cfg: &FilterConfig, caption: Option<&str>) -> Vec<ManifestRow> {
    let keyword = caption.map(|c| keyword_gate(c, cfg));
    split_segments(track, cfg)
        .into_iter()
        .filter_map(|seg| {
            let segment = seg.frame_span()?;
            let video = video_quality(&seg.track, cfg);
            let motion = motion_quality(&seg.track, cfg);
            let pass = video.pass && motion.pass && keyword.unwrap_or(true);
            Some(ManifestRow {
                source_id: track.source_id.clone(),
                segment,
                keyword_gate: keyword,
                video_quality: video,
                motion_quality: motion,
                pass,
            })
        })
        .collect()
}
