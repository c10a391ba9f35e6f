//! Domain types shared by the decoding engine, the pose pipeline and the
//! metric suite.
//!
//! Everything here is immutable once validated. Constructors enforce the
//! invariants; the JSONL readers in [`crate::format`] go through them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index into a vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TokenId(pub u32);

impl TokenId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for TokenId {
    fn from(i: usize) -> Self {
        TokenId(i as u32)
    }
}

impl std::fmt::Display for TokenId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Visual-pathway and motion-pathway logits for one decode step.
#[derive(Debug, Clone, PartialEq)]
pub struct DualStepInput {
    pub step: usize,
    pub visual: Vec<f64>,
    pub motion: Vec<f64>,
}

impl DualStepInput {
    /// Builds a step, checking that both pathways are finite and equally long.
    pub fn new(step: usize, visual: Vec<f64>, motion: Vec<f64>) -> Result<Self> {
        if visual.len() != motion.len() {
            return Err(Error::Input(format!(
                "visual has {} entries, motion has {}",
                visual.len(),
                motion.len()
            )));
        }
        if visual.is_empty() {
            return Err(Error::Input("empty logit vectors".into()));
        }
        if let Some(v) = visual.iter().chain(&motion).find(|v| !v.is_finite()) {
            return Err(Error::Input(format!("non-finite logit {v}")));
        }
        Ok(DualStepInput { step, visual, motion })
    }

    pub fn vocab_size(&self) -> usize {
        self.visual.len()
    }
}

/// Hyperparameters of the synergy score, the pruning rule and the basic
/// synergy term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynergyParams {
    /// Weights of the five synergy components, in order: visual and motion
    /// exponential terms, mean term, log-disagreement, power term, squared
    /// disagreement.
    pub alpha: [f64; 6],
    /// Weight of the minimum term in the basic synergy score.
    pub gamma: f64,
    /// Integer exponent of the power term.
    pub theta: u32,
    /// Base threshold for distribution pruning.
    pub beta: f64,
}

impl Default for SynergyParams {
    fn default() -> Self {
        SynergyParams {
            alpha: [0.5, 0.2, 0.4, 0.8, 0.3, 2.0],
            gamma: 0.5,
            theta: 2,
            beta: 0.2,
        }
    }
}

impl SynergyParams {
    pub fn validate(&self) -> Result<()> {
        if let Some(a) = self.alpha.iter().find(|a| !a.is_finite() || **a < 0.0) {
            return Err(Error::Config(format!("alpha weights must be finite and non-negative, got {a}")));
        }
        if self.alpha[..3].iter().any(|a| *a <= 0.0) {
            return Err(Error::Config("alpha1, alpha2 and alpha3 must be strictly positive".into()));
        }
        if !self.gamma.is_finite() || self.gamma < 0.0 {
            return Err(Error::Config(format!("gamma must be non-negative, got {}", self.gamma)));
        }
        if self.theta < 1 {
            return Err(Error::Config("theta must be a positive integer".into()));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::Config(format!("beta must lie in [0, 1], got {}", self.beta)));
        }
        Ok(())
    }
}

/// OpenPose BODY-18 keypoint indices.
pub mod body18 {
    pub const NOSE: usize = 0;
    pub const NECK: usize = 1;
    pub const R_SHOULDER: usize = 2;
    pub const R_ELBOW: usize = 3;
    pub const R_WRIST: usize = 4;
    pub const L_SHOULDER: usize = 5;
    pub const L_ELBOW: usize = 6;
    pub const L_WRIST: usize = 7;
    pub const R_HIP: usize = 8;
    pub const R_KNEE: usize = 9;
    pub const R_ANKLE: usize = 10;
    pub const L_HIP: usize = 11;
    pub const L_KNEE: usize = 12;
    pub const L_ANKLE: usize = 13;
    pub const R_EYE: usize = 14;
    pub const L_EYE: usize = 15;
    pub const R_EAR: usize = 16;
    pub const L_EAR: usize = 17;

    pub const COUNT: usize = 18;

    pub const FACE: [usize; 5] = [NOSE, R_EYE, L_EYE, R_EAR, L_EAR];
    pub const ARMS: [usize; 6] = [R_SHOULDER, R_ELBOW, R_WRIST, L_SHOULDER, L_ELBOW, L_WRIST];
    pub const TORSO: [usize; 3] = [NECK, R_HIP, L_HIP];
    pub const LEGS: [usize; 4] = [R_KNEE, R_ANKLE, L_KNEE, L_ANKLE];
}

/// Minimum confidence (exclusive) for a keypoint to count as visible.
pub const VISIBILITY_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Keypoint {
    pub x: f64,
    pub y: f64,
    pub confidence: f64,
}

impl Keypoint {
    pub fn new(x: f64, y: f64, confidence: f64) -> Result<Self> {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::Input(format!("keypoint coordinates must be finite: ({x}, {y})")));
        }
        if !(0.0..=1.0).contains(&confidence) {
            return Err(Error::Input(format!("keypoint confidence {confidence} outside [0, 1]")));
        }
        Ok(Keypoint { x, y, confidence })
    }

    pub fn is_visible(&self) -> bool {
        self.confidence > VISIBILITY_THRESHOLD
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl BoundingBox {
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Result<Self> {
        let finite = [x_min, y_min, x_max, y_max].iter().all(|v| v.is_finite());
        if !finite || x_min >= x_max || y_min >= y_max {
            return Err(Error::Input(format!(
                "degenerate bounding box [{x_min}, {y_min}, {x_max}, {y_max}]"
            )));
        }
        Ok(BoundingBox { x_min, y_min, x_max, y_max })
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        (self.x_min..=self.x_max).contains(&x) && (self.y_min..=self.y_max).contains(&y)
    }
}

/// One detected person: 18 keypoints in BODY-18 order and a bounding box.
#[derive(Debug, Clone, PartialEq)]
pub struct PersonDetection {
    pub keypoints: [Keypoint; body18::COUNT],
    pub bbox: BoundingBox,
}

impl PersonDetection {
    pub fn new(keypoints: [Keypoint; body18::COUNT], bbox: BoundingBox) -> Self {
        PersonDetection { keypoints, bbox }
    }

    /// Visible keypoints lying outside the bounding box. Tolerated on ingest.
    pub fn keypoints_outside_bbox(&self) -> usize {
        self.keypoints
            .iter()
            .filter(|k| k.is_visible() && !self.bbox.contains(k.x, k.y))
            .count()
    }

    pub fn visible_count(&self) -> usize {
        self.keypoints.iter().filter(|k| k.is_visible()).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoseFrame {
    pub index: u64,
    pub persons: Vec<PersonDetection>,
}

impl PoseFrame {
    /// The sole person in the frame, if there is exactly one.
    pub fn single_person(&self) -> Option<&PersonDetection> {
        match self.persons.as_slice() {
            [p] => Some(p),
            _ => None,
        }
    }
}

/// Keypoint detections for a whole clip.
#[derive(Debug, Clone, PartialEq)]
pub struct PoseTrack {
    pub frames: Vec<PoseFrame>,
    pub fps: f64,
    pub image_width: u32,
    pub image_height: u32,
    pub source_id: String,
}

impl PoseTrack {
    pub fn new(
        frames: Vec<PoseFrame>,
        fps: f64,
        image_width: u32,
        image_height: u32,
        source_id: impl Into<String>,
    ) -> Result<Self> {
        if !fps.is_finite() || fps <= 0.0 {
            return Err(Error::Input(format!("fps must be positive, got {fps}")));
        }
        if image_width == 0 || image_height == 0 {
            return Err(Error::Input("image dimensions must be positive".into()));
        }
        if let Some(w) = frames.windows(2).find(|w| w[1].index <= w[0].index) {
            return Err(Error::Input(format!(
                "frame indices not strictly increasing: {} then {}",
                w[0].index, w[1].index
            )));
        }
        Ok(PoseTrack { frames, fps, image_width, image_height, source_id: source_id.into() })
    }

    pub fn duration_seconds(&self) -> f64 {
        self.frames.len() as f64 / self.fps
    }

    pub fn image_area(&self) -> f64 {
        f64::from(self.image_width) * f64::from(self.image_height)
    }

    /// A track sharing this one's metadata but holding `frames`.
    pub fn with_frames(&self, frames: Vec<PoseFrame>) -> PoseTrack {
        PoseTrack {
            frames,
            fps: self.fps,
            image_width: self.image_width,
            image_height: self.image_height,
            source_id: self.source_id.clone(),
        }
    }
}

/// A candidate caption with its reference captions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaptionPair {
    pub id: String,
    pub candidate: String,
    pub references: Vec<String>,
}

impl CaptionPair {
    pub fn new(id: impl Into<String>, candidate: impl Into<String>, references: Vec<String>) -> Result<Self> {
        let id = id.into();
        if references.is_empty() {
            return Err(Error::Input(format!("caption pair {id:?} has no references")));
        }
        Ok(CaptionPair { id, candidate: candidate.into(), references })
    }
}

/// Five-dimension judge scores for one caption, each in [0, 10].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JudgeScores {
    pub details_of_movements: f64,
    pub interaction_with_environment: f64,
    pub motivation_and_reason: f64,
    pub micro_expressions_and_emotions: f64,
    pub character_attributes: f64,
}

impl JudgeScores {
    pub const DIMENSIONS: [&'static str; 5] = [
        "details_of_movements",
        "interaction_with_environment",
        "motivation_and_reason",
        "micro_expressions_and_emotions",
        "character_attributes",
    ];

    pub fn new(values: [f64; 5]) -> Result<Self> {
        let s = JudgeScores {
            details_of_movements: values[0],
            interaction_with_environment: values[1],
            motivation_and_reason: values[2],
            micro_expressions_and_emotions: values[3],
            character_attributes: values[4],
        };
        s.validate()?;
        Ok(s)
    }

    pub fn values(&self) -> [f64; 5] {
        [
            self.details_of_movements,
            self.interaction_with_environment,
            self.motivation_and_reason,
            self.micro_expressions_and_emotions,
            self.character_attributes,
        ]
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in Self::DIMENSIONS.iter().zip(self.values()) {
            if !(0.0..=10.0).contains(&v) {
                return Err(Error::Input(format!("judge score {name} = {v} outside [0, 10]")));
            }
        }
        Ok(())
    }
}

/// One True/False question outcome.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QaRecord {
    pub id: String,
    pub pred: bool,
    pub gold: bool,
}
