use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::JudgeScores;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JudgeSummary {
    pub count: usize,
    pub means: JudgeScores,
    /// Mean of the five dimension means.
    pub overall: f64,
}

pub fn judge_aggregate(scores: &[JudgeScores]) -> Result<JudgeSummary> {
    if scores.is_empty() {
        return Err(Error::Input("no judge scores to aggregate".into()));
    }
    let mut sums = [0.0; 5];
    for s in scores {
        for (acc, v) in sums.iter_mut().zip(s.values()) {
            *acc += v;
        }
    }
    let means = sums.map(|s| s / scores.len() as f64);
    let overall = means.iter().sum::<f64>() / means.len() as f64;
    Ok(JudgeSummary { count: scores.len(), means: JudgeScores::new(means)?, overall })
}
