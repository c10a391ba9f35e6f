use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::QaRecord;

/// True/False metrics with True as the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

impl ClassificationReport {
    pub fn from_counts(tp: usize, fp: usize, fn_: usize, tn: usize) -> Self {
        let total = tp + fp + fn_ + tn;
        let div = |num: usize, den: usize, what: &str| {
            if den == 0 {
                log::warn!("{what} undefined (zero denominator); reporting 0");
                0.0
            } else {
                num as f64 / den as f64
            }
        };
        let precision = div(tp, tp + fp, "precision");
        let recall = div(tp, tp + fn_, "recall");
        let f1 = if precision + recall > 0.0 { 2.0 * precision * recall / (precision + recall) } else { 0.0 };
        ClassificationReport {
            accuracy: div(tp + tn, total, "accuracy"),
            precision,
            recall,
            f1,
            tp,
            fp,
            fn_,
            tn,
        }
    }
}

pub fn classification_metrics(records: &[QaRecord]) -> Result<ClassificationReport> {
    if records.is_empty() {
        return Err(Error::Input("no True/False records".into()));
    }
    let (mut tp, mut fp, mut fn_, mut tn) = (0, 0, 0, 0);
    for r in records {
        match (r.pred, r.gold) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => tn += 1,
        }
    }
    Ok(ClassificationReport::from_counts(tp, fp, fn_, tn))
}
