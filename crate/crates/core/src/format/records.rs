use std::collections::BTreeMap;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use super::{from_line, Lines};
use crate::error::{Error, Result};
use crate::model::{CaptionPair, JudgeScores, QaRecord};

/// Reads `{"id","candidate","references"}` lines.
pub fn read_caption_pairs<R: BufRead>(reader: R) -> Result<Vec<CaptionPair>> {
    Lines::new(reader)
        .map(|item| {
            let (line, text) = item?;
            let pair: CaptionPair = from_line(line, &text)?;
            if pair.references.is_empty() {
                return Err(Error::schema(line, format!("caption {:?} has no references", pair.id)));
            }
            Ok(pair)
        })
        .collect()
}

/// A judge score line: `{"id": str, "scores": {dimension: value}}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JudgeRecord {
    pub id: String,
    pub scores: JudgeScores,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WireJudge {
    id: String,
    scores: BTreeMap<String, f64>,
}

pub fn read_judge_scores<R: BufRead>(reader: R) -> Result<Vec<JudgeRecord>> {
    Lines::new(reader)
        .map(|item| {
            let (line, text) = item?;
            let wire: WireJudge = from_line(line, &text)?;
            let mut values = [0.0; 5];
            for (slot, dim) in values.iter_mut().zip(JudgeScores::DIMENSIONS) {
                *slot = *wire
                    .scores
                    .get(dim)
                    .ok_or_else(|| Error::schema(line, format!("judge record {:?} lacks {dim}", wire.id)))?;
            }
            if let Some(extra) = wire.scores.keys().find(|k| !JudgeScores::DIMENSIONS.contains(&k.as_str())) {
                return Err(Error::schema(line, format!("unknown judge dimension {extra:?}")));
            }
            let scores = JudgeScores::new(values).map_err(|e| Error::value(line, e.to_string()))?;
            Ok(JudgeRecord { id: wire.id, scores })
        })
        .collect()
}

pub fn read_qa_records<R: BufRead>(reader: R) -> Result<Vec<QaRecord>> {
    Lines::new(reader)
        .map(|item| {
            let (line, text) = item?;
            from_line(line, &text)
        })
        .collect()
}
