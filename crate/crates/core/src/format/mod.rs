//! Line-oriented JSON formats for pose tracks, dual logit streams and
//! caption/judge/QA records.
//!
//! Readers are streaming: they pull one line at a time from a [`BufRead`]
//! and report errors with the 1-based line number. Writers emit the
//! canonical form, which the readers accept and re-emit byte for byte.

mod logits;
mod pose;
mod records;

pub use logits::{parse_logit_stream, write_logit_stream, LogitStream, LogitStreamReader};
pub use pose::{parse_pose_track, read_pose_track, write_pose_track};
pub use records::{read_caption_pairs, read_judge_scores, read_qa_records, JudgeRecord};

use std::io::BufRead;

use crate::error::{Error, Result};

/// Iterates over non-blank lines, yielding `(line_number, text)`.
pub(crate) struct Lines<R> {
    inner: std::io::Lines<R>,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    pub(crate) fn new(reader: R) -> Self {
        Lines { inner: reader.lines(), line: 0 }
    }
}

impl<R: BufRead> Iterator for Lines<R> {
    type Item = Result<(usize, String)>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let text = match self.inner.next()? {
                Ok(t) => t,
                Err(e) => return Some(Err(Error::Io(e))),
            };
            self.line += 1;
            if !text.trim().is_empty() {
                return Some(Ok((self.line, text)));
            }
        }
    }
}

pub(crate) fn from_line<T: serde::de::DeserializeOwned>(line: usize, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::parse(line, e.to_string()))
}
