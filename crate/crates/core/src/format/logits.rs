use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{from_line, Lines};
use crate::error::{Error, Result};
use crate::model::DualStepInput;

const FORMAT_TAG: &str = "dual_logits";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    format: String,
    vocab: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WireStep {
    step: usize,
    visual: Vec<Option<f64>>,
    motion: Vec<Option<f64>>,
}

#[derive(Serialize)]
struct WireStepOut<'a> {
    step: usize,
    visual: &'a [f64],
    motion: &'a [f64],
}

/// A fully materialized dual logit stream.
#[derive(Debug, Clone, PartialEq)]
pub struct LogitStream {
    pub vocab: Vec<String>,
    pub steps: Vec<DualStepInput>,
}

pub fn parse_logit_stream(bytes: &[u8]) -> Result<LogitStream> {
    let mut reader = LogitStreamReader::new(bytes)?;
    let steps = reader.by_ref().collect::<Result<Vec<_>>>()?;
    Ok(LogitStream { vocab: reader.vocab, steps })
}

/// Streaming reader over a dual logit JSONL stream.
///
/// The header is consumed on construction; each iteration yields one
/// validated step.
pub struct LogitStreamReader<R> {
    vocab: Vec<String>,
    lines: Lines<R>,
    next_step: usize,
}

impl<R: BufRead> LogitStreamReader<R> {
    pub fn new(reader: R) -> Result<Self> {
        let mut lines = Lines::new(reader);
        let (line, text) = lines
            .next()
            .ok_or_else(|| Error::schema(1, "missing dual_logits header line"))??;
        let header: Header = serde_json::from_str(&text)
            .map_err(|e| Error::schema(line, format!("invalid header: {e}")))?;
        if header.format != FORMAT_TAG {
            return Err(Error::schema(line, format!("expected format {FORMAT_TAG:?}, found {:?}", header.format)));
        }
        if header.vocab.is_empty() {
            return Err(Error::schema(line, "vocabulary is empty"));
        }
        Ok(LogitStreamReader { vocab: header.vocab, lines, next_step: 0 })
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    fn parse_step(&mut self, line: usize, text: &str) -> Result<DualStepInput> {
        let wire: WireStep = match from_line(line, text) {
            Ok(w) => w,
            // Python's json module writes NaN/Infinity as bare tokens.
            Err(e) => from_line(line, &replace_nonfinite_tokens(text)).map_err(|_| e)?,
        };
        if wire.step != self.next_step {
            return Err(Error::ordering(
                line,
                format!("expected step {}, found {}", self.next_step, wire.step),
            ));
        }
        let v = self.vocab.len();
        if wire.visual.len() != v || wire.motion.len() != v {
            return Err(Error::schema(
                line,
                format!(
                    "vocabulary has {v} entries but visual has {} and motion has {}",
                    wire.visual.len(),
                    wire.motion.len()
                ),
            ));
        }
        let finite = |xs: Vec<Option<f64>>, name: &str| -> Result<Vec<f64>> {
            xs.into_iter()
                .enumerate()
                .map(|(i, x)| match x {
                    Some(x) if x.is_finite() => Ok(x),
                    _ => Err(Error::value(line, format!("{name}[{i}] is not a finite number"))),
                })
                .collect()
        };
        let visual = finite(wire.visual, "visual")?;
        let motion = finite(wire.motion, "motion")?;
        self.next_step += 1;
        Ok(DualStepInput { step: wire.step, visual, motion })
    }
}

impl<R: BufRead> Iterator for LogitStreamReader<R> {
    type Item = Result<DualStepInput>;

    fn next(&mut self) -> Option<Self::Item> {
        let item = self.lines.next()?;
        Some(item.and_then(|(line, text)| self.parse_step(line, &text)))
    }
}

fn replace_nonfinite_tokens(text: &str) -> String {
    text.replace("-Infinity", "null")
        .replace("Infinity", "null")
        .replace("NaN", "null")
}

pub fn write_logit_stream<W: Write>(stream: &LogitStream, mut out: W) -> Result<()> {
    let header = Header { format: FORMAT_TAG.to_string(), vocab: stream.vocab.clone() };
    serde_json::to_writer(&mut out, &header).map_err(std::io::Error::from)?;
    out.write_all(b"\n")?;
    for s in &stream.steps {
        let wire = WireStepOut { step: s.step, visual: &s.visual, motion: &s.motion };
        serde_json::to_writer(&mut out, &wire).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
