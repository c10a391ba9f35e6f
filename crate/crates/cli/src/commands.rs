use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use msd_core::curation::{curate_track, ManifestRow};
use msd_core::format::{read_caption_pairs, read_judge_scores, read_pose_track, read_qa_records, LogitStreamReader};
use msd_core::keyframe::{sample_keyframes, KeyframeReport};
use msd_core::metrics::{classification_metrics, evaluate_captions, judge_aggregate};
use msd_core::msd::{argmax, decode_stream, DecodeConfig, DecodeMode, DecodeReportLine};
use msd_core::sim::{run_comparison, ScenarioSpec, SimulationReport};
use msd_core::{Error, TokenId};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::CliConfig;
use crate::output::{with_meta, FileError, Sink};

pub fn open(path: &Path) -> Result<BufReader<File>> {
    let file = File::open(path).map_err(Error::Io).with_context(|| format!("opening {}", path.display()))?;
    Ok(BufReader::new(file))
}

/// Exit status of a run: 0, or the highest code among per-file failures.
pub type Status = u8;

pub fn exit_code(err: &anyhow::Error) -> Status {
    if let Some(e) = err.downcast_ref::<Error>() {
        return match e.class() {
            msd_core::ErrorClass::Format => 2,
            msd_core::ErrorClass::Validation => 1,
        };
    }
    if err.downcast_ref::<std::io::Error>().is_some()
        || err.downcast_ref::<toml::de::Error>().is_some()
        || err.downcast_ref::<serde_json::Error>().is_some()
    {
        return 2;
    }
    1
}

/// Runs `work` over every input in parallel, writes successes in input
/// order and reports failures on stderr.
fn per_file<T, F, W>(inputs: &[PathBuf], sink: &mut Sink, work: F, mut write: W) -> Result<Status>
where
    T: Send,
    F: Fn(&Path) -> Result<T> + Sync,
    W: FnMut(&mut Sink, T) -> Result<()>,
{
    let results: Vec<Result<T>> = inputs.par_iter().map(|p| work(p)).collect();
    let mut status = 0;
    for (path, result) in inputs.iter().zip(results) {
        match result {
            Ok(value) => write(sink, value)?,
            Err(err) => {
                FileError::new(path, &err).report();
                status = status.max(exit_code(&err));
            }
        }
    }
    Ok(status)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CaptionLine {
    source_id: String,
    caption: String,
}

fn read_captions(path: &Path) -> Result<HashMap<String, String>> {
    let mut map = HashMap::new();
    for (n, line) in open(path)?.lines().enumerate() {
        let line = line.map_err(Error::Io)?;
        if line.trim().is_empty() {
            continue;
        }
        let row: CaptionLine = serde_json::from_str(&line)
            .map_err(|e| Error::Schema { line: n + 1, message: e.to_string() })
            .with_context(|| format!("reading captions {}", path.display()))?;
        map.insert(row.source_id, row.caption);
    }
    Ok(map)
}

pub fn filter(inputs: &[PathBuf], captions: Option<&Path>, cfg: &CliConfig, sink: &mut Sink) -> Result<Status> {
    let captions = captions.map(read_captions).transpose()?;
    per_file(
        inputs,
        sink,
        |path| {
            let track = read_pose_track(open(path)?).with_context(|| format!("reading {}", path.display()))?;
            let caption = captions.as_ref().and_then(|c| {
                let found = c.get(&track.source_id).map(String::as_str);
                if found.is_none() {
                    log::warn!("no caption for {}; keyword gate skipped", track.source_id);
                }
                found
            });
            Ok(curate_track(&track, &cfg.filter, caption))
        },
        |sink, rows: Vec<ManifestRow>| Ok(rows.iter().try_for_each(|r| sink.line(r))?),
    )
}

pub fn keyframes(inputs: &[PathBuf], sink: &mut Sink) -> Result<Status> {
    per_file(
        inputs,
        sink,
        |path| {
            let track = read_pose_track(open(path)?).with_context(|| format!("reading {}", path.display()))?;
            let keyframes = sample_keyframes(&track)?;
            Ok(KeyframeReport { source_id: track.source_id, keyframes })
        },
        |sink, report| Ok(sink.line(&report)?),
    )
}

#[derive(Serialize)]
struct SequenceLine<'a> {
    sequence: Vec<&'a str>,
}

pub struct DecodeOptions {
    pub no_msd: bool,
}

pub fn decode(input: &Path, cfg: &CliConfig, opts: &DecodeOptions, sink: &mut Sink) -> Result<Status> {
    let reader = LogitStreamReader::new(open(input)?).with_context(|| format!("reading {}", input.display()))?;
    let vocab = reader.vocab().to_vec();
    let stop_token = match &cfg.decode.stop_token {
        None => None,
        Some(word) => Some(TokenId::from(
            vocab
                .iter()
                .position(|v| v == word)
                .ok_or_else(|| Error::Config(format!("stop token {word:?} is not in the vocabulary")))?,
        )),
    };
    let decode_cfg = DecodeConfig {
        params: cfg.synergy,
        mode: cfg.decode.sample_seed.map_or(DecodeMode::Greedy, |seed| DecodeMode::Sample { seed }),
        max_steps: cfg.decode.max_steps.unwrap_or(usize::MAX),
        stop_token,
        score_mode: cfg.decode.score_mode,
    };
    decode_cfg.validate()?;

    let mut sequence: Vec<TokenId> = Vec::new();
    if opts.no_msd {
        let mut count = 0;
        for step in reader.take(decode_cfg.max_steps) {
            let step = step.with_context(|| format!("reading {}", input.display()))?;
            let chosen = argmax(&step.visual);
            sink.line(&DecodeReportLine::visual_baseline(&step, &vocab))?;
            sequence.push(chosen);
            count += 1;
            if Some(chosen) == stop_token {
                break;
            }
        }
        if count == 0 {
            return Err(Error::Input("cannot decode an empty stream".into()).into());
        }
    } else {
        decode_stream(reader, &decode_cfg, |_, result| {
            sink.line(&DecodeReportLine::from_result(&result, &vocab))?;
            sequence.push(result.chosen);
            Ok(())
        })
        .with_context(|| format!("decoding {}", input.display()))?;
    }
    sink.line(&SequenceLine { sequence: sequence.iter().map(|t| vocab[t.index()].as_str()).collect() })?;
    Ok(0)
}

pub struct ScoreInputs<'a> {
    pub captions: Option<&'a Path>,
    pub judge: Option<&'a Path>,
    pub qa: Option<&'a Path>,
}

pub fn score(inputs: &ScoreInputs, cfg: &CliConfig, canonical: bool, sink: &mut Sink) -> Result<Status> {
    let mut report = json!({});
    if let Some(path) = inputs.captions {
        let pairs = read_caption_pairs(open(path)?).with_context(|| format!("reading {}", path.display()))?;
        report["captions"] = serde_json::to_value(evaluate_captions(&pairs, &cfg.metrics)?)?;
    }
    if let Some(path) = inputs.judge {
        let records = read_judge_scores(open(path)?).with_context(|| format!("reading {}", path.display()))?;
        let scores: Vec<_> = records.into_iter().map(|r| r.scores).collect();
        report["judge"] = serde_json::to_value(judge_aggregate(&scores)?)?;
    }
    if let Some(path) = inputs.qa {
        let records = read_qa_records(open(path)?).with_context(|| format!("reading {}", path.display()))?;
        report["classification"] = serde_json::to_value(classification_metrics(&records)?)?;
    }
    sink.document(&with_meta(report, canonical))?;
    Ok(0)
}

pub fn simulate(spec: ScenarioSpec, trials: u64, cfg: &CliConfig, canonical: bool, sink: &mut Sink) -> Result<Status> {
    let outcome = run_comparison(&spec, &cfg.synergy, trials)?;
    let report = SimulationReport::new(spec, outcome);
    sink.document(&with_meta(serde_json::to_value(report)?, canonical))?;
    Ok(0)
}
