//! Motion synergetic decoding.
//!
//! Each decode step sees two logit vectors over the same vocabulary: one
//! conditioned on the raw video, one on motion-specific input. Both are
//! turned into log-probabilities, combined per token into a synergy score,
//! pruned against a score-adjusted threshold on the visual probability, and
//! the survivors are renormalized with a softmax over their scores.
//!
//! All scoring happens per token at the current step. The engine carries no
//! state between steps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DualStepInput, SynergyParams, TokenId};

/// Which per-token score drives pruning and the final softmax.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreMode {
    /// Sum of the five synergy components.
    #[default]
    FiveComponent,
    /// Mean of the two pathways plus a weighted minimum.
    Basic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeMode {
    Greedy,
    Sample { seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeConfig {
    pub params: SynergyParams,
    pub mode: DecodeMode,
    pub max_steps: usize,
    pub stop_token: Option<TokenId>,
    pub score_mode: ScoreMode,
}

impl Default for DecodeConfig {
    fn default() -> Self {
        DecodeConfig {
            params: SynergyParams::default(),
            mode: DecodeMode::Greedy,
            max_steps: usize::MAX,
            stop_token: None,
            score_mode: ScoreMode::FiveComponent,
        }
    }
}

impl DecodeConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.max_steps == 0 {
            return Err(Error::Config("max_steps must be at least 1".into()));
        }
        Ok(())
    }
}

/// Per-token synergy terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SynergyBreakdown {
    pub basic: f64,
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
    pub l4: f64,
    pub l5: f64,
    /// `l1 + l2 + l3 + l4 + l5`, summed in that order.
    pub total: f64,
}

impl SynergyBreakdown {
    pub fn score(&self, mode: ScoreMode) -> f64 {
        match mode {
            ScoreMode::FiveComponent => self.total,
            ScoreMode::Basic => self.basic,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub step: usize,
    pub chosen: TokenId,
    /// Retained tokens in ascending id order.
    pub retained: Vec<TokenId>,
    /// Probability of each retained token, aligned with `retained`.
    pub distribution: Vec<f64>,
    /// Synergy terms for every token in the vocabulary.
    pub breakdown: Vec<SynergyBreakdown>,
    /// True when pruning removed every token and the fallback applied.
    pub fallback: bool,
}

/// Log-softmax with max shift.
pub fn normalize_pathway(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let log_sum = logits.iter().map(|x| (x - max).exp()).sum::<f64>().ln();
    logits.iter().map(|x| (x - max) - log_sum).collect()
}

/// `½(lv + lm) + γ·min(lv, lm)` per token, on normalized pathways.
pub fn basic_synergy(visual: &[f64], motion: &[f64], gamma: f64) -> Vec<f64> {
    visual
        .iter()
        .zip(motion)
        .map(|(&v, &m)| 0.5 * (v + m) + gamma * v.min(m))
        .collect()
}

/// The five synergy components per token, on normalized pathways.
pub fn synergy_components(visual: &[f64], motion: &[f64], params: &SynergyParams) -> Vec<SynergyBreakdown> {
    let [a1, a2, a3, a4, a5, a6] = params.alpha;
    let theta = params.theta as i32;
    visual
        .iter()
        .zip(motion)
        .map(|(&v, &m)| {
            let d = v - m;
            let l1 = a1 * v.exp() + a2 * m.exp();
            let l2 = a3 * (v + m) / 2.0;
            let l3 = a4 * d.abs().ln_1p();
            let l4 = a5 * d.powi(theta);
            let l5 = a6 * (d * d);
            SynergyBreakdown {
                basic: 0.5 * (v + m) + params.gamma * v.min(m),
                l1,
                l2,
                l3,
                l4,
                l5,
                total: l1 + l2 + l3 + l4 + l5,
            }
        })
        .collect()
}

/// Tokens whose visual probability clears `beta * (1 + score)`. May be empty.
pub fn head_set(visual: &[f64], scores: &[f64], beta: f64) -> Vec<TokenId> {
    visual
        .iter()
        .zip(scores)
        .enumerate()
        .filter(|(_, (&lv, &s))| lv.exp() >= beta * (1.0 + s))
        .map(|(i, _)| TokenId::from(i))
        .collect()
}

/// Pruned vocabulary, never empty.
///
/// When no token clears the threshold the result is the singleton holding
/// the highest-scoring token. Returns the set and whether the fallback fired.
pub fn prune_vocab(visual: &[f64], scores: &[f64], beta: f64) -> (Vec<TokenId>, bool) {
    let head = head_set(visual, scores, beta);
    if head.is_empty() {
        let all: Vec<TokenId> = (0..scores.len()).map(TokenId::from).collect();
        (vec![argmax_over(&all, scores)], true)
    } else {
        (head, false)
    }
}

/// Softmax of `scores` restricted to `retained`; other tokens get zero.
pub fn msd_distribution(scores: &[f64], retained: &[TokenId]) -> Vec<f64> {
    let mut p = vec![0.0; scores.len()];
    let max = retained.iter().map(|t| scores[t.index()]).fold(f64::NEG_INFINITY, f64::max);
    let mut z = 0.0;
    for t in retained {
        let e = (scores[t.index()] - max).exp();
        p[t.index()] = e;
        z += e;
    }
    for t in retained {
        p[t.index()] /= z;
    }
    p
}

/// Highest value among `candidates`, lowest id on ties.
fn argmax_over(candidates: &[TokenId], values: &[f64]) -> TokenId {
    let mut best = candidates[0];
    for &t in &candidates[1..] {
        if values[t.index()] > values[best.index()] {
            best = t;
        }
    }
    best
}

/// Greedy argmax over raw logits, lowest id on ties.
pub fn argmax(values: &[f64]) -> TokenId {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    TokenId::from(best)
}

pub fn decode_step(step: &DualStepInput, cfg: &DecodeConfig) -> StepResult {
    let visual = normalize_pathway(&step.visual);
    let motion = normalize_pathway(&step.motion);
    let breakdown = synergy_components(&visual, &motion, &cfg.params);
    let scores: Vec<f64> = breakdown.iter().map(|b| b.score(cfg.score_mode)).collect();

    let (retained, fallback) = prune_vocab(&visual, &scores, cfg.params.beta);
    let full = msd_distribution(&scores, &retained);
    let distribution: Vec<f64> = retained.iter().map(|t| full[t.index()]).collect();

    let chosen = match cfg.mode {
        DecodeMode::Greedy => argmax_over(&retained, &scores),
        DecodeMode::Sample { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(step.step as u64));
            let r: f64 = rng.random();
            let mut acc = 0.0;
            let mut pick = *retained.last().expect("retained is never empty");
            for (t, p) in retained.iter().zip(&distribution) {
                acc += p;
                if r < acc {
                    pick = *t;
                    break;
                }
            }
            pick
        }
    };

    StepResult { step: step.step, chosen, retained, distribution, breakdown, fallback }
}

/// Decodes a fallible stream one step at a time, handing each input and its
/// result to `sink`. Stops after the stop token, after `max_steps` steps or
/// at the end of the stream, and returns the number of steps decoded.
pub fn decode_stream<I, F>(steps: I, cfg: &DecodeConfig, mut sink: F) -> Result<usize>
where
    I: IntoIterator<Item = Result<DualStepInput>>,
    F: FnMut(&DualStepInput, StepResult) -> Result<()>,
{
    let mut count = 0;
    for step in steps.into_iter().take(cfg.max_steps) {
        let step = step?;
        let result = decode_step(&step, cfg);
        let stop = Some(result.chosen) == cfg.stop_token;
        sink(&step, result)?;
        count += 1;
        if stop {
            break;
        }
    }
    if count == 0 {
        return Err(Error::Input("cannot decode an empty stream".into()));
    }
    Ok(count)
}

/// Runs [`decode_step`] over a stream, stopping after the stop token, after
/// `max_steps` steps, or at the end of the stream.
pub fn decode_trace<I>(steps: I, cfg: &DecodeConfig) -> Result<Vec<StepResult>>
where
    I: IntoIterator<Item = DualStepInput>,
{
    let mut out = Vec::new();
    decode_stream(steps.into_iter().map(Ok), cfg, |_, r| {
        out.push(r);
        Ok(())
    })?;
    Ok(out)
}

pub fn decode_sequence<I>(steps: I, cfg: &DecodeConfig) -> Result<Vec<TokenId>>
where
    I: IntoIterator<Item = DualStepInput>,
{
    Ok(decode_trace(steps, cfg)?.into_iter().map(|r| r.chosen).collect())
}

/// One line of the decode report.
#[derive(Debug, Clone, Serialize)]
pub struct DecodeReportLine<'a> {
    pub step: usize,
    pub chosen: &'a str,
    pub retained: Vec<&'a str>,
    pub p: Vec<f64>,
    /// Breakdown of the chosen token; absent for the visual-only baseline.
    pub synergy: Option<SynergyBreakdown>,
}

impl<'a> DecodeReportLine<'a> {
    pub fn from_result(result: &StepResult, vocab: &'a [String]) -> Self {
        DecodeReportLine {
            step: result.step,
            chosen: &vocab[result.chosen.index()],
            retained: result.retained.iter().map(|t| vocab[t.index()].as_str()).collect(),
            p: result.distribution.clone(),
            synergy: Some(result.breakdown[result.chosen.index()]),
        }
    }

    /// Visual-only greedy baseline: the whole vocabulary with its visual
    /// probabilities.
    pub fn visual_baseline(step: &DualStepInput, vocab: &'a [String]) -> Self {
        DecodeReportLine {
            step: step.step,
            chosen: &vocab[argmax(&step.visual).index()],
            retained: vocab.iter().map(String::as_str).collect(),
            p: normalize_pathway(&step.visual).iter().map(|l| l.exp()).collect(),
            synergy: None,
        }
    }
}
