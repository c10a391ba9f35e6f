//! Synthetic disagreement scenarios for measuring hallucination suppression.
//!
//! Each step has a truth token and a hallucination token. The visual pathway
//! favors the hallucination by `visual_margin`; the motion pathway favors
//! the truth by `motion_margin`; every other entry is zero. Gaussian noise
//! is optionally added to all entries. A trial counts how often plain
//! visual argmax and the synergy decoder pick the hallucination.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DualStepInput, SynergyParams, TokenId};
use crate::msd::{argmax, decode_step, DecodeConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub vocab_size: usize,
    pub steps: usize,
    pub truth_tokens: Vec<TokenId>,
    pub hallucination_tokens: Vec<TokenId>,
    pub visual_margin: f64,
    pub motion_margin: f64,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl ScenarioSpec {
    /// Truth token `2t mod V` and hallucination token `2t + 1 mod V` at step `t`.
    pub fn rotating(
        vocab_size: usize,
        steps: usize,
        visual_margin: f64,
        motion_margin: f64,
        noise_sigma: f64,
        seed: u64,
    ) -> Self {
        let v = vocab_size.max(1);
        ScenarioSpec {
            vocab_size,
            steps,
            truth_tokens: (0..steps).map(|t| TokenId::from((2 * t) % v)).collect(),
            hallucination_tokens: (0..steps).map(|t| TokenId::from((2 * t + 1) % v)).collect(),
            visual_margin,
            motion_margin,
            noise_sigma,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.vocab_size < 2 {
            return Err(Error::Config("scenario vocabulary needs at least 2 tokens".into()));
        }
        if self.steps < 1 {
            return Err(Error::Config("scenario needs at least one step".into()));
        }
        if self.truth_tokens.len() != self.steps || self.hallucination_tokens.len() != self.steps {
            return Err(Error::Config("one truth and one hallucination token per step".into()));
        }
        for (t, (truth, hall)) in self.truth_tokens.iter().zip(&self.hallucination_tokens).enumerate() {
            if truth.index() >= self.vocab_size || hall.index() >= self.vocab_size {
                return Err(Error::Config(format!("step {t}: token outside the vocabulary")));
            }
            if truth == hall {
                return Err(Error::Config(format!("step {t}: truth and hallucination tokens coincide")));
            }
        }
        if !self.visual_margin.is_finite() || !self.motion_margin.is_finite() {
            return Err(Error::Config("margins must be finite".into()));
        }
        if !self.noise_sigma.is_finite() || self.noise_sigma < 0.0 {
            return Err(Error::Config("noise_sigma must be finite and non-negative".into()));
        }
        Ok(())
    }
}

fn generate_with_seed(spec: &ScenarioSpec, seed: u64) -> Vec<DualStepInput> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, spec.noise_sigma).expect("sigma validated");
    (0..spec.steps)
        .map(|t| {
            let mut visual = vec![0.0; spec.vocab_size];
            let mut motion = vec![0.0; spec.vocab_size];
            visual[spec.hallucination_tokens[t].index()] = spec.visual_margin;
            motion[spec.truth_tokens[t].index()] = spec.motion_margin;
            if spec.noise_sigma > 0.0 {
                for x in visual.iter_mut().chain(motion.iter_mut()) {
                    *x += noise.sample(&mut rng);
                }
            }
            DualStepInput { step: t, visual, motion }
        })
        .collect()
}

/// The stream for the scenario's own seed.
pub fn generate_scenario(spec: &ScenarioSpec) -> Vec<DualStepInput> {
    generate_with_seed(spec, spec.seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TrialOutcome {
    pub visual_only_errors: u64,
    pub msd_errors: u64,
    pub trials: u64,
}

/// Trial `k` uses seed `spec.seed + k`. Trials run in parallel.
pub fn run_comparison(spec: &ScenarioSpec, params: &SynergyParams, trials: u64) -> Result<TrialOutcome> {
    spec.validate()?;
    params.validate()?;
    if trials < 1 {
        return Err(Error::Config("at least one trial is required".into()));
    }
    let cfg = DecodeConfig { params: *params, ..Default::default() };
    let (visual_only_errors, msd_errors) = (0..trials)
        .into_par_iter()
        .map(|k| {
            let stream = generate_with_seed(spec, spec.seed.wrapping_add(k));
            let mut errors = (0u64, 0u64);
            for (t, step) in stream.iter().enumerate() {
                let hall = spec.hallucination_tokens[t];
                errors.0 += u64::from(argmax(&step.visual) == hall);
                errors.1 += u64::from(decode_step(step, &cfg).chosen == hall);
            }
            errors
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(TrialOutcome { visual_only_errors, msd_errors, trials })
}

/// Output record of the simulate command.
#[derive(Debug, Clone, Serialize)]
pub struct SimulationReport {
    pub spec: ScenarioSpec,
    pub visual_only_errors: u64,
    pub msd_errors: u64,
    pub trials: u64,
    /// `msd_errors / visual_only_errors`; absent when the baseline made no errors.
    pub error_ratio: Option<f64>,
}

impl SimulationReport {
    pub fn new(spec: ScenarioSpec, outcome: TrialOutcome) -> Self {
        let error_ratio = (outcome.visual_only_errors > 0)
            .then(|| outcome.msd_errors as f64 / outcome.visual_only_errors as f64);
        SimulationReport {
            spec,
            visual_only_errors: outcome.visual_only_errors,
            msd_errors: outcome.msd_errors,
            trials: outcome.trials,
            error_ratio,
        }
    }
}
