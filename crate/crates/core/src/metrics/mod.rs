//! Caption evaluation: BLEU, ROUGE, CIDEr, a simplified METEOR, True/False
//! classification metrics and judge-score aggregation.
//!
//! Every text metric shares [`tokenize`]. Per-pair statistics are computed
//! in parallel and reduced sequentially in input order, so results do not
//! depend on the thread count.

mod bleu;
mod cider;
mod classify;
mod judge;
mod meteor;
mod rouge;

pub use bleu::{bleu, bleu_sentence_smoothed, BleuMode};
pub use cider::cider;
pub use classify::{classification_metrics, ClassificationReport};
pub use judge::{judge_aggregate, JudgeSummary};
pub use meteor::{meteor_pair, meteor_simplified};
pub use rouge::{lcs_len, rouge_l, rouge_n, RougeVariant};

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::CaptionPair;

/// Lowercases, splits on whitespace and trims non-alphanumeric characters
/// from both ends of every token. Tokens left empty are dropped.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|t| t.trim_matches(|c: char| !c.is_alphanumeric()).to_lowercase())
        .filter(|t| !t.is_empty())
        .collect()
}

pub(crate) type NGramCounts<'a> = HashMap<&'a [String], usize>;

pub(crate) fn ngram_counts(tokens: &[String], n: usize) -> NGramCounts<'_> {
    let mut counts = HashMap::new();
    if n > 0 && tokens.len() >= n {
        for w in tokens.windows(n) {
            *counts.entry(w).or_insert(0) += 1;
        }
    }
    counts
}

/// A caption pair after tokenization.
#[derive(Debug, Clone)]
pub struct TokenizedPair {
    pub candidate: Vec<String>,
    pub references: Vec<Vec<String>>,
}

impl TokenizedPair {
    pub fn new(pair: &CaptionPair) -> Self {
        TokenizedPair {
            candidate: tokenize(&pair.candidate),
            references: pair.references.iter().map(|r| tokenize(r)).collect(),
        }
    }
}

pub(crate) fn tokenize_all(pairs: &[CaptionPair]) -> Vec<TokenizedPair> {
    pairs.par_iter().map(TokenizedPair::new).collect()
}

/// Corpus mean of a per-pair score, summed in input order.
pub(crate) fn corpus_mean<F>(pairs: &[TokenizedPair], per_pair: F) -> f64
where
    F: Fn(&TokenizedPair) -> f64 + Sync + Send,
{
    if pairs.is_empty() {
        return 0.0;
    }
    let scores: Vec<f64> = pairs.par_iter().map(per_pair).collect();
    scores.iter().sum::<f64>() / scores.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricOptions {
    pub bleu_mode: BleuMode,
    pub rouge_variant: RougeVariant,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    pub bleu: [f64; 4],
    pub rouge1: f64,
    pub rouge2: f64,
    #[serde(rename = "rougeL")]
    pub rouge_l: f64,
    pub cider: f64,
    pub meteor: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// Computes every caption metric over a corpus.
pub fn evaluate_captions(pairs: &[CaptionPair], opts: &MetricOptions) -> Result<MetricReport> {
    if pairs.is_empty() {
        return Err(Error::Input("caption corpus is empty".into()));
    }
    let tokenized = tokenize_all(pairs);
    let mut warnings = Vec::new();
    if tokenized.iter().all(|p| p.candidate.is_empty()) {
        warnings.push("all candidates are empty; BLEU is undefined and reported as 0".to_string());
    }
    if pairs.len() < 2 {
        warnings.push("CIDEr needs at least two pairs; IDF is degenerate and the score is 0".to_string());
    }
    let bleu_n = |n| match opts.bleu_mode {
        BleuMode::Corpus => bleu::bleu_tokenized(&tokenized, n),
        BleuMode::SentenceSmoothed => bleu::sentence_smoothed_tokenized(&tokenized, n),
    };
    Ok(MetricReport {
        bleu: [bleu_n(1), bleu_n(2), bleu_n(3), bleu_n(4)],
        rouge1: rouge::rouge_n_tokenized(&tokenized, 1, opts.rouge_variant),
        rouge2: rouge::rouge_n_tokenized(&tokenized, 2, opts.rouge_variant),
        rouge_l: rouge::rouge_l_tokenized(&tokenized, opts.rouge_variant),
        cider: cider::cider_tokenized(&tokenized),
        meteor: meteor::meteor_tokenized(&tokenized),
        warnings,
    })
}

#[cfg(test)]
pub(crate) fn pair(candidate: &str, references: &[&str]) -> CaptionPair {
    CaptionPair::new("p", candidate, references.iter().map(|s| s.to_string()).collect()).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenize_rules() {
        assert_eq!(tokenize("The man runs."), vec!["the", "man", "runs"]);
        assert!(tokenize("").is_empty());
        assert_eq!(tokenize("hand-stand drill"), vec!["hand-stand", "drill"]);
        assert_eq!(tokenize("  \"Hello,\"   world!! ... "), vec!["hello", "world"]);
    }

    #[test]
    fn ngram_totals() {
        let t = tokenize("a b a b c");
        for n in 1..=5 {
            let total: usize = ngram_counts(&t, n).values().sum();
            assert_eq!(total, 5 - n + 1);
        }
        assert!(ngram_counts(&t, 6).is_empty());
        assert_eq!(ngram_counts(&t, 2)[&t[0..2]], 2);
    }

    #[test]
    fn report_on_identical_corpus() {
        let pairs = vec![pair("a man runs down the road", &["a man runs down the road"]), pair("she lifts two heavy boxes", &["she lifts two heavy boxes"])];
        let r = evaluate_captions(&pairs, &MetricOptions::default()).unwrap();
        assert_eq!(r.bleu, [1.0; 4]);
        assert_eq!((r.rouge1, r.rouge2, r.rouge_l), (1.0, 1.0, 1.0));
        assert!(r.warnings.is_empty());
        assert!(evaluate_captions(&[], &MetricOptions::default()).is_err());
    }

    #[test]
    fn report_serializes_field_names() {
        let r = evaluate_captions(&[pair("x y", &["x y"])], &MetricOptions::default()).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        for key in ["\"bleu\"", "\"rouge1\"", "\"rouge2\"", "\"rougeL\"", "\"cider\"", "\"meteor\"", "\"warnings\""] {
            assert!(json.contains(key), "{json}");
        }
    }
}
