use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{corpus_mean, ngram_counts, tokenize_all, TokenizedPair};
use crate::model::CaptionPair;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BleuMode {
    /// Corpus-level BLEU without smoothing.
    #[default]
    Corpus,
    /// Mean of sentence-level BLEU with add-one smoothing for orders above 1.
    SentenceSmoothed,
}

#[derive(Debug, Clone, Copy, Default)]
struct PairStats {
    clipped: [usize; 4],
    total: [usize; 4],
    cand_len: usize,
    ref_len: usize,
}

/// Clipped n-gram matches and the effective (closest) reference length.
fn pair_stats(p: &TokenizedPair, max_n: usize) -> PairStats {
    let mut s = PairStats { cand_len: p.candidate.len(), ..Default::default() };
    for n in 1..=max_n {
        let cand = ngram_counts(&p.candidate, n);
        let refs: Vec<_> = p.references.iter().map(|r| ngram_counts(r, n)).collect();
        for (g, &c) in &cand {
            let max_ref = refs.iter().map(|r| r.get(g).copied().unwrap_or(0)).max().unwrap_or(0);
            s.clipped[n - 1] += c.min(max_ref);
        }
        s.total[n - 1] = cand.values().sum();
    }
    // closest length, shorter reference on ties
    s.ref_len = p
        .references
        .iter()
        .map(Vec::len)
        .min_by_key(|&r| (r.abs_diff(s.cand_len), r))
        .unwrap_or(0);
    s
}

fn brevity_penalty(ref_len: usize, cand_len: usize) -> f64 {
    if cand_len == 0 {
        return 0.0;
    }
    (1.0 - ref_len as f64 / cand_len as f64).min(0.0).exp()
}

pub(crate) fn bleu_tokenized(pairs: &[TokenizedPair], max_n: usize) -> f64 {
    assert!((1..=4).contains(&max_n), "BLEU order must be 1..=4");
    let stats: Vec<PairStats> = pairs.par_iter().map(|p| pair_stats(p, max_n)).collect();
    let mut sum = PairStats::default();
    for s in &stats {
        for n in 0..max_n {
            sum.clipped[n] += s.clipped[n];
            sum.total[n] += s.total[n];
        }
        sum.cand_len += s.cand_len;
        sum.ref_len += s.ref_len;
    }
    if sum.cand_len == 0 {
        log::warn!("BLEU undefined for an empty candidate corpus; reporting 0");
        return 0.0;
    }
    let mut log_sum = 0.0;
    for n in 0..max_n {
        if sum.clipped[n] == 0 {
            return 0.0;
        }
        log_sum += (sum.clipped[n] as f64 / sum.total[n] as f64).ln();
    }
    brevity_penalty(sum.ref_len, sum.cand_len) * (log_sum / max_n as f64).exp()
}

pub(crate) fn sentence_smoothed_tokenized(pairs: &[TokenizedPair], max_n: usize) -> f64 {
    assert!((1..=4).contains(&max_n), "BLEU order must be 1..=4");
    corpus_mean(pairs, |p| {
        let s = pair_stats(p, max_n);
        if s.cand_len == 0 {
            return 0.0;
        }
        let mut log_sum = 0.0;
        for n in 0..max_n {
            let (num, den) = if n == 0 {
                (s.clipped[0] as f64, s.total[0] as f64)
            } else {
                (s.clipped[n] as f64 + 1.0, s.total[n] as f64 + 1.0)
            };
            if num == 0.0 {
                return 0.0;
            }
            log_sum += (num / den).ln();
        }
        brevity_penalty(s.ref_len, s.cand_len) * (log_sum / max_n as f64).exp()
    })
}

/// Corpus-level BLEU-`max_n`.
pub fn bleu(pairs: &[CaptionPair], max_n: usize) -> f64 {
    bleu_tokenized(&tokenize_all(pairs), max_n)
}

pub fn bleu_sentence_smoothed(pairs: &[CaptionPair], max_n: usize) -> f64 {
    sentence_smoothed_tokenized(&tokenize_all(pairs), max_n)
}
