use std::collections::{BTreeMap, HashMap, HashSet};

use rayon::prelude::*;

use super::{ngram_counts, tokenize_all, NGramCounts, TokenizedPair};
use crate::model::CaptionPair;

const MAX_N: usize = 4;

// Ordered so that float sums are reproducible across runs.
struct Weighted<'a> {
    weights: BTreeMap<&'a [String], f64>,
    norm: f64,
}

fn tf_idf<'a>(counts: NGramCounts<'a>, df: &HashMap<&'a [String], usize>, log_docs: f64) -> Weighted<'a> {
    let weights: BTreeMap<&[String], f64> = counts
        .into_iter()
        .map(|(g, c)| {
            let d = df.get(g).copied().unwrap_or(0).max(1) as f64;
            (g, c as f64 * (log_docs - d.ln()))
        })
        .collect();
    let norm = weights.values().map(|w| w * w).sum::<f64>().sqrt();
    Weighted { weights, norm }
}

fn cosine(a: &Weighted, b: &Weighted) -> f64 {
    if a.norm == 0.0 || b.norm == 0.0 {
        return 0.0;
    }
    let dot: f64 = a.weights.iter().map(|(g, w)| w * b.weights.get(g).copied().unwrap_or(0.0)).sum();
    dot / (a.norm * b.norm)
}

pub(crate) fn cider_tokenized(pairs: &[TokenizedPair]) -> f64 {
    if pairs.is_empty() {
        return 0.0;
    }
    if pairs.len() < 2 {
        log::warn!("CIDEr over a single pair: every IDF weight is 0, reporting 0");
    }
    let log_docs = (pairs.len() as f64).ln();

    // document frequency: number of pairs whose reference set contains the n-gram
    let mut df: HashMap<&[String], usize> = HashMap::new();
    for p in pairs {
        let mut seen: HashSet<&[String]> = HashSet::new();
        for r in &p.references {
            for n in 1..=MAX_N {
                seen.extend(ngram_counts(r, n).into_keys());
            }
        }
        for g in seen {
            *df.entry(g).or_insert(0) += 1;
        }
    }

    let scores: Vec<f64> = pairs
        .par_iter()
        .map(|p| {
            let mut sum_over_n = 0.0;
            for n in 1..=MAX_N {
                let cand = tf_idf(ngram_counts(&p.candidate, n), &df, log_docs);
                let sims: f64 = p
                    .references
                    .iter()
                    .map(|r| cosine(&cand, &tf_idf(ngram_counts(r, n), &df, log_docs)))
                    .sum();
                sum_over_n += sims / p.references.len() as f64;
            }
            10.0 * sum_over_n / MAX_N as f64
        })
        .collect();
    scores.iter().sum::<f64>() / scores.len() as f64
}

/// Plain CIDEr: TF-IDF cosine similarity averaged over references and over
/// n-gram orders 1 to 4, scaled by 10 and averaged over pairs.
pub fn cider(pairs: &[CaptionPair]) -> f64 {
    cider_tokenized(&tokenize_all(pairs))
}
