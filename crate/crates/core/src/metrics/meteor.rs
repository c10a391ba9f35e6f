use rust_stemmers::{Algorithm, Stemmer};

use super::{corpus_mean, tokenize, tokenize_all, TokenizedPair};
use crate::model::CaptionPair;

/// Greedy unigram alignment: exact matches first, then stem matches. Each
/// reference token is used at most once. Returns `(candidate, reference)`
/// index pairs sorted by candidate position.
fn align(cand: &[String], reference: &[String], stemmer: &Stemmer) -> Vec<(usize, usize)> {
    let mut used = vec![false; reference.len()];
    let mut matched: Vec<Option<usize>> = vec![None; cand.len()];

    for (i, c) in cand.iter().enumerate() {
        if let Some(j) = (0..reference.len()).find(|&j| !used[j] && reference[j] == *c) {
            used[j] = true;
            matched[i] = Some(j);
        }
    }

    let cand_stems: Vec<_> = cand.iter().map(|t| stemmer.stem(t)).collect();
    let ref_stems: Vec<_> = reference.iter().map(|t| stemmer.stem(t)).collect();
    for i in 0..cand.len() {
        if matched[i].is_some() {
            continue;
        }
        if let Some(j) = (0..reference.len()).find(|&j| !used[j] && ref_stems[j] == cand_stems[i]) {
            used[j] = true;
            matched[i] = Some(j);
        }
    }

    matched.into_iter().enumerate().filter_map(|(i, j)| j.map(|j| (i, j))).collect()
}

fn count_chunks(alignment: &[(usize, usize)]) -> usize {
    if alignment.is_empty() {
        return 0;
    }
    1 + alignment
        .windows(2)
        .filter(|w| !(w[1].0 == w[0].0 + 1 && w[1].1 == w[0].1 + 1))
        .count()
}

fn score_tokens(cand: &[String], reference: &[String], stemmer: &Stemmer) -> f64 {
    let alignment = align(cand, reference, stemmer);
    let matches = alignment.len();
    if matches == 0 {
        return 0.0;
    }
    let p = matches as f64 / cand.len() as f64;
    let r = matches as f64 / reference.len() as f64;
    let f_mean = 10.0 * p * r / (r + 9.0 * p);
    let frag = count_chunks(&alignment) as f64 / matches as f64;
    f_mean * (1.0 - 0.5 * frag.powi(3))
}

/// METEOR-style score for one candidate against one reference string.
pub fn meteor_pair(candidate: &str, reference: &str) -> f64 {
    let stemmer = Stemmer::create(Algorithm::English);
    score_tokens(&tokenize(candidate), &tokenize(reference), &stemmer)
}

pub(crate) fn meteor_tokenized(pairs: &[TokenizedPair]) -> f64 {
    corpus_mean(pairs, |p| {
        let stemmer = Stemmer::create(Algorithm::English);
        p.references
            .iter()
            .map(|r| score_tokens(&p.candidate, r, &stemmer))
            .fold(0.0, f64::max)
    })
}

/// Exact and stem matching only; no synonym stage.
pub fn meteor_simplified(pairs: &[CaptionPair]) -> f64 {
    meteor_tokenized(&tokenize_all(pairs))
}
