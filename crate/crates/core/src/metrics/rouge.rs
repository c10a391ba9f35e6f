use serde::{Deserialize, Serialize};

use super::{corpus_mean, ngram_counts, tokenize_all, TokenizedPair};
use crate::model::CaptionPair;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RougeVariant {
    #[default]
    F1,
    Recall,
}

fn combine(overlap: usize, cand_total: usize, ref_total: usize, variant: RougeVariant) -> f64 {
    if overlap == 0 || cand_total == 0 || ref_total == 0 {
        return 0.0;
    }
    let p = overlap as f64 / cand_total as f64;
    let r = overlap as f64 / ref_total as f64;
    match variant {
        RougeVariant::Recall => r,
        RougeVariant::F1 => 2.0 * p * r / (p + r),
    }
}

fn rouge_n_single(cand: &[String], reference: &[String], n: usize, variant: RougeVariant) -> f64 {
    let c = ngram_counts(cand, n);
    let r = ngram_counts(reference, n);
    let overlap: usize = c.iter().map(|(g, &k)| k.min(r.get(g).copied().unwrap_or(0))).sum();
    combine(overlap, c.values().sum(), r.values().sum(), variant)
}

/// Length of the longest common subsequence.
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y { prev[j] + 1 } else { prev[j + 1].max(cur[j]) };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

fn best_over_refs(p: &TokenizedPair, f: impl Fn(&[String]) -> f64) -> f64 {
    p.references.iter().map(|r| f(r)).fold(0.0, f64::max)
}

pub(crate) fn rouge_n_tokenized(pairs: &[TokenizedPair], n: usize, variant: RougeVariant) -> f64 {
    corpus_mean(pairs, |p| best_over_refs(p, |r| rouge_n_single(&p.candidate, r, n, variant)))
}

pub(crate) fn rouge_l_tokenized(pairs: &[TokenizedPair], variant: RougeVariant) -> f64 {
    corpus_mean(pairs, |p| {
        best_over_refs(p, |r| combine(lcs_len(&p.candidate, r), p.candidate.len(), r.len(), variant))
    })
}

/// Mean over pairs of the best ROUGE-`n` against any reference.
pub fn rouge_n(pairs: &[CaptionPair], n: usize, variant: RougeVariant) -> f64 {
    rouge_n_tokenized(&tokenize_all(pairs), n, variant)
}

pub fn rouge_l(pairs: &[CaptionPair], variant: RougeVariant) -> f64 {
    rouge_l_tokenized(&tokenize_all(pairs), variant)
}

#[cfg(test)]
mod tests {
    use super::super::pair;
    use super::*;

    #[test]
    fn identical_and_disjoint() {
        let same = vec![pair("a person walks slowly", &["a person walks slowly"])];
        assert_eq!(rouge_n(&same, 1, RougeVariant::F1), 1.0);
        assert_eq!(rouge_n(&same, 2, RougeVariant::F1), 1.0);
        assert_eq!(rouge_l(&same, RougeVariant::F1), 1.0);
        let apart = vec![pair("a b", &["c d"])];
        assert_eq!(rouge_n(&apart, 1, RougeVariant::F1), 0.0);
        assert_eq!(rouge_l(&apart, RougeVariant::F1), 0.0);
    }

    #[test]
    fn lcs_example() {
        let p = vec![pair("a b c d", &["a c d"])];
        assert!((rouge_l(&p, RougeVariant::F1) - 6.0 / 7.0).abs() < 1e-15);
        assert_eq!(rouge_l(&p, RougeVariant::Recall), 1.0);
        assert_eq!(lcs_len(&[1, 2, 3, 4, 1], &[3, 4, 1, 2, 1]), 3);
    }

    #[test]
    fn max_over_references() {
        let p = vec![pair("a b c", &["x y", "a b c"])];
        assert_eq!(rouge_n(&p, 1, RougeVariant::F1), 1.0);
    }
}
