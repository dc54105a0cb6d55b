//! Per-object attention and attention-difference metrics.
//!
//! Both difference metrics are evaluated through the sorted-gap identity: for
//! values in sorted order, the gap between neighbours `k` and `k+1` is crossed
//! by every pair with one member on each side. Summing `gap * crossing_pairs`
//! gives the sum of absolute pairwise differences in O(n log n), and a set of
//! equal values has no gaps at all, so it yields exactly zero.

use thiserror::Error;

use crate::domain::{ObjectEntity, Prompt, TokenAttentionPair};
use crate::extraction::{head_token_indices, ExtractionError};
use crate::lexicon::Lexicon;

#[derive(Debug, Error, PartialEq)]
pub enum AttentionError {
    #[error("empty index list")]
    EmptyIndexList,
    #[error("token index {0} has no attention score")]
    IndexOutOfRange(usize),
    #[error("attention difference needs both sets non-empty")]
    EmptySet,
    #[error("need at least two scores, got {0}")]
    TooFewScores(usize),
    #[error("span ({start},{end}) out of range")]
    SpanOutOfRange { start: usize, end: usize },
}

fn score_at(taps: &[TokenAttentionPair], idx: usize) -> Option<f64> {
    match taps.get(idx) {
        Some(t) if t.token_index == idx => Some(t.score),
        _ => taps.iter().find(|t| t.token_index == idx).map(|t| t.score),
    }
}

/// Arithmetic mean of the scores at `indices`.
pub fn object_attention(taps: &[TokenAttentionPair], indices: &[usize]) -> Result<f64, AttentionError> {
    if indices.is_empty() {
        return Err(AttentionError::EmptyIndexList);
    }
    let mut sum = 0.0;
    for &i in indices {
        sum += score_at(taps, i).ok_or(AttentionError::IndexOutOfRange(i))?;
    }
    Ok(sum / indices.len() as f64)
}

/// Mean absolute difference over all (neglected, correct) score pairs.
pub fn attention_difference(neglected: &[f64], correct: &[f64]) -> Result<f64, AttentionError> {
    if neglected.is_empty() || correct.is_empty() {
        return Err(AttentionError::EmptySet);
    }
    // (value, from_neglected)
    let mut merged: Vec<(f64, bool)> = neglected
        .iter()
        .map(|&v| (v, true))
        .chain(correct.iter().map(|&v| (v, false)))
        .collect();
    merged.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (n_total, c_total) = (neglected.len() as f64, correct.len() as f64);
    let (mut n_left, mut c_left) = (0.0, 0.0);
    let mut sum = 0.0;
    for w in merged.windows(2) {
        if w[0].1 {
            n_left += 1.0;
        } else {
            c_left += 1.0;
        }
        let gap = w[1].0 - w[0].0;
        if gap != 0.0 {
            sum += gap * (n_left * (c_total - c_left) + c_left * (n_total - n_left));
        }
    }
    Ok(sum / (n_total * c_total))
}

/// Mean absolute difference over all unordered pairs of `scores`.
pub fn pairwise_mean_abs_diff(scores: &[f64]) -> Result<f64, AttentionError> {
    let n = scores.len();
    if n < 2 {
        return Err(AttentionError::TooFewScores(n));
    }
    let mut sorted = scores.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut sum = 0.0;
    for (k, w) in sorted.windows(2).enumerate() {
        let gap = w[1] - w[0];
        if gap != 0.0 {
            let left = (k + 1) as f64;
            sum += gap * left * (n as f64 - left);
        }
    }
    let pairs = (n * (n - 1) / 2) as f64;
    Ok(sum / pairs)
}

/// Attention score of every object of one generation, in extraction order.
#[derive(Debug, Clone, PartialEq)]
pub struct AttentionProfile {
    pub per_object: Vec<f64>,
}

impl AttentionProfile {
    pub fn measure(
        objects: &[ObjectEntity],
        prompt: &Prompt,
        taps: &[TokenAttentionPair],
        lexicon: &Lexicon,
    ) -> Result<Self, AttentionError> {
        let mut per_object = Vec::with_capacity(objects.len());
        for o in objects {
            let idx = head_token_indices(o, prompt, lexicon).map_err(|e| match e {
                ExtractionError::SpanOutOfRange { start, end, .. } => {
                    AttentionError::SpanOutOfRange { start, end }
                }
                _ => AttentionError::EmptyIndexList,
            })?;
            per_object.push(object_attention(taps, &idx)?);
        }
        Ok(AttentionProfile { per_object })
    }

    pub fn score(&self, position: usize) -> Option<f64> {
        self.per_object.get(position).copied()
    }

    /// Attention difference between the objects at `neglected` and `correct` positions.
    pub fn difference(&self, neglected: &[usize], correct: &[usize]) -> Result<f64, AttentionError> {
        let pick = |ids: &[usize]| -> Result<Vec<f64>, AttentionError> {
            ids.iter().map(|&i| self.score(i).ok_or(AttentionError::IndexOutOfRange(i))).collect()
        };
        attention_difference(&pick(neglected)?, &pick(correct)?)
    }
}
