//! Neglect detection: an object is neglected when its similarity to the
//! generated image is strictly below the threshold.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::backends::{BackendError, Scorer};
use crate::domain::{GenerationRecord, ObjectEntity, ObjectStatus, Prompt};

pub const DEFAULT_THRESHOLD: f64 = 0.5;

/// Calibrations scoring below this balanced accuracy are flagged.
pub const LOW_CONFIDENCE_BALANCED_ACCURACY: f64 = 0.8;

#[derive(Debug, Error)]
pub enum DetectionError {
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error("threshold {0} outside (0, 1)")]
    InvalidThreshold(f64),
    #[error("generation has {taps} attention scores for {tokens} prompt tokens")]
    RecordMismatch { taps: usize, tokens: usize },
    #[error("calibration data contains only {0} examples")]
    SingleClassInput(&'static str),
    #[error("similarity {0} is not a finite number")]
    NonFinite(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeglectEntry {
    pub object: ObjectEntity,
    pub similarity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeglectReport {
    pub prompt_id: String,
    pub entries: Vec<NeglectEntry>,
    pub threshold: f64,
    pub neglected: Vec<ObjectEntity>,
    pub correct: Vec<ObjectEntity>,
}

impl NeglectReport {
    pub fn no_repair_needed(&self) -> bool {
        self.neglected.is_empty()
    }

    /// Extraction positions of the neglected objects.
    pub fn neglected_positions(&self) -> Vec<usize> {
        self.positions(ObjectStatus::Neglected)
    }

    pub fn correct_positions(&self) -> Vec<usize> {
        self.positions(ObjectStatus::Correct)
    }

    fn positions(&self, status: ObjectStatus) -> Vec<usize> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, e)| e.object.status == status)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn objects(&self) -> Vec<ObjectEntity> {
        self.entries.iter().map(|e| e.object.clone()).collect()
    }
}

/// Build a report from precomputed similarities (one per object).
pub fn classify(prompt_id: &str, objects: &[ObjectEntity], similarities: &[f64], threshold: f64) -> NeglectReport {
    let mut entries = Vec::with_capacity(objects.len());
    let (mut neglected, mut correct) = (Vec::new(), Vec::new());
    for (o, &s) in objects.iter().zip(similarities) {
        let mut object = o.clone();
        if s < threshold {
            object.status = ObjectStatus::Neglected;
            neglected.push(object.clone());
        } else {
            object.status = ObjectStatus::Correct;
            correct.push(object.clone());
        }
        entries.push(NeglectEntry { object, similarity: s });
    }
    NeglectReport { prompt_id: prompt_id.to_string(), entries, threshold, neglected, correct }
}

/// Score every object against the generated image and classify it.
pub fn identify_neglected(
    p: &Prompt,
    objects: &[ObjectEntity],
    rec: &GenerationRecord,
    scorer: &dyn Scorer,
    threshold: f64,
) -> Result<NeglectReport, DetectionError> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(DetectionError::InvalidThreshold(threshold));
    }
    if rec.taps.len() != p.tokens.len() {
        return Err(DetectionError::RecordMismatch { taps: rec.taps.len(), tokens: p.tokens.len() });
    }
    let mut sims = Vec::with_capacity(objects.len());
    for o in objects {
        let s = scorer.similarity(&rec.image_ref, &o.concept)?;
        if !s.is_finite() {
            return Err(DetectionError::NonFinite(s));
        }
        sims.push(s);
    }
    Ok(classify(&p.id, objects, &sims, threshold))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub threshold: f64,
    pub balanced_accuracy: f64,
    pub low_confidence: bool,
}

fn balanced_accuracy(labeled: &[(f64, bool)], threshold: f64) -> f64 {
    let (mut tp, mut pos, mut tn, mut neg) = (0usize, 0usize, 0usize, 0usize);
    for &(s, present) in labeled {
        if present {
            pos += 1;
            tp += usize::from(s >= threshold);
        } else {
            neg += 1;
            tn += usize::from(s < threshold);
        }
    }
    0.5 * (tp as f64 / pos as f64 + tn as f64 / neg as f64)
}

/// Threshold maximizing balanced accuracy over the midpoints between
/// consecutive distinct scores. Ties go to the larger threshold.
pub fn calibrate_threshold(labeled: &[(f64, bool)]) -> Result<Calibration, DetectionError> {
    if let Some(&(s, _)) = labeled.iter().find(|(s, _)| !s.is_finite()) {
        return Err(DetectionError::NonFinite(s));
    }
    if !labeled.iter().any(|l| l.1) {
        return Err(DetectionError::SingleClassInput("absent"));
    }
    if !labeled.iter().any(|l| !l.1) {
        return Err(DetectionError::SingleClassInput("present"));
    }
    let mut scores: Vec<f64> = labeled.iter().map(|l| l.0).collect();
    scores.sort_by(f64::total_cmp);
    scores.dedup();
    let candidates: Vec<f64> = if scores.len() == 1 {
        scores.clone()
    } else {
        scores.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    };
    let mut best = (f64::NEG_INFINITY, candidates[0]);
    for &t in &candidates {
        let ba = balanced_accuracy(labeled, t);
        if ba >= best.0 {
            best = (ba, t);
        }
    }
    Ok(Calibration {
        threshold: best.1,
        balanced_accuracy: best.0,
        low_confidence: best.0 < LOW_CONFIDENCE_BALANCED_ACCURACY,
    })
}
