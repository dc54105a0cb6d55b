//! Prompt enhancement: explicit features (color and shape modifiers) and
//! implicit features (hyponym substitution guided by attention).

use std::path::PathBuf;

use thiserror::Error;

use crate::attention::{AttentionError, AttentionProfile};
use crate::backends::{BackendError, Backends};
use crate::detection::{identify_neglected, DetectionError, NeglectReport};
use crate::domain::{
    min_att_diff_index, FeatureCandidate, FeatureKind, GenerationRecord, ObjectEntity, Prompt, RepairOutcome,
    RepairStatus, TrailEntry,
};
use crate::extraction::{ExtractionError, Extractor};

pub mod explicit;
pub mod search;
pub mod substitute;
pub mod templates;
pub mod tree;
pub mod wordnet;

pub use explicit::explicit_repair;
pub use search::{attention_guided_search, implicit_repair};
pub use substitute::{substitute, substitute_concept};
pub use templates::{parse_feature_response, render_feature_query, render_llm_repair};
pub use tree::{build_hyponym_tree, prune_tree, HyponymNode, HyponymTree};
pub use wordnet::{WordNet, WordNetError};

#[derive(Debug, Error)]
pub enum EnhancementError {
    #[error("object lemma is empty")]
    EmptyLemma,
    #[error("no query template for {0:?} features")]
    NoTemplate(FeatureKind),
    #[error("replacement phrase is empty")]
    EmptyReplacement,
    #[error("object {phrase:?} does not match span {span:?}")]
    SpanMismatch { phrase: String, span: (usize, usize) },
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error(transparent)]
    Extraction(#[from] ExtractionError),
    #[error(transparent)]
    Attention(#[from] AttentionError),
    #[error(transparent)]
    Detection(#[from] DetectionError),
    #[error(transparent)]
    WordNet(#[from] WordNetError),
}

/// A failure part-way through a repair, with the trials that completed.
#[derive(Debug, Error)]
#[error("{source} (after {} completed trials)", trail.len())]
pub struct RepairError {
    #[source]
    pub source: EnhancementError,
    pub trail: Vec<TrailEntry>,
}

impl RepairError {
    pub fn new(source: impl Into<EnhancementError>, trail: Vec<TrailEntry>) -> Self {
        RepairError { source: source.into(), trail }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnhancementConfig {
    /// Candidates tried per feature kind.
    pub max_explicit_iterations: usize,
    pub prune_similarity_threshold: f64,
    pub wordnet_dir: Option<PathBuf>,
    pub max_tree_depth: usize,
    /// Use attention differences to steer the search and pick fallbacks.
    pub guidance: bool,
}

impl Default for EnhancementConfig {
    fn default() -> Self {
        EnhancementConfig {
            max_explicit_iterations: 4,
            prune_similarity_threshold: 0.5,
            wordnet_dir: None,
            max_tree_depth: 6,
            guidance: true,
        }
    }
}

/// Everything a trial needs besides the prompt under test.
#[derive(Clone, Copy)]
pub struct RepairContext<'a> {
    pub backends: Backends<'a>,
    pub extractor: &'a Extractor,
    pub threshold: f64,
    pub seed: u64,
}

/// One neglected object of a prompt, with the baseline generation that
/// trials are compared against.
#[derive(Debug, Clone, PartialEq)]
pub struct RepairTarget {
    pub prompt: Prompt,
    /// Objects of `prompt` with their baseline statuses.
    pub objects: Vec<ObjectEntity>,
    /// Position of the object to repair.
    pub target: usize,
    /// Positions allowed to stay neglected (repaired later).
    pub tolerated: Vec<usize>,
    /// Positions of objects present in the baseline image.
    pub correct: Vec<usize>,
    /// Attention difference of the baseline; absent when nothing was present.
    pub base_att_diff: Option<f64>,
}

impl RepairTarget {
    pub fn new(
        prompt: &Prompt,
        report: &NeglectReport,
        rec: &GenerationRecord,
        target: usize,
        tolerated: Vec<usize>,
        extractor: &Extractor,
    ) -> Result<Self, EnhancementError> {
        let objects = report.objects();
        let correct = report.correct_positions();
        let base_att_diff = if correct.is_empty() {
            None
        } else {
            let profile = AttentionProfile::measure(&objects, prompt, &rec.taps, extractor.lexicon())?;
            Some(profile.difference(&[target], &correct)?)
        };
        Ok(RepairTarget { prompt: prompt.clone(), objects, target, tolerated, correct, base_att_diff })
    }

    pub fn object(&self) -> &ObjectEntity {
        &self.objects[self.target]
    }
}

/// Result of generating and judging one candidate prompt.
#[derive(Debug, Clone)]
pub struct Trial {
    pub prompt: Prompt,
    pub record: GenerationRecord,
    pub report: NeglectReport,
    pub passed: bool,
    pub att_diff: Option<f64>,
}

pub(crate) fn run_trial(ctx: &RepairContext<'_>, t: &RepairTarget, prompt: Prompt) -> Result<Trial, EnhancementError> {
    let record = ctx.backends.generator.generate(&prompt, ctx.seed)?;
    let objects = ctx.extractor.extract(&prompt)?;
    let report = identify_neglected(&prompt, &objects, &record, ctx.backends.scorer, ctx.threshold)?;
    let aligned = objects.len() == t.objects.len();
    let passed = if aligned {
        report.neglected_positions().iter().all(|i| t.tolerated.contains(i))
    } else {
        !objects.is_empty() && report.no_repair_needed()
    };
    let att_diff = match (aligned, t.base_att_diff) {
        (true, Some(_)) => {
            let profile = AttentionProfile::measure(&objects, &prompt, &record.taps, ctx.extractor.lexicon())?;
            Some(profile.difference(&[t.target], &t.correct)?)
        }
        _ => None,
    };
    Ok(Trial { prompt, record, report, passed, att_diff })
}

/// Accumulates the trials of one enhancement stream.
pub(crate) struct Trail {
    pub entries: Vec<TrailEntry>,
    pub prompts: Vec<Prompt>,
}

impl Trail {
    pub fn new() -> Self {
        Trail { entries: Vec::new(), prompts: Vec::new() }
    }

    pub fn push(&mut self, mut candidate: FeatureCandidate, trial: &Trial) {
        candidate.att_diff = trial.att_diff;
        self.entries.push(TrailEntry {
            candidate,
            prompt: trial.prompt.text.clone(),
            passed: trial.passed,
            att_diff: trial.att_diff,
        });
        self.prompts.push(trial.prompt.clone());
    }

    pub fn fail(self, source: impl Into<EnhancementError>) -> RepairError {
        RepairError::new(source, self.entries)
    }

    pub fn repaired(self, trial: Trial) -> StageRun {
        let attempts = self.entries.len();
        StageRun {
            outcome: RepairOutcome {
                status: RepairStatus::Repaired,
                final_prompt: trial.prompt.clone(),
                attempts,
                trail: self.entries,
                final_att_diff: trial.att_diff,
            },
            passing: Some(trial),
        }
    }

    /// Best-effort result: the trial with minimal attention difference, or
    /// `original` when no trial measured one.
    pub fn best_effort(self, original: &Prompt) -> StageRun {
        let (final_prompt, final_att_diff) = match min_att_diff_index(&self.entries) {
            Some(i) => (self.prompts[i].clone(), self.entries[i].att_diff),
            None => (original.clone(), None),
        };
        StageRun {
            outcome: RepairOutcome {
                status: RepairStatus::BestEffort,
                final_prompt,
                attempts: self.entries.len(),
                trail: self.entries,
                final_att_diff,
            },
            passing: None,
        }
    }
}

/// A stream's outcome plus the passing trial, which seeds the next stage of
/// a multi-object repair.
#[derive(Debug, Clone)]
pub struct StageRun {
    pub outcome: RepairOutcome,
    pub passing: Option<Trial>,
}
