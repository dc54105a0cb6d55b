//! Run repair methods over a dataset and aggregate correct rates.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::annotations::{AnnotationError, AnnotationJudge};
use super::{PromptRecord, Source};
use crate::backends::sim::SimWorld;
use crate::backends::BackendError;
use crate::detection::identify_neglected;
use crate::domain::{Prompt, RepairStatus};
use crate::enhancement::{EnhancementError, RepairError};
use crate::orchestrator::{
    compute_clipscore, llm_repair_baseline, patcher_repair, Mode, PipelineConfig, RepairEnv,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Unrepaired generation.
    None,
    LrBaseline,
    PatcherFull,
    EfeOnly,
    IfeOnly,
    /// Full pipeline with attention guidance switched off.
    Unguided,
}

impl Method {
    pub const ALL: [Method; 6] =
        [Method::None, Method::LrBaseline, Method::PatcherFull, Method::EfeOnly, Method::IfeOnly, Method::Unguided];

    pub fn name(self) -> &'static str {
        match self {
            Method::None => "none",
            Method::LrBaseline => "lr_baseline",
            Method::PatcherFull => "patcher_full",
            Method::EfeOnly => "efe_only",
            Method::IfeOnly => "ife_only",
            Method::Unguided => "unguided",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Method::ALL.iter().map(|m| m.name()).collect();
            format!("unknown method {s:?}; valid methods: {}", names.join(", "))
        })
    }
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("no annotations for {} prompts (first: {:?})", .0.len(), .0.first())]
    MissingAnnotations(Vec<String>),
    #[error("prompt {prompt_id}: {source}")]
    Pipeline {
        prompt_id: String,
        #[source]
        source: RepairError,
    },
    #[error("prompt {prompt_id}: {source}")]
    Backend {
        prompt_id: String,
        #[source]
        source: BackendError,
    },
    #[error(transparent)]
    Annotation(#[from] AnnotationError),
    #[error("cannot build worker pool: {0}")]
    Pool(String),
}

/// Decides whether a final image is correct for its record.
pub trait Judge: Sync {
    fn judge(&self, record: &PromptRecord, image_ref: &str) -> Result<bool, EvalError>;

    /// Record ids this judge cannot rule on.
    fn missing(&self, _records: &[PromptRecord]) -> Vec<String> {
        Vec::new()
    }
}

/// Ground truth of the simulator: every record object must be present.
pub struct SimJudge<'a> {
    pub world: &'a SimWorld,
}

impl Judge for SimJudge<'_> {
    fn judge(&self, record: &PromptRecord, image_ref: &str) -> Result<bool, EvalError> {
        let present = self
            .world
            .present_concepts(image_ref)
            .map_err(|source| EvalError::Backend { prompt_id: record.id.clone(), source })?;
        Ok(record.objects.iter().all(|o| present.contains(&self.world.concept_key(o))))
    }
}

impl Judge for AnnotationJudge {
    fn judge(&self, record: &PromptRecord, _image_ref: &str) -> Result<bool, EvalError> {
        Ok(self.verdict(&record.id)?)
    }

    fn missing(&self, records: &[PromptRecord]) -> Vec<String> {
        records.iter().filter(|r| !self.covers(&r.id)).map(|r| r.id.clone()).collect()
    }
}

/// Result for one record under one method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordEval {
    pub id: String,
    pub source: Source,
    pub method: Method,
    pub status: RepairStatus,
    pub final_prompt: String,
    pub attempts: usize,
    pub clipscore: f64,
    pub correct: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub dataset: Source,
    pub method: Method,
    pub total: usize,
    pub correct: usize,
    pub repaired: usize,
    pub best_effort: usize,
    pub already_correct: usize,
    pub cr: f64,
    pub mean_clipscore: f64,
    pub mean_attempts: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub rows: Vec<EvalRow>,
    pub records: Vec<RecordEval>,
}

impl EvalReport {
    pub fn row(&self, dataset: Source, method: Method) -> Option<&EvalRow> {
        self.rows.iter().find(|r| r.dataset == dataset && r.method == method)
    }
}

fn pipeline_err(id: &str) -> impl Fn(RepairError) -> EvalError + '_ {
    move |source| EvalError::Pipeline { prompt_id: id.to_string(), source }
}

fn run_one(
    record: &PromptRecord,
    method: Method,
    env: &RepairEnv<'_>,
    cfg: &PipelineConfig,
    judge: &dyn Judge,
) -> Result<RecordEval, EvalError> {
    let lexicon = env.extractor.lexicon();
    let prompt = Prompt::new(record.id.clone(), record.prompt.clone(), lexicon);
    let seed = cfg.seed_policy.seed_for(&record.id);
    let backend_err = |source| EvalError::Backend { prompt_id: record.id.clone(), source };
    let (status, final_prompt, attempts) = match method {
        Method::None => {
            let rec = env.backends.generator.generate(&prompt, seed).map_err(backend_err)?;
            let objects = env
                .extractor
                .extract(&prompt)
                .map_err(|e| pipeline_err(&record.id)(RepairError::new(e, Vec::new())))?;
            let report = identify_neglected(&prompt, &objects, &rec, env.backends.scorer, cfg.threshold)
                .map_err(|e| pipeline_err(&record.id)(RepairError::new(EnhancementError::from(e), Vec::new())))?;
            let status =
                if report.no_repair_needed() { RepairStatus::AlreadyCorrect } else { RepairStatus::BestEffort };
            (status, prompt.clone(), 1)
        }
        Method::LrBaseline => {
            let o = llm_repair_baseline(&prompt, env, cfg).map_err(pipeline_err(&record.id))?;
            (o.status, o.final_prompt, o.attempts)
        }
        _ => {
            let mut cfg = cfg.clone();
            match method {
                Method::EfeOnly => cfg.mode = Mode::EfeOnly,
                Method::IfeOnly => cfg.mode = Mode::IfeOnly,
                Method::Unguided => {
                    cfg.mode = Mode::Full;
                    cfg.enhancement.guidance = false;
                }
                _ => cfg.mode = Mode::Full,
            }
            let o = patcher_repair(&prompt, env, &cfg).map_err(pipeline_err(&record.id))?;
            (o.status, o.final_prompt, o.attempts)
        }
    };
    let final_rec = env.backends.generator.generate(&final_prompt, seed).map_err(backend_err)?;
    let clipscore = compute_clipscore(&prompt, &final_rec, env.backends.scorer).map_err(backend_err)?;
    let correct = judge.judge(record, &final_rec.image_ref)?;
    Ok(RecordEval {
        id: record.id.clone(),
        source: record.source,
        method,
        status,
        final_prompt: final_prompt.text,
        attempts,
        clipscore,
        correct,
    })
}

/// Evaluate every method on every record with at most `jobs` workers.
/// Rows are ordered by dataset, then method.
pub fn evaluate(
    records: &[PromptRecord],
    methods: &[Method],
    env: &RepairEnv<'_>,
    cfg: &PipelineConfig,
    judge: &dyn Judge,
    jobs: usize,
) -> Result<EvalReport, EvalError> {
    let missing = judge.missing(records);
    if !missing.is_empty() {
        return Err(EvalError::MissingAnnotations(missing));
    }
    let tasks: Vec<(&PromptRecord, Method)> =
        methods.iter().flat_map(|&m| records.iter().map(move |r| (r, m))).collect();
    let run = || tasks.par_iter().map(|&(r, m)| run_one(r, m, env, cfg, judge)).collect::<Result<Vec<_>, _>>();
    let results = if jobs <= 1 || !env.backends.all_concurrent() {
        tasks.iter().map(|&(r, m)| run_one(r, m, env, cfg, judge)).collect::<Result<Vec<_>, _>>()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| EvalError::Pool(e.to_string()))?
            .install(run)?
    };
    Ok(EvalReport { rows: aggregate(&results), records: results })
}

pub fn aggregate(results: &[RecordEval]) -> Vec<EvalRow> {
    let mut groups: BTreeMap<(Source, Method), Vec<&RecordEval>> = BTreeMap::new();
    for r in results {
        groups.entry((r.source, r.method)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((dataset, method), rs)| {
            let total = rs.len();
            let count = |s: RepairStatus| rs.iter().filter(|r| r.status == s).count();
            let correct = rs.iter().filter(|r| r.correct).count();
            let n = total as f64;
            EvalRow {
                dataset,
                method,
                total,
                correct,
                repaired: count(RepairStatus::Repaired),
                best_effort: count(RepairStatus::BestEffort),
                already_correct: count(RepairStatus::AlreadyCorrect),
                cr: correct as f64 / n,
                mean_clipscore: rs.iter().map(|r| r.clipscore).sum::<f64>() / n,
                mean_attempts: rs.iter().map(|r| r.attempts as f64).sum::<f64>() / n,
            }
        })
        .collect()
}
