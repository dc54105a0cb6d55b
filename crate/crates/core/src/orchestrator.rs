//! The repair pipeline: detect neglected objects, run explicit and implicit
//! enhancement, and pick the result. Also the LLM-rewrite baseline.

use std::fmt;
use std::hash::Hasher;
use std::str::FromStr;

use fnv::FnvHasher;
use serde::{Deserialize, Serialize};

use crate::attention::AttentionProfile;
use crate::backends::{BackendError, Backends, Scorer, SuggestRequest, TemplateKind};
use crate::detection::{identify_neglected, NeglectReport, DEFAULT_THRESHOLD};
use crate::domain::{
    att_diff_key, CandidateSource, FeatureCandidate, FeatureKind, GenerationRecord, Prompt, RepairOutcome,
    RepairStatus, TrailEntry,
};
use crate::enhancement::explicit::explicit_run;
use crate::enhancement::search::implicit_run;
use crate::enhancement::templates::render_llm_repair;
use crate::enhancement::{
    EnhancementConfig, EnhancementError, RepairContext, RepairError, RepairTarget, StageRun, Trail, Trial,
    WordNet,
};
use crate::extraction::Extractor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Full,
    EfeOnly,
    IfeOnly,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full" => Ok(Mode::Full),
            "efe_only" => Ok(Mode::EfeOnly),
            "ife_only" => Ok(Mode::IfeOnly),
            other => Err(format!("unknown mode {other:?} (expected full, efe_only or ife_only)")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Full => "full",
            Mode::EfeOnly => "efe_only",
            Mode::IfeOnly => "ife_only",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedPolicy {
    Fixed(u64),
    /// Seed derived from the prompt id, mixed with a base value.
    PerPrompt { base: u64 },
}

impl SeedPolicy {
    pub fn seed_for(&self, prompt_id: &str) -> u64 {
        match *self {
            SeedPolicy::Fixed(s) => s,
            SeedPolicy::PerPrompt { base } => {
                let mut h = FnvHasher::default();
                h.write(prompt_id.as_bytes());
                h.finish() ^ base
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub enhancement: EnhancementConfig,
    pub threshold: f64,
    pub mode: Mode,
    pub lr_max_iterations: usize,
    pub seed_policy: SeedPolicy,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            enhancement: EnhancementConfig::default(),
            threshold: DEFAULT_THRESHOLD,
            mode: Mode::Full,
            lr_max_iterations: 8,
            seed_policy: SeedPolicy::PerPrompt { base: 0 },
        }
    }
}

/// Backends and shared resources for pipeline runs.
#[derive(Clone, Copy)]
pub struct RepairEnv<'a> {
    pub backends: Backends<'a>,
    pub extractor: &'a Extractor,
    /// Taxonomy for implicit enhancement; without it that stream is empty.
    pub wordnet: Option<&'a WordNet>,
}

pub type PipelineError = RepairError;

fn stage_one(
    p: &Prompt,
    ctx: &RepairContext<'_>,
) -> Result<(GenerationRecord, NeglectReport), EnhancementError> {
    let rec = ctx.backends.generator.generate(p, ctx.seed)?;
    let objects = ctx.extractor.extract(p)?;
    let report = identify_neglected(p, &objects, &rec, ctx.backends.scorer, ctx.threshold)?;
    Ok((rec, report))
}

fn already_correct(p: &Prompt) -> RepairOutcome {
    RepairOutcome {
        status: RepairStatus::AlreadyCorrect,
        final_prompt: p.clone(),
        attempts: 1,
        trail: Vec::new(),
        final_att_diff: None,
    }
}

/// Positions of the neglected objects, weakest attention first; ties keep
/// extraction order.
pub fn multi_neglect_schedule(report: &NeglectReport, profile: &AttentionProfile) -> Vec<usize> {
    let mut order = report.neglected_positions();
    order.sort_by(|&a, &b| {
        let sa = profile.score(a).unwrap_or(f64::INFINITY);
        let sb = profile.score(b).unwrap_or(f64::INFINITY);
        sa.total_cmp(&sb)
    });
    order
}

/// Run the full pipeline on one prompt.
///
/// Several neglected objects are repaired one after another, weakest first;
/// each stage must fix its object without losing any object that was present.
/// A stage that fails ends the run with that stage's best-effort prompt.
pub fn patcher_repair(p: &Prompt, env: &RepairEnv<'_>, cfg: &PipelineConfig) -> Result<RepairOutcome, PipelineError> {
    let ctx = RepairContext {
        backends: env.backends,
        extractor: env.extractor,
        threshold: cfg.threshold,
        seed: cfg.seed_policy.seed_for(&p.id),
    };
    let (rec, report) = stage_one(p, &ctx).map_err(|e| RepairError::new(e, Vec::new()))?;
    if report.no_repair_needed() {
        return Ok(already_correct(p));
    }
    let profile = AttentionProfile::measure(&report.objects(), p, &rec.taps, env.extractor.lexicon())
        .map_err(|e| RepairError::new(e, Vec::new()))?;
    let schedule = multi_neglect_schedule(&report, &profile);

    let mut trail: Vec<TrailEntry> = Vec::new();
    let mut attempts = 1;
    let mut current = Trial { prompt: p.clone(), record: rec, report, passed: false, att_diff: None };
    let mut final_att_diff = None;
    for (k, &pos) in schedule.iter().enumerate() {
        if current.report.no_repair_needed() {
            break;
        }
        let neglected_now = current.report.neglected_positions();
        if !neglected_now.contains(&pos) {
            continue;
        }
        let target = RepairTarget::new(
            &current.prompt,
            &current.report,
            &current.record,
            pos,
            schedule[k + 1..].to_vec(),
            env.extractor,
        )
        .map_err(|e| RepairError::new(e, trail.clone()))?;
        let stage = run_stage(&target, env, cfg, &ctx).map_err(|mut e| {
            let mut all = trail.clone();
            all.append(&mut e.trail);
            e.trail = all;
            e
        })?;
        attempts += stage.outcome.attempts;
        trail.extend(stage.outcome.trail.iter().cloned());
        final_att_diff = stage.outcome.final_att_diff;
        match stage.passing {
            Some(trial) => current = trial,
            None => {
                return Ok(RepairOutcome {
                    status: RepairStatus::BestEffort,
                    final_prompt: stage.outcome.final_prompt,
                    attempts,
                    trail,
                    final_att_diff,
                });
            }
        }
    }
    Ok(RepairOutcome {
        status: RepairStatus::Repaired,
        final_prompt: current.prompt,
        attempts,
        trail,
        final_att_diff,
    })
}

fn run_stage(
    target: &RepairTarget,
    env: &RepairEnv<'_>,
    cfg: &PipelineConfig,
    ctx: &RepairContext<'_>,
) -> Result<StageRun, RepairError> {
    let efe = || explicit_run(target, ctx, &cfg.enhancement);
    let ife = || match env.wordnet {
        Some(wn) => implicit_run(target, wn, ctx, &cfg.enhancement),
        None => Ok(Trail::new().best_effort(&target.prompt)),
    };
    match cfg.mode {
        Mode::EfeOnly => efe(),
        Mode::IfeOnly => ife(),
        Mode::Full => {
            let (e, i) = if env.backends.all_concurrent() {
                std::thread::scope(|s| {
                    let handle = s.spawn(efe);
                    let i = ife();
                    (handle.join().expect("explicit enhancement thread panicked"), i)
                })
            } else {
                (efe(), ife())
            };
            Ok(merge(e?, i?))
        }
    }
}

/// Combine the two streams: a repaired stream wins (fewer attempts when
/// both, explicit on ties); otherwise the smaller final attention difference.
fn merge(efe: StageRun, ife: StageRun) -> StageRun {
    let attempts = efe.outcome.attempts + ife.outcome.attempts;
    let efe_ok = efe.outcome.status == RepairStatus::Repaired;
    let ife_ok = ife.outcome.status == RepairStatus::Repaired;
    let (winner, loser) = match (efe_ok, ife_ok) {
        (true, true) if ife.outcome.attempts < efe.outcome.attempts => (ife, efe),
        (true, _) => (efe, ife),
        (false, true) => (ife, efe),
        (false, false) => {
            let mut trail = efe.outcome.trail.clone();
            trail.extend(ife.outcome.trail.iter().cloned());
            let pick = if att_diff_key(ife.outcome.final_att_diff) < att_diff_key(efe.outcome.final_att_diff) {
                ife
            } else {
                efe
            };
            return StageRun {
                outcome: RepairOutcome { attempts, trail, ..pick.outcome },
                passing: None,
            };
        }
    };
    let mut trail = loser.outcome.trail;
    trail.extend(winner.outcome.trail.iter().cloned());
    StageRun {
        outcome: RepairOutcome { attempts, trail, ..winner.outcome },
        passing: winner.passing,
    }
}

/// Baseline: ask the LLM to rewrite the whole prompt, trying one rewrite per
/// iteration until nothing is neglected or the budget runs out. Every query
/// asks about the first object neglected in the original prompt.
pub fn llm_repair_baseline(
    p: &Prompt,
    env: &RepairEnv<'_>,
    cfg: &PipelineConfig,
) -> Result<RepairOutcome, PipelineError> {
    let ctx = RepairContext {
        backends: env.backends,
        extractor: env.extractor,
        threshold: cfg.threshold,
        seed: cfg.seed_policy.seed_for(&p.id),
    };
    let (_, report) = stage_one(p, &ctx).map_err(|e| RepairError::new(e, Vec::new()))?;
    if report.no_repair_needed() {
        return Ok(already_correct(p));
    }
    let mut trail: Vec<TrailEntry> = Vec::new();
    let mut tried: Vec<String> = Vec::new();
    let mut last: Option<Prompt> = None;
    let object = report.neglected[0].clone();
    let fail = |e: EnhancementError, trail: &Vec<TrailEntry>| RepairError::new(e, trail.clone());
    while trail.len() < cfg.lr_max_iterations {
        let query = render_llm_repair(&p.text, &object.concept);
        let request = SuggestRequest { template: TemplateKind::LlmRepair, object: &object.concept, prompt: Some(&query) };
        let items = env.backends.suggester.suggest(&request).map_err(|e| fail(e.into(), &trail))?;
        let Some(next) = items.into_iter().find(|c| !tried.contains(c)) else { break };
        tried.push(next.clone());
        let candidate = Prompt::new(p.id.clone(), next.clone(), env.extractor.lexicon());
        let (_, cand_report) = stage_one(&candidate, &ctx).map_err(|e| fail(e, &trail))?;
        let passed = !cand_report.entries.is_empty() && cand_report.no_repair_needed();
        trail.push(TrailEntry {
            candidate: FeatureCandidate {
                kind: FeatureKind::Rewrite,
                phrase: next.clone(),
                target: object.head_lemma.clone(),
                att_diff: None,
                source: CandidateSource::Llm,
            },
            prompt: next,
            passed,
            att_diff: None,
        });
        if passed {
            return Ok(RepairOutcome {
                status: RepairStatus::Repaired,
                final_prompt: candidate,
                attempts: 1 + trail.len(),
                trail,
                final_att_diff: None,
            });
        }
        last = Some(candidate);
    }
    Ok(RepairOutcome {
        status: RepairStatus::BestEffort,
        final_prompt: last.unwrap_or_else(|| p.clone()),
        attempts: 1 + trail.len(),
        trail,
        final_att_diff: None,
    })
}

/// Similarity between the prompt text and its generated image.
pub fn compute_clipscore(p: &Prompt, rec: &GenerationRecord, scorer: &dyn Scorer) -> Result<f64, BackendError> {
    scorer.similarity(&rec.image_ref, &p.text)
}

/// Repair many prompts with at most `jobs` workers; results keep input order.
pub fn repair_batch(
    prompts: &[Prompt],
    env: &RepairEnv<'_>,
    cfg: &PipelineConfig,
    jobs: usize,
) -> Vec<Result<RepairOutcome, PipelineError>> {
    use rayon::prelude::*;
    let run_one = |p: &Prompt| patcher_repair(p, env, cfg);
    if jobs <= 1 || !env.backends.all_concurrent() {
        return prompts.iter().map(run_one).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(|| prompts.par_iter().map(run_one).collect()),
        Err(e) => {
            log::warn!("cannot start {jobs} workers ({e}); repairing sequentially");
            prompts.iter().map(run_one).collect()
        }
    }
}
