//! Explicit feature enhancement: describe the neglected object with color and
//! shape modifiers suggested by the LLM.

use crate::backends::{SuggestRequest, TemplateKind};
use crate::domain::{min_att_diff_index, CandidateSource, FeatureCandidate, FeatureKind, RepairOutcome};
use crate::lexicon::Lexicon;

use super::substitute::{concept_words, substitute_concept};
use super::templates::{parse_feature_response, render_feature_query};
use super::{run_trial, EnhancementConfig, RepairContext, RepairError, RepairTarget, StageRun, Trail};

/// Try color then shape candidates (up to `max_explicit_iterations` each),
/// then one combined color + shape phrase.
pub fn explicit_repair(
    target: &RepairTarget,
    ctx: &RepairContext<'_>,
    cfg: &EnhancementConfig,
) -> Result<RepairOutcome, RepairError> {
    explicit_run(target, ctx, cfg).map(|r| r.outcome)
}

pub(crate) fn explicit_run(
    t: &RepairTarget,
    ctx: &RepairContext<'_>,
    cfg: &EnhancementConfig,
) -> Result<StageRun, RepairError> {
    let object = t.object();
    let lexicon = ctx.extractor.lexicon();
    let mut trail = Trail::new();
    let mut tried: Vec<Vec<usize>> = Vec::new();
    let mut any_candidates = false;

    for (kind, template) in [(FeatureKind::Color, TemplateKind::Color), (FeatureKind::Shape, TemplateKind::Shape)] {
        let query = match render_feature_query(kind, &object.concept) {
            Ok(q) => q,
            Err(e) => return Err(trail.fail(e)),
        };
        let request = SuggestRequest { template, object: &object.concept, prompt: Some(&query) };
        let items = match ctx.backends.suggester.suggest(&request) {
            Ok(items) => items,
            Err(e) => return Err(trail.fail(e)),
        };
        let candidates = parse_feature_response(&items.join(";"), kind, &object.head_lemma);
        any_candidates |= !candidates.is_empty();
        let mut indices = Vec::new();
        for candidate in candidates.into_iter().take(cfg.max_explicit_iterations) {
            let trial = substitute_concept(&t.prompt, object, &candidate.phrase, &object.concept, lexicon)
                .and_then(|p| run_trial(ctx, t, p));
            let trial = match trial {
                Ok(trial) => trial,
                Err(e) => return Err(trail.fail(e)),
            };
            indices.push(trail.entries.len());
            trail.push(candidate, &trial);
            if trial.passed {
                return Ok(trail.repaired(trial));
            }
        }
        tried.push(indices);
    }

    if !any_candidates {
        return Ok(trail.best_effort(&t.prompt));
    }

    if let [colors, shapes] = tried.as_slice() {
        if !colors.is_empty() && !shapes.is_empty() {
            let pick = |idx: &[usize]| -> usize {
                let sub: Vec<_> = idx.iter().map(|&i| trail.entries[i].clone()).collect();
                match min_att_diff_index(&sub) {
                    Some(k) if cfg.guidance => idx[k],
                    _ => idx[0],
                }
            };
            let color = &trail.entries[pick(colors)].candidate.phrase;
            let shape = &trail.entries[pick(shapes)].candidate.phrase;
            let modifier = color_modifier(color, &object.concept, lexicon);
            let phrase = format!("{modifier} {shape}");
            let fresh = !trail.entries.iter().any(|e| e.candidate.phrase == phrase);
            if !modifier.is_empty() && fresh {
                let candidate = FeatureCandidate {
                    kind: FeatureKind::ColorShape,
                    phrase,
                    target: object.head_lemma.clone(),
                    att_diff: None,
                    source: CandidateSource::Llm,
                };
                let trial = substitute_concept(&t.prompt, object, &candidate.phrase, &object.concept, lexicon)
                    .and_then(|p| run_trial(ctx, t, p));
                let trial = match trial {
                    Ok(trial) => trial,
                    Err(e) => return Err(trail.fail(e)),
                };
                trail.push(candidate, &trial);
                if trial.passed {
                    return Ok(trail.repaired(trial));
                }
            }
        }
    }
    Ok(trail.best_effort(&t.prompt))
}

/// The color words of a color phrase: what precedes the object name
/// ("red" in "red apple"), or what follows it when nothing precedes.
pub fn color_modifier(phrase: &str, concept: &str, lexicon: &Lexicon) -> String {
    let words: Vec<&str> = phrase.split_whitespace().collect();
    let lowered = concept_words(phrase, lexicon);
    let cw = concept_words(concept, lexicon);
    if lowered.len() != words.len() || cw.is_empty() {
        return String::new();
    }
    let found = (0..words.len().saturating_sub(cw.len() - 1)).find(|&s| {
        (0..cw.len()).all(|k| {
            let w = &lowered[s + k];
            w == &cw[k] || lexicon.lemma(w) == cw[k]
        })
    });
    match found {
        Some(0) => words[cw.len()..].join(" "),
        Some(s) => words[..s].join(" "),
        None => words.join(" "),
    }
}
