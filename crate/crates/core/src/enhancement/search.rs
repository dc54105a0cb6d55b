//! Implicit feature enhancement: replace the neglected object by one of its
//! hyponyms, searching the pruned hyponym tree under attention guidance.

use std::collections::{HashSet, VecDeque};

use crate::domain::{CandidateSource, FeatureCandidate, FeatureKind, RepairOutcome};

use super::substitute::{concept_range_in_span, concept_words, substitute_concept};
use super::tree::{build_hyponym_tree, prune_tree, HyponymTree};
use super::wordnet::{WordNet, WordNetError};
use super::{run_trial, EnhancementConfig, RepairContext, RepairError, RepairTarget, StageRun, Trail};

/// Breadth-first search over the unpruned hyponyms of the target.
///
/// The frontier starts with the root's children. After a failed trial the
/// node's children are queued when its attention difference beat the
/// baseline, and its siblings otherwise. Without guidance (disabled, or no
/// baseline difference) the search is a plain breadth-first walk.
pub fn attention_guided_search(
    tree: &HyponymTree,
    target: &RepairTarget,
    ctx: &RepairContext<'_>,
    cfg: &EnhancementConfig,
) -> Result<RepairOutcome, RepairError> {
    search_run(tree, target, ctx, cfg).map(|r| r.outcome)
}

pub(crate) fn search_run(
    tree: &HyponymTree,
    t: &RepairTarget,
    ctx: &RepairContext<'_>,
    cfg: &EnhancementConfig,
) -> Result<StageRun, RepairError> {
    let object = t.object();
    let lexicon = ctx.extractor.lexicon();
    let mut trail = Trail::new();
    let unpruned = |id: &usize| !tree.node(*id).pruned;
    let mut frontier: VecDeque<usize> = tree.root().children.iter().copied().filter(unpruned).collect();
    let mut visited: HashSet<usize> = frontier.iter().copied().collect();
    let guided = cfg.guidance && t.base_att_diff.is_some();

    let (before, after) = match concept_range_in_span(&t.prompt, object, lexicon) {
        Some((a, b)) => (
            t.prompt.tokens[object.span.0..a].iter().map(|x| x.surface.as_str()).collect::<Vec<_>>(),
            t.prompt.tokens[b + 1..=object.span.1].iter().map(|x| x.surface.as_str()).collect::<Vec<_>>(),
        ),
        None => (Vec::new(), Vec::new()),
    };

    while let Some(id) = frontier.pop_front() {
        let node = tree.node(id);
        let mut words = before.clone();
        words.push(&node.lemma);
        words.extend(&after);
        let phrase = words.join(" ");
        let concept = concept_words(&node.lemma, lexicon).join(" ");
        let trial = substitute_concept(&t.prompt, object, &phrase, &concept, lexicon)
            .and_then(|p| run_trial(ctx, t, p));
        let trial = match trial {
            Ok(trial) => trial,
            Err(e) => return Err(trail.fail(e)),
        };
        let candidate = FeatureCandidate {
            kind: FeatureKind::Hyponym,
            phrase,
            target: object.head_lemma.clone(),
            att_diff: None,
            source: CandidateSource::Taxonomy,
        };
        trail.push(candidate, &trial);
        if trial.passed {
            return Ok(trail.repaired(trial));
        }
        let next = if !guided {
            node.children.clone()
        } else {
            let reduced = matches!((trial.att_diff, t.base_att_diff), (Some(a), Some(b)) if a < b);
            if reduced {
                node.children.clone()
            } else {
                tree.siblings(id)
            }
        };
        for n in next {
            if unpruned(&n) && visited.insert(n) {
                frontier.push_back(n);
            }
        }
    }
    Ok(trail.best_effort(&t.prompt))
}

/// Build, prune and search the target's hyponym tree. A target unknown to
/// the taxonomy yields an empty best-effort outcome.
pub fn implicit_repair(
    target: &RepairTarget,
    wordnet: &WordNet,
    ctx: &RepairContext<'_>,
    cfg: &EnhancementConfig,
) -> Result<RepairOutcome, RepairError> {
    implicit_run(target, wordnet, ctx, cfg).map(|r| r.outcome)
}

pub(crate) fn implicit_run(
    t: &RepairTarget,
    wordnet: &WordNet,
    ctx: &RepairContext<'_>,
    cfg: &EnhancementConfig,
) -> Result<StageRun, RepairError> {
    let object = t.object();
    let lemma = if wordnet.noun_senses(&object.concept).is_empty() {
        &object.head_lemma
    } else {
        &object.concept
    };
    let tree = match build_hyponym_tree(lemma, wordnet, cfg.max_tree_depth) {
        Ok(tree) => tree,
        Err(WordNetError::LemmaNotFound(_)) => return Ok(Trail::new().best_effort(&t.prompt)),
        Err(e) => return Err(RepairError::new(e, Vec::new())),
    };
    let tree = prune_tree(tree, ctx.backends.embedder, cfg.prune_similarity_threshold)
        .map_err(|e| RepairError::new(e, Vec::new()))?;
    search_run(&tree, t, ctx, cfg)
}
