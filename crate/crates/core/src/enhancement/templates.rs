//! LLM query templates and response parsing.

use crate::domain::{CandidateSource, FeatureCandidate, FeatureKind};

use super::EnhancementError;

const SHAPE_TEMPLATE: &str = "What are the common shapes of the [X]?

Please output the answer without explanation.
There are two guidelines:
1) The output should add shapes to the neglected object to construct a fluent phrase, separating each phrase with a semicolon;
2) Each shape should originate from a distinct perspective.

Example:

Question: What are the common shapes of bicycle?

Output: two-wheeled bicycle; bicycle with pedals; bicycle with chain and gears";

const COLOR_TEMPLATE: &str = "What are the most common color of the [X]?

Please output the answer without explanation.
There are two guidelines:
1) The output should add colors to the neglected object to construct a fluent phrase, separating each phrase with a semicolon;
2) Each color should originate from a distinct perspective.

Example:

Question: What are the most common colors of apple?

Output: red apple; green apple";

const LLM_REPAIR_TEMPLATE: &str = "Input Prompt: [P]

The input prompt is fed into the Text-to-Image model.
However, the [O] is not shown on the generated image.
Please repair the input prompt and output eight repaired prompt and and separating each prompt with a semicolon without explanation.";

/// Feature query for `kind` (color or shape) about `object_lemma`.
pub fn render_feature_query(kind: FeatureKind, object_lemma: &str) -> Result<String, EnhancementError> {
    let lemma = object_lemma.trim();
    if lemma.is_empty() {
        return Err(EnhancementError::EmptyLemma);
    }
    let template = match kind {
        FeatureKind::Shape => SHAPE_TEMPLATE,
        FeatureKind::Color => COLOR_TEMPLATE,
        other => return Err(EnhancementError::NoTemplate(other)),
    };
    Ok(template.replacen("[X]", lemma, 1))
}

/// Rewrite request for the LLM-repair baseline.
pub fn render_llm_repair(prompt: &str, object: &str) -> String {
    LLM_REPAIR_TEMPLATE.replacen("[P]", prompt, 1).replacen("[O]", object, 1)
}

/// Split a semicolon-separated completion into trimmed, non-empty items.
pub fn split_semicolon_list(text: &str) -> Vec<String> {
    text.split(';').map(str::trim).filter(|s| !s.is_empty()).map(str::to_string).collect()
}

/// Candidates for `target` from a completion answering a `kind` query.
pub fn parse_feature_response(text: &str, kind: FeatureKind, target: &str) -> Vec<FeatureCandidate> {
    split_semicolon_list(text)
        .into_iter()
        .map(|phrase| FeatureCandidate {
            kind,
            phrase,
            target: target.to_string(),
            att_diff: None,
            source: CandidateSource::Llm,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_query_is_instantiated_once() {
        let q = render_feature_query(FeatureKind::Shape, "bicycle").unwrap();
        assert!(q.starts_with("What are the common shapes of the bicycle?\n\nPlease output"));
        assert!(q.ends_with("Output: two-wheeled bicycle; bicycle with pedals; bicycle with chain and gears"));
        assert!(!q.contains("[X]"));
    }

    #[test]
    fn color_query() {
        let q = render_feature_query(FeatureKind::Color, "apple").unwrap();
        assert!(q.starts_with("What are the most common color of the apple?"));
        assert!(q.contains("2) Each color should originate from a distinct perspective."));
        assert!(q.ends_with("Output: red apple; green apple"));
    }

    #[test]
    fn empty_lemma_rejected() {
        assert!(matches!(render_feature_query(FeatureKind::Shape, " "), Err(EnhancementError::EmptyLemma)));
    }

    #[test]
    fn llm_repair_query() {
        let q = render_llm_repair("a bird and a giraffe", "bird");
        assert_eq!(
            q,
            "Input Prompt: a bird and a giraffe\n\nThe input prompt is fed into the Text-to-Image model.\n\
             However, the bird is not shown on the generated image.\nPlease repair the input prompt and \
             output eight repaired prompt and and separating each prompt with a semicolon without explanation."
        );
    }

    #[test]
    fn parse_examples() {
        let c = parse_feature_response("red apple; green apple", FeatureKind::Color, "apple");
        assert_eq!(c.iter().map(|c| c.phrase.as_str()).collect::<Vec<_>>(), ["red apple", "green apple"]);
        assert!(c.iter().all(|c| c.kind == FeatureKind::Color && c.target == "apple"));
        let c = parse_feature_response(
            "two-wheeled bicycle; bicycle with pedals; bicycle with chain and gears",
            FeatureKind::Shape,
            "bicycle",
        );
        assert_eq!(c.len(), 3);
        assert!(parse_feature_response(" ; ; ", FeatureKind::Shape, "x").is_empty());
    }
}
