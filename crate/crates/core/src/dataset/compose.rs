//! Multi-object prompts composed from single-object names.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{DatasetError, PromptRecord, Source};
use crate::backends::{SuggestRequest, Suggester, TemplateKind};
use crate::domain::Prompt;
use crate::enhancement::substitute::{concept_words, indefinite_article};
use crate::extraction::Extractor;

const COCO80: &str = include_str!("../../data/coco80.txt");

/// Default number of composed prompts per arity.
pub const DEFAULT_COMPOSE_COUNT: usize = 3160;

/// The 80 MSCOCO category names.
pub fn coco80() -> Vec<String> {
    COCO80.lines().map(str::trim).filter(|l| !l.is_empty()).map(str::to_string).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComposeResult {
    pub records: Vec<PromptRecord>,
    /// Records that used the plain "a A and a B" form.
    pub fallbacks: usize,
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else { break };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
    out
}

/// "a bicycle and a donut", "an apple, a cup and a kite".
pub fn fallback_sentence(names: &[String]) -> String {
    let parts: Vec<String> = names.iter().map(|n| format!("{} {n}", indefinite_article(n))).collect();
    match parts.as_slice() {
        [] => String::new(),
        [one] => one.clone(),
        [init @ .., last] => format!("{} and {last}", init.join(", ")),
    }
}

fn keeps_all(text: &str, names: &[String], extractor: &Extractor) -> Result<bool, DatasetError> {
    let p = Prompt::new("", text, extractor.lexicon());
    let objects = extractor.extract(&p)?;
    Ok(names.iter().all(|name| {
        let key = concept_words(name, extractor.lexicon()).join(" ");
        objects.iter().any(|o| o.concept == key || o.head_lemma == key)
    }))
}

/// Compose `limit` prompts of `n` objects each. Pairs are enumerated in
/// order; triples are a seeded sample. The suggester is asked for a sentence
/// (object key: names joined by ", "); a sentence that loses any object when
/// re-extracted is replaced by the plain conjunction form.
pub fn compose_multiobject(
    singles: &[String],
    n: usize,
    suggester: Option<&dyn Suggester>,
    extractor: &Extractor,
    limit: usize,
    seed: u64,
) -> Result<ComposeResult, DatasetError> {
    let (source, prefix) = match n {
        2 => (Source::TwOp, "twop"),
        3 => (Source::ThreeOp, "threeop"),
        other => return Err(DatasetError::BadArity(other)),
    };
    let mut combos = combinations(singles.len(), n);
    if combos.len() > limit {
        if n == 3 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            combos.shuffle(&mut rng);
            combos.truncate(limit);
            combos.sort();
        } else {
            combos.truncate(limit);
        }
    }
    let mut records = Vec::with_capacity(combos.len());
    let mut fallbacks = 0;
    for (k, combo) in combos.iter().enumerate() {
        let names: Vec<String> = combo.iter().map(|&i| singles[i].clone()).collect();
        let mut text = None;
        if let Some(s) = suggester {
            let key = names.join(", ");
            let req = SuggestRequest { template: TemplateKind::ComposeMultiobject, object: &key, prompt: None };
            for item in s.suggest(&req)? {
                if keeps_all(&item, &names, extractor)? {
                    text = Some(item);
                    break;
                }
            }
        }
        let text = text.unwrap_or_else(|| {
            fallbacks += 1;
            fallback_sentence(&names)
        });
        records.push(PromptRecord::new(format!("{prefix}-{:05}", k + 1), text, names, source));
    }
    Ok(ComposeResult { records, fallbacks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combination_counts() {
        assert_eq!(combinations(80, 2).len(), 3160);
        assert_eq!(combinations(5, 3).len(), 10);
        assert_eq!(combinations(5, 3)[0], vec![0, 1, 2]);
        assert_eq!(combinations(5, 3)[9], vec![2, 3, 4]);
        assert!(combinations(2, 3).is_empty());
    }

    #[test]
    fn fallback_form() {
        let names = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        assert_eq!(fallback_sentence(&names(&["bicycle", "donut"])), "a bicycle and a donut");
        assert_eq!(fallback_sentence(&names(&["apple", "cup", "kite"])), "an apple, a cup and a kite");
    }

    #[test]
    fn coco_has_eighty_names() {
        let c = coco80();
        assert_eq!(c.len(), 80);
        assert_eq!(c[1], "bicycle");
    }
}
