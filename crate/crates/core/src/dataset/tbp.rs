//! Template-based prompts over fixed animal, object and color vocabularies.
//!
//! Templates and pairing conventions:
//! 1. `a A and a B`: unordered pairs of distinct animals.
//! 2. `a ANIMAL and a COLOR OBJECT`: every (animal, color, object) triple.
//! 3. `a COLOR_A OBJECT_A and a COLOR_B OBJECT_B`: unordered pairs of
//!    (color, object) combinations whose objects differ.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{DatasetError, PromptRecord, Source};

const BUNDLED_VOCAB: &str = include_str!("../../data/tbp_vocab.json");

pub const ANIMALS: usize = 12;
pub const OBJECTS: usize = 12;
pub const COLORS: usize = 11;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TbpVocabulary {
    pub animals: Vec<String>,
    pub objects: Vec<String>,
    pub colors: Vec<String>,
}

impl TbpVocabulary {
    pub fn bundled() -> Self {
        serde_json::from_str(BUNDLED_VOCAB).expect("bundled vocabulary is valid JSON")
    }

    fn check(&self) -> Result<(), DatasetError> {
        for (what, list, expected) in [
            ("animals", &self.animals, ANIMALS),
            ("objects", &self.objects, OBJECTS),
            ("colors", &self.colors, COLORS),
        ] {
            if list.len() != expected {
                return Err(DatasetError::WrongVocabularySize { what, expected, got: list.len() });
            }
            let mut seen = HashSet::new();
            if let Some(dup) = list.iter().find(|w| !seen.insert(w.as_str())) {
                return Err(DatasetError::DuplicateVocabulary(dup.clone()));
            }
        }
        Ok(())
    }
}

pub fn generate_tbp(vocab: &TbpVocabulary) -> Result<Vec<PromptRecord>, DatasetError> {
    vocab.check()?;
    let (animals, objects, colors) = (&vocab.animals, &vocab.objects, &vocab.colors);
    let mut out = Vec::new();
    let mut push = |template: usize, text: String, objs: [&String; 2]| {
        out.push((template, text, [objs[0].clone(), objs[1].clone()]));
    };
    for (i, a) in animals.iter().enumerate() {
        for b in &animals[i + 1..] {
            push(1, format!("a {a} and a {b}"), [a, b]);
        }
    }
    for a in animals {
        for c in colors {
            for o in objects {
                push(2, format!("a {a} and a {c} {o}"), [a, o]);
            }
        }
    }
    let combos: Vec<(&String, &String)> = objects.iter().flat_map(|o| colors.iter().map(move |c| (c, o))).collect();
    for (i, (ca, oa)) in combos.iter().enumerate() {
        for (cb, ob) in &combos[i + 1..] {
            if oa != ob {
                push(3, format!("a {ca} {oa} and a {cb} {ob}"), [oa, ob]);
            }
        }
    }
    let mut counters = [0usize; 4];
    Ok(out
        .into_iter()
        .map(|(t, text, objs)| {
            counters[t] += 1;
            PromptRecord::new(format!("tbp{t}-{:05}", counters[t]), text, objs.to_vec(), Source::Tbp)
        })
        .collect())
}
