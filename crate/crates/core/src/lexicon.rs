//! Part-of-speech lexicon used by the builtin chunker and the lemmatizer.
//!
//! File format: one `lemma<TAB>pos` entry per line, pos in
//! {NOUN, ADJ, DET, CONJ, OTHER}. A lemma may be listed under several tags.
//! Entries containing spaces are multiword nouns ("teddy bear").

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use thiserror::Error;

const BUNDLED: &str = include_str!("../data/lexicon.tsv");

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("cannot read lexicon {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("lexicon line {line}: {reason}")]
    Malformed { line: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pos {
    Noun,
    Adj,
    Det,
    Conj,
    Other,
}

impl Pos {
    fn bit(self) -> u8 {
        match self {
            Pos::Noun => 1,
            Pos::Adj => 2,
            Pos::Det => 4,
            Pos::Conj => 8,
            Pos::Other => 16,
        }
    }

    pub fn parse(tag: &str) -> Option<Pos> {
        match tag {
            "NOUN" => Some(Pos::Noun),
            "ADJ" => Some(Pos::Adj),
            "DET" => Some(Pos::Det),
            "CONJ" => Some(Pos::Conj),
            "OTHER" => Some(Pos::Other),
            _ => None,
        }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pos::Noun => "NOUN",
            Pos::Adj => "ADJ",
            Pos::Det => "DET",
            Pos::Conj => "CONJ",
            Pos::Other => "OTHER",
        })
    }
}

/// Set of tags a word may take.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PosSet(u8);

impl PosSet {
    pub fn empty() -> Self {
        PosSet(0)
    }

    pub fn of(pos: Pos) -> Self {
        PosSet(pos.bit())
    }

    pub fn insert(&mut self, pos: Pos) {
        self.0 |= pos.bit();
    }

    pub fn contains(self, pos: Pos) -> bool {
        self.0 & pos.bit() != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }
}

#[derive(Debug, Clone)]
pub struct Lexicon {
    tags: HashMap<String, PosSet>,
    /// Multiword nouns keyed by their first word, longest first.
    multiword: HashMap<String, Vec<Vec<String>>>,
}

impl Lexicon {
    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        let mut tags: HashMap<String, PosSet> = HashMap::new();
        let mut multiword: HashMap<String, Vec<Vec<String>>> = HashMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (lemma, tag) = line.split_once('\t').ok_or_else(|| LexiconError::Malformed {
                line: n + 1,
                reason: "expected lemma<TAB>pos".into(),
            })?;
            let pos = Pos::parse(tag.trim()).ok_or_else(|| LexiconError::Malformed {
                line: n + 1,
                reason: format!("unknown pos tag {tag:?}"),
            })?;
            let lemma = lemma.trim().to_lowercase();
            if lemma.is_empty() {
                return Err(LexiconError::Malformed { line: n + 1, reason: "empty lemma".into() });
            }
            tags.entry(lemma.clone()).or_default().insert(pos);
            let words: Vec<String> = lemma.split_whitespace().map(str::to_string).collect();
            if words.len() > 1 && pos == Pos::Noun {
                multiword.entry(words[0].clone()).or_default().push(words);
            }
        }
        for seqs in multiword.values_mut() {
            seqs.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
            seqs.dedup();
        }
        Ok(Lexicon { tags, multiword })
    }

    pub fn load(path: &Path) -> Result<Self, LexiconError> {
        let text = std::fs::read_to_string(path).map_err(|source| LexiconError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    /// The lexicon shipped with the crate (dataset vocabularies plus common words).
    pub fn bundled() -> Self {
        Self::parse(BUNDLED).expect("bundled lexicon is well-formed")
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn tags(&self, word: &str) -> PosSet {
        self.tags.get(word).copied().unwrap_or_default()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.tags.contains_key(word)
    }

    pub fn is_noun(&self, word: &str) -> bool {
        self.tags(word).contains(Pos::Noun)
    }

    /// Lowercase the surface and strip a regular plural "s" when the
    /// singular is a known word.
    pub fn lemma(&self, surface: &str) -> String {
        let lower = surface.to_lowercase();
        if self.contains(&lower) {
            return lower;
        }
        if let Some(stem) = lower.strip_suffix('s') {
            if !stem.is_empty() && self.contains(stem) {
                return stem.to_string();
            }
        }
        lower
    }

    /// Multiword noun sequences that start with `first`, longest first.
    pub fn multiword_starting(&self, first: &str) -> &[Vec<String>] {
        self.multiword.get(first).map(Vec::as_slice).unwrap_or(&[])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_lexicon_covers_dataset_words() {
        let lex = Lexicon::bundled();
        for w in ["bicycle", "donut", "giraffe", "teddy bear", "crown", "mountain bike"] {
            assert!(lex.is_noun(w), "{w}");
        }
        assert!(lex.tags("a").contains(Pos::Det));
        assert!(lex.tags("and").contains(Pos::Conj));
        let orange = lex.tags("orange");
        assert!(orange.contains(Pos::Adj) && orange.contains(Pos::Noun));
    }

    #[test]
    fn plural_lemmas() {
        let lex = Lexicon::bundled();
        assert_eq!(lex.lemma("Gears"), "gear");
        assert_eq!(lex.lemma("skis"), "skis");
        assert_eq!(lex.lemma("glass"), "glass");
        assert_eq!(lex.lemma("Zorbs"), "zorbs");
    }

    #[test]
    fn malformed_lines_report_position() {
        let err = Lexicon::parse("cat\tNOUN\ndog NOUN\n").unwrap_err();
        assert!(matches!(err, LexiconError::Malformed { line: 2, .. }));
        let err = Lexicon::parse("cat\tVERB\n").unwrap_err();
        assert!(matches!(err, LexiconError::Malformed { line: 1, .. }));
    }

    #[test]
    fn multiword_entries_sorted_longest_first() {
        let lex = Lexicon::parse("hot\tADJ\nhot dog\tNOUN\nhot dog stand\tNOUN\n").unwrap();
        let seqs = lex.multiword_starting("hot");
        assert_eq!(seqs[0].len(), 3);
        assert_eq!(seqs[1], vec!["hot", "dog"]);
    }
}
