//! Core data types shared by every stage, plus their validation.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::lexicon::Lexicon;

/// Byte ranges of the word tokens of `text`.
///
/// Words are maximal runs of alphanumeric characters, where a hyphen or
/// apostrophe between two alphanumerics stays inside the word. Every other
/// non-space character is a token of its own.
pub fn token_ranges(text: &str) -> Vec<(usize, usize)> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let end_of = |i: usize| chars.get(i).map(|&(b, _)| b).unwrap_or(text.len());
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i].1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if !c.is_alphanumeric() {
            out.push((chars[i].0, end_of(i + 1)));
            i += 1;
            continue;
        }
        let start = i;
        i += 1;
        while i < chars.len() {
            let c = chars[i].1;
            if c.is_alphanumeric() {
                i += 1;
            } else if (c == '-' || c == '\'' || c == '’')
                && chars.get(i + 1).is_some_and(|&(_, n)| n.is_alphanumeric())
            {
                i += 2;
            } else {
                break;
            }
        }
        out.push((chars[start].0, end_of(i)));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub index: usize,
    pub surface: String,
    pub lemma: String,
}

/// A span of a prompt produced by substitution, kept atomic on re-extraction
/// so the rewritten object is still recognised as one entity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pin {
    pub start: usize,
    pub end: usize,
    /// Object concept of the pinned span ("bicycle", "mountain bike").
    pub concept: String,
    pub head: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prompt {
    pub id: String,
    pub text: String,
    pub tokens: Vec<Token>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pins: Vec<Pin>,
}

impl Prompt {
    pub fn new(id: impl Into<String>, text: impl Into<String>, lexicon: &Lexicon) -> Self {
        let text = text.into();
        let tokens = token_ranges(&text)
            .into_iter()
            .enumerate()
            .map(|(index, (s, e))| {
                let surface = text[s..e].to_string();
                let lemma = lexicon.lemma(&surface);
                Token { index, surface, lemma }
            })
            .collect();
        Prompt { id: id.into(), text, tokens, pins: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Byte range of every token within `text`.
    pub fn offsets(&self) -> Vec<(usize, usize)> {
        token_ranges(&self.text)
    }

    /// Surfaces of tokens `start..=end` joined by single spaces.
    pub fn span_text(&self, start: usize, end: usize) -> String {
        self.tokens[start..=end].iter().map(|t| t.surface.as_str()).collect::<Vec<_>>().join(" ")
    }

    pub fn pin_starting_at(&self, index: usize) -> Option<&Pin> {
        self.pins.iter().find(|p| p.start == index)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectStatus {
    Unknown,
    Neglected,
    Correct,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectEntity {
    pub phrase: String,
    pub head_lemma: String,
    /// Noun compound naming the object ("mountain bike"); its last word is
    /// `head_lemma`.
    pub concept: String,
    pub span: (usize, usize),
    pub status: ObjectStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TokenAttentionPair {
    pub token_index: usize,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub prompt_id: String,
    pub image_ref: String,
    pub seed: u64,
    pub taps: Vec<TokenAttentionPair>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    Color,
    Shape,
    /// Color modifier prepended to a shape phrase, tried after both kinds fail.
    ColorShape,
    Hyponym,
    /// Whole-prompt rewrite from the LLM baseline.
    Rewrite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateSource {
    Llm,
    Taxonomy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureCandidate {
    pub kind: FeatureKind,
    pub phrase: String,
    pub target: String,
    pub att_diff: Option<f64>,
    pub source: CandidateSource,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepairStatus {
    AlreadyCorrect,
    Repaired,
    BestEffort,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrailEntry {
    pub candidate: FeatureCandidate,
    /// Full text of the prompt that was generated for this trial.
    pub prompt: String,
    pub passed: bool,
    pub att_diff: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepairOutcome {
    pub status: RepairStatus,
    pub final_prompt: Prompt,
    pub attempts: usize,
    pub trail: Vec<TrailEntry>,
    pub final_att_diff: Option<f64>,
}

/// Absent att_diff sorts after every measured value.
pub fn att_diff_key(v: Option<f64>) -> f64 {
    v.unwrap_or(f64::INFINITY)
}

/// Index of the entry with minimal measured att_diff, earliest on ties.
pub fn min_att_diff_index(trail: &[TrailEntry]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, e) in trail.iter().enumerate() {
        if let Some(v) = e.att_diff {
            if best.is_none_or(|(_, b)| v < b) {
                best = Some((i, v));
            }
        }
    }
    best.map(|(i, _)| i)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    IndicesNotUnique,
    IndicesNotContiguous,
    EmptySurface(usize),
    EmptyLemma(usize),
    TokenStreamMismatch,
    SpanStartAfterEnd { start: usize, end: usize },
    SpanOutOfRange { end: usize, len: usize },
    HeadNotInSpan(String),
    PinOverlap,
    NegativeScore(usize),
    TapCountMismatch { taps: usize, tokens: usize },
    EmptyImageRef,
    EmptyPhrase,
    NegativeAttDiff,
    RepairedWithoutPass,
    BestEffortWithPass,
    BestEffortNotMinimal,
    FinalPromptMismatch,
    AttemptCount { attempts: usize, expected: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::IndicesNotUnique => write!(f, "indices not unique"),
            Violation::IndicesNotContiguous => write!(f, "indices not contiguous from 0"),
            Violation::EmptySurface(i) => write!(f, "token {i} has empty surface"),
            Violation::EmptyLemma(i) => write!(f, "token {i} has empty lemma"),
            Violation::TokenStreamMismatch => write!(f, "tokens do not reproduce text"),
            Violation::SpanStartAfterEnd { start, end } => write!(f, "start>end ({start},{end})"),
            Violation::SpanOutOfRange { end, len } => {
                write!(f, "span end {end} out of range for {len} tokens")
            }
            Violation::HeadNotInSpan(h) => write!(f, "head lemma {h:?} not in span"),
            Violation::PinOverlap => write!(f, "pins overlap or leave the prompt"),
            Violation::NegativeScore(i) => write!(f, "tap {i} has a negative or non-finite score"),
            Violation::TapCountMismatch { taps, tokens } => {
                write!(f, "{taps} taps for {tokens} tokens")
            }
            Violation::EmptyImageRef => write!(f, "empty image_ref"),
            Violation::EmptyPhrase => write!(f, "empty candidate phrase"),
            Violation::NegativeAttDiff => write!(f, "negative att_diff"),
            Violation::RepairedWithoutPass => write!(f, "repaired but last trail entry did not pass"),
            Violation::BestEffortWithPass => write!(f, "best_effort but a trail entry passed"),
            Violation::BestEffortNotMinimal => {
                write!(f, "best_effort final prompt is not the minimal att_diff trial")
            }
            Violation::FinalPromptMismatch => write!(f, "final prompt differs from the passing trial"),
            Violation::AttemptCount { attempts, expected } => {
                write!(f, "attempts {attempts} but expected {expected}")
            }
        }
    }
}

pub fn validate_prompt(p: &Prompt) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    if p.tokens.iter().any(|t| !seen.insert(t.index)) {
        out.push(Violation::IndicesNotUnique);
    }
    if p.tokens.iter().enumerate().any(|(i, t)| t.index != i) {
        out.push(Violation::IndicesNotContiguous);
    }
    for t in &p.tokens {
        if t.surface.is_empty() {
            out.push(Violation::EmptySurface(t.index));
        }
        if t.lemma.is_empty() {
            out.push(Violation::EmptyLemma(t.index));
        }
    }
    let stream: Vec<&str> = p.offsets().into_iter().map(|(s, e)| &p.text[s..e]).collect();
    let joined = p.tokens.iter().map(|t| t.surface.as_str()).collect::<Vec<_>>().join(" ");
    let reparsed: Vec<&str> = token_ranges(&joined).into_iter().map(|(s, e)| &joined[s..e]).collect();
    if stream != reparsed {
        out.push(Violation::TokenStreamMismatch);
    }
    let mut pins: Vec<&Pin> = p.pins.iter().collect();
    pins.sort_by_key(|x| x.start);
    let bad_pin = pins.iter().any(|x| x.start > x.end || x.end >= p.tokens.len())
        || pins.windows(2).any(|w| w[1].start <= w[0].end);
    if bad_pin {
        out.push(Violation::PinOverlap);
    }
    out
}

pub fn validate_entity(e: &ObjectEntity, p: &Prompt) -> Vec<Violation> {
    let mut out = Vec::new();
    let (start, end) = e.span;
    if start > end {
        out.push(Violation::SpanStartAfterEnd { start, end });
    }
    if end >= p.tokens.len() {
        out.push(Violation::SpanOutOfRange { end, len: p.tokens.len() });
    }
    if out.is_empty() && !p.tokens[start..=end].iter().any(|t| t.lemma == e.head_lemma) {
        out.push(Violation::HeadNotInSpan(e.head_lemma.clone()));
    }
    out
}

pub fn validate_record(rec: &GenerationRecord, p: &Prompt) -> Vec<Violation> {
    let mut out = Vec::new();
    if rec.taps.len() != p.tokens.len() {
        out.push(Violation::TapCountMismatch { taps: rec.taps.len(), tokens: p.tokens.len() });
    }
    for (i, t) in rec.taps.iter().enumerate() {
        if !(t.score.is_finite() && t.score >= 0.0) {
            out.push(Violation::NegativeScore(i));
        }
    }
    if rec.image_ref.is_empty() {
        out.push(Violation::EmptyImageRef);
    }
    out
}

impl RepairOutcome {
    /// Check status/trail consistency. `stage_generations` is the number of
    /// generation calls the producer makes outside the trail (1 for a full
    /// pipeline run, which generates the unmodified prompt first; 0 for a
    /// single enhancement stream).
    ///
    /// Repairs of several neglected objects run in stages; the pass and
    /// minimality rules apply to the final stage, i.e. the trailing entries
    /// that share the last entry's target.
    pub fn violations(&self, stage_generations: usize) -> Vec<Violation> {
        let mut out = Vec::new();
        let expected = self.trail.len() + stage_generations;
        if self.attempts != expected {
            out.push(Violation::AttemptCount { attempts: self.attempts, expected });
        }
        for e in &self.trail {
            if e.candidate.phrase.is_empty() {
                out.push(Violation::EmptyPhrase);
            }
            let negative = |v: Option<f64>| v.is_some_and(|x| x.is_nan() || x < 0.0);
            if negative(e.att_diff) || negative(e.candidate.att_diff) {
                out.push(Violation::NegativeAttDiff);
            }
        }
        let segment_start = match self.trail.last() {
            Some(last) => {
                let target = &last.candidate.target;
                let mut i = self.trail.len();
                while i > 0 && &self.trail[i - 1].candidate.target == target {
                    i -= 1;
                }
                i
            }
            None => 0,
        };
        let segment = &self.trail[segment_start..];
        match self.status {
            RepairStatus::AlreadyCorrect => {}
            RepairStatus::Repaired => match segment.last() {
                Some(last) if last.passed => {
                    if last.prompt != self.final_prompt.text {
                        out.push(Violation::FinalPromptMismatch);
                    }
                }
                _ => out.push(Violation::RepairedWithoutPass),
            },
            RepairStatus::BestEffort => {
                if segment.iter().any(|e| e.passed) {
                    out.push(Violation::BestEffortWithPass);
                }
                if let Some(i) = min_att_diff_index(segment) {
                    if segment[i].prompt != self.final_prompt.text
                        || segment[i].att_diff != self.final_att_diff
                    {
                        out.push(Violation::BestEffortNotMinimal);
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lex() -> Lexicon {
        Lexicon::bundled()
    }

    #[test]
    fn tokenizes_words_and_punctuation() {
        let p = Prompt::new("p", "A two-wheeled bicycle, and a donut's glaze.", &lex());
        let s: Vec<&str> = p.tokens.iter().map(|t| t.surface.as_str()).collect();
        assert_eq!(s, ["A", "two-wheeled", "bicycle", ",", "and", "a", "donut's", "glaze", "."]);
        assert_eq!(p.tokens[0].lemma, "a");
        assert!(validate_prompt(&p).is_empty());
    }

    #[test]
    fn well_formed_prompt_is_ok() {
        let p = Prompt::new("p", "a red apple and a bench", &lex());
        assert_eq!(p.len(), 6);
        assert!(validate_prompt(&p).is_empty());
    }

    #[test]
    fn duplicate_index_is_reported() {
        let mut p = Prompt::new("p", "a cat and a dog", &lex());
        p.tokens[2].index = 1;
        let v = validate_prompt(&p);
        assert!(v.contains(&Violation::IndicesNotUnique));
        assert_eq!(Violation::IndicesNotUnique.to_string(), "indices not unique");
    }

    #[test]
    fn reversed_span_is_reported() {
        let p = Prompt::new("p", "a cat and a dog", &lex());
        let e = ObjectEntity {
            phrase: "cat".into(),
            head_lemma: "cat".into(),
            concept: "cat".into(),
            span: (3, 1),
            status: ObjectStatus::Unknown,
        };
        let v = validate_entity(&e, &p);
        assert_eq!(v.len(), 1);
        assert!(v[0].to_string().starts_with("start>end"));
    }

    #[test]
    fn tampered_surface_breaks_stream() {
        let mut p = Prompt::new("p", "a cat and a dog", &lex());
        p.tokens[1].surface = "cow".into();
        assert!(validate_prompt(&p).contains(&Violation::TokenStreamMismatch));
    }

    #[test]
    fn min_att_diff_prefers_earliest() {
        let entry = |v: Option<f64>| TrailEntry {
            candidate: FeatureCandidate {
                kind: FeatureKind::Color,
                phrase: "x".into(),
                target: "t".into(),
                att_diff: v,
                source: CandidateSource::Llm,
            },
            prompt: String::new(),
            passed: false,
            att_diff: v,
        };
        let trail = vec![entry(None), entry(Some(0.3)), entry(Some(0.2)), entry(Some(0.2))];
        assert_eq!(min_att_diff_index(&trail), Some(2));
        assert_eq!(min_att_diff_index(&trail[..1]), None);
    }
}
