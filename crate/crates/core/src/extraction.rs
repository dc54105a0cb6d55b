//! Object extraction: noun-phrase chunking of a prompt into [`ObjectEntity`]s.
//!
//! The builtin chunker tags tokens from the bundled lexicon and groups
//! `ADJ* NOUN+` runs. Multiword lexicon nouns ("teddy bear") are matched
//! greedily, and a word that is both adjective and noun ("orange") is read as
//! an adjective when a noun follows. Spans recorded as [`Pin`]s by substitution
//! are emitted whole.

use std::path::PathBuf;
use std::sync::Arc;

use thiserror::Error;

use crate::backends::remote::{HttpClient, RemoteConfig};
use crate::backends::BackendError;
use crate::domain::{ObjectEntity, ObjectStatus, Pin, Prompt};
use crate::lexicon::{Lexicon, LexiconError, Pos};

#[derive(Debug, Error)]
pub enum ExtractionError {
    #[error("remote parser unavailable: {0}")]
    RemoteParserUnavailable(String),
    #[error("span ({start},{end}) out of range for a {len}-token prompt")]
    SpanOutOfRange { start: usize, end: usize, len: usize },
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error("remote_parser mode needs an endpoint")]
    MissingEndpoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExtractionMode {
    #[default]
    BuiltinChunker,
    RemoteParser,
}

#[derive(Debug, Clone, Default)]
pub struct ExtractionConfig {
    pub mode: ExtractionMode,
    /// Lexicon file for the builtin chunker; the bundled lexicon when unset.
    pub lexicon_path: Option<PathBuf>,
    pub endpoint: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tag {
    Noun,
    Adj,
    AdjOrNoun,
    Det,
    Conj,
    Other,
}

#[derive(Debug)]
struct Unit<'p> {
    start: usize,
    end: usize,
    tag: Tag,
    words: Vec<String>,
    pin: Option<&'p Pin>,
}

#[derive(Clone)]
pub struct Extractor {
    lexicon: Arc<Lexicon>,
    remote: Option<HttpClient>,
}

impl std::fmt::Debug for Extractor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Extractor").field("remote", &self.remote.is_some()).finish()
    }
}

impl Extractor {
    pub fn new(cfg: &ExtractionConfig) -> Result<Self, ExtractionError> {
        let lexicon = match &cfg.lexicon_path {
            Some(path) => Lexicon::load(path)?,
            None => Lexicon::bundled(),
        };
        let remote = match cfg.mode {
            ExtractionMode::BuiltinChunker => None,
            ExtractionMode::RemoteParser => {
                let endpoint = cfg.endpoint.clone().ok_or(ExtractionError::MissingEndpoint)?;
                Some(HttpClient::new(RemoteConfig::new(endpoint)))
            }
        };
        Ok(Extractor { lexicon: Arc::new(lexicon), remote })
    }

    pub fn builtin(lexicon: Arc<Lexicon>) -> Self {
        Extractor { lexicon, remote: None }
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn shared_lexicon(&self) -> Arc<Lexicon> {
        self.lexicon.clone()
    }

    pub fn extract(&self, p: &Prompt) -> Result<Vec<ObjectEntity>, ExtractionError> {
        if p.tokens.is_empty() {
            return Ok(Vec::new());
        }
        let units = match &self.remote {
            None => self.builtin_units(p),
            Some(client) => self.remote_units(p, client)?,
        };
        Ok(chunk(p, units))
    }

    fn builtin_units<'p>(&self, p: &'p Prompt) -> Vec<Unit<'p>> {
        let lex = &*self.lexicon;
        let n = p.tokens.len();
        let lower: Vec<String> = p.tokens.iter().map(|t| t.surface.to_lowercase()).collect();
        let mut units = Vec::new();
        let mut i = 0;
        while i < n {
            if let Some(pin) = p.pin_starting_at(i) {
                units.push(pinned_unit(pin));
                i = pin.end + 1;
                continue;
            }
            let multi = lex.multiword_starting(&lower[i]).iter().find(|seq| {
                let len = seq.len();
                i + len <= n
                    && (i + 1..i + len).all(|k| p.pin_starting_at(k).is_none())
                    && seq[..len - 1].iter().zip(&lower[i..]).all(|(w, s)| w == s)
                    && p.tokens[i + len - 1].lemma == seq[len - 1]
            });
            if let Some(seq) = multi {
                units.push(Unit {
                    start: i,
                    end: i + seq.len() - 1,
                    tag: Tag::Noun,
                    words: seq.clone(),
                    pin: None,
                });
                i += seq.len();
                continue;
            }
            let tok = &p.tokens[i];
            let mut tags = lex.tags(&tok.lemma);
            for pos in [Pos::Noun, Pos::Adj, Pos::Det, Pos::Conj, Pos::Other] {
                if lex.tags(&lower[i]).contains(pos) {
                    tags.insert(pos);
                }
            }
            let tag = if tags.contains(Pos::Det) {
                Tag::Det
            } else if tags.contains(Pos::Conj) {
                Tag::Conj
            } else if tags.contains(Pos::Noun) && tags.contains(Pos::Adj) {
                Tag::AdjOrNoun
            } else if tags.contains(Pos::Noun) {
                Tag::Noun
            } else if tags.contains(Pos::Adj) {
                Tag::Adj
            } else if !tags.is_empty() {
                Tag::Other
            } else if tok.surface.contains('-') || tok.surface.chars().all(|c| c.is_ascii_digit()) {
                Tag::Adj
            } else {
                Tag::Other
            };
            units.push(single_unit(p, i, tag));
            i += 1;
        }
        resolve_ambiguity(&mut units);
        units
    }

    fn remote_units<'p>(
        &self,
        p: &'p Prompt,
        client: &HttpClient,
    ) -> Result<Vec<Unit<'p>>, ExtractionError> {
        let unavailable = |e: BackendError| ExtractionError::RemoteParserUnavailable(e.to_string());
        let parsed: ParseResponse =
            client.post("/v1/parse", &serde_json::json!({ "text": p.text })).map_err(unavailable)?;
        if parsed.pos.len() != p.tokens.len() {
            return Err(ExtractionError::RemoteParserUnavailable(format!(
                "parser returned {} tags for {} tokens",
                parsed.pos.len(),
                p.tokens.len()
            )));
        }
        let mut units = Vec::new();
        let mut i = 0;
        while i < p.tokens.len() {
            if let Some(pin) = p.pin_starting_at(i) {
                units.push(pinned_unit(pin));
                i = pin.end + 1;
                continue;
            }
            let tag = match parsed.pos[i].as_str() {
                "NOUN" | "PROPN" => Tag::Noun,
                "ADJ" | "NUM" => Tag::Adj,
                "DET" => Tag::Det,
                "CCONJ" | "CONJ" => Tag::Conj,
                _ => Tag::Other,
            };
            units.push(single_unit(p, i, tag));
            i += 1;
        }
        Ok(units)
    }
}

#[derive(serde::Deserialize)]
struct ParseResponse {
    pos: Vec<String>,
}

fn pinned_unit(pin: &Pin) -> Unit<'_> {
    Unit { start: pin.start, end: pin.end, tag: Tag::Noun, words: Vec::new(), pin: Some(pin) }
}

fn single_unit(p: &Prompt, i: usize, tag: Tag) -> Unit<'_> {
    Unit {
        start: i,
        end: i,
        tag,
        words: vec![p.tokens[i].surface.to_lowercase()],
        pin: None,
    }
}

fn resolve_ambiguity(units: &mut [Unit<'_>]) {
    for i in 0..units.len() {
        if units[i].tag != Tag::AdjOrNoun {
            continue;
        }
        let noun_follows = units
            .get(i + 1)
            .is_some_and(|u| u.pin.is_none() && matches!(u.tag, Tag::Noun | Tag::AdjOrNoun));
        units[i].tag = if noun_follows { Tag::Adj } else { Tag::Noun };
    }
}

fn chunk(p: &Prompt, units: Vec<Unit<'_>>) -> Vec<ObjectEntity> {
    let is_noun = |u: &Unit| u.pin.is_none() && u.tag == Tag::Noun;
    let mut out = Vec::new();
    let mut i = 0;
    while i < units.len() {
        if let Some(pin) = units[i].pin {
            out.push(ObjectEntity {
                phrase: p.span_text(pin.start, pin.end),
                head_lemma: pin.head.clone(),
                concept: pin.concept.clone(),
                span: (pin.start, pin.end),
                status: ObjectStatus::Unknown,
            });
            i += 1;
            continue;
        }
        if !matches!(units[i].tag, Tag::Adj | Tag::Noun) {
            i += 1;
            continue;
        }
        let mut j = i;
        while j < units.len() && units[j].pin.is_none() && units[j].tag == Tag::Adj {
            j += 1;
        }
        let mut k = j;
        while k < units.len() && is_noun(&units[k]) {
            k += 1;
        }
        if k == j {
            i = j.max(i + 1);
            continue;
        }
        let start = units[i].start;
        let end = units[k - 1].end;
        let head_lemma = p.tokens[end].lemma.clone();
        let mut words: Vec<String> = units[j..k].iter().flat_map(|u| u.words.clone()).collect();
        if let Some(last) = words.last_mut() {
            *last = head_lemma.clone();
        }
        out.push(ObjectEntity {
            phrase: p.span_text(start, end),
            head_lemma,
            concept: words.join(" "),
            span: (start, end),
            status: ObjectStatus::Unknown,
        });
        i = k;
    }
    out
}

/// Extract with a one-off extractor built from `cfg`.
pub fn extract_objects(
    p: &Prompt,
    cfg: &ExtractionConfig,
) -> Result<Vec<ObjectEntity>, ExtractionError> {
    Extractor::new(cfg)?.extract(p)
}

/// Token indices whose attention is averaged for `e`: every span token except
/// determiners and conjunctions.
pub fn head_token_indices(
    e: &ObjectEntity,
    p: &Prompt,
    lexicon: &Lexicon,
) -> Result<Vec<usize>, ExtractionError> {
    let (start, end) = e.span;
    if start > end || end >= p.tokens.len() {
        return Err(ExtractionError::SpanOutOfRange { start, end, len: p.tokens.len() });
    }
    let idx: Vec<usize> = (start..=end)
        .filter(|&i| {
            let tags = lexicon.tags(&p.tokens[i].lemma);
            !(tags.contains(Pos::Det) || tags.contains(Pos::Conj))
        })
        .collect();
    Ok(if idx.is_empty() { (start..=end).collect() } else { idx })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex() -> Extractor {
        Extractor::builtin(Arc::new(Lexicon::bundled()))
    }

    fn heads(text: &str) -> Vec<String> {
        let e = ex();
        let p = Prompt::new("t", text, e.lexicon());
        e.extract(&p).unwrap().into_iter().map(|o| o.head_lemma).collect()
    }

    #[test]
    fn modifier_stays_in_phrase() {
        let e = ex();
        let p = Prompt::new("t", "a two-wheeled bicycle and a donut", e.lexicon());
        let objs = e.extract(&p).unwrap();
        assert_eq!(objs.len(), 2);
        assert_eq!(objs[0].phrase, "two-wheeled bicycle");
        assert_eq!(objs[0].head_lemma, "bicycle");
        assert_eq!(objs[0].span, (1, 2));
        assert_eq!(objs[1].phrase, "donut");
        assert!(objs.iter().all(|o| o.status == ObjectStatus::Unknown));
    }

    #[test]
    fn empty_prompt_gives_nothing() {
        assert!(heads("").is_empty());
    }

    #[test]
    fn three_objects() {
        assert_eq!(heads("a red apple and a bench and a bird"), ["apple", "bench", "bird"]);
    }

    #[test]
    fn compound_and_multiword_nouns() {
        let e = ex();
        let p = Prompt::new("t", "a mountain bike near a teddy bear", e.lexicon());
        let objs = e.extract(&p).unwrap();
        assert_eq!(objs[0].concept, "mountain bike");
        assert_eq!(objs[0].head_lemma, "bike");
        assert_eq!(objs[0].span, (1, 2));
        assert_eq!(objs[1].concept, "teddy bear");
        assert_eq!(head_token_indices(&objs[0], &p, e.lexicon()).unwrap(), vec![1, 2]);
    }

    #[test]
    fn ambiguous_color_noun() {
        assert_eq!(heads("an orange backpack and an orange"), ["backpack", "orange"]);
        assert_eq!(heads("two cats and three dogs."), ["cat", "dog"]);
    }

    #[test]
    fn pins_are_atomic() {
        let e = ex();
        let mut p = Prompt::new("t", "a bicycle with chain and gears and a donut", e.lexicon());
        p.pins.push(Pin { start: 1, end: 5, concept: "bicycle".into(), head: "bicycle".into() });
        let objs = e.extract(&p).unwrap();
        assert_eq!(objs.len(), 2);
        assert_eq!(objs[0].span, (1, 5));
        assert_eq!(objs[0].phrase, "bicycle with chain and gears");
        assert_eq!(head_token_indices(&objs[0], &p, e.lexicon()).unwrap(), vec![1, 2, 3, 5]);
    }

    #[test]
    fn head_indices_reject_bad_span() {
        let e = ex();
        let p = Prompt::new("t", "a cat", e.lexicon());
        let mut o = e.extract(&p).unwrap().remove(0);
        assert_eq!(head_token_indices(&o, &p, e.lexicon()).unwrap(), vec![1]);
        o.span = (1, 7);
        assert!(matches!(
            head_token_indices(&o, &p, e.lexicon()),
            Err(ExtractionError::SpanOutOfRange { .. })
        ));
    }
}
