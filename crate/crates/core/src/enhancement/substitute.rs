//! Splicing a replacement phrase into a prompt in place of one object.

use crate::domain::{ObjectEntity, Pin, Prompt};
use crate::lexicon::Lexicon;

use super::EnhancementError;

/// "an" before a vowel sound, "a" otherwise.
pub fn indefinite_article(next_word: &str) -> &'static str {
    let w = next_word.to_lowercase();
    const CONSONANT_SOUND: [&str; 8] = ["uni", "use", "usu", "uti", "eu", "one", "once", "ewe"];
    const SILENT_H: [&str; 4] = ["hour", "honest", "honor", "heir"];
    if SILENT_H.iter().any(|p| w.starts_with(p)) {
        return "an";
    }
    if CONSONANT_SOUND.iter().any(|p| w.starts_with(p)) {
        return "a";
    }
    match w.chars().next() {
        Some('a' | 'e' | 'i' | 'o' | 'u') => "an",
        _ => "a",
    }
}

fn match_case(article: &str, original: &str) -> String {
    if original.chars().next().is_some_and(char::is_uppercase) {
        let mut c = article.chars();
        let first = c.next().map(|f| f.to_uppercase().collect::<String>()).unwrap_or_default();
        first + c.as_str()
    } else {
        article.to_string()
    }
}

/// Normalised word sequence of an object description: lowercase words with
/// the final word lemmatised.
pub fn concept_words(text: &str, lexicon: &Lexicon) -> Vec<String> {
    let p = Prompt::new("", text.replace('_', " "), lexicon);
    let n = p.tokens.len();
    p.tokens
        .iter()
        .enumerate()
        .map(|(i, t)| if i + 1 == n { t.lemma.clone() } else { t.surface.to_lowercase() })
        .collect()
}

/// Position of `needle` inside `hay` as a contiguous run, comparing the last
/// needle word against lemmas.
fn find_run(hay: &Prompt, range: std::ops::Range<usize>, needle: &[String]) -> Option<usize> {
    let len = needle.len();
    if len == 0 || range.len() < len {
        return None;
    }
    (range.start..=range.end - len).find(|&s| {
        (0..len).all(|k| {
            let t = &hay.tokens[s + k];
            if k + 1 == len {
                t.lemma == needle[k] || t.surface.to_lowercase() == needle[k]
            } else {
                t.surface.to_lowercase() == needle[k]
            }
        })
    })
}

/// Replace `target`'s span with `replacement`. The object keeps its concept
/// when the replacement mentions it, otherwise the replacement names the new
/// concept (hyponym substitution).
pub fn substitute(
    p: &Prompt,
    target: &ObjectEntity,
    replacement: &str,
    lexicon: &Lexicon,
) -> Result<Prompt, EnhancementError> {
    let words = concept_words(&target.concept, lexicon);
    let probe = Prompt::new("", replacement, lexicon);
    let concept = if find_run(&probe, 0..probe.tokens.len(), &words).is_some() {
        target.concept.clone()
    } else {
        concept_words(replacement, lexicon).join(" ")
    };
    substitute_concept(p, target, replacement, &concept, lexicon)
}

/// Replace `target`'s span with `replacement`, recording `concept` as the
/// object named by the new span.
pub fn substitute_concept(
    p: &Prompt,
    target: &ObjectEntity,
    replacement: &str,
    concept: &str,
    lexicon: &Lexicon,
) -> Result<Prompt, EnhancementError> {
    let replacement = replacement.trim();
    if replacement.is_empty() {
        return Err(EnhancementError::EmptyReplacement);
    }
    let (start, end) = target.span;
    if start > end || end >= p.tokens.len() || p.span_text(start, end) != target.phrase {
        return Err(EnhancementError::SpanMismatch {
            phrase: target.phrase.clone(),
            span: target.span,
        });
    }
    let offsets = p.offsets();
    let (bs, be) = (offsets[start].0, offsets[end].1);
    if &p.text[bs..be] == replacement {
        return Ok(p.clone());
    }
    let mut text = format!("{}{}{}", &p.text[..bs], replacement, &p.text[be..]);

    let rep_len = Prompt::new("", replacement, lexicon).tokens.len();
    if start > 0 {
        let prev = &p.tokens[start - 1].surface;
        let lower = prev.to_lowercase();
        if lower == "a" || lower == "an" {
            let first_word = replacement.split_whitespace().next().unwrap_or(replacement);
            let fixed = match_case(indefinite_article(first_word), prev);
            let (as_, ae) = offsets[start - 1];
            text = format!("{}{}{}", &text[..as_], fixed, &text[ae..]);
        }
    }

    let mut out = Prompt::new(p.id.clone(), text, lexicon);
    if rep_len == 0 || out.tokens.len() + (end - start + 1) != p.tokens.len() + rep_len {
        return Err(EnhancementError::SpanMismatch {
            phrase: replacement.to_string(),
            span: target.span,
        });
    }
    let new_end = start + rep_len - 1;
    let shift = |i: usize| i + rep_len - (end - start + 1);
    let mut pins: Vec<Pin> = p
        .pins
        .iter()
        .filter(|pin| pin.end < start || pin.start > end)
        .map(|pin| {
            if pin.start > end {
                Pin { start: shift(pin.start), end: shift(pin.end), ..pin.clone() }
            } else {
                pin.clone()
            }
        })
        .collect();
    let cw = concept_words(concept, lexicon);
    let head = match find_run(&out, start..new_end + 1, &cw) {
        Some(s) => out.tokens[s + cw.len() - 1].lemma.clone(),
        None => out.tokens[new_end].lemma.clone(),
    };
    pins.push(Pin { start, end: new_end, concept: cw.join(" "), head });
    pins.sort_by_key(|pin| pin.start);
    out.pins = pins;
    Ok(out)
}

/// Word range of `concept` inside the target's span, if it occurs there.
pub fn concept_range_in_span(p: &Prompt, target: &ObjectEntity, lexicon: &Lexicon) -> Option<(usize, usize)> {
    let cw = concept_words(&target.concept, lexicon);
    let (start, end) = target.span;
    find_run(p, start..end + 1, &cw).map(|s| (s, s + cw.len() - 1))
}
