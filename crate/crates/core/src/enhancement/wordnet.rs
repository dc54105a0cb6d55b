//! Reader for the WordNet noun database (WNDB `index.noun` / `data.noun`).

use std::collections::HashMap;
use std::path::Path;

use thiserror::Error;

const BUNDLED_INDEX: &str = include_str!("../../data/wordnet/index.noun");
const BUNDLED_DATA: &str = include_str!("../../data/wordnet/data.noun");

pub const WORDNET_DIR_ENV: &str = "PATCHER_WORDNET_DIR";

#[derive(Debug, Error)]
pub enum WordNetError {
    #[error("cannot read WordNet file {path}: {source}")]
    Unreadable {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{file} line {line}: {reason}")]
    Malformed { file: &'static str, line: usize, reason: String },
    #[error("no noun synset for {0:?}")]
    LemmaNotFound(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Synset {
    pub offset: u64,
    /// Member words as written in the database (underscores for spaces).
    pub words: Vec<String>,
    pub hyponyms: Vec<u64>,
    pub gloss: String,
}

impl Synset {
    pub fn id(&self) -> String {
        format!("{:08}-n", self.offset)
    }

    /// First member word with underscores turned into spaces.
    pub fn lemma(&self) -> String {
        self.words.first().map(|w| w.replace('_', " ")).unwrap_or_default()
    }
}

#[derive(Debug, Clone, Default)]
pub struct WordNet {
    index: HashMap<String, Vec<u64>>,
    synsets: HashMap<u64, Synset>,
}

/// Database key for a lemma: lowercase, words joined by underscores.
pub fn lemma_key(lemma: &str) -> String {
    lemma.trim().to_lowercase().split_whitespace().collect::<Vec<_>>().join("_")
}

impl WordNet {
    pub fn open(dir: &Path) -> Result<Self, WordNetError> {
        let read = |name: &str| {
            let path = dir.join(name);
            std::fs::read_to_string(&path).map_err(|source| WordNetError::Unreadable {
                path: path.display().to_string(),
                source,
            })
        };
        Self::parse(&read("index.noun")?, &read("data.noun")?)
    }

    /// The miniature database shipped with the crate.
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_INDEX, BUNDLED_DATA).expect("bundled WordNet fixture is well-formed")
    }

    pub fn parse(index: &str, data: &str) -> Result<Self, WordNetError> {
        let mut wn = WordNet::default();
        for (n, line) in data.lines().enumerate() {
            if line.starts_with("  ") || line.trim().is_empty() {
                continue;
            }
            let synset = parse_data_line(line).map_err(|reason| WordNetError::Malformed {
                file: "data.noun",
                line: n + 1,
                reason,
            })?;
            wn.synsets.insert(synset.offset, synset);
        }
        for (n, line) in index.lines().enumerate() {
            if line.starts_with("  ") || line.trim().is_empty() {
                continue;
            }
            let (lemma, offsets) = parse_index_line(line).map_err(|reason| WordNetError::Malformed {
                file: "index.noun",
                line: n + 1,
                reason,
            })?;
            wn.index.insert(lemma, offsets);
        }
        Ok(wn)
    }

    /// Synset offsets of `lemma`, most frequent sense first.
    pub fn noun_senses(&self, lemma: &str) -> &[u64] {
        self.index.get(&lemma_key(lemma)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn synset(&self, offset: u64) -> Option<&Synset> {
        self.synsets.get(&offset)
    }

    pub fn synset_count(&self) -> usize {
        self.synsets.len()
    }
}

fn parse_data_line(line: &str) -> Result<Synset, String> {
    let (fields, gloss) = line.split_once('|').unwrap_or((line, ""));
    let f: Vec<&str> = fields.split_whitespace().collect();
    let at = |i: usize| f.get(i).copied().ok_or_else(|| format!("truncated at field {i}"));
    let offset: u64 = at(0)?.parse().map_err(|_| "bad synset offset".to_string())?;
    let w_cnt = usize::from_str_radix(at(3)?, 16).map_err(|_| "bad word count".to_string())?;
    let mut words = Vec::with_capacity(w_cnt);
    for k in 0..w_cnt {
        words.push(at(4 + 2 * k)?.to_string());
    }
    let p_at = 4 + 2 * w_cnt;
    let p_cnt: usize = at(p_at)?.parse().map_err(|_| "bad pointer count".to_string())?;
    let mut hyponyms = Vec::new();
    for k in 0..p_cnt {
        let base = p_at + 1 + 4 * k;
        let symbol = at(base)?;
        let target: u64 = at(base + 1)?.parse().map_err(|_| "bad pointer offset".to_string())?;
        if symbol == "~" && at(base + 2)? == "n" {
            hyponyms.push(target);
        }
    }
    Ok(Synset { offset, words, hyponyms, gloss: gloss.trim().to_string() })
}

fn parse_index_line(line: &str) -> Result<(String, Vec<u64>), String> {
    let f: Vec<&str> = line.split_whitespace().collect();
    if f.len() < 6 {
        return Err("truncated index entry".into());
    }
    let synset_cnt: usize = f[2].parse().map_err(|_| "bad synset_cnt".to_string())?;
    let p_cnt: usize = f[3].parse().map_err(|_| "bad p_cnt".to_string())?;
    let first = 4 + p_cnt + 2;
    let offsets = f
        .get(first..first + synset_cnt)
        .ok_or("missing synset offsets")?
        .iter()
        .map(|s| s.parse::<u64>().map_err(|_| format!("bad offset {s:?}")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((f[0].to_lowercase(), offsets))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_fixture_resolves_bicycle() {
        let wn = WordNet::bundled();
        assert!(wn.synset_count() >= 200);
        let senses = wn.noun_senses("bicycle");
        assert_eq!(senses.len(), 1);
        let s = wn.synset(senses[0]).unwrap();
        assert_eq!(s.lemma(), "bicycle");
        let kids: Vec<String> = s.hyponyms.iter().map(|o| wn.synset(*o).unwrap().lemma()).collect();
        assert!(kids.contains(&"mountain bike".to_string()), "{kids:?}");
    }

    #[test]
    fn multiword_and_case_insensitive_lookup() {
        let wn = WordNet::bundled();
        assert_eq!(wn.noun_senses("Mountain Bike"), wn.noun_senses("mountain_bike"));
        assert!(!wn.noun_senses("mountain bike").is_empty());
        assert!(wn.noun_senses("flibbertigibbet").is_empty());
    }

    #[test]
    fn data_line_pointers() {
        let line = "00000001 05 n 02 big_cat 0 cat 1 003 @ 00000009 n 0000 ~ 00000002 n 0000 ~i 00000003 n 0000 | a gloss  ";
        let s = parse_data_line(line).unwrap();
        assert_eq!(s.words, ["big_cat", "cat"]);
        assert_eq!(s.hyponyms, [2]);
        assert_eq!(s.gloss, "a gloss");
        assert_eq!(s.id(), "00000001-n");
    }

    #[test]
    fn malformed_data_reports_line() {
        let err = WordNet::parse("", "  header\n0000x 05 n 01 a 0 000 | g\n").unwrap_err();
        assert!(matches!(err, WordNetError::Malformed { file: "data.noun", line: 2, .. }));
    }
}
