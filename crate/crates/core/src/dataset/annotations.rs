//! Human annotations: a prompt's image counts as correct when a strict
//! majority of its annotators said so.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub prompt_id: String,
    pub annotator: String,
    pub verdict: u8,
}

#[derive(Debug, Error)]
pub enum AnnotationError {
    #[error("cannot read annotations: {0}")]
    Csv(#[from] csv::Error),
    #[error("record {row}: verdict must be 0 or 1, got {verdict}")]
    BadVerdict { row: usize, verdict: u8 },
    #[error("record {row}: annotator {annotator:?} already judged {prompt_id:?}")]
    Duplicate { row: usize, prompt_id: String, annotator: String },
    #[error("no annotators for prompt {0:?}")]
    NoAnnotators(String),
}

#[derive(Debug, Clone, Default)]
pub struct AnnotationJudge {
    votes: BTreeMap<String, (usize, usize)>,
}

impl AnnotationJudge {
    pub fn from_records(records: &[AnnotationRecord]) -> Result<Self, AnnotationError> {
        let mut seen = HashSet::new();
        let mut votes: BTreeMap<String, (usize, usize)> = BTreeMap::new();
        for (row, r) in records.iter().enumerate() {
            if r.verdict > 1 {
                return Err(AnnotationError::BadVerdict { row: row + 1, verdict: r.verdict });
            }
            if !seen.insert((r.prompt_id.clone(), r.annotator.clone())) {
                return Err(AnnotationError::Duplicate {
                    row: row + 1,
                    prompt_id: r.prompt_id.clone(),
                    annotator: r.annotator.clone(),
                });
            }
            let v = votes.entry(r.prompt_id.clone()).or_default();
            v.0 += usize::from(r.verdict);
            v.1 += 1;
        }
        Ok(AnnotationJudge { votes })
    }

    pub fn from_reader<R: std::io::Read>(reader: R) -> Result<Self, AnnotationError> {
        let mut rdr = csv::Reader::from_reader(reader);
        let records = rdr.deserialize().collect::<Result<Vec<AnnotationRecord>, _>>()?;
        Self::from_records(&records)
    }

    /// Majority verdict; ties count as incorrect.
    pub fn verdict(&self, prompt_id: &str) -> Result<bool, AnnotationError> {
        match self.votes.get(prompt_id) {
            Some(&(yes, total)) if total > 0 => Ok(2 * yes > total),
            _ => Err(AnnotationError::NoAnnotators(prompt_id.to_string())),
        }
    }

    pub fn covers(&self, prompt_id: &str) -> bool {
        self.votes.contains_key(prompt_id)
    }
}

pub fn import_annotations(path: &Path) -> Result<AnnotationJudge, AnnotationError> {
    let file = std::fs::File::open(path).map_err(csv::Error::from)?;
    AnnotationJudge::from_reader(file)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn judge(csv: &str) -> AnnotationJudge {
        AnnotationJudge::from_reader(csv.as_bytes()).unwrap()
    }

    #[test]
    fn majority_rule() {
        let j = judge("prompt_id,annotator,verdict\np1,a,1\np1,b,1\np1,c,0\np2,a,1\np2,b,0\np3,a,0\np3,b,0\np3,c,0\n");
        assert!(j.verdict("p1").unwrap());
        assert!(!j.verdict("p2").unwrap());
        assert!(!j.verdict("p3").unwrap());
        assert!(matches!(j.verdict("p4"), Err(AnnotationError::NoAnnotators(_))));
    }

    #[test]
    fn rejects_duplicates_and_bad_verdicts() {
        let dup = AnnotationJudge::from_reader("prompt_id,annotator,verdict\np1,a,1\np1,a,0\n".as_bytes());
        assert!(matches!(dup, Err(AnnotationError::Duplicate { row: 2, .. })));
        let bad = AnnotationJudge::from_reader("prompt_id,annotator,verdict\np1,a,2\n".as_bytes());
        assert!(matches!(bad, Err(AnnotationError::BadVerdict { .. })));
    }
}
