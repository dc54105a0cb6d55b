//! Prompt datasets, evaluation runs and reports.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::backends::BackendError;
use crate::extraction::ExtractionError;

pub mod annotations;
pub mod compose;
pub mod eval;
pub mod io;
pub mod report;
pub mod tbp;

pub use annotations::{import_annotations, AnnotationJudge, AnnotationRecord};
pub use compose::{coco80, compose_multiobject, ComposeResult};
pub use eval::{evaluate, EvalReport, EvalRow, Judge, Method, RecordEval, SimJudge};
pub use io::{load_dataset, read_dataset, save_dataset, write_dataset};
pub use report::{emit_report, write_report, ReportFormat};
pub use tbp::{generate_tbp, TbpVocabulary};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{what} must have {expected} entries, got {got}")]
    WrongVocabularySize { what: &'static str, expected: usize, got: usize },
    #[error("duplicate vocabulary entry {0:?}")]
    DuplicateVocabulary(String),
    #[error("composition needs 2 or 3 objects, got {0}")]
    BadArity(usize),
    #[error("line {line}: {reason}")]
    MalformedRecord { line: usize, reason: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error(transparent)]
    Extraction(#[from] ExtractionError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Source {
    #[serde(rename = "TBP")]
    Tbp,
    #[serde(rename = "TwOP")]
    TwOp,
    #[serde(rename = "ThreeOP")]
    ThreeOp,
    #[serde(rename = "custom")]
    Custom,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Tbp => "TBP",
            Source::TwOp => "TwOP",
            Source::ThreeOp => "ThreeOP",
            Source::Custom => "custom",
        })
    }
}

impl FromStr for Source {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "TBP" => Ok(Source::Tbp),
            "TwOP" => Ok(Source::TwOp),
            "ThreeOP" => Ok(Source::ThreeOp),
            "custom" => Ok(Source::Custom),
            other => Err(format!("unknown source {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptRecord {
    pub id: String,
    pub prompt: String,
    /// Object names the image must show.
    pub objects: Vec<String>,
    pub num_objects: usize,
    pub source: Source,
}

impl PromptRecord {
    pub fn new(id: impl Into<String>, prompt: impl Into<String>, objects: Vec<String>, source: Source) -> Self {
        let num_objects = objects.len();
        PromptRecord { id: id.into(), prompt: prompt.into(), objects, num_objects, source }
    }

    pub fn check(&self) -> Result<(), String> {
        if self.objects.is_empty() {
            return Err("objects is empty".into());
        }
        if !(1..=3).contains(&self.num_objects) {
            return Err(format!("num_objects {} outside 1..=3", self.num_objects));
        }
        if self.num_objects != self.objects.len() {
            return Err(format!(
                "num_objects is {} but {} objects are listed",
                self.num_objects,
                self.objects.len()
            ));
        }
        Ok(())
    }
}
