//! Capability interfaces for the model stack and their implementations.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{GenerationRecord, Prompt};

pub mod remote;
pub mod sim;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BackendError {
    #[error("{endpoint}: no response after {attempts} attempts ({detail})")]
    Timeout { endpoint: String, attempts: u32, detail: String },
    #[error("protocol violation: {0}")]
    ProtocolViolation(String),
    #[error("server error {status}: {message}")]
    Server { status: u16, message: String },
    #[error("unknown image reference {0:?}")]
    UnknownImageRef(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemplateKind {
    Shape,
    Color,
    LlmRepair,
    ComposeMultiobject,
}

impl fmt::Display for TemplateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TemplateKind::Shape => "shape",
            TemplateKind::Color => "color",
            TemplateKind::LlmRepair => "llm_repair",
            TemplateKind::ComposeMultiobject => "compose_multiobject",
        })
    }
}

/// One suggestion request. `prompt` carries the fully rendered LLM query when
/// the caller has one.
#[derive(Debug, Clone, PartialEq)]
pub struct SuggestRequest<'a> {
    pub template: TemplateKind,
    pub object: &'a str,
    pub prompt: Option<&'a str>,
}

pub trait Generator: Send + Sync {
    fn generate(&self, prompt: &Prompt, seed: u64) -> Result<GenerationRecord, BackendError>;

    /// Whether calls may overlap; serial-only backends return false.
    fn concurrent(&self) -> bool {
        true
    }
}

pub trait Scorer: Send + Sync {
    /// Image-text similarity in [0, 1].
    fn similarity(&self, image_ref: &str, text: &str) -> Result<f64, BackendError>;

    fn concurrent(&self) -> bool {
        true
    }
}

pub trait Suggester: Send + Sync {
    fn suggest(&self, req: &SuggestRequest<'_>) -> Result<Vec<String>, BackendError>;

    fn concurrent(&self) -> bool {
        true
    }
}

pub trait Embedder: Send + Sync {
    fn embed(&self, text: &str) -> Result<Vec<f64>, BackendError>;

    fn concurrent(&self) -> bool {
        true
    }
}

/// The four capabilities one pipeline run needs.
#[derive(Clone, Copy)]
pub struct Backends<'a> {
    pub generator: &'a dyn Generator,
    pub scorer: &'a dyn Scorer,
    pub suggester: &'a dyn Suggester,
    pub embedder: &'a dyn Embedder,
}

impl<'a> Backends<'a> {
    /// Use one value for every capability.
    pub fn uniform<B: Generator + Scorer + Suggester + Embedder>(b: &'a B) -> Self {
        Backends { generator: b, scorer: b, suggester: b, embedder: b }
    }

    pub fn all_concurrent(&self) -> bool {
        self.generator.concurrent()
            && self.scorer.concurrent()
            && self.suggester.concurrent()
            && self.embedder.concurrent()
    }
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}
