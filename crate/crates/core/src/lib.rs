//! Prompt repair for text-to-image models that drop objects from the image.
//!
//! The pipeline generates an image for a prompt, scores every extracted object
//! against that image, and rewrites the descriptions of objects that went
//! missing. Two rewriting strategies run side by side: explicit modifiers
//! (color and shape phrases) and implicit substitution by a more specific
//! hyponym, with the hyponym search steered by cross-attention differences.
//!
//! Model access goes through the capability traits in [`backends`]; the
//! deterministic [`backends::sim::SimWorld`] implements all of them for
//! hermetic runs and [`backends::remote::RemoteBackend`] talks to a model
//! server over HTTP.

pub mod attention;
pub mod backends;
pub mod dataset;
pub mod detection;
pub mod domain;
pub mod enhancement;
pub mod extraction;
pub mod lexicon;
pub mod orchestrator;

pub use domain::{
    CandidateSource, FeatureCandidate, FeatureKind, GenerationRecord, ObjectEntity, ObjectStatus,
    Pin, Prompt, RepairOutcome, RepairStatus, Token, TokenAttentionPair, TrailEntry,
};
