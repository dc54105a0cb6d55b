//! HTTP + JSON client for the model server (protocol v1).
//!
//! ```text
//! POST /v1/generate   {"prompt", "seed"}            -> {"image_id", "tokens", "attention"}
//! POST /v1/similarity {"image_id", "text"}          -> {"score"}
//! POST /v1/suggest    {"template", "object", "prompt"} -> {"items"}
//! POST /v1/embed      {"text"}                      -> {"vector"}
//! GET  /v1/health                                   -> {"status": "ok", "model"}
//! ```
//!
//! Non-200 responses carry `{"error": string}`.

use std::sync::{Arc, OnceLock};
use std::thread;
use std::time::Duration;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{BackendError, Embedder, Generator, Scorer, SuggestRequest, Suggester};
use crate::domain::{GenerationRecord, Prompt, TokenAttentionPair};
use crate::enhancement::templates::split_semicolon_list;

pub const ENDPOINT_ENV: &str = "PATCHER_ENDPOINT";

#[derive(Debug, Clone)]
pub struct RemoteConfig {
    pub endpoint: String,
    pub timeout: Duration,
    /// Generation runs diffusion inference and gets a longer deadline.
    pub generate_timeout: Duration,
    pub max_attempts: u32,
    pub backoff: Duration,
    pub pool_size: usize,
}

impl RemoteConfig {
    pub fn new(endpoint: impl Into<String>) -> Self {
        RemoteConfig {
            endpoint: endpoint.into().trim_end_matches('/').to_string(),
            timeout: Duration::from_secs(30),
            generate_timeout: Duration::from_secs(300),
            max_attempts: 3,
            backoff: Duration::from_millis(250),
            pool_size: 8,
        }
    }

    /// `PATCHER_ENDPOINT` wins over the configured endpoint.
    pub fn resolve(configured: Option<&str>) -> Option<Self> {
        std::env::var(ENDPOINT_ENV)
            .ok()
            .filter(|s| !s.trim().is_empty())
            .or_else(|| configured.map(str::to_string))
            .map(Self::new)
    }
}

#[derive(Deserialize)]
struct ErrorBody {
    error: String,
}

/// Pooled JSON client with bounded exponential-backoff retries.
#[derive(Clone)]
pub struct HttpClient {
    cfg: RemoteConfig,
    agent: ureq::Agent,
}

impl HttpClient {
    pub fn new(cfg: RemoteConfig) -> Self {
        let agent = ureq::AgentBuilder::new()
            .max_idle_connections(cfg.pool_size)
            .max_idle_connections_per_host(cfg.pool_size)
            .timeout_connect(cfg.timeout.min(Duration::from_secs(10)))
            .build();
        HttpClient { cfg, agent }
    }

    pub fn config(&self) -> &RemoteConfig {
        &self.cfg
    }

    pub fn post<B: Serialize, R: DeserializeOwned>(&self, path: &str, body: &B) -> Result<R, BackendError> {
        self.post_with_timeout(path, body, self.cfg.timeout)
    }

    pub fn post_with_timeout<B: Serialize, R: DeserializeOwned>(
        &self,
        path: &str,
        body: &B,
        timeout: Duration,
    ) -> Result<R, BackendError> {
        let url = format!("{}{}", self.cfg.endpoint, path);
        let body = serde_json::to_value(body).map_err(|e| BackendError::ProtocolViolation(e.to_string()))?;
        self.with_retries(&url, || self.agent.post(&url).timeout(timeout).send_json(body.clone()).map_err(Box::new))
    }

    pub fn get<R: DeserializeOwned>(&self, path: &str) -> Result<R, BackendError> {
        let url = format!("{}{}", self.cfg.endpoint, path);
        self.with_retries(&url, || self.agent.get(&url).timeout(self.cfg.timeout).call().map_err(Box::new))
    }

    fn with_retries<R: DeserializeOwned>(
        &self,
        url: &str,
        send: impl Fn() -> Result<ureq::Response, Box<ureq::Error>>,
    ) -> Result<R, BackendError> {
        let attempts = self.cfg.max_attempts.max(1);
        let mut last = None;
        for attempt in 1..=attempts {
            match send().map_err(|e| *e) {
                Ok(resp) => {
                    return resp.into_json::<R>().map_err(|e| {
                        BackendError::ProtocolViolation(format!("{url}: undecodable response: {e}"))
                    });
                }
                Err(ureq::Error::Status(status, resp)) => {
                    let message = match resp.into_string() {
                        Ok(text) => serde_json::from_str::<ErrorBody>(&text).map(|b| b.error).unwrap_or(text),
                        Err(e) => e.to_string(),
                    };
                    let err = BackendError::Server { status, message };
                    if !(status >= 500 || status == 429) {
                        return Err(err);
                    }
                    last = Some(err);
                }
                Err(ureq::Error::Transport(t)) => {
                    last = Some(BackendError::Timeout {
                        endpoint: url.to_string(),
                        attempts,
                        detail: t.to_string(),
                    });
                }
            }
            if attempt < attempts {
                let delay = self.cfg.backoff * 2u32.pow(attempt - 1);
                log::debug!("{url}: attempt {attempt} failed, retrying in {delay:?}");
                thread::sleep(delay);
            }
        }
        Err(last.expect("at least one attempt"))
    }
}

#[derive(Serialize)]
struct GenerateRequest<'a> {
    prompt: &'a str,
    seed: u64,
}

#[derive(Deserialize)]
struct GenerateResponse {
    image_id: String,
    tokens: Vec<String>,
    attention: Vec<f64>,
}

#[derive(Serialize)]
struct SimilarityRequest<'a> {
    image_id: &'a str,
    text: &'a str,
}

#[derive(Deserialize)]
struct SimilarityResponse {
    score: f64,
}

#[derive(Serialize)]
struct SuggestBody<'a> {
    template: super::TemplateKind,
    object: &'a str,
    prompt: Option<&'a str>,
}

#[derive(Deserialize)]
struct SuggestResponse {
    items: Vec<String>,
}

#[derive(Serialize)]
struct EmbedRequest<'a> {
    text: &'a str,
}

#[derive(Deserialize)]
struct EmbedResponse {
    vector: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Health {
    pub status: String,
    pub model: String,
}

/// All four capabilities served by one model server.
#[derive(Clone)]
pub struct RemoteBackend {
    client: HttpClient,
    model: String,
    dim: Arc<OnceLock<usize>>,
}

impl RemoteBackend {
    /// Connect and run the health check.
    pub fn connect(cfg: RemoteConfig) -> Result<Self, BackendError> {
        let client = HttpClient::new(cfg);
        let health: Health = client.get("/v1/health")?;
        if health.status != "ok" {
            return Err(BackendError::ProtocolViolation(format!(
                "health status {:?}",
                health.status
            )));
        }
        Ok(RemoteBackend { client, model: health.model, dim: Arc::new(OnceLock::new()) })
    }

    pub fn model(&self) -> &str {
        &self.model
    }

    pub fn client(&self) -> &HttpClient {
        &self.client
    }
}

impl Generator for RemoteBackend {
    fn generate(&self, prompt: &Prompt, seed: u64) -> Result<GenerationRecord, BackendError> {
        let resp: GenerateResponse = self.client.post_with_timeout(
            "/v1/generate",
            &GenerateRequest { prompt: &prompt.text, seed },
            self.client.cfg.generate_timeout,
        )?;
        if resp.attention.len() != resp.tokens.len() {
            return Err(BackendError::ProtocolViolation(format!(
                "{} attention scores for {} tokens",
                resp.attention.len(),
                resp.tokens.len()
            )));
        }
        if resp.tokens.len() != prompt.tokens.len() {
            return Err(BackendError::ProtocolViolation(format!(
                "server tokenized {} words, prompt has {}",
                resp.tokens.len(),
                prompt.tokens.len()
            )));
        }
        if let Some(bad) = resp.attention.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
            return Err(BackendError::ProtocolViolation(format!("attention score {bad} out of range")));
        }
        if resp.image_id.is_empty() {
            return Err(BackendError::ProtocolViolation("empty image_id".into()));
        }
        Ok(GenerationRecord {
            prompt_id: prompt.id.clone(),
            image_ref: resp.image_id,
            seed,
            taps: resp
                .attention
                .into_iter()
                .enumerate()
                .map(|(token_index, score)| TokenAttentionPair { token_index, score })
                .collect(),
        })
    }
}

impl Scorer for RemoteBackend {
    fn similarity(&self, image_ref: &str, text: &str) -> Result<f64, BackendError> {
        let resp: SimilarityResponse =
            self.client.post("/v1/similarity", &SimilarityRequest { image_id: image_ref, text })?;
        if !(0.0..=1.0).contains(&resp.score) {
            return Err(BackendError::ProtocolViolation(format!(
                "similarity {} outside [0, 1]",
                resp.score
            )));
        }
        Ok(resp.score)
    }
}

impl Suggester for RemoteBackend {
    fn suggest(&self, req: &SuggestRequest<'_>) -> Result<Vec<String>, BackendError> {
        let resp: SuggestResponse = self.client.post(
            "/v1/suggest",
            &SuggestBody { template: req.template, object: req.object, prompt: req.prompt },
        )?;
        Ok(resp.items.iter().flat_map(|s| split_semicolon_list(s)).collect())
    }
}

impl Embedder for RemoteBackend {
    fn embed(&self, text: &str) -> Result<Vec<f64>, BackendError> {
        let resp: EmbedResponse = self.client.post("/v1/embed", &EmbedRequest { text })?;
        if resp.vector.is_empty() || resp.vector.iter().any(|x| !x.is_finite()) {
            return Err(BackendError::ProtocolViolation("empty or non-finite embedding".into()));
        }
        let dim = *self.dim.get_or_init(|| resp.vector.len());
        if dim != resp.vector.len() {
            return Err(BackendError::ProtocolViolation(format!(
                "embedding dimension changed from {dim} to {}",
                resp.vector.len()
            )));
        }
        Ok(resp.vector)
    }
}
