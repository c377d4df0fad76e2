use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use log::warn;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::vector::normalize;
use super::{retrieve, Embedder, Retrieved, VectorStore};
use crate::error::{Error, Result};

/// Instruction sent ahead of every query.
pub const SYSTEM_PROMPT: &str = "You explain predictions of road-user behavior. \
Use only the numbered context records. Name the observed categories that support the predicted \
label and mention any activated rule. Answer in two or three sentences.";

pub const DEFAULT_TOKEN_ENV: &str = "ROADKG_LLM_TOKEN";
pub const DEFAULT_MAX_IN_FLIGHT: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub system: String,
    /// In rank order.
    pub chunks: Vec<Retrieved>,
    pub query: String,
}

impl PromptBundle {
    /// Embeds `query`, retrieves the top `k` chunks and assembles the prompt.
    pub fn assemble(store: &VectorStore, embedder: &dyn Embedder, query: &str, k: usize) -> Result<Self> {
        let q = embedder.embed(&[query])?.remove(0);
        Ok(Self {
            system: SYSTEM_PROMPT.to_string(),
            chunks: retrieve(store, &q, k)?,
            query: query.to_string(),
        })
    }

    pub fn user_message(&self) -> String {
        let mut s = String::from("Context:\n");
        for c in &self.chunks {
            s.push_str(&format!("[{}] {}\n", c.id, c.text.trim()));
        }
        s.push_str("\nQuestion: ");
        s.push_str(&self.query);
        s
    }
}

pub trait LlmBackend: Send + Sync {
    fn complete(&self, bundle: &PromptBundle) -> Result<String>;
}

/// Offline backend: echoes the query and the retrieved chunk ids.
#[derive(Debug, Clone, Copy, Default)]
pub struct StubBackend;

impl LlmBackend for StubBackend {
    fn complete(&self, bundle: &PromptBundle) -> Result<String> {
        let ids: Vec<&str> = bundle.chunks.iter().map(|c| c.id.as_str()).collect();
        Ok(format!("{} [context: {}]", bundle.query, ids.join(", ")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetryPolicy {
    pub attempts: usize,
    /// Doubled after every failed attempt.
    pub initial_backoff_ms: u64,
    pub timeout_ms: u64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            attempts: 3,
            initial_backoff_ms: 500,
            timeout_ms: 60_000,
        }
    }
}

fn agent(policy: &RetryPolicy) -> ureq::Agent {
    ureq::Agent::config_builder()
        .timeout_global(Some(Duration::from_millis(policy.timeout_ms)))
        .http_status_as_error(false)
        .build()
        .into()
}

fn bearer(token_env: &str) -> Option<String> {
    match std::env::var(token_env) {
        Ok(t) if !t.is_empty() => Some(format!("Bearer {t}")),
        _ => {
            warn!("{token_env} is not set; sending the request without a token");
            None
        }
    }
}

/// POSTs `body` with retries and exponential backoff; returns the JSON reply.
fn post_json(agent: &ureq::Agent, url: &str, token_env: &str, body: &Value, policy: &RetryPolicy) -> Result<Value> {
    let attempts = policy.attempts.max(1);
    let mut backoff = Duration::from_millis(policy.initial_backoff_ms);
    let mut last = String::new();
    for attempt in 1..=attempts {
        let mut req = agent.post(url).header("Content-Type", "application/json");
        if let Some(b) = bearer(token_env) {
            req = req.header("Authorization", &b);
        }
        match req.send_json(body) {
            Ok(mut resp) if resp.status().is_success() => match resp.body_mut().read_json::<Value>() {
                Ok(v) => return Ok(v),
                Err(e) => last = format!("unreadable reply: {e}"),
            },
            Ok(resp) => last = format!("HTTP {}", resp.status()),
            Err(e) => last = e.to_string(),
        }
        if attempt < attempts {
            warn!("backend attempt {attempt} failed ({last}); retrying in {backoff:?}");
            std::thread::sleep(backoff);
            backoff *= 2;
        }
    }
    Err(Error::Backend {
        attempts,
        message: last,
    })
}

/// Chat-completions style HTTP backend.
#[derive(Debug, Clone)]
pub struct HttpBackend {
    pub endpoint: String,
    pub model: String,
    pub token_env: String,
    pub policy: RetryPolicy,
    agent: ureq::Agent,
}

impl HttpBackend {
    pub fn new(endpoint: impl Into<String>, model: impl Into<String>) -> Self {
        Self::with_policy(endpoint, model, RetryPolicy::default())
    }

    pub fn with_policy(endpoint: impl Into<String>, model: impl Into<String>, policy: RetryPolicy) -> Self {
        Self {
            endpoint: endpoint.into(),
            model: model.into(),
            token_env: DEFAULT_TOKEN_ENV.to_string(),
            agent: agent(&policy),
            policy,
        }
    }
}

impl LlmBackend for HttpBackend {
    fn complete(&self, bundle: &PromptBundle) -> Result<String> {
        let body = json!({
            "model": self.model,
            "messages": [
                {"role": "system", "content": bundle.system},
                {"role": "user", "content": bundle.user_message()},
            ],
        });
        let reply = post_json(&self.agent, &self.endpoint, &self.token_env, &body, &self.policy)?;
        reply["choices"][0]["message"]["content"]
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| Error::Backend {
                attempts: 1,
                message: "reply has no choices[0].message.content".into(),
            })
    }
}

/// Embeddings service client (`{"model", "input": [...]}` in,
/// `{"data": [{"embedding": [...]}, ...]}` out). Vectors are normalized.
#[derive(Debug, Clone)]
pub struct RemoteEmbedder {
    pub endpoint: String,
    pub model: String,
    pub token_env: String,
    pub dim: usize,
    pub policy: RetryPolicy,
    agent: ureq::Agent,
}

impl RemoteEmbedder {
    pub fn new(endpoint: impl Into<String>, model: impl Into<String>, dim: usize) -> Self {
        let policy = RetryPolicy::default();
        Self {
            endpoint: endpoint.into(),
            model: model.into(),
            token_env: DEFAULT_TOKEN_ENV.to_string(),
            dim,
            agent: agent(&policy),
            policy,
        }
    }
}

impl Embedder for RemoteEmbedder {
    fn dim(&self) -> usize {
        self.dim
    }

    fn embed(&self, texts: &[&str]) -> Result<Vec<Vec<f64>>> {
        let body = json!({"model": self.model, "input": texts});
        let reply = post_json(&self.agent, &self.endpoint, &self.token_env, &body, &self.policy)?;
        let bad = |m: &str| Error::Backend {
            attempts: 1,
            message: m.to_string(),
        };
        let data = reply["data"].as_array().ok_or_else(|| bad("reply has no data array"))?;
        if data.len() != texts.len() {
            return Err(bad("reply holds a different number of embeddings"));
        }
        data.iter()
            .map(|d| {
                let v: Vec<f64> = serde_json::from_value(d["embedding"].clone()).map_err(|e| bad(&e.to_string()))?;
                if v.len() != self.dim {
                    return Err(bad(&format!("embedding of dimension {}, expected {}", v.len(), self.dim)));
                }
                normalize(v)
            })
            .collect()
    }
}

pub fn generate(bundle: &PromptBundle, backend: &dyn LlmBackend) -> Result<String> {
    backend.complete(bundle)
}

/// Runs every bundle with at most `max_in_flight` concurrent calls; results
/// keep input order.
pub fn generate_all(bundles: &[PromptBundle], backend: &dyn LlmBackend, max_in_flight: usize) -> Vec<Result<String>> {
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<Result<String>>>> = bundles.iter().map(|_| Mutex::new(None)).collect();
    let workers = max_in_flight.clamp(1, bundles.len().max(1));
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(b) = bundles.get(i) else { break };
                let r = backend.complete(b);
                *slots[i].lock().expect("slot lock") = Some(r);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| m.into_inner().expect("slot lock").expect("every bundle ran"))
        .collect()
}
