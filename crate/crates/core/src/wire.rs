//! JSON bodies of the inference-service protocol and a small blocking client.
//!
//! ```text
//! POST /v1/embed     {"model", "modality": "text"|"image", "inputs": [..]} -> {"dim", "vectors": [[..], ..]}
//! POST /v1/generate  {"prompt"}                                           -> {"text"}
//! POST /v1/translate {"text", "source", "target"}                         -> {"text"}
//! ```
//!
//! Image inputs are base64 (standard alphabet, padded) file bytes. Any
//! non-200 status is retryable.

use std::thread;
use std::time::Duration;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::providers::Modality;

pub const EMBED_PATH: &str = "/v1/embed";
pub const GENERATE_PATH: &str = "/v1/generate";
pub const TRANSLATE_PATH: &str = "/v1/translate";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbedRequest {
    pub model: String,
    pub modality: Modality,
    pub inputs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbedResponse {
    pub dim: usize,
    pub vectors: Vec<Vec<f32>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerateRequest {
    pub prompt: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslateRequest {
    pub text: String,
    pub source: String,
    pub target: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextResponse {
    pub text: String,
}

#[derive(Debug, Clone)]
pub struct HttpClient {
    base_url: String,
    agent: ureq::Agent,
    max_attempts: u32,
    backoff: Duration,
}

impl HttpClient {
    pub fn new(base_url: impl Into<String>) -> Self {
        let config = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_connect(Some(Duration::from_secs(5)))
            .timeout_global(Some(Duration::from_secs(120)))
            .build();
        HttpClient {
            base_url: base_url.into().trim_end_matches('/').to_string(),
            agent: config.into(),
            max_attempts: 3,
            backoff: Duration::from_millis(200),
        }
    }

    pub fn with_retries(mut self, max_attempts: u32, backoff: Duration) -> Self {
        self.max_attempts = max_attempts.max(1);
        self.backoff = backoff;
        self
    }

    pub fn base_url(&self) -> &str {
        &self.base_url
    }

    pub fn post_json<Req: Serialize, Resp: DeserializeOwned>(&self, path: &str, body: &Req) -> Result<Resp> {
        let url = format!("{}{}", self.base_url, path);
        let payload = serde_json::to_vec(body).map_err(|e| Error::Provider(e.to_string()))?;
        let mut last = String::new();
        for attempt in 1..=self.max_attempts {
            match self
                .agent
                .post(&url)
                .header("content-type", "application/json")
                .send(&payload[..])
            {
                Ok(mut resp) if resp.status().as_u16() == 200 => {
                    let text = resp
                        .body_mut()
                        .with_config()
                        .limit(256 * 1024 * 1024)
                        .read_to_string()
                        .map_err(|e| Error::Provider(format!("{url}: reading body: {e}")))?;
                    return serde_json::from_str(&text)
                        .map_err(|e| Error::Provider(format!("{url}: malformed response: {e}")));
                }
                Ok(resp) => last = format!("HTTP status {}", resp.status().as_u16()),
                Err(e) => last = e.to_string(),
            }
            log::debug!("{url}: attempt {attempt}/{} failed: {last}", self.max_attempts);
            if attempt < self.max_attempts {
                thread::sleep(self.backoff * attempt);
            }
        }
        Err(Error::Retryable {
            endpoint: url,
            attempts: self.max_attempts,
            message: last,
        })
    }
}
