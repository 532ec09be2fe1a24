//! In-process HTTP server speaking the embed/generate/translate protocol with
//! the deterministic mocks behind it.

use std::net::SocketAddr;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread::JoinHandle;
use std::time::Duration;

use base64::Engine;
use tiny_http::{Header, Request, Response, Server};

use super::{mock_embed, mock_generate, mock_translate};
use crate::error::{Error, Result};
use crate::providers::Modality;
use crate::wire::{
    EmbedRequest, EmbedResponse, GenerateRequest, TextResponse, TranslateRequest, EMBED_PATH, GENERATE_PATH,
    TRANSLATE_PATH,
};

#[derive(Debug, Clone)]
pub struct MockServerConfig {
    pub seed: u64,
    pub dim: usize,
    /// Answer this many requests with HTTP 503 before serving normally.
    pub fail_first: usize,
    pub workers: usize,
}

impl Default for MockServerConfig {
    fn default() -> Self {
        MockServerConfig {
            seed: 0,
            dim: 64,
            fail_first: 0,
            workers: 4,
        }
    }
}

struct Shared {
    config: MockServerConfig,
    requests: AtomicUsize,
    stop: AtomicBool,
}

pub struct MockServer {
    addr: SocketAddr,
    shared: Arc<Shared>,
    workers: Vec<JoinHandle<()>>,
}

impl MockServer {
    /// Binds to an ephemeral port on 127.0.0.1.
    pub fn start(config: MockServerConfig) -> Result<Self> {
        Self::bind("127.0.0.1:0", config)
    }

    pub fn bind(addr: &str, config: MockServerConfig) -> Result<Self> {
        if config.dim == 0 {
            return Err(Error::Config("mock server dim must be > 0".into()));
        }
        let server = Server::http(addr).map_err(|e| Error::Provider(format!("binding {addr}: {e}")))?;
        let addr = server
            .server_addr()
            .to_ip()
            .ok_or_else(|| Error::Provider("mock server is not bound to an IP address".into()))?;
        let server = Arc::new(server);
        let shared = Arc::new(Shared {
            config: config.clone(),
            requests: AtomicUsize::new(0),
            stop: AtomicBool::new(false),
        });
        let workers = (0..config.workers.max(1))
            .map(|_| {
                let server = Arc::clone(&server);
                let shared = Arc::clone(&shared);
                std::thread::spawn(move || {
                    while !shared.stop.load(Ordering::SeqCst) {
                        match server.recv_timeout(Duration::from_millis(50)) {
                            Ok(Some(req)) => handle(&shared, req),
                            Ok(None) => {}
                            Err(_) => break,
                        }
                    }
                })
            })
            .collect();
        Ok(MockServer { addr, shared, workers })
    }

    pub fn url(&self) -> String {
        format!("http://{}", self.addr)
    }

    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    /// Requests received so far, including failed ones.
    pub fn request_count(&self) -> usize {
        self.shared.requests.load(Ordering::SeqCst)
    }

    /// Blocks until the server is stopped from another thread or the
    /// process exits.
    pub fn wait(mut self) {
        for w in self.workers.drain(..) {
            let _ = w.join();
        }
    }

    pub fn shutdown(mut self) {
        self.stop();
    }

    fn stop(&mut self) {
        self.shared.stop.store(true, Ordering::SeqCst);
        for w in self.workers.drain(..) {
            let _ = w.join();
        }
    }
}

impl Drop for MockServer {
    fn drop(&mut self) {
        self.stop();
    }
}

fn handle(shared: &Shared, mut req: Request) {
    let n = shared.requests.fetch_add(1, Ordering::SeqCst);
    let (status, body) = if n < shared.config.fail_first {
        (503, r#"{"error":"unavailable"}"#.to_string())
    } else {
        let mut raw = String::new();
        match req.as_reader().read_to_string(&mut raw) {
            Ok(_) => route(&shared.config, req.method().as_str(), req.url(), &raw),
            Err(e) => (400, error_body(&e.to_string())),
        }
    };
    let header = Header::from_bytes(&b"Content-Type"[..], &b"application/json"[..]).expect("static header");
    let _ = req.respond(Response::from_string(body).with_status_code(status).with_header(header));
}

fn error_body(message: &str) -> String {
    serde_json::json!({ "error": message }).to_string()
}

fn route(config: &MockServerConfig, method: &str, url: &str, body: &str) -> (u16, String) {
    if method != "POST" {
        return (405, error_body("POST only"));
    }
    let result = match url {
        EMBED_PATH => serde_json::from_str::<EmbedRequest>(body)
            .map_err(|e| e.to_string())
            .and_then(|r| embed(config, r))
            .and_then(|r| serde_json::to_string(&r).map_err(|e| e.to_string())),
        GENERATE_PATH => serde_json::from_str::<GenerateRequest>(body)
            .map_err(|e| e.to_string())
            .and_then(|r| {
                serde_json::to_string(&TextResponse {
                    text: mock_generate(&r.prompt),
                })
                .map_err(|e| e.to_string())
            }),
        TRANSLATE_PATH => serde_json::from_str::<TranslateRequest>(body)
            .map_err(|e| e.to_string())
            .and_then(|r| {
                serde_json::to_string(&TextResponse {
                    text: mock_translate(&r.text, &r.source, &r.target),
                })
                .map_err(|e| e.to_string())
            }),
        _ => return (404, error_body("no such endpoint")),
    };
    match result {
        Ok(s) => (200, s),
        Err(e) => (400, error_body(&e)),
    }
}

fn embed(config: &MockServerConfig, req: EmbedRequest) -> std::result::Result<EmbedResponse, String> {
    let vectors = req
        .inputs
        .iter()
        .map(|input| {
            let bytes = match req.modality {
                Modality::Text => input.as_bytes().to_vec(),
                Modality::Image => base64::engine::general_purpose::STANDARD
                    .decode(input)
                    .map_err(|e| format!("image input is not base64: {e}"))?,
            };
            Ok(mock_embed(&req.model, req.modality, &bytes, config.seed, config.dim).values)
        })
        .collect::<std::result::Result<Vec<_>, String>>()?;
    Ok(EmbedResponse {
        dim: config.dim,
        vectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wire::HttpClient;

    #[test]
    fn serves_all_endpoints() {
        let server = MockServer::start(MockServerConfig {
            seed: 9,
            dim: 8,
            ..Default::default()
        })
        .unwrap();
        let client = HttpClient::new(server.url());
        let resp: EmbedResponse = client
            .post_json(
                EMBED_PATH,
                &EmbedRequest {
                    model: "clip".into(),
                    modality: Modality::Text,
                    inputs: vec!["baseball bat".into()],
                },
            )
            .unwrap();
        assert_eq!(resp.dim, 8);
        assert_eq!(resp.vectors[0], mock_embed("clip", Modality::Text, b"baseball bat", 9, 8).values);

        let t: TextResponse = client
            .post_json(
                TRANSLATE_PATH,
                &TranslateRequest {
                    text: "mazza da baseball".into(),
                    source: "it".into(),
                    target: "en".into(),
                },
            )
            .unwrap();
        assert_eq!(t.text, mock_translate("mazza da baseball", "it", "en"));
        let g: TextResponse = client
            .post_json(GENERATE_PATH, &GenerateRequest { prompt: "x".into() })
            .unwrap();
        assert_eq!(g.text, mock_generate("x"));
        assert_eq!(server.request_count(), 3);
    }

    #[test]
    fn failures_are_retried() {
        let server = MockServer::start(MockServerConfig {
            fail_first: 2,
            ..Default::default()
        })
        .unwrap();
        let client = HttpClient::new(server.url()).with_retries(3, Duration::from_millis(1));
        let g: TextResponse = client
            .post_json(GENERATE_PATH, &GenerateRequest { prompt: "a".into() })
            .unwrap();
        assert_eq!(g.text, mock_generate("a"));
        assert_eq!(server.request_count(), 3);

        let server = MockServer::start(MockServerConfig {
            fail_first: 5,
            ..Default::default()
        })
        .unwrap();
        let client = HttpClient::new(server.url()).with_retries(2, Duration::from_millis(1));
        let err = client
            .post_json::<_, TextResponse>(GENERATE_PATH, &GenerateRequest { prompt: "a".into() })
            .unwrap_err();
        assert!(matches!(err, Error::Retryable { attempts: 2, .. }));
    }

    #[test]
    fn unknown_path_is_404() {
        let (status, _) = route(&MockServerConfig::default(), "POST", "/v2/embed", "{}");
        assert_eq!(status, 404);
        let (status, _) = route(&MockServerConfig::default(), "POST", EMBED_PATH, "not json");
        assert_eq!(status, 400);
    }
}
