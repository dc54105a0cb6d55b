use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use patcher_core::backends::remote::{RemoteBackend, RemoteConfig};
use patcher_core::backends::{BackendError, Embedder, Generator, Scorer, SuggestRequest, Suggester, TemplateKind};
use patcher_core::extraction::{ExtractionConfig, ExtractionError, ExtractionMode, Extractor};
use patcher_core::lexicon::Lexicon;
use patcher_core::Prompt;
use serde_json::{json, Value};

type Handler = dyn Fn(&str, &Value) -> (u16, Value) + Send + Sync;

struct MockServer {
    endpoint: String,
    hits: Arc<AtomicUsize>,
    bodies: Arc<Mutex<Vec<(String, Value)>>>,
}

impl MockServer {
    fn start(handler: impl Fn(&str, &Value) -> (u16, Value) + Send + Sync + 'static) -> Self {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let endpoint = format!("http://{}", listener.local_addr().unwrap());
        let hits = Arc::new(AtomicUsize::new(0));
        let bodies = Arc::new(Mutex::new(Vec::new()));
        let handler: Arc<Handler> = Arc::new(handler);
        let (h, b) = (hits.clone(), bodies.clone());
        thread::spawn(move || {
            for stream in listener.incoming() {
                let Ok(stream) = stream else { break };
                let (h, b, handler) = (h.clone(), b.clone(), handler.clone());
                thread::spawn(move || serve(stream, &*handler, &h, &b));
            }
        });
        MockServer { endpoint, hits, bodies }
    }

    fn hits(&self) -> usize {
        self.hits.load(Ordering::SeqCst)
    }

    fn config(&self) -> RemoteConfig {
        let mut cfg = RemoteConfig::new(&self.endpoint);
        cfg.backoff = Duration::from_millis(1);
        cfg.timeout = Duration::from_secs(5);
        cfg
    }
}

fn serve(stream: TcpStream, handler: &Handler, hits: &AtomicUsize, bodies: &Mutex<Vec<(String, Value)>>) {
    let mut reader = BufReader::new(stream.try_clone().unwrap());
    let mut request_line = String::new();
    if reader.read_line(&mut request_line).unwrap_or(0) == 0 {
        return;
    }
    let path = request_line.split_whitespace().nth(1).unwrap_or("/").to_string();
    let mut length = 0;
    loop {
        let mut line = String::new();
        reader.read_line(&mut line).unwrap();
        let line = line.trim_end();
        if line.is_empty() {
            break;
        }
        if let Some((name, value)) = line.split_once(':') {
            if name.eq_ignore_ascii_case("content-length") {
                length = value.trim().parse().unwrap();
            }
        }
    }
    let mut body = vec![0; length];
    reader.read_exact(&mut body).unwrap();
    let body: Value = if body.is_empty() { Value::Null } else { serde_json::from_slice(&body).unwrap() };
    hits.fetch_add(1, Ordering::SeqCst);
    bodies.lock().unwrap().push((path.clone(), body.clone()));
    let (status, reply) = handler(&path, &body);
    let reply = reply.to_string();
    let mut stream = stream;
    let _ = write!(
        stream,
        "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{reply}",
        reply.len()
    );
}

fn health(path: &str) -> Option<(u16, Value)> {
    (path == "/v1/health").then(|| (200, json!({"status": "ok", "model": "mock-diffusion"})))
}

fn prompt(text: &str) -> Prompt {
    Prompt::new("p1", text, &Lexicon::bundled())
}

#[test]
fn connect_reads_health() {
    let server = MockServer::start(|path, _| health(path).unwrap_or((404, json!({"error": "no"}))));
    let backend = RemoteBackend::connect(server.config()).unwrap();
    assert_eq!(backend.model(), "mock-diffusion");
}

#[test]
fn unhealthy_server_is_rejected() {
    let server = MockServer::start(|_, _| (200, json!({"status": "loading", "model": "m"})));
    let err = RemoteBackend::connect(server.config()).err().unwrap();
    assert!(matches!(err, BackendError::ProtocolViolation(_)), "{err}");
}

#[test]
fn generate_maps_attention_to_positions() {
    let server = MockServer::start(|path, body| {
        health(path).unwrap_or_else(|| {
            assert_eq!(path, "/v1/generate");
            assert_eq!(body["seed"], 42);
            (200, json!({"image_id": "img-1", "tokens": ["a", "cat"], "attention": [0.1, 0.9]}))
        })
    });
    let backend = RemoteBackend::connect(server.config()).unwrap();
    let rec = backend.generate(&prompt("a cat"), 42).unwrap();
    assert_eq!(rec.image_ref, "img-1");
    assert_eq!(rec.seed, 42);
    assert_eq!(rec.taps.len(), 2);
    assert_eq!(rec.taps[1].token_index, 1);
    assert_eq!(rec.taps[1].score, 0.9);
}

#[test]
fn attention_length_mismatch_is_protocol_violation() {
    let server = MockServer::start(|path, _| {
        health(path).unwrap_or((200, json!({"image_id": "i", "tokens": ["a", "cat"], "attention": [0.5]})))
    });
    let backend = RemoteBackend::connect(server.config()).unwrap();
    let err = backend.generate(&prompt("a cat"), 0).unwrap_err();
    assert!(matches!(err, BackendError::ProtocolViolation(_)), "{err}");
}

#[test]
fn tokenization_mismatch_is_protocol_violation() {
    let server = MockServer::start(|path, _| {
        health(path).unwrap_or((200, json!({"image_id": "i", "tokens": ["a"], "attention": [0.5]})))
    });
    let backend = RemoteBackend::connect(server.config()).unwrap();
    let err = backend.generate(&prompt("a cat"), 0).unwrap_err();
    assert!(matches!(err, BackendError::ProtocolViolation(_)), "{err}");
}

#[test]
fn similarity_out_of_range_is_protocol_violation() {
    let server = MockServer::start(|path, _| health(path).unwrap_or((200, json!({"score": 1.3}))));
    let backend = RemoteBackend::connect(server.config()).unwrap();
    let err = backend.similarity("img", "a cat").unwrap_err();
    assert!(matches!(err, BackendError::ProtocolViolation(_)), "{err}");
}

#[test]
fn similarity_in_range_passes_through() {
    let server = MockServer::start(|path, body| {
        health(path).unwrap_or_else(|| {
            assert_eq!(body, &json!({"image_id": "img", "text": "a cat"}));
            (200, json!({"score": 0.31}))
        })
    });
    let backend = RemoteBackend::connect(server.config()).unwrap();
    assert_eq!(backend.similarity("img", "a cat").unwrap(), 0.31);
}

#[test]
fn suggestions_are_split_on_semicolons() {
    let server = MockServer::start(|path, body| {
        health(path).unwrap_or_else(|| {
            assert_eq!(body["template"], "color");
            assert_eq!(body["object"], "mouse");
            (200, json!({"items": ["grey mouse; white mouse", "brown mouse"]}))
        })
    });
    let backend = RemoteBackend::connect(server.config()).unwrap();
    let items = backend
        .suggest(&SuggestRequest { template: TemplateKind::Color, object: "mouse", prompt: None })
        .unwrap();
    assert_eq!(items, ["grey mouse", "white mouse", "brown mouse"]);
}

#[test]
fn embedding_dimension_must_stay_fixed() {
    let calls = AtomicUsize::new(0);
    let server = MockServer::start(move |path, _| {
        health(path).unwrap_or_else(|| {
            let n = calls.fetch_add(1, Ordering::SeqCst);
            let vector: Vec<f64> = vec![0.5; if n == 0 { 3 } else { 4 }];
            (200, json!({ "vector": vector }))
        })
    });
    let backend = RemoteBackend::connect(server.config()).unwrap();
    assert_eq!(backend.embed("cat").unwrap().len(), 3);
    let err = backend.embed("dog").unwrap_err();
    assert!(matches!(err, BackendError::ProtocolViolation(_)), "{err}");
}

#[test]
fn closed_port_times_out_after_all_attempts() {
    let port = {
        let l = TcpListener::bind("127.0.0.1:0").unwrap();
        l.local_addr().unwrap().port()
    };
    let mut cfg = RemoteConfig::new(format!("http://127.0.0.1:{port}"));
    cfg.backoff = Duration::from_millis(1);
    let err = RemoteBackend::connect(cfg).err().unwrap();
    match err {
        BackendError::Timeout { attempts, .. } => assert_eq!(attempts, 3),
        other => panic!("expected timeout, got {other}"),
    }
}

#[test]
fn client_errors_are_not_retried() {
    let server = MockServer::start(|path, _| health(path).unwrap_or((400, json!({"error": "bad seed"}))));
    let backend = RemoteBackend::connect(server.config()).unwrap();
    let before = server.hits();
    let err = backend.similarity("img", "x").unwrap_err();
    assert_eq!(err, BackendError::Server { status: 400, message: "bad seed".into() });
    assert_eq!(server.hits() - before, 1);
}

#[test]
fn server_errors_are_retried_then_reported() {
    let server = MockServer::start(|path, _| health(path).unwrap_or((503, json!({"error": "busy"}))));
    let backend = RemoteBackend::connect(server.config()).unwrap();
    let before = server.hits();
    let err = backend.similarity("img", "x").unwrap_err();
    assert_eq!(err, BackendError::Server { status: 503, message: "busy".into() });
    assert_eq!(server.hits() - before, 3);
}

#[test]
fn transient_server_error_recovers() {
    let calls = AtomicUsize::new(0);
    let server = MockServer::start(move |path, _| {
        health(path).unwrap_or_else(|| {
            if calls.fetch_add(1, Ordering::SeqCst) == 0 {
                (500, json!({"error": "warming up"}))
            } else {
                (200, json!({"score": 0.7}))
            }
        })
    });
    let backend = RemoteBackend::connect(server.config()).unwrap();
    assert_eq!(backend.similarity("img", "x").unwrap(), 0.7);
}

#[test]
fn remote_parser_tags_drive_extraction() {
    let server = MockServer::start(|path, body| {
        assert_eq!(path, "/v1/parse");
        assert_eq!(body["text"], "a fluffy zorp near a tree");
        (200, json!({"pos": ["DET", "ADJ", "NOUN", "ADP", "DET", "NOUN"]}))
    });
    let cfg = ExtractionConfig {
        mode: ExtractionMode::RemoteParser,
        lexicon_path: None,
        endpoint: Some(server.endpoint.clone()),
    };
    let extractor = Extractor::new(&cfg).unwrap();
    let objects = extractor.extract(&prompt("a fluffy zorp near a tree")).unwrap();
    let names: Vec<&str> = objects.iter().map(|o| o.concept.as_str()).collect();
    assert_eq!(names, ["zorp", "tree"]);
    assert_eq!(server.bodies.lock().unwrap().len(), 1);
}

#[test]
fn remote_parser_tag_count_mismatch_is_reported() {
    let server = MockServer::start(|_, _| (200, json!({"pos": ["DET"]})));
    let cfg = ExtractionConfig {
        mode: ExtractionMode::RemoteParser,
        lexicon_path: None,
        endpoint: Some(server.endpoint.clone()),
    };
    let extractor = Extractor::new(&cfg).unwrap();
    let err = extractor.extract(&prompt("a cat")).unwrap_err();
    assert!(matches!(err, ExtractionError::RemoteParserUnavailable(_)), "{err}");
}
