//! Session service: wire protocol v1 over TCP, plus the same payloads over
//! a minimal HTTP mapping for browser clients.
//!
//! TCP frames are a 4-byte big-endian length followed by that many bytes of
//! UTF-8 JSON. Requests:
//!
//! ```text
//! {"op": "reset", "session": "s1", "game": "coin", "seed": 3, "difficulty": "easy",
//!  "num_locations": 4, "mode": "online", "lean": false}
//! {"op": "step", "session": "s1", "action": "take coin"}
//! {"op": "close", "session": "s1"}
//! ```
//!
//! Replies are `{"ok": true, "result": StepResult}` or
//! `{"ok": false, "error": {"code": ..., "message": ...}}`. HTTP clients POST
//! the same request body to `/api`.

use std::collections::HashMap;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::{Arc, Mutex};
use std::thread;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::games::GameKind;
use crate::precrawl::{crawl, PrecrawledTree};
use crate::session::{Mode, Session, SessionError, StepResult};
use crate::variation::{fold_of_seed, Difficulty, EpisodeConfig, EpisodeError, Fold, Params};

pub const MAX_FRAME: u32 = 16 << 20;

/// Episode settings as they appear on the wire and on the command line.
/// Missing counts fall back to the difficulty preset.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ConfigFields {
    pub game: Option<String>,
    pub seed: Option<u64>,
    pub fold: Option<String>,
    pub difficulty: Option<String>,
    pub num_locations: Option<usize>,
    pub num_ingredients: Option<usize>,
    pub num_distractors: Option<usize>,
    pub with_doors: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("{0}")]
    BadRequest(String),
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    FoldMismatch(String),
}

impl ConfigFields {
    pub fn to_config(&self) -> Result<EpisodeConfig, ConfigError> {
        let game_name = self.game.as_deref().ok_or_else(|| ConfigError::BadRequest("missing field \"game\"".into()))?;
        let game = GameKind::from_name(game_name)
            .ok_or_else(|| ConfigError::Invalid(format!("unknown game {game_name:?} (cookingworld, twc, coin)")))?;
        let difficulty = match &self.difficulty {
            None => Difficulty::Easy,
            Some(d) => Difficulty::from_name(d)
                .ok_or_else(|| ConfigError::Invalid(format!("unknown difficulty {d:?} (easy, medium, hard)")))?,
        };
        let seed = self.seed.unwrap_or(0);
        let mut params = Params::preset(game, difficulty);
        if let Some(n) = self.num_locations {
            params.num_locations = n;
        }
        if let Some(n) = self.num_ingredients {
            params.num_ingredients = n;
        }
        if let Some(n) = self.num_distractors {
            params.num_distractors = n;
        }
        if let Some(d) = self.with_doors {
            params.with_doors = d;
        }
        let mut config = EpisodeConfig::with_params(game, seed, params);
        if let Some(f) = &self.fold {
            config.fold = Fold::from_name(f)
                .ok_or_else(|| ConfigError::Invalid(format!("unknown fold {f:?} (train, dev, test)")))?;
        }
        match config.check() {
            Ok(()) => Ok(config),
            Err(e @ EpisodeError::FoldMismatch { .. }) => Err(ConfigError::FoldMismatch(e.to_string())),
            Err(e) => Err(ConfigError::Invalid(e.to_string())),
        }
    }

    pub fn from_config(c: &EpisodeConfig) -> Self {
        Self {
            game: Some(c.game.name().to_string()),
            seed: Some(c.seed),
            fold: Some(c.fold.name().to_string()),
            difficulty: Some(format!("{:?}", c.params.difficulty).to_lowercase()),
            num_locations: Some(c.params.num_locations),
            num_ingredients: Some(c.params.num_ingredients),
            num_distractors: Some(c.params.num_distractors),
            with_doors: Some(c.params.with_doors),
        }
    }
}

#[derive(Debug, Deserialize)]
struct Request {
    op: String,
    session: Option<String>,
    action: Option<String>,
    mode: Option<String>,
    lean: Option<bool>,
    max_depth: Option<u32>,
    #[serde(flatten)]
    config: ConfigFields,
}

#[derive(Debug, Serialize)]
pub struct ErrorBody {
    pub code: &'static str,
    pub message: String,
}

fn error(code: &'static str, message: impl Into<String>) -> serde_json::Value {
    json!({"ok": false, "error": ErrorBody { code, message: message.into() }})
}

fn ok(result: &StepResult, lean: bool) -> serde_json::Value {
    if lean {
        json!({"ok": true, "result": result.without_actions()})
    } else {
        json!({"ok": true, "result": result})
    }
}

struct Slot {
    session: Session,
    lean: bool,
}

/// Shared state behind every connection. Different sessions are served
/// concurrently; requests for the same session are serialized by its lock.
#[derive(Default)]
pub struct Service {
    sessions: Mutex<HashMap<String, Arc<Mutex<Slot>>>>,
    trees: Mutex<Vec<Arc<PrecrawledTree>>>,
    /// Deepest tree a reset may crawl on demand; 0 disables on-demand crawls.
    pub max_crawl_depth: u32,
}

impl Service {
    pub fn new() -> Self {
        Self { max_crawl_depth: 4, ..Self::default() }
    }

    pub fn add_tree(&self, tree: Arc<PrecrawledTree>) {
        self.trees.lock().expect("tree lock").push(tree);
    }

    fn find_tree(&self, c: &EpisodeConfig) -> Option<Arc<PrecrawledTree>> {
        self.trees.lock().expect("tree lock").iter().find(|t| t.header.matches(c)).cloned()
    }

    pub fn session_count(&self) -> usize {
        self.sessions.lock().expect("session lock").len()
    }

    /// Handles one request body and returns the reply body.
    pub fn handle(&self, body: &[u8]) -> Vec<u8> {
        serde_json::to_vec(&self.handle_value(body)).expect("reply serializes")
    }

    fn handle_value(&self, body: &[u8]) -> serde_json::Value {
        let req: Request = match serde_json::from_slice(body) {
            Ok(r) => r,
            Err(e) => return error("bad_request", format!("malformed request: {e}")),
        };
        let Some(id) = req.session.clone() else {
            return error("bad_request", "missing field \"session\"");
        };
        match req.op.as_str() {
            "reset" => self.reset(id, &req),
            "step" => {
                let Some(action) = req.action.as_deref() else {
                    return error("bad_request", "missing field \"action\"");
                };
                let slot = self.sessions.lock().expect("session lock").get(&id).cloned();
                match slot {
                    None => error("unknown_session", format!("no session {id:?}")),
                    Some(slot) => {
                        let mut slot = slot.lock().expect("slot lock");
                        let r = slot.session.step(action);
                        ok(&r, slot.lean)
                    }
                }
            }
            "close" => match self.sessions.lock().expect("session lock").remove(&id) {
                Some(_) => json!({"ok": true, "result": null}),
                None => error("unknown_session", format!("no session {id:?}")),
            },
            other => error("bad_request", format!("unknown op {other:?} (reset, step, close)")),
        }
    }

    fn reset(&self, id: String, req: &Request) -> serde_json::Value {
        let config = match req.config.to_config() {
            Ok(c) => c,
            Err(ConfigError::BadRequest(m)) => return error("bad_request", m),
            Err(ConfigError::Invalid(m)) => return error("invalid_config", m),
            Err(ConfigError::FoldMismatch(m)) => return error("fold_mismatch", m),
        };
        let mode = match req.mode.as_deref().map(Mode::from_name) {
            None => Mode::Online,
            Some(Some(m)) => m,
            Some(None) => return error("invalid_config", "mode must be online or precrawled"),
        };
        let tree = if mode == Mode::Precrawled {
            match (self.find_tree(&config), req.max_depth) {
                (Some(t), _) => Some(t),
                (None, Some(d)) if d <= self.max_crawl_depth => match crawl(&config, d) {
                    Ok(t) => {
                        let t = Arc::new(t);
                        self.add_tree(Arc::clone(&t));
                        Some(t)
                    }
                    Err(e) => return error("missing_tree", e.to_string()),
                },
                _ => {
                    return error(
                        "missing_tree",
                        format!(
                            "no precrawled tree loaded for this config; pass max_depth <= {} to crawl one",
                            self.max_crawl_depth
                        ),
                    )
                }
            }
        } else {
            None
        };
        match Session::reset(&config, mode, tree) {
            Ok((session, first)) => {
                let lean = req.lean.unwrap_or(false);
                let reply = ok(&first, lean);
                self.sessions.lock().expect("session lock").insert(id, Arc::new(Mutex::new(Slot { session, lean })));
                reply
            }
            Err(SessionError::Episode(EpisodeError::FoldMismatch { .. })) => {
                error("fold_mismatch", format!("seed {} is in fold {}", config.seed, fold_of_seed(config.seed)))
            }
            Err(e @ (SessionError::MissingTree | SessionError::TreeMismatch)) => error("missing_tree", e.to_string()),
            Err(e) => error("invalid_config", e.to_string()),
        }
    }
}

/// Reads one length-prefixed frame. `Ok(None)` on a clean end of stream.
pub fn read_frame(r: &mut impl Read) -> io::Result<Option<Vec<u8>>> {
    let mut len = [0u8; 4];
    match r.read_exact(&mut len) {
        Ok(()) => {}
        Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => return Ok(None),
        Err(e) => return Err(e),
    }
    let len = u32::from_be_bytes(len);
    if len > MAX_FRAME {
        return Err(io::Error::new(io::ErrorKind::InvalidData, format!("frame of {len} bytes exceeds limit")));
    }
    let mut buf = vec![0u8; len as usize];
    r.read_exact(&mut buf)?;
    Ok(Some(buf))
}

pub fn write_frame(w: &mut impl Write, body: &[u8]) -> io::Result<()> {
    w.write_all(&(body.len() as u32).to_be_bytes())?;
    w.write_all(body)?;
    w.flush()
}

fn serve_tcp_conn(service: &Service, stream: TcpStream) -> io::Result<()> {
    stream.set_nodelay(true)?;
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut writer = io::BufWriter::new(stream);
    loop {
        let mut len = [0u8; 4];
        match reader.read_exact(&mut len) {
            Ok(()) => {}
            Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => return Ok(()),
            Err(e) => return Err(e),
        }
        let len = u32::from_be_bytes(len);
        if len > MAX_FRAME {
            // Skip the body so the next frame still lines up.
            io::copy(&mut (&mut reader).take(u64::from(len)), &mut io::sink())?;
            let msg = format!("frame of {len} bytes exceeds the {MAX_FRAME}-byte limit");
            write_frame(&mut writer, &serde_json::to_vec(&error("bad_request", msg)).expect("serializes"))?;
            continue;
        }
        let mut body = vec![0u8; len as usize];
        reader.read_exact(&mut body)?;
        write_frame(&mut writer, &service.handle(&body))?;
    }
}

/// Accepts connections forever, one thread per connection.
pub fn serve_tcp(listener: TcpListener, service: Arc<Service>) -> io::Result<()> {
    for stream in listener.incoming() {
        let stream = stream?;
        let service = Arc::clone(&service);
        thread::spawn(move || {
            let _ = serve_tcp_conn(&service, stream);
        });
    }
    Ok(())
}

fn http_reply(w: &mut impl Write, status: &str, body: &[u8], keep_alive: bool) -> io::Result<()> {
    write!(
        w,
        "HTTP/1.1 {status}\r\nContent-Type: application/json\r\nContent-Length: {}\r\n\
         Access-Control-Allow-Origin: *\r\nAccess-Control-Allow-Methods: POST, GET, OPTIONS\r\n\
         Access-Control-Allow-Headers: Content-Type\r\nConnection: {}\r\n\r\n",
        body.len(),
        if keep_alive { "keep-alive" } else { "close" }
    )?;
    w.write_all(body)?;
    w.flush()
}

fn serve_http_conn(service: &Service, stream: TcpStream) -> io::Result<()> {
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut writer = io::BufWriter::new(stream);
    loop {
        let mut line = String::new();
        if reader.read_line(&mut line)? == 0 {
            return Ok(());
        }
        let mut parts = line.split_whitespace();
        let method = parts.next().unwrap_or("").to_string();
        let path = parts.next().unwrap_or("").to_string();
        let mut content_length = 0usize;
        let mut keep_alive = true;
        loop {
            let mut h = String::new();
            if reader.read_line(&mut h)? == 0 {
                return Ok(());
            }
            let h = h.trim_end();
            if h.is_empty() {
                break;
            }
            if let Some((k, v)) = h.split_once(':') {
                let (k, v) = (k.trim().to_ascii_lowercase(), v.trim());
                if k == "content-length" {
                    content_length = v.parse().unwrap_or(0);
                } else if k == "connection" && v.eq_ignore_ascii_case("close") {
                    keep_alive = false;
                }
            }
        }
        if content_length > MAX_FRAME as usize {
            let body = serde_json::to_vec(&error("bad_request", "request body too large")).expect("serializes");
            return http_reply(&mut writer, "413 Payload Too Large", &body, false);
        }
        let mut body = vec![0u8; content_length];
        reader.read_exact(&mut body)?;
        match (method.as_str(), path.as_str()) {
            ("OPTIONS", _) => http_reply(&mut writer, "204 No Content", b"", keep_alive)?,
            ("GET", "/health") => http_reply(&mut writer, "200 OK", br#"{"ok":true}"#, keep_alive)?,
            ("POST", "/api") => http_reply(&mut writer, "200 OK", &service.handle(&body), keep_alive)?,
            _ => {
                let body = serde_json::to_vec(&error("bad_request", "POST requests to /api")).expect("serializes");
                http_reply(&mut writer, "404 Not Found", &body, keep_alive)?;
            }
        }
        if !keep_alive {
            return Ok(());
        }
    }
}

pub fn serve_http(listener: TcpListener, service: Arc<Service>) -> io::Result<()> {
    for stream in listener.incoming() {
        let stream = stream?;
        let service = Arc::clone(&service);
        thread::spawn(move || {
            let _ = serve_http_conn(&service, stream);
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    fn call(s: &Service, v: Value) -> Value {
        serde_json::from_slice(&s.handle(v.to_string().as_bytes())).unwrap()
    }

    #[test]
    fn reset_step_close() {
        let s = Service::new();
        let r = call(&s, json!({"op": "reset", "session": "a", "game": "coin", "seed": 4}));
        assert_eq!(r["ok"], true, "{r}");
        let look = r["result"]["look"].clone();
        let r = call(&s, json!({"op": "step", "session": "a", "action": "look around"}));
        assert_eq!(r["result"]["observation"], look);
        assert_eq!(r["result"]["step_count"], 1);
        assert_eq!(call(&s, json!({"op": "close", "session": "a"}))["ok"], true);
        let r = call(&s, json!({"op": "step", "session": "a", "action": "look around"}));
        assert_eq!(r["error"]["code"], "unknown_session");
    }

    #[test]
    fn error_codes() {
        let s = Service::new();
        let code = |body: &[u8]| {
            let v: Value = serde_json::from_slice(&s.handle(body)).unwrap();
            assert_eq!(v["ok"], false);
            v["error"]["code"].as_str().unwrap().to_string()
        };
        assert_eq!(code(b"{not json"), "bad_request");
        assert_eq!(code(br#"{"op":"dance","session":"x"}"#), "bad_request");
        assert_eq!(code(br#"{"op":"reset","session":"x","game":"chess"}"#), "invalid_config");
        assert_eq!(code(br#"{"op":"reset","session":"x","game":"coin","seed":1,"fold":"dev"}"#), "fold_mismatch");
        assert_eq!(code(br#"{"op":"reset","session":"x","game":"coin","num_locations":40}"#), "invalid_config");
        assert_eq!(code(br#"{"op":"reset","session":"x","game":"coin","mode":"precrawled"}"#), "missing_tree");
    }

    #[test]
    fn lean_replies_drop_actions() {
        let s = Service::new();
        let r = call(&s, json!({"op": "reset", "session": "l", "game": "twc", "seed": 2, "lean": true}));
        assert_eq!(r["result"]["valid_actions"], json!([]));
        assert!(r["result"]["look"].as_str().unwrap().starts_with("You are in"));
    }

    #[test]
    fn on_demand_precrawl_matches_online() {
        let s = Service::new();
        let a = call(&s, json!({"op": "reset", "session": "p", "game": "coin", "seed": 6, "mode": "precrawled", "max_depth": 2}));
        let b = call(&s, json!({"op": "reset", "session": "o", "game": "coin", "seed": 6}));
        assert_eq!(a, b);
        let action = a["result"]["valid_actions"][3].as_str().unwrap().to_string();
        let a = call(&s, json!({"op": "step", "session": "p", "action": action}));
        let b = call(&s, json!({"op": "step", "session": "o", "action": action}));
        assert_eq!(a, b);
    }

    #[test]
    fn frames_round_trip() {
        let mut buf = Vec::new();
        write_frame(&mut buf, b"{}").unwrap();
        assert_eq!(&buf[..4], &[0, 0, 0, 2]);
        let mut r = &buf[..];
        assert_eq!(read_frame(&mut r).unwrap(), Some(b"{}".to_vec()));
        assert_eq!(read_frame(&mut r).unwrap(), None);
    }
}
