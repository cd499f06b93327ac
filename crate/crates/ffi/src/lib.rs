//! C ABI for textgym.
//!
//! Handles are opaque and owned by the caller until passed to the matching
//! `_free` function. Every call returns a [`TgStatus`]; on failure
//! `tg_last_error` describes the problem. Step results come back as JSON
//! strings in the wire shape and must be released with `tg_string_free`.
//!
//! A session handle must not be used from two threads at once. Tree handles
//! are immutable and may be shared.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use textgym::precrawl::{crawl, load_tree, CrawlError, PrecrawledTree, TreeError};
use textgym::server::{ConfigError, ConfigFields};
use textgym::session::{Mode, Session, SessionError, StepResult};
use textgym::EpisodeConfig;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Unparseable or out-of-range episode config.
    BadConfig = 3,
    /// The seed does not belong to the requested fold.
    FoldMismatch = 4,
    Io = 5,
    /// A tree file failed to parse or validate.
    TreeFormat = 6,
    /// The tree was crawled for a different config.
    TreeMismatch = 7,
    /// Crawl exceeded its size budget.
    CrawlBudget = 8,
    Panic = 99,
}

/// A live episode.
pub struct TgSession(Session);

/// A loaded, immutable precrawled tree.
pub struct TgTree(Arc<PrecrawledTree>);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(TgStatus, String);

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        let status = match e {
            ConfigError::FoldMismatch(_) => TgStatus::FoldMismatch,
            _ => TgStatus::BadConfig,
        };
        Failure(status, e.to_string())
    }
}

impl From<SessionError> for Failure {
    fn from(e: SessionError) -> Self {
        let status = match e {
            SessionError::TreeMismatch | SessionError::MissingTree => TgStatus::TreeMismatch,
            SessionError::Episode(_) => TgStatus::BadConfig,
        };
        Failure(status, e.to_string())
    }
}

impl From<TreeError> for Failure {
    fn from(e: TreeError) -> Self {
        let status = match e {
            TreeError::Io(_) => TgStatus::Io,
            _ => TgStatus::TreeFormat,
        };
        Failure(status, e.to_string())
    }
}

impl From<CrawlError> for Failure {
    fn from(e: CrawlError) -> Self {
        let status = match e {
            CrawlError::BudgetExceeded { .. } => TgStatus::CrawlBudget,
            CrawlError::Episode(_) => TgStatus::BadConfig,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> TgStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TgStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(&format!("panic: {msg}"));
            TgStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(TgStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(TgStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

fn null_out(what: &str) -> Failure {
    Failure(TgStatus::NullPointer, format!("{what} is null"))
}

fn parse_config(json: &str) -> Result<EpisodeConfig, Failure> {
    let fields: ConfigFields =
        serde_json::from_str(json).map_err(|e| Failure(TgStatus::BadConfig, format!("config: {e}")))?;
    Ok(fields.to_config()?)
}

unsafe fn write_result(out: *mut *mut c_char, r: &StepResult) {
    let json = serde_json::to_string(r).expect("step results serialize");
    *out = CString::new(json).expect("JSON has no interior NUL").into_raw();
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next `tg_` call on the same thread.
#[no_mangle]
pub extern "C" fn tg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Starts an episode. `config_json` uses the wire field names (`game`,
/// `seed`, `fold`, `difficulty`, `num_locations`, ...). With a non-NULL
/// `tree` the session plays back that tree instead of running the engine.
/// On success `*out` owns a new session and `*result_json` the first step.
#[no_mangle]
pub unsafe extern "C" fn tg_session_reset(
    config_json: *const c_char,
    tree: *const TgTree,
    out: *mut *mut TgSession,
    result_json: *mut *mut c_char,
) -> TgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_out("out"));
        }
        if result_json.is_null() {
            return Err(null_out("result_json"));
        }
        let config = parse_config(text(config_json, "config_json")?)?;
        let (mode, tree) = match tree.as_ref() {
            Some(t) => (Mode::Precrawled, Some(Arc::clone(&t.0))),
            None => (Mode::Online, None),
        };
        let (session, first) = Session::reset(&config, mode, tree)?;
        write_result(result_json, &first);
        *out = Box::into_raw(Box::new(TgSession(session)));
        Ok(())
    })
}

/// Steps with free-text input. Unrecognized input is not an error; the
/// result's observation says so.
#[no_mangle]
pub unsafe extern "C" fn tg_session_step(
    session: *mut TgSession,
    input: *const c_char,
    result_json: *mut *mut c_char,
) -> TgStatus {
    guard(|| {
        let s = session.as_mut().ok_or_else(|| null_out("session"))?;
        if result_json.is_null() {
            return Err(null_out("result_json"));
        }
        let r = s.0.step(text(input, "input")?);
        write_result(result_json, &r);
        Ok(())
    })
}

/// Steps with the `index`-th entry of the last valid-action list.
#[no_mangle]
pub unsafe extern "C" fn tg_session_step_index(
    session: *mut TgSession,
    index: usize,
    result_json: *mut *mut c_char,
) -> TgStatus {
    guard(|| {
        let s = session.as_mut().ok_or_else(|| null_out("session"))?;
        if result_json.is_null() {
            return Err(null_out("result_json"));
        }
        write_result(result_json, &s.0.step_index(index));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn tg_session_free(session: *mut TgSession) {
    if !session.is_null() {
        drop(Box::from_raw(session));
    }
}

/// Loads a tree file (`.gz` is decompressed).
#[no_mangle]
pub unsafe extern "C" fn tg_tree_load(path: *const c_char, out: *mut *mut TgTree) -> TgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_out("out"));
        }
        let tree = load_tree(text(path, "path")?)?;
        *out = Box::into_raw(Box::new(TgTree(Arc::new(tree))));
        Ok(())
    })
}

/// Crawls a tree in memory to `max_depth`.
#[no_mangle]
pub unsafe extern "C" fn tg_tree_crawl(config_json: *const c_char, max_depth: u32, out: *mut *mut TgTree) -> TgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_out("out"));
        }
        let config = parse_config(text(config_json, "config_json")?)?;
        let tree = crawl(&config, max_depth)?;
        *out = Box::into_raw(Box::new(TgTree(Arc::new(tree))));
        Ok(())
    })
}

/// Number of nodes, or 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn tg_tree_node_count(tree: *const TgTree) -> usize {
    tree.as_ref().map_or(0, |t| t.0.len())
}

/// Sessions created from the tree keep it alive; freeing here is always safe.
#[no_mangle]
pub unsafe extern "C" fn tg_tree_free(tree: *mut TgTree) {
    if !tree.is_null() {
        drop(Box::from_raw(tree));
    }
}

/// Releases a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn tg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
