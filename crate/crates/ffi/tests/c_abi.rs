use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use serde_json::Value;
use textgym_ffi::*;

fn take_json(p: *mut std::ffi::c_char) -> Value {
    assert!(!p.is_null());
    let v = serde_json::from_str(unsafe { CStr::from_ptr(p) }.to_str().unwrap()).unwrap();
    unsafe { tg_string_free(p) };
    v
}

fn last_error() -> String {
    let p = tg_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn reset(config: &str, tree: *const TgTree) -> (TgStatus, *mut TgSession, Option<Value>) {
    let c = CString::new(config).unwrap();
    let mut s = ptr::null_mut();
    let mut out = ptr::null_mut();
    let status = unsafe { tg_session_reset(c.as_ptr(), tree, &mut s, &mut out) };
    let json = (status == TgStatus::Ok).then(|| take_json(out));
    (status, s, json)
}

#[test]
fn online_episode_to_the_coin() {
    let (status, s, first) = reset(r#"{"game":"coin","seed":4}"#, ptr::null());
    assert_eq!(status, TgStatus::Ok);
    let first = first.unwrap();
    assert_eq!(first["step_count"], 0);
    let n = first["valid_actions"].as_array().unwrap().len();
    assert!(n > 0);

    let mut out = ptr::null_mut();
    let input = CString::new("xyzzy").unwrap();
    assert_eq!(unsafe { tg_session_step(s, input.as_ptr(), &mut out) }, TgStatus::Ok);
    let r = take_json(out);
    assert_eq!(r["step_count"], 1);
    assert_eq!(r["raw_score"], 0);

    assert_eq!(unsafe { tg_session_step_index(s, 0, &mut out) }, TgStatus::Ok);
    assert_eq!(take_json(out)["step_count"], 2);
    unsafe { tg_session_free(s) };
}

#[test]
fn error_codes() {
    let (status, s, _) = reset(r#"{"game":"coin","seed":4,"fold":"test"}"#, ptr::null());
    assert_eq!(status, TgStatus::FoldMismatch);
    assert!(s.is_null());
    assert!(last_error().contains("fold"));

    assert_eq!(reset(r#"{"game":"chess"}"#, ptr::null()).0, TgStatus::BadConfig);
    assert_eq!(reset("not json", ptr::null()).0, TgStatus::BadConfig);
    assert_eq!(reset(r#"{"game":"cookingworld","num_ingredients":9}"#, ptr::null()).0, TgStatus::BadConfig);

    let mut s = ptr::null_mut();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { tg_session_reset(ptr::null(), ptr::null(), &mut s, &mut out) }, TgStatus::NullPointer);
    assert_eq!(unsafe { tg_session_step_index(ptr::null_mut(), 0, &mut out) }, TgStatus::NullPointer);

    let bad = [b'{', 0xff, 0];
    let status = unsafe { tg_session_reset(bad.as_ptr().cast(), ptr::null(), &mut s, &mut out) };
    assert_eq!(status, TgStatus::InvalidUtf8);

    let path = CString::new("/nonexistent/tree.json").unwrap();
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { tg_tree_load(path.as_ptr(), &mut t) }, TgStatus::Io);

    // A success clears the previous message.
    assert_eq!(reset(r#"{"game":"coin","seed":1}"#, ptr::null()).0, TgStatus::Ok);
    assert!(tg_last_error().is_null());
}

#[test]
fn corrupt_tree_file_is_tree_format() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("t.json");
    std::fs::write(&p, b"{\"version\": 1, \"nodes\": 3").unwrap();
    let path = CString::new(p.to_str().unwrap()).unwrap();
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { tg_tree_load(path.as_ptr(), &mut t) }, TgStatus::TreeFormat);
    assert!(t.is_null());
}

#[test]
fn precrawled_matches_online() {
    let config = r#"{"game":"twc","seed":3}"#;
    let c = CString::new(config).unwrap();
    let mut tree = ptr::null_mut();
    assert_eq!(unsafe { tg_tree_crawl(c.as_ptr(), 2, &mut tree) }, TgStatus::Ok);
    assert!(unsafe { tg_tree_node_count(tree) } > 1);

    let (_, online, a) = reset(config, ptr::null());
    let (_, crawled, b) = reset(config, tree);
    // Sessions hold their own reference.
    unsafe { tg_tree_free(tree) };
    assert_eq!(a, b);
    for i in [1usize, 0] {
        let (mut x, mut y) = (ptr::null_mut(), ptr::null_mut());
        unsafe {
            tg_session_step_index(online, i, &mut x);
            tg_session_step_index(crawled, i, &mut y);
        }
        assert_eq!(take_json(x), take_json(y));
    }
    let (status, _, _) = reset(r#"{"game":"twc","seed":13}"#, unsafe {
        let mut t = ptr::null_mut();
        tg_tree_crawl(c.as_ptr(), 1, &mut t);
        t
    });
    assert_eq!(status, TgStatus::TreeMismatch);
    unsafe {
        tg_session_free(online);
        tg_session_free(crawled);
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(tg_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/textgym.h");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        format!(
            "#include \"{header}\"\n\
             int main(void) {{ TgSession *s = 0; char *j = 0; TgStatus st = tg_session_reset(\"{{}}\", 0, &s, &j);\n\
             return st == TG_STATUS_OK ? 0 : (int)st; }}\n"
        ),
    )
    .unwrap();
    let Ok(out) = Command::new("cc").arg("-std=c99").arg("-Wall").arg("-fsyntax-only").arg(&src).output() else {
        eprintln!("no C compiler; skipping");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
