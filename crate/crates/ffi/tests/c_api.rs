use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use aspcount_ffi::*;

const EXAMPLE: &str =
    "a :- not b.\nb :- not a.\nc :- a, b.\nc :- d.\nd :- a.\nd :- b, c.\ne :- not a, not b.\n";

fn parse(text: &str) -> (AspcStatus, *mut AspcProgram) {
    let c = CString::new(text).unwrap();
    let mut p = ptr::null_mut();
    let s = unsafe { aspc_program_parse(c.as_ptr(), &mut p) };
    (s, p)
}

fn last_error() -> String {
    let e = aspc_last_error();
    assert!(!e.is_null());
    unsafe { CStr::from_ptr(e) }.to_str().unwrap().to_owned()
}

fn take_string(s: *mut std::ffi::c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { aspc_string_free(s) };
    out
}

#[test]
fn count_example() {
    let (s, p) = parse(EXAMPLE);
    assert_eq!(s, AspcStatus::Ok);
    assert!(aspc_last_error().is_null());
    assert_eq!(unsafe { aspc_program_num_atoms(p) }, 5);
    let mut r = ptr::null_mut();
    assert_eq!(
        unsafe { aspc_count(p, ptr::null(), &mut r) },
        AspcStatus::Ok
    );
    assert_eq!(take_string(unsafe { aspc_result_count(r) }), "2");
    let mut stats = AspcStats::default();
    assert_eq!(unsafe { aspc_result_stats(r, &mut stats) }, AspcStatus::Ok);
    assert!(stats.cache_hits <= stats.cache_lookups);
    assert!(stats.wall_seconds >= 0.0);
    unsafe {
        aspc_result_free(r);
        aspc_program_free(p);
    }
}

#[test]
fn big_counts_are_exact() {
    let text: String = (0..100)
        .map(|i| format!("x{i} :- not y{i}.\ny{i} :- not x{i}.\n"))
        .collect();
    let (_, p) = parse(&text);
    let mut r = ptr::null_mut();
    let mut opts = aspc_options_default();
    opts.has_seed = true;
    opts.seed = 11;
    assert_eq!(unsafe { aspc_count(p, &opts, &mut r) }, AspcStatus::Ok);
    assert_eq!(
        take_string(unsafe { aspc_result_count(r) }),
        "1267650600228229401496703205376"
    );
    unsafe {
        aspc_result_free(r);
        aspc_program_free(p);
    }
}

#[test]
fn parse_error_reports_location() {
    let (s, p) = parse("a :- b\n");
    assert_eq!(s, AspcStatus::ParseError);
    assert!(p.is_null());
    assert!(last_error().starts_with("1:"));
}

#[test]
fn invalid_arguments() {
    let mut p = ptr::null_mut();
    assert_eq!(
        unsafe { aspc_program_parse(ptr::null(), &mut p) },
        AspcStatus::NullPointer
    );
    let bad = [0xffu8, 0xfe, 0];
    assert_eq!(
        unsafe { aspc_program_parse(bad.as_ptr().cast(), &mut p) },
        AspcStatus::InvalidUtf8
    );
    let mut r = ptr::null_mut();
    assert_eq!(
        unsafe { aspc_count(ptr::null(), ptr::null(), &mut r) },
        AspcStatus::NullPointer
    );
    assert!(unsafe { aspc_result_count(ptr::null()) }.is_null());
    assert_eq!(unsafe { aspc_program_num_atoms(ptr::null()) }, 0);
    unsafe {
        aspc_program_free(ptr::null_mut());
        aspc_result_free(ptr::null_mut());
        aspc_string_free(ptr::null_mut());
    }
}

#[test]
fn cache_limit_is_a_resource_limit() {
    let (_, p) = parse(EXAMPLE);
    let mut opts = aspc_options_default();
    opts.cache_limit_mb = 0;
    let mut r = ptr::null_mut();
    assert_eq!(
        unsafe { aspc_count(p, &opts, &mut r) },
        AspcStatus::ResourceLimit
    );
    assert!(r.is_null());
    assert!(last_error().contains("cache"));
    opts.use_cache = false;
    assert_eq!(unsafe { aspc_count(p, &opts, &mut r) }, AspcStatus::Ok);
    assert_eq!(take_string(unsafe { aspc_result_count(r) }), "2");
    unsafe {
        aspc_result_free(r);
        aspc_program_free(p);
    }
}

#[test]
fn translate_to_dimacs() {
    let (_, p) = parse(EXAMPLE);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { aspc_translate(p, &mut s) }, AspcStatus::Ok);
    let text = take_string(s);
    assert!(text.contains("p cnf 9 "));
    unsafe { aspc_program_free(p) };
}

fn header_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/aspcount.h")
}

#[test]
fn header_declares_the_surface() {
    let h = std::fs::read_to_string(header_path()).unwrap();
    for name in [
        "typedef struct AspcProgram AspcProgram;",
        "typedef struct AspcResult AspcResult;",
        "ASPC_STATUS_OK = 0",
        "ASPC_STATUS_RESOURCE_LIMIT = 2",
        "aspc_program_parse(",
        "aspc_count(",
        "aspc_result_count(",
        "aspc_result_stats(",
        "aspc_translate(",
        "aspc_string_free(",
        "aspc_last_error(",
        "aspc_options_default(",
    ] {
        assert!(h.contains(name), "header lacks {name}");
    }
}

#[test]
fn c_program_links_against_the_library() {
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libaspcount_ffi.so");
    assert!(lib.exists(), "cdylib not found at {}", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(
        &src,
        r#"
#include <stdio.h>
#include <string.h>
#include "aspcount.h"

int main(void) {
    AspcProgram *p = NULL;
    if (aspc_program_parse("a :- not b. b :- not a. c :- d. d :- c.", &p) != ASPC_STATUS_OK) return 1;
    AspcOptions opts = aspc_options_default();
    AspcResult *r = NULL;
    if (aspc_count(p, &opts, &r) != ASPC_STATUS_OK) return 2;
    char *n = aspc_result_count(r);
    int ok = strcmp(n, "2") == 0;
    printf("%s\n", n);
    aspc_string_free(n);
    aspc_result_free(r);
    aspc_program_free(p);
    AspcProgram *q = NULL;
    if (aspc_program_parse("a :-", &q) != ASPC_STATUS_PARSE_ERROR || q != NULL) return 3;
    if (aspc_last_error() == NULL) return 4;
    return ok ? 0 : 5;
}
"#,
    )
    .unwrap();
    let bin = dir.path().join("main");
    let cc = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(header_path().parent().unwrap())
        .arg("-L")
        .arg(profile_dir)
        .arg("-laspcount_ffi")
        .arg(format!("-Wl,-rpath,{}", profile_dir.display()))
        .arg("-o")
        .arg(&bin)
        .output()
        .expect("run cc");
    assert!(
        cc.status.success(),
        "{}",
        String::from_utf8_lossy(&cc.stderr)
    );
    let run = Command::new(&bin).output().unwrap();
    assert_eq!(run.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&run.stdout), "2\n");
}
