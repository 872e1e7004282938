//! Helpers shared by the CLI integration tests. Each test target compiles
//! this module separately and uses a different subset of it.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use corpkey::synth::citation_fixture;

/// The corpkey binary built for this test run.
pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_corpkey"))
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("corpkey binary runs")
}

pub fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("terminated by signal")
}

pub fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

pub fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

pub fn assert_success(out: &Output) {
    assert_eq!(exit_code(out), 0, "stderr: {}", stderr_of(out));
}

/// Writes a three-class synthetic corpus as JSONL and returns its path.
pub fn fixture_jsonl(dir: &Path, per_class: usize, seed: u64) -> PathBuf {
    let path = dir.join("corpus.jsonl");
    let corpus = citation_fixture(per_class, seed);
    let mut lines = String::with_capacity(corpus.statements().len() * 120);
    for statement in corpus.statements() {
        lines.push_str(&serde_json::to_string(statement).expect("statement serializes"));
        lines.push('\n');
    }
    fs::write(&path, lines).expect("fixture written");
    path
}

/// Bytes of every file directly inside `dir`, keyed by file name.
pub fn dir_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(dir).expect("output directory exists") {
        let path = entry.expect("directory entry readable").path();
        if path.is_file() {
            let name = path
                .file_name()
                .expect("files have names")
                .to_string_lossy()
                .into_owned();
            out.insert(name, fs::read(&path).expect("output file readable"));
        }
    }
    out
}
