use std::path::Path;
use std::process::Command;

use clap::Parser;
use scholarec_service::cli::{run, Cli};

const ARXIV: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/tests/fixtures/arxiv_0807_2466.xml");
const COMMUNITY: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/tests/fixtures/community_news.nq");

fn scholarec(data: &Path, args: &[&str]) -> anyhow::Result<String> {
    let mut argv = vec!["scholarec", "--data-dir", data.to_str().unwrap()];
    argv.extend_from_slice(args);
    let cli = Cli::try_parse_from(argv)?;
    let mut out = Vec::new();
    run(cli, &mut out)?;
    Ok(String::from_utf8(out)?)
}

#[test]
fn ingest_prints_counts_and_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let out = scholarec(dir.path(), &["ingest", ARXIV, "--graph", "http://arxiv.org"]).unwrap();
    assert!(out.contains("1 records"), "{out}");
    assert!(!out.contains(" 0 quads added"), "{out}");
    let again = scholarec(dir.path(), &["ingest", ARXIV, "--graph", "http://arxiv.org"]).unwrap();
    assert!(again.contains("0 quads added, 0 new resources"), "{again}");
}

#[test]
fn export_then_ingest_round_trips() {
    let first = tempfile::tempdir().unwrap();
    scholarec(first.path(), &["ingest", COMMUNITY]).unwrap();
    scholarec(first.path(), &["ingest", ARXIV, "--graph", "http://arxiv.org"]).unwrap();
    let dump = first.path().join("dump.nq");
    scholarec(first.path(), &["export", "--out", dump.to_str().unwrap()]).unwrap();

    let second = tempfile::tempdir().unwrap();
    scholarec(second.path(), &["ingest", dump.to_str().unwrap()]).unwrap();
    let a = scholarec(first.path(), &["export"]).unwrap();
    let b = scholarec(second.path(), &["export"]).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, std::fs::read_to_string(&dump).unwrap());
}

#[test]
fn store_persists_between_invocations() {
    let dir = tempfile::tempdir().unwrap();
    scholarec(dir.path(), &["ingest", COMMUNITY]).unwrap();
    assert!(dir.path().join("store.nqlog").exists());
    let out = scholarec(dir.path(), &["export"]).unwrap();
    assert!(out.contains("<http://knowledgereefsystems.com/krs/apepe>"));
}

#[test]
fn recommend_news_and_referee() {
    let dir = tempfile::tempdir().unwrap();
    scholarec(dir.path(), &["ingest", COMMUNITY]).unwrap();
    let args = [
        "recommend",
        "news",
        "--seed",
        "http://knowledgereefsystems.com/krs/marko",
        "--concept",
        "semantic web",
        "--now",
        "2008-06-08",
        "--json",
    ];
    let out = scholarec(dir.path(), &args).unwrap();
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let got: Vec<&str> = v.as_array().unwrap().iter().map(|e| e["resource"].as_str().unwrap()).collect();
    assert_eq!(
        got,
        ["http://knowledgereefsystems.com/krs/apepe", "http://knowledgereefsystems.com/krs/article1"]
    );

    scholarec(dir.path(), &["ingest", ARXIV, "--graph", "http://arxiv.org"]).unwrap();
    let article = "urn:scholarec:resource:item:oai%3AarXiv.org%3A0807.2466";
    let table = scholarec(dir.path(), &["recommend", "referee", "--seed", article]).unwrap();
    // The record has no citations, so there is nobody to suggest.
    assert_eq!(table, "");
}

#[test]
fn recommend_named_grammar_prints_a_table() {
    let dir = tempfile::tempdir().unwrap();
    scholarec(dir.path(), &["ingest", ARXIV, "--graph", "http://arxiv.org"]).unwrap();
    let person = "urn:scholarec:resource:person:pepe%20alberto";
    let table = scholarec(dir.path(), &["recommend", "coauthorship", "--seed", person]).unwrap();
    assert_eq!(table.lines().count(), 2, "{table}");
    assert!(table.lines().all(|l| l.trim_start().starts_with(char::is_numeric)));
}

#[test]
fn stats_prints_json_report() {
    let dir = tempfile::tempdir().unwrap();
    scholarec(dir.path(), &["ingest", COMMUNITY]).unwrap();
    let out = scholarec(dir.path(), &["stats", "h-index", "http://knowledgereefsystems.com/krs/apepe"]).unwrap();
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["metric"], "h_index");
    assert_eq!(v["value"], 0.0);
}

#[test]
fn errors_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    assert!(scholarec(dir.path(), &["stats", "pagerank", "http://x.org/a"]).is_err());
    assert!(scholarec(dir.path(), &["stats", "h-index", "http://x.org/missing"]).is_err());
    assert!(scholarec(dir.path(), &["recommend", "nonsense", "--seed", "http://x.org/a"]).is_err());
    assert!(scholarec(dir.path(), &["ingest", "notes.txt"]).is_err());
    assert!(scholarec(dir.path(), &["ingest", COMMUNITY, "--graph", "relative"]).is_err());
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_scholarec");
    let ok = Command::new(bin)
        .env("SCHOLAREC_DATA", dir.path())
        .args(["ingest", COMMUNITY])
        .output()
        .unwrap();
    assert!(ok.status.success());
    assert!(String::from_utf8_lossy(&ok.stdout).contains("quads added"));
    let bad = Command::new(bin)
        .env("SCHOLAREC_DATA", dir.path())
        .args(["stats", "h-index", "http://x.org/missing"])
        .output()
        .unwrap();
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("unknown resource"));
}
