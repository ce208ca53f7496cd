use std::io::Write;
use std::process::{Command, Output, Stdio};

use cutlink::{kappa_bruteforce, Graph, ReductionKind, VertexSet};
use serde_json::Value;

fn cutlink(args: &[&str]) -> Output {
    cutlink_with_stdin(args, "")
}

fn cutlink_with_stdin(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_cutlink"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn lines(out: &Output) -> Vec<Value> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).expect("every line is JSON"))
        .collect()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn set(ids: &[usize]) -> VertexSet {
    ids.iter().copied().collect()
}

#[test]
fn kappa_on_five_cycle() {
    let c5 = Graph::cycle(5).to_graph6();
    let out = cutlink(&["kappa", "-g", &c5, "-s", "0", "-t", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = &lines(&out)[0];
    let oracle = kappa_bruteforce(&Graph::cycle(5), set(&[0]), set(&[2])).unwrap();
    assert_eq!(v["kappa"], oracle.value);
    assert_eq!(v["kappa"], 1);
    assert_eq!(v["witness"]["mask"], oracle.witness.to_hex());
    assert_eq!(v["s"]["ids"], serde_json::json!([0]));
}

#[test]
fn overlapping_sets_are_rejected_before_reading_a_graph() {
    let out = cutlink(&["kappa", "-s", "0,1", "-t", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("overlapping"), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
}

#[test]
fn usage_errors_name_the_flag() {
    let out = cutlink(&["kappa", "-g", "Dhc", "-s", "0,x", "-t", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("-s"), "{}", stderr(&out));

    let out = cutlink(&["kappa", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("--frobnicate"));

    let out = cutlink(&["kappa", "-g", "D?", "-s", "0", "-t", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("graph6"));

    let out = cutlink(&["sweep", "--property", "no-such-thing", "--exhaustive", "3"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_exits_zero() {
    let out = cutlink(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("sweep"));
}

#[test]
fn graph_from_file_and_stdin() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.g6");
    let c6 = Graph::cycle(6).to_graph6();
    std::fs::write(&path, format!("# a comment\n{c6}\n")).unwrap();
    let at = format!("@{}", path.display());
    let from_file = cutlink(&["cutrank", "-g", &at, "-x", "0,1,2"]);
    let from_stdin = cutlink_with_stdin(&["cutrank", "-x", "0,1,2"], &c6);
    assert_eq!(from_file.status.code(), Some(0), "{}", stderr(&from_file));
    assert_eq!(from_file.stdout, from_stdin.stdout);
    assert_eq!(lines(&from_file)[0]["cut_rank"], 2);
}

#[test]
fn find_vertex_with_one_free_vertex() {
    // Vertex 1 is isolated, so both connectivities are 0; vertex 2 is free.
    let g = Graph::from_edges(3, &[(0, 2)]).unwrap();
    let g6 = g.to_graph6();
    let out = cutlink(&["find-vertex", "-g", &g6, "-q", "0", "-r", "1", "-s", "0", "-t", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = &lines(&out)[0];
    assert_eq!(v["vertex"], 2);
    let (s, t) = (set(&[0]), set(&[1]));
    let expected: Vec<&str> = ReductionKind::ALL
        .into_iter()
        .filter(|&kind| kappa_bruteforce(&g.reduce(2, kind).unwrap(), s, t).unwrap().value == 0)
        .map(ReductionKind::name)
        .collect();
    assert_eq!(v["options"], serde_json::json!(expected));
    assert_eq!(v["k"], 0);
    assert_eq!(v["l"], 0);
}

#[test]
fn options_chain_reduce_and_flexible() {
    let c5 = Graph::cycle(5).to_graph6();
    let out = cutlink(&["options", "-g", &c5, "-q", "0", "-r", "2", "-v", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(lines(&out)[0]["options"].as_array().unwrap().len() >= 2);

    let out = cutlink(&["flexible", "-g", &c5, "-s", "0", "-t", "2", "-v", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(lines(&out)[0]["flexible"].is_boolean());

    let p5 = Graph::path(5).to_graph6();
    let out = cutlink(&["chain", "-g", &p5, "-s", "0", "-t", "4"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let chain = &lines(&out)[0];
    let order = chain["order"].as_array().unwrap();
    assert_eq!(order.len(), chain["sets"].as_array().unwrap().len());

    let out = cutlink(&["reduce", "-g", &c5, "-q", "0", "-r", "2", "-s", "1", "-t", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let red = &lines(&out)[0];
    let vertices = VertexSet::from_hex(red["vertices"]["mask"].as_str().unwrap()).unwrap();
    let h = Graph::from_graph6_on(red["graph6"].as_str().unwrap(), vertices).unwrap();
    assert_eq!(kappa_bruteforce(&h, set(&[0]), set(&[2])).unwrap().value, red["k"]);
    assert_eq!(kappa_bruteforce(&h, set(&[1]), set(&[3])).unwrap().value, red["l"]);

    // A terminal vertex is not free.
    let out = cutlink(&["options", "-g", &c5, "-q", "0", "-r", "2", "-v", "0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sweep_subeq_exhaustive_five() {
    let out = cutlink(&["sweep", "--property", "subeq", "--exhaustive", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let body = lines(&out);
    assert_eq!(body.len(), 1);
    assert_eq!(body[0]["summary"]["violations"], 0);
    assert_eq!(body[0]["summary"]["passed"], true);
}

#[test]
fn sweep_is_deterministic_and_writes_reports() {
    let args = ["sweep", "--property", "joint-option-nonempty", "--random", "8,mixed,50", "--seed", "9", "--cap", "16"];
    let a = cutlink(&args);
    let b = cutlink(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.jsonl");
    let mut with_out = args.to_vec();
    let p = path.display().to_string();
    with_out.extend(["--out", &p]);
    let c = cutlink(&with_out);
    assert_eq!(c.status.code(), Some(0));
    assert_eq!(std::fs::read(&path).unwrap(), a.stdout);
}

#[test]
fn sweep_rejects_two_sources() {
    let out = cutlink(&["sweep", "--property", "subeq", "--exhaustive", "3", "--random", "5,0.5,3"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn tightness_reports_json() {
    let out = cutlink(&["tightness", "-k", "0", "-l", "1", "--budget", "60", "--seed", "4"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = &lines(&out)[0];
    assert_eq!(v["bound"], 3);
    assert!(v["violations"].as_array().unwrap().is_empty());
}
