use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qcn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn gen_writes_a_target() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.qcn.json");
    let o = qcn(&[
        "gen",
        "--calculus",
        "ia",
        "--n",
        "20",
        "--case",
        "1",
        "--seed",
        "7",
        "-o",
        p(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o.stderr));
    let net = qcn_core::network::Qcn::from_json(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(net.n(), 20);
    assert!(net.is_atomic());
}

#[test]
fn pc_reports_the_emptied_edge() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("inconsistent.qcn.json");
    fs::write(
        &bad,
        r#"{"calculus": "point", "n": 3, "constraints": [
            {"i": 0, "j": 1, "rels": ["<"]},
            {"i": 1, "j": 2, "rels": ["<"]},
            {"i": 0, "j": 2, "rels": [">"]}]}"#,
    )
    .unwrap();
    let o = qcn(&["pc", "-i", p(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    let err = text(&o.stderr);
    assert!(
        err.contains("inconsistent") && err.contains("edge"),
        "{err}"
    );
}

#[test]
fn pc_on_the_soccer_network() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("closed.qcn.json");
    let input = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/soccer.qcn.json");
    let o = qcn(&["pc", "-i", input, "-o", p(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o.stderr));
    let stdout = text(&o.stdout);
    assert!(stdout.contains("0-1: removed {E, Si}"), "{stdout}");
    assert!(out.exists());
}

#[test]
fn learn_prints_stats_and_writes_the_network() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t.qcn.json");
    let learned = dir.path().join("learned.qcn.json");
    assert!(qcn(&["gen", "--n", "10", "--seed", "3", "-o", p(&t)])
        .status
        .success());
    let o = qcn(&[
        "learn",
        "--target",
        p(&t),
        "--method",
        "pc",
        "--heuristic",
        "cardinality",
        "--seed",
        "3",
        "-o",
        p(&learned),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o.stderr));
    let stats: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(stats["converged"], true);
    assert_eq!(stats["matches_target"], true);
    assert!(stats["queries"].as_u64().unwrap() > 0);
    assert_eq!(
        fs::read_to_string(&learned).unwrap(),
        fs::read_to_string(&t).unwrap()
    );
}

#[test]
fn learn_with_mistakes_recovers() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t.qcn.json");
    assert!(qcn(&["gen", "--n", "8", "--seed", "1", "-o", p(&t)])
        .status
        .success());
    let o = qcn(&[
        "learn",
        "--target",
        p(&t),
        "--p-mistake",
        "0.02",
        "--p-yes",
        "0.5",
        "--seed",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o.stderr));
    let stats: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(stats["converged"], true);
}

#[test]
fn bench_twice_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let m = dir.path().join("manifest.json");
    let args = |out: &Path| {
        vec![
            "bench".to_string(),
            "--cases".into(),
            "1,2".into(),
            "--n".into(),
            "10".into(),
            "--p-yes".into(),
            "0,0.5".into(),
            "--methods".into(),
            "naive,conacq2,pc,pc-card".into(),
            "--runs".into(),
            "2".into(),
            "-o".into(),
            p(out).into(),
            "--manifest".into(),
            p(&m).into(),
        ]
    };
    for out in [&a, &b] {
        let argv = args(out);
        let argv: Vec<&str> = argv.iter().map(String::as_str).collect();
        let o = qcn(&argv);
        assert_eq!(o.status.code(), Some(0), "{}", text(&o.stderr));
    }
    let (ca, cb) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(ca, cb);
    let csv = text(&ca);
    assert!(csv.starts_with(qcn_core::harness::CSV_HEADER));
    assert_eq!(csv.lines().count(), 1 + 2 * 2 * 4 * 2);
    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(&m).unwrap()).unwrap();
    assert_eq!(manifest["spec"]["n"], 10);
}

#[test]
fn bench_rejects_ppc_outside_case_two() {
    let o = qcn(&["bench", "--cases", "1", "--methods", "ppc", "--n", "5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(text(&o.stderr).contains("case 2"));
}

#[test]
fn td_verify_prints_the_table() {
    let o = qcn(&[
        "td-verify",
        "--calculus",
        "point",
        "--n",
        "3",
        "--syntactic",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o.stderr));
    let out = text(&o.stdout);
    assert!(out.starts_with("class,n,p,tdim,formula,match"));
    assert!(out.contains("complete,3,3,3,3,true"), "{out}");
    assert!(out.contains("incomplete,3,3,6,6,true"));
    assert!(out.contains("all,3,3,9,9,true"));
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(qcn(&[]).status.code(), Some(1));
    assert_eq!(qcn(&["gen", "--case", "7"]).status.code(), Some(1));
    assert_eq!(
        qcn(&["pc", "-i", "/nonexistent.qcn.json"]).status.code(),
        Some(1)
    );
    assert_eq!(
        qcn(&["learn", "--target", "x", "--method", "magic"])
            .status
            .code(),
        Some(1)
    );
    let help = qcn(&["bench", "--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(text(&help.stdout).contains("--p-mistake"));
}

#[test]
fn serve_answers_http() {
    use std::io::{BufRead, BufReader, Read, Write};
    use std::net::TcpStream;
    use std::process::Stdio;

    let mut child = Command::new(env!("CARGO_BIN_EXE_qcn"))
        .args(["serve", "--port", "0", "--cors"])
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(child.stderr.take().unwrap())
        .read_line(&mut line)
        .unwrap();
    let addr = line.trim().rsplit("http://").next().unwrap().to_string();
    let body = r#"{"names": ["A", "B", "C"]}"#;
    let mut s = TcpStream::connect(&addr).unwrap();
    write!(
        s,
        "POST /sessions HTTP/1.1\r\nHost: {addr}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
        body.len()
    )
    .unwrap();
    let mut reply = String::new();
    s.read_to_string(&mut reply).unwrap();
    child.kill().unwrap();
    child.wait().unwrap();
    assert!(reply.starts_with("HTTP/1.1 201"), "{reply}");
    assert!(reply.contains("awaiting_answer"));
}
