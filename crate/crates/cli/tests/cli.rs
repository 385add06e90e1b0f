use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scilla-mc"))
        .args(args)
        .env_remove("SCILLA_MC_SEED")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

struct Paths {
    contract: PathBuf,
    mutant: PathBuf,
    params: PathBuf,
    alphabet: PathBuf,
}

fn paths() -> Paths {
    Paths {
        contract: corpus("crowdfunding.scilla"),
        mutant: corpus("crowdfunding_claim_mutant.scilla"),
        params: corpus("crowdfunding.params.json"),
        alphabet: corpus("astar.json"),
    }
}

#[test]
fn check_exit_codes() {
    let ps = paths();
    let ok = run(&["check", p(&ps.contract)]);
    assert_eq!(code(&ok), 0, "{}", stderr(&ok));
    assert!(stdout(&ok).is_empty());

    let dup = run(&["check", p(&corpus("duplicate_tags.scilla"))]);
    assert_eq!(code(&dup), 3);
    assert!(stdout(&dup).contains("error[UNIQUE_TAGS]"), "{}", stdout(&dup));

    let json = run(&["check", p(&corpus("duplicate_tags.scilla")), "--format", "json"]);
    let diags: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(diags[0]["rule"], "UNIQUE_TAGS");

    assert_eq!(code(&run(&["check", "/nonexistent/contract.scilla"])), 10);

    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.scilla");
    std::fs::write(&bad, "contract X ( {").unwrap();
    let o = run(&["check", p(&bad)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("bad.scilla:1:"), "{}", stderr(&o));
}

#[test]
fn simulate_reproduces_golden_trace() {
    let ps = paths();
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("trace.json");
    let o = run(&[
        "simulate",
        p(&ps.contract),
        "--params",
        p(&ps.params),
        "--schedule",
        p(&corpus("golden/schedule4.json")),
        "--out",
        p(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let got = std::fs::read(&out).unwrap();
    let want = std::fs::read(corpus("golden/trace4.json")).unwrap();
    assert_eq!(got, want);
}

#[test]
fn simulate_edge_cases() {
    let ps = paths();
    let dir = TempDir::new().unwrap();
    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, "[]").unwrap();
    let o = run(&["simulate", p(&ps.contract), "--params", p(&ps.params), "--schedule", p(&empty)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let trace: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(trace.as_array().unwrap().len(), 1);
    assert_eq!(trace[0]["pre"], trace[0]["post"]);
    assert!(trace[0]["out"].is_null());

    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "[\n  {\"block_num\": 1,\n").unwrap();
    let o = run(&["simulate", p(&ps.contract), "--params", p(&ps.params), "--schedule", p(&broken)]);
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("line "), "{}", stderr(&o));

    let wrong = dir.path().join("wrong.json");
    std::fs::write(&wrong, r#"[{"block_num": 1, "msg": {"val": "x"}}]"#).unwrap();
    let o = run(&["simulate", p(&ps.contract), "--params", p(&ps.params), "--schedule", p(&wrong)]);
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("schedule[0].msg.val"), "{}", stderr(&o));
}

#[test]
fn simulate_warns_about_absorbed_funds() {
    let ps = paths();
    let dir = TempDir::new().unwrap();
    // a repeated donation is refused with a message but the funds stay
    let sc = dir.path().join("sc.json");
    std::fs::write(
        &sc,
        r#"[{"block_num": 1, "msg": {"val": 5, "sender": "A1", "to": "C", "tag": "donate"}},
            {"block_num": 1, "msg": {"val": 5, "sender": "A1", "to": "C", "tag": "donate"}}]"#,
    )
    .unwrap();
    let o = run(&["simulate", p(&ps.contract), "--params", p(&ps.params), "--schedule", p(&sc)]);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("step 1: warning[ABSORBED_FUNDS]"), "{}", stderr(&o));
}

#[test]
fn verify_balance_backed_and_replay_witness() {
    let ps = paths();
    let dir = TempDir::new().unwrap();
    let common = ["--params", p(&ps.params), "--prop", "balance_backed", "--alphabet", p(&ps.alphabet), "--depth", "3"];

    let mut args = vec!["verify", p(&ps.contract)];
    args.extend(common);
    let o = run(&args);
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).starts_with("holds: balance_backed"));

    let witness = dir.path().join("w.json");
    let mut args = vec!["verify", p(&ps.mutant)];
    args.extend(common);
    args.extend(["--out", p(&witness), "--format", "json"]);
    let o = run(&args);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    let verdict: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(verdict["verdict"], "violated");
    let w: serde_json::Value = serde_json::from_slice(&std::fs::read(&witness).unwrap()).unwrap();
    let failing = w["failing_index"].as_u64().unwrap() as usize;

    // replaying the witness reaches the same failing step
    let o = run(&["simulate", p(&ps.mutant), "--params", p(&ps.params), "--schedule", p(&witness)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let trace: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(trace, w["trace"]);
    let post = &trace[failing]["post"];
    let backed: u64 = post["fields"]["backers"]["v"].as_array().unwrap().iter().map(|e| e[1].as_u64().unwrap()).sum();
    assert!(backed > post["balance"].as_u64().unwrap());
}

#[test]
fn verify_temporal_properties() {
    let ps = paths();
    let o = run(&["verify", p(&ps.contract), "--params", p(&ps.params), "--prop", "donation_preserved", "--backer", "A1", "--amount", "5", "--depth", "3"]);
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("premise states"));

    let o = run(&["verify", p(&ps.contract), "--params", p(&ps.params), "--prop", "can_claim_back", "--depth", "2"]);
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
}

#[test]
fn verify_predicate_errors() {
    let ps = paths();
    let dir = TempDir::new().unwrap();
    let w = dir.path().join("w.json");
    let base = ["verify", p(&ps.contract), "--params", p(&ps.params), "--depth", "1", "--out", p(&w)];
    let with = |extra: &[&str]| {
        let mut a = base.to_vec();
        a.extend(extra);
        run(&a)
    };
    assert_eq!(code(&with(&["--prop", "liveness"])), 6);
    assert_eq!(code(&with(&["--prop", "no_claims_from"])), 6);
    let o = with(&["--expr", "balance <="]);
    assert_eq!(code(&o), 6);
    assert!(stderr(&o).contains("offset"), "{}", stderr(&o));
    assert_eq!(code(&with(&["--expr", "balance && funded"])), 6);
    assert_eq!(code(&with(&["--expr", "balance < 5"])), 1);
    assert!(w.exists());
    assert_eq!(code(&with(&["--expr", "size(backers) <= 1"])), 0);
}

#[test]
fn verify_inductive_is_seeded_and_deterministic() {
    let ps = paths();
    let dir = TempDir::new().unwrap();
    let w = dir.path().join("w.json");
    let args = ["verify", p(&ps.mutant), "--params", p(&ps.params), "--prop", "balance_backed", "--inductive", "--samples", "200", "--format", "json", "--out", p(&w)];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 1, "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);

    let env_seeded = Command::new(env!("CARGO_BIN_EXE_scilla-mc"))
        .args(args)
        .env("SCILLA_MC_SEED", "42")
        .output()
        .unwrap();
    let explicit = run(&[&args[..], &["--seed", "42"]].concat());
    assert_eq!(env_seeded.stdout, explicit.stdout);
    assert!(stdout(&explicit).contains("seed 42"));

    let o = run(&["verify", p(&ps.contract), "--params", p(&ps.params), "--prop", "balance_backed", "--inductive", "--samples", "200"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));

    let empty = dir.path().join("empty_alphabet.json");
    std::fs::write(&empty, r#"{"bstates": [], "messages": []}"#).unwrap();
    let o = run(&["verify", p(&ps.contract), "--params", p(&ps.params), "--prop", "balance_backed", "--alphabet", p(&empty)]);
    assert_eq!(code(&o), 5);
}

#[test]
fn network_call_and_return() {
    let dir = TempDir::new().unwrap();
    let params = dir.path().join("caller.json");
    std::fs::write(&params, r#"{"owner": "O", "server": "Server"}"#).unwrap();
    let msg = dir.path().join("msg.json");
    std::fs::write(&msg, r#"{"val": 10, "sender": "O", "to": "Caller", "tag": "call"}"#).unwrap();
    let caller = format!("Caller,{},{}", p(&corpus("caller.scilla")), p(&params));
    let server = format!("Server,{}", p(&corpus("server.scilla")));
    let o = run(&["network", "--node", &caller, "--node", &server, "--account", "O", "--message", p(&msg)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["outcome"]["kind"], "completed");
    assert_eq!(report["delivered"][0]["to"], "O");
    assert_eq!(report["delivered"][0]["body"]["value"], 10);

    let me = dir.path().join("me.json");
    std::fs::write(&me, r#"{"me": "S"}"#).unwrap();
    let kick = dir.path().join("kick.json");
    std::fs::write(&kick, r#"{"val": 0, "sender": "S", "to": "S", "tag": "loop"}"#).unwrap();
    let node = format!("S,{},{}", p(&corpus("pingpong.scilla")), p(&me));
    let o = run(&["network", "--node", &node, "--message", p(&kick), "--budget", "5"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["outcome"]["kind"], "budget_exhausted");
    assert_eq!(report["steps"].as_array().unwrap().len(), 5);

    let stray = dir.path().join("stray.json");
    std::fs::write(&stray, r#"{"val": 0, "sender": "S", "to": "Nobody", "tag": "loop"}"#).unwrap();
    assert_eq!(code(&run(&["network", "--node", &node, "--message", p(&stray)])), 4);
}
