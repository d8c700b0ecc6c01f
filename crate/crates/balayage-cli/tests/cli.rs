//! End-to-end runs of the `balayage` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_balayage"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("the binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("balayage-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

fn json(o: &Output) -> serde_json::Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(o)).unwrap()
}

const CHAIN: &str = r#"{
  "sites": ["a", "b", "c"],
  "entries": [["a", "b", 0.5], ["b", "a", 0.5], ["b", "c", 0.5]],
  "lambda": ["a", "b"],
  "c": {"a": 1.0, "b": 1.0}
}"#;

#[test]
fn identical_configs_give_identical_bytes() {
    let p = scratch("chain.json", CHAIN);
    let p = p.to_str().unwrap();
    for cmd in ["clean", "balayage", "battery", "verify"] {
        let a = run(&[cmd, "--instance", p, "--seed", "4"]);
        let b = run(&[cmd, "--instance", p, "--seed", "4"]);
        assert!(a.status.success(), "{cmd}: {}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "{cmd}");
    }
}

#[test]
fn outputs_embed_digest_and_seed() {
    let p = scratch("chain2.json", CHAIN);
    let csv = stdout(&run(&["clean", "--instance", p.to_str().unwrap(), "--steps", "40", "--seed", "9"]));
    let mut lines = csv.lines();
    let digest = lines.next().unwrap().strip_prefix("# config_digest=").unwrap();
    assert_eq!(digest.len(), 64);
    assert_eq!(lines.next(), Some("# seed=9"));
    // Round-robin sweeps on a contraction drive the deviation to zero.
    let last = csv.lines().last().unwrap();
    let deviation: f64 = last.split(',').nth(2).unwrap().parse().unwrap();
    assert!(deviation < 1e-6, "{last}");

    let v = json(&run(&["balayage", "--instance", p.to_str().unwrap(), "--seed", "9"]));
    assert_eq!(v["seed"], 9);
    assert_eq!(v["config_digest"].as_str().unwrap().len(), 64);
    assert_ne!(v["config_digest"].as_str().unwrap(), digest);
}

#[test]
fn balayage_of_the_chain_is_exact() {
    let p = scratch("chain3.json", CHAIN);
    let v = json(&run(&["balayage", "--instance", p.to_str().unwrap(), "--tol", "1e-13"]));
    // From a the dirt reaches c with probability 1/3, from b with 2/3
    // (the rest is lost through the substochastic rows).
    for e in v["result"]["entries"].as_array().unwrap() {
        let (r, c, x) = (e[0].as_str().unwrap(), e[1].as_str().unwrap(), e[2].as_f64().unwrap());
        assert_eq!(c, "c");
        let want = if r == "a" { 1.0 / 3.0 } else if r == "b" { 2.0 / 3.0 } else { 1.0 };
        assert!((x - want).abs() < 1e-12, "{r}: {x}");
    }
    assert!(v["result"]["tail_bound"].as_f64().unwrap() <= 1e-13);
}

#[test]
fn contract_errors_exit_with_2() {
    let o = run(&["battery", "--gallery", "no_such_family"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown gallery family"));
    let o = run(&["examples", "build", "star_example", "--param", "bogus=1"]);
    assert_eq!(o.status.code(), Some(2));
    let p = scratch("chain4.json", CHAIN);
    let o = run(&["clean", "--instance", p.to_str().unwrap(), "--lambda", "a,zz"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["clean", "--instance", p.to_str().unwrap(), "--schedule", "spiral"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["classify", "--instance", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn non_convergence_exits_with_3() {
    let p = scratch(
        "loop.json",
        r#"{"sites": ["a", "b"], "entries": [["a", "a", 1.0], ["a", "b", 0.5]], "lambda": ["a"], "c": {"a": 1.0}}"#,
    );
    let o = run(&["balayage", "--instance", p.to_str().unwrap(), "--max-terms", "200"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    // `clean` still emits its trace, without the deviation.
    let o = run(&["clean", "--instance", p.to_str().unwrap(), "--max-terms", "200", "--steps", "3"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("# balayage not certified"));
}

#[test]
fn config_file_overrides_flags() {
    let p = scratch("chain5.json", CHAIN);
    let cfg = scratch("cfg.json", r#"{"steps": 2, "seed": 11}"#);
    let o = run(&["clean", "--instance", p.to_str().unwrap(), "--steps", "50", "--config", cfg.to_str().unwrap()]);
    let text = stdout(&o);
    assert!(text.contains("# seed=11"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 3, "header plus two steps");
}

#[test]
fn gallery_round_trip_and_battery() {
    let o = run(&["examples", "build", "star_example", "--param", "m=4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("config_digest="));
    let p = scratch("star.json", &text);
    let v = json(&run(&["battery", "--instance", p.to_str().unwrap()]));
    let r = &v["result"];
    assert_eq!(r["all_agree"], true);
    assert_eq!(r["conditions"].as_array().unwrap().len(), 7);
    // The hypothesis constant of the star is the number of leaves.
    assert_eq!(r["hypothesis_constant"].as_f64().unwrap(), 4.0);

    let v = json(&run(&["examples", "list"]));
    assert_eq!(v["result"].as_array().unwrap().len(), 9);
}

#[test]
fn classify_figure_cloud() {
    let v = json(&run(&["classify", "--gallery", "cloud_S1_not_R"]));
    let r = &v["result"];
    assert_eq!(r["in_s"], true);
    assert_eq!(r["s_value"], 1.0);
    assert_eq!(r["in_r"], false);
    assert_eq!(r["r_witness"], serde_json::json!(["x", "y"]));
}

#[test]
fn verify_selects_by_name() {
    let v = json(&run(&["verify", "--gallery", "star_example", "--name", "collapse", "--samples", "2"]));
    let r = &v["result"];
    assert_eq!(r["identities"].as_array().unwrap().len(), 2);
    assert_eq!(r["cloud_identities"].as_array().unwrap().len(), 2);
    assert_eq!(r["inequalities"].as_array().unwrap().len(), 0);
    assert_eq!(r["all_pass"], true);
    let o = run(&["verify", "--gallery", "star_example", "--name", "nothing"]);
    assert_eq!(o.status.code(), Some(2));
}
