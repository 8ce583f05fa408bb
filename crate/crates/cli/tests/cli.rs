use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn rslab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rslab")).args(args).output().expect("run rslab")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn path(dir: &tempfile::TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

#[test]
fn classical_simplex_is_an_equality() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(&dir, "r.json");
    let o = rslab(&["verify", "difference-body", "--variant", "classical", "--body", "simplex:2", "--density", "lebesgue", "--seed", "7", "--out", &out]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_json(Path::new(&out));
    assert_eq!(r["verdict"], "equality");
    assert_eq!(r["lhs"]["value"], 6.0 * 0.5);
    assert!(r["bodies"][0]["hash"].is_string());
}

#[test]
fn ring_counterexample_is_expected() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(&dir, "r.json");
    let o = rslab(&["counterexample", "ring", "--eps", "1e-5", "--out", &out]);
    assert_eq!(code(&o), 0);
    let r = read_json(Path::new(&out));
    assert_eq!(r["verdict"], "violated");
    assert_eq!(r["expected"], "violated");
}

#[test]
fn projection_outside_body_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let body = path(&dir, "kalpha.json");
    let t = 1.4f64.tan();
    let json = serde_json::json!({ "dim": 2, "form": "vpolytope", "vertices": [[1.0, t + 1.0], [1.0, t - 1.0], [-1.0, -t + 1.0], [-1.0, -t - 1.0]] });
    std::fs::write(&body, json.to_string()).unwrap();
    let arg = format!("@{body}");
    let o = rslab(&["verify", "section-projection", "--variant", "product_mixed", "--body", &arg, "--density", "gaussian|gaussian:split=1", "--subspace", "1", "--seed", "7"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("projection"));
}

#[test]
fn input_errors_exit_with_two() {
    let o = rslab(&["verify", "difference-body", "--variant", "radial", "--body", "simplex:2"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("--seed"));
    let o = rslab(&["verify", "difference-body", "--variant", "classical", "--body", "@/no/such/k.json"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("/no/such/k.json"));
    let o = rslab(&["verify", "difference-body", "--variant", "classical", "--body", "simplex:2", "--out", "r.json", "--format", "csv"]);
    assert_eq!(code(&o), 2);
    let o = rslab(&["verify", "difference-body", "--variant", "sideways", "--body", "simplex:2"]);
    assert_eq!(code(&o), 2);
    let o = rslab(&["suite", "nonsense"]);
    assert_eq!(code(&o), 2);
    let o = rslab(&["frobnicate"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn failed_audit_exits_with_three() {
    let o = rslab(&["verify", "difference-body", "--variant", "radial", "--body", "ball:2:1", "--density", "ring:eps=0.1,delta=0.2", "--seed", "1", "--format", "json"]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["verdict"], "hypothesis_failed");
}

#[test]
fn json_reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let strip = |p: &str| {
        let mut v = read_json(Path::new(p));
        v.as_object_mut().unwrap().remove("generated_at");
        serde_json::to_string(&v).unwrap()
    };
    let a = path(&dir, "a.json");
    let b = path(&dir, "b.json");
    for out in [&a, &b] {
        let o = rslab(&["verify", "shifted", "--variant", "rad_decreasing", "--body", "simplex:2", "--density", "gaussian", "--omega", "3,0", "--samples", "20000", "--seed", "5", "--out", out]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (ja, jb) = (strip(&a), strip(&b));
    assert_eq!(ja.replace("a.json", "X"), jb.replace("b.json", "X"));
}

#[test]
fn exported_bodies_reload_unchanged() {
    let dir = tempfile::tempdir().unwrap();
    let first = path(&dir, "k.json");
    let second = path(&dir, "k2.json");
    assert_eq!(code(&rslab(&["export", "--body", "random:3:7:4", "--out", &first])), 0);
    assert_eq!(code(&rslab(&["export", "--body", &format!("@{first}"), "--out", &second])), 0);
    assert_eq!(std::fs::read_to_string(&first).unwrap(), std::fs::read_to_string(&second).unwrap());
    let f1 = path(&dir, "f.json");
    let f2 = path(&dir, "f2.json");
    assert_eq!(code(&rslab(&["export", "--fn", "cone:2:4:cube:2:1", "--out", &f1])), 0);
    assert_eq!(code(&rslab(&["export", "--fn", &format!("@{f1}"), "--out", &f2])), 0);
    assert_eq!(std::fs::read_to_string(&f1).unwrap(), std::fs::read_to_string(&f2).unwrap());
}

#[test]
fn sweeps_write_csv_and_plot_script() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(&dir, "s.csv");
    let plot = path(&dir, "s.py");
    let o = rslab(&["sweep", "lemma", "--density", "exp-norm", "--param", "x=0.5:2:4", "--n", "2", "--m", "1", "--out", &out, "--plot", &plot]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# generated_at="));
    assert_eq!(lines[1], "inequality,variant,params,lhs,sigma_lhs,rhs,sigma_rhs,ratio,verdict,pass");
    assert_eq!(lines.len(), 6);
    assert!(lines[2].contains("x=0.5;"));
    assert!(std::fs::read_to_string(&plot).unwrap().contains("matplotlib"));
}

#[test]
fn constants_suite_needs_no_seed() {
    let o = rslab(&["suite", "constants"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().skip(2).all(|l| l.ends_with(",true")));
}

#[test]
fn help_documents_the_shorthand() {
    let o = rslab(&["--help"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("simplex:<n>") && text.contains("@file.json") && text.contains("RSLAB_THREADS"));
}
