use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;
use trop_aspt::cluster::{signs_of, AmbientPoint, Witness};
use trop_aspt::linalg::parse_q;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_trop-aspt"));
    c.env_remove("TROP_ASPT_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn trop-aspt")
}

fn run_with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn trop-aspt");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn enumerate_text_line() {
    let o = run(&["enumerate", "-n", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "ASPTs: 35 (dim3:1, dim4:13, dim5:21); ASDO:12 CSDO:4\n");
}

#[test]
fn enumerate_json_has_stable_keys() {
    let a = run(&["enumerate", "-n", "3", "--format", "json"]);
    let b = run(&["enumerate", "-n", "3", "--format", "json"]);
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let at = |k: &str| text.find(&format!("\"{k}\"")).unwrap();
    let keys = ["n", "aspts", "by_dim", "shape_classes", "cspts", "asdo", "csdo"];
    assert!(keys.windows(2).all(|w| at(w[0]) < at(w[1])));
    let v = json(&a);
    assert_eq!(v["aspts"], 35);
    assert_eq!(v["by_dim"]["4"], 13);
    assert_eq!(v["shape_classes"], 7);
    assert_eq!(v["cspts"], 23);
}

#[test]
fn capacity_and_input_errors_exit_2() {
    assert_eq!(run(&["enumerate", "-n", "6"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "-n", "5"]).status.code(), Some(2));
    assert_eq!(run(&["enumerate", "--format", "dot"]).status.code(), Some(2));
    assert_eq!(run(&["export", "--subfan", "1,3,2,1~,2~,3~"]).status.code(), Some(2));
    assert_eq!(run(&["export", "--subfan", "1,2,x"]).status.code(), Some(2));
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    let o = bin().args(["enumerate"]).env("TROP_ASPT_THREADS", "zero").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_3() {
    let o = run(&["export", "-n", "3", "--output", "/nonexistent-dir/fan.json"]);
    assert_eq!(o.status.code(), Some(3));
}

fn dot_counts(text: &str) -> (usize, usize) {
    let nodes = text.lines().filter(|l| l.contains("[label=")).count();
    let edges = text.lines().filter(|l| l.contains(" -- ")).count();
    (nodes, edges)
}

#[test]
fn dot_export_of_the_facet_graph() {
    let o = run(&["export", "-n", "3", "--format", "dot"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(dot_counts(&stdout(&o)), (13, 21));
    let hex = run(&["export", "-n", "3", "--format", "dot", "--subfan", "1,2,3,1~,2~,3~"]);
    assert_eq!(dot_counts(&stdout(&hex)), (6, 6));
}

fn check_fan_schema(v: &Value) {
    let n = v["n"].as_u64().unwrap() as usize;
    let d = v["D"].as_array().unwrap();
    assert_eq!(d.len(), n * n);
    let cones = v["cones"].as_array().unwrap();
    for c in cones {
        let tree = c["tree"].as_str().unwrap();
        assert!(!tree.is_empty() && tree.chars().all(|ch| ch.is_ascii_hexdigit()));
        let dim = c["dim"].as_u64().unwrap() as usize;
        let rays = c["rays"].as_array().unwrap();
        assert_eq!(rays.len(), dim - n);
        for r in rays.iter().chain([&c["interior"]]) {
            let r = r.as_array().unwrap();
            assert_eq!(r.len(), d.len());
            assert!(r.iter().all(|x| parse_q(x.as_str().unwrap()).is_some()));
        }
    }
    for f in v["facets"].as_array().unwrap() {
        let f = f.as_array().unwrap();
        assert_eq!(f.len(), 3);
        let (cone, face) = (f[0].as_u64().unwrap() as usize, f[1].as_u64().unwrap() as usize);
        assert_eq!(cones[cone]["dim"].as_u64().unwrap(), cones[face]["dim"].as_u64().unwrap() + 1);
    }
}

#[test]
fn json_export_matches_schema() {
    let v = json(&run(&["export", "-n", "3", "--format", "json"]));
    check_fan_schema(&v);
    assert_eq!(v["cones"].as_array().unwrap().len(), 35);
    assert_eq!(v["facets"].as_array().unwrap().len(), 55);

    let hex = json(&run(&["export", "-n", "3", "--subfan", "1,2,3,1~,2~,3~"]));
    check_fan_schema(&hex);
    let dims: Vec<u64> = hex["cones"].as_array().unwrap().iter().map(|c| c["dim"].as_u64().unwrap()).collect();
    assert_eq!(dims.iter().filter(|&&d| d == 4).count(), 6);
    assert_eq!(dims.iter().filter(|&&d| d == 5).count(), 6);
}

#[test]
fn output_file_matches_stdout() {
    let path = std::env::temp_dir().join(format!("trop-aspt-{}.dot", std::process::id()));
    let o = run(&["export", "-n", "3", "--format", "dot", "--output", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(written, stdout(&run(&["export", "-n", "3", "--format", "dot"])));
}

fn verdicts(o: &Output) -> Vec<String> {
    stdout(o)
        .lines()
        .filter(|l| l.starts_with("PASS ") || l.starts_with("FAIL "))
        .map(|l| l.split(':').next().unwrap().to_string())
        .collect()
}

#[test]
fn verify_verdicts_do_not_depend_on_seed_or_threads() {
    let a = run(&["verify", "-n", "3", "--seed", "7"]);
    let b = run(&["verify", "-n", "3", "--seed", "8"]);
    assert_eq!(verdicts(&a), verdicts(&b));
    assert_eq!(a.status.code(), b.status.code());
    for name in ["purity", "injectivity", "facets", "prevariety", "relations", "positivity", "subfan posets"] {
        assert!(verdicts(&a).contains(&format!("PASS {name}")), "{name}");
    }
    // The sampled census disagrees with the closed formula; the run must
    // say so, dump the certificate and exit 1.
    assert_eq!(a.status.code(), Some(1));
    assert!(stdout(&a).contains("certificate for sign patterns:"));

    let single = bin().args(["verify", "-n", "3"]).env("TROP_ASPT_THREADS", "1").output().unwrap();
    assert_eq!(single.stdout, a.stdout);
}

#[test]
fn verify_json_report() {
    let v = json(&run(&["verify", "-n", "3", "--format", "json"]));
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.len() >= 14);
    for c in checks {
        assert_eq!(c["pass"].as_bool().unwrap(), c.get("certificate").is_none());
    }
}

#[test]
fn member_recovers_interior_points() {
    let fan = json(&run(&["export", "-n", "3"]));
    for (i, c) in fan["cones"].as_array().unwrap().iter().enumerate().step_by(7) {
        let o = run_with_stdin(&["member", "-n", "3", "--format", "json"], &c["interior"].to_string());
        assert_eq!(o.status.code(), Some(0));
        let r = json(&o);
        assert_eq!(r["cone"], i);
        assert_eq!(r["tree"], c["tree"]);
        // A point inside a face lies on the boundary of every larger cone
        // containing that face.
        let dim = c["dim"].as_u64().unwrap();
        for b in r["boundary_of"].as_array().unwrap() {
            assert!(fan["cones"][b.as_u64().unwrap() as usize]["dim"].as_u64().unwrap() > dim);
        }
    }
    let outside = run_with_stdin(&["member", "-n", "3"], "[1,0,0,0,0,0,0,0,0]");
    assert_eq!(outside.status.code(), Some(0));
    assert_eq!(stdout(&outside), "outside the fan\n");
    assert_eq!(run_with_stdin(&["member", "-n", "3"], "[\"1/0\"]").status.code(), Some(2));
    assert_eq!(run_with_stdin(&["member", "-n", "3"], "not json").status.code(), Some(2));
    assert_eq!(run(&["member", "--input", "/nonexistent-file.json"]).status.code(), Some(3));
}

#[test]
fn sign_witnesses_reproduce_their_patterns() {
    let v = json(&run(&["signs", "-n", "3", "--format", "json"]));
    let patterns = v["patterns"].as_array().unwrap();
    assert!(!patterns.is_empty());
    let subfans = v["subfans"].as_array().unwrap().len();
    for p in patterns {
        let rows: Vec<Vec<_>> = p["witness"]["z"]
            .as_array()
            .unwrap()
            .iter()
            .map(|r| r.as_array().unwrap().iter().map(|x| parse_q(x.as_str().unwrap()).unwrap()).collect())
            .collect();
        let w = Witness {
            z: AmbientPoint::new(rows[0].clone(), rows[1].clone()).unwrap(),
            epsilon: p["witness"]["epsilon"].as_i64().unwrap() as i8,
        };
        assert_eq!(signs_of(&w.point()).unwrap().to_string(), p["pattern"].as_str().unwrap());
        assert!((p["subfan"].as_u64().unwrap() as usize) < subfans);
    }
}
