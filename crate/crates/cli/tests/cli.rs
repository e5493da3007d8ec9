use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn chiral(args: &[&str], script: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_chiral"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(script.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json_lines(o: &Output) -> Vec<Value> {
    stdout(o).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn virasoro_on_omega_reports_zero_central_charge() {
    let o = chiral(
        &[],
        "system omega N=1; let L = b1_{-1} a1_{-1} + phi1_{-1} psi1_{-1}; check virasoro;",
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("c = 0"));
}

#[test]
fn doubled_virasoro_element_fails() {
    let o = chiral(&[], "system heis N=1; let L = 2 * b1_{-1} a1_{-1}; check virasoro;");
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("[FAIL]"));
}

#[test]
fn ope_of_a_and_b() {
    let o = chiral(&[], "ope a1_{-1} b1_{-1};");
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "{pole 1: |0>}\n");
    // the state b1_{-1}|0> is the derivative of b, with a double pole
    let o = chiral(&[], "ope a1_{-1} (b1_{-1});");
    assert_eq!(stdout(&o), "{pole 2: |0>}\n");
}

#[test]
fn malformed_let_points_at_equals() {
    let o = chiral(&[], "let = ;");
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("at 1:5"), "{}", stderr(&o));
}

#[test]
fn unbound_names_are_usage_errors() {
    let o = chiral(&[], "system omega N=1;\nnproduct L 0 a1_{-1};");
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`L` is used before it is bound at 2:10"), "{}", stderr(&o));
    let o = chiral(&[], "system heis N=1; check topological;");
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn topological_algebra_on_omega_2() {
    let o = chiral(&["--json"], "system omega N=2; check topological;");
    assert_eq!(o.status.code(), Some(0));
    let v = json_lines(&o);
    assert_eq!(v[0]["passed"], Value::Bool(true));
    assert_eq!(v[0]["report"]["checks"].as_array().unwrap().len(), 10);
}

#[test]
fn quadratic_change_preserves_opes() {
    let o = chiral(&[], r#"transform map "b -> b + b^2" order 6 check-opes;"#);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
}

#[test]
fn sections_as_json_rows() {
    let o = chiral(&["--json"], "p1 sections 3;");
    assert_eq!(o.status.code(), Some(0));
    let rows = json_lines(&o)[0]["rows"].as_array().unwrap().clone();
    let ranks: Vec<(i64, i64)> = rows
        .iter()
        .map(|r| (r["weight"].as_i64().unwrap(), r["rank"].as_i64().unwrap()))
        .collect();
    assert_eq!(ranks, vec![(0, 1), (1, 3), (2, 8), (3, 18)]);
}

#[test]
fn truncation_underflow_is_a_resource_error() {
    let o = chiral(
        &[],
        r#"system omega N=1; transform map "b -> b + b^2" order 1 apply (a1_{-1} a1_{-1} a1_{-1});"#,
    );
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("truncation underflow"));
}

#[test]
fn frame_cochains_have_no_single_constant() {
    let o = chiral(&["--json"], r#"cocycle "compare-69";"#);
    assert_eq!(o.status.code(), Some(1));
    let v = &json_lines(&o)[0];
    assert_eq!(v["fit"]["c2"], Value::String("1/2".into()));
    assert_eq!(v["fit"]["c3"], Value::String("-1/2".into()));
}

#[test]
fn cocycle_values() {
    let o = chiral(&[], r#"cocycle "c" "x2^2 d1" "x1^2 d2"; cocycle "c2" "d1" "x1 x2 d1";"#);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "c(x2^2 ∂1, x1^2 ∂2) = [-4*x1 dx2]\nc2(∂1, x1*x2 ∂1) = 0\n");
    let o = chiral(&[], r#"cocycle "c3" "d1";"#);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reflection_of_a() {
    let o = chiral(&[], "p1 reflect a1_{-1};");
    assert_eq!(stdout(&o), "-x1^2 * a1_{-1} |0> - 2 * b1_{-1} |0>\n");
}

#[test]
fn seeded_runs_are_deterministic() {
    let script = "system omega N=1; check borcherds;";
    let a = chiral(&["--seed", "7", "--json"], script);
    let b = chiral(&["--seed", "7", "--json"], script);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn printed_states_feed_back_into_scripts() {
    let o = chiral(&[], "system heis N=1; transform map \"b -> b + b^2\" order 4 apply a1_{-1};");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let printed = stdout(&o).trim().to_string();
    let script = format!("system heis N=1 ring series(4); let S = {printed}; nproduct S -1 (|0>);");
    let o = chiral(&[], &script);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), printed);
}

#[test]
fn script_files_are_read() {
    let dir = std::env::temp_dir().join(format!("chiral-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("euler.chiral");
    std::fs::write(&path, "# Euler character of the line\np1 euler 5;\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_chiral")).arg(&path).output().unwrap();
    assert_eq!(stdout(&o), "1, 2, 5, 10, 20, 36\n");
    let o = Command::new(env!("CARGO_BIN_EXE_chiral")).arg(dir.join("missing")).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}
