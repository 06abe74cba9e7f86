use crate::run;
use serde_json::Value;

fn json(args: &[&str]) -> (i32, Value) {
    let out = run(std::iter::once("cfdim").chain(args.iter().copied()));
    let v = if out.stdout.is_empty() { Value::Null } else { serde_json::from_str(&out.stdout).expect("json stdout") };
    (out.code, v)
}

#[test]
fn expand_rational() {
    let (code, v) = json(&["cf", "expand", "--rational", "7/10"]);
    assert_eq!(code, 0);
    assert_eq!(v["command"], "cf expand");
    assert_eq!(v["result"]["digits"], serde_json::json!([1, 2, 3]));
    assert_eq!(v["warnings"], serde_json::json!([]));
}

#[test]
fn decimal_on_boundary_is_uncertified() {
    let (code, v) = json(&["cf", "expand", "--decimal", "0.7"]);
    assert_eq!(code, 3);
    assert!(v["result"].is_null());
    assert_eq!(v["error"]["determined"], serde_json::json!([1]));
}

#[test]
fn exit_codes() {
    assert_eq!(json(&["zeta", "value", "--z", "1"]).0, 2);
    assert_eq!(json(&["cf", "eval", "--word", "1,0"]).0, 2);
    assert_eq!(json(&["dim", "cover", "--M", "2", "--s", "1", "--level", "3", "--A", "50"]).0, 4);
    assert_eq!(run(["cfdim", "nope"]).code, 2);
    assert_eq!(run(["cfdim", "--version"]).code, 0);
}

#[test]
fn density_is_exact() {
    let (code, v) = json(&["seq", "density", "--spec", "even"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["exact"], "1/2");
}

#[test]
fn schedule_file_round_trip() {
    let (_, v) = json(&["construct", "schedule", "--seq", "square", "--eps", "1/10"]);
    let schedule = &v["result"]["schedule"];
    assert_eq!(schedule["N"][0], 379);
    assert_eq!(schedule["n"][0], 20);
    let path = std::env::temp_dir().join(format!("cfdim-schedule-{}.json", std::process::id()));
    std::fs::write(&path, serde_json::to_string(schedule).unwrap()).unwrap();
    let from_file = json(&["construct", "phi", "--seq", "square", "--schedule", path.to_str().unwrap(), "--n", "21"]);
    let computed = json(&["construct", "phi", "--seq", "square", "--eps", "1/10", "--n", "21"]);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(from_file.0, 0);
    assert_eq!(from_file.1["result"], computed.1["result"]);
}

#[test]
fn critical_solve_converges() {
    let (code, v) = json(&["dim", "critical", "--M", "1000000"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["converged"], true);
    let s: f64 = v["result"]["s_star"].as_str().unwrap().parse().unwrap();
    assert!(0.6125 < s && s < 0.6126, "{s}");
}

#[test]
fn csv_output_has_header() {
    let out = run(["cfdim", "cf", "convergents", "--word", "1,2,3", "--format", "csv"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.lines().count() >= 4);
}
