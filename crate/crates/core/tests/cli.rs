//! End-to-end runs of the `flowlab` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn flowlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flowlab")).args(args).output().expect("binary runs")
}

fn fields(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fields").join(name).display().to_string()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn field_check_reports_bounds() {
    let out = flowlab(&["field", "check", &fields("cosh.toml")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    for key in ["divergence_max", "euler_residual", "eta_lo", "eta_hi", "admissible"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["admissible"], true);
    assert!(v["divergence_max"].as_f64().unwrap() <= 1e-12);

    let out = flowlab(&["field", "check", &fields("cellular.toml")]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["admissible"], false);
}

#[test]
fn trace_writes_csv_with_u_equal_to_t() {
    let dir = tempfile::tempdir().unwrap();
    let csv: PathBuf = dir.path().join("traj.csv");
    let out = flowlab(&[
        "--quiet",
        "trace",
        "--field",
        &fields("cosh.toml"),
        "--kind",
        "gradient",
        "--from",
        "0,0",
        "--tspan",
        "-20,20",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stderr.is_empty());
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,x1,x2,v1,v2,u"));
    let mut rows = 0;
    let mut events = 0;
    for line in lines {
        if let Some(ev) = line.strip_prefix("# event,") {
            assert_eq!(ev.split(',').count(), 2);
            events += 1;
            continue;
        }
        let c: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(c.len(), 6);
        assert!((c[5] - c[0]).abs() <= 1e-8, "u {} vs t {}", c[5], c[0]);
        rows += 1;
    }
    assert!(rows > 100 && events >= 1);

    let arcs = flowlab(&["arcs", "--curve", csv.to_str().unwrap()]);
    assert_eq!(arcs.status.code(), Some(0));
    assert_eq!(json(&arcs)["bound_holds"], true);
}

#[test]
fn osc_growth_and_constants() {
    let osc = flowlab(&["osc", "--field", &fields("cosh.toml"), "--center", "0,0", "--radius", "1", "--grid", "101"]);
    let v = json(&osc);
    let o = v["osc"].as_f64().unwrap();
    assert!(o > std::f64::consts::FRAC_PI_4 && o < std::f64::consts::FRAC_PI_2, "{o}");

    let g = flowlab(&["growth", "--field", &fields("wavy.toml"), "--radii", "2,4", "--eta", "0.9", "--grid", "61"]);
    assert_eq!(g.status.code(), Some(0));
    let recs = json(&g);
    assert_eq!(recs.as_array().unwrap().len(), 2);
    assert_eq!(recs[0]["status"]["status"], "pass");

    let c = json(&flowlab(&["constants", "--eta", "1.0"]));
    assert!(c["constants"]["c1"].as_f64().unwrap() >= 1305.33);
    assert_eq!(c["partition"]["m_dyadic"], 2);
    assert_eq!(c["partition"]["n"], 3);
}

#[test]
fn verify_exit_codes() {
    let ok = flowlab(&["--quiet", "verify", "--field", &fields("shear.toml"), "--suite", "all", "--seed", "3"]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stdout));
    assert_eq!(json(&ok)["summary"]["failed"], 0);

    // Not an Euler flow: the semilinear identity fails.
    let bad = flowlab(&["--quiet", "verify", "--field", &fields("wavy.toml"), "--suite", "elliptic"]);
    assert_eq!(bad.status.code(), Some(1));

    let stag = flowlab(&["verify", "--field", &fields("cellular.toml")]);
    assert_eq!(stag.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&stag.stderr).contains("stagnation"));

    let unknown = flowlab(&["verify", "--field", &fields("cosh.toml"), "--suite", "everything"]);
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn config_errors_point_at_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.toml");
    std::fs::write(&path, "[field]\nname = \"broken\"\nv1 = \"sin(x1\"\nv2 = \"0\"\n").unwrap();
    let out = flowlab(&["field", "check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains(&format!("{}:3:", path.display())), "{err}");
}

#[test]
fn threads_env_does_not_change_results() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_flowlab"))
            .env("FLOWLAB_THREADS", threads)
            .args(["--quiet", "verify", "--field", &fields("cosh.toml"), "--suite", "foliation"])
            .output()
            .unwrap()
    };
    let (a, b) = (run("1"), run("4"));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(run("zero").status.code(), Some(2));
}

fn check_against_schema(report: &Value, schema: &Value) {
    let top = report.as_object().unwrap();
    for key in schema["required"].as_array().unwrap() {
        assert!(top.contains_key(key.as_str().unwrap()), "missing {key}");
    }
    let allowed = schema["properties"].as_object().unwrap();
    assert!(top.keys().all(|k| allowed.contains_key(k)));
    assert_eq!(report["schema_version"], schema["properties"]["schema_version"]["const"]);
    let rec_schema = &schema["$defs"]["record"];
    let rec_keys = rec_schema["properties"].as_object().unwrap();
    let mut names = std::collections::BTreeSet::new();
    for r in report["records"].as_array().unwrap() {
        let o = r.as_object().unwrap();
        for key in rec_schema["required"].as_array().unwrap() {
            assert!(o.contains_key(key.as_str().unwrap()), "record missing {key}: {r}");
        }
        assert!(o.keys().all(|k| rec_keys.contains_key(k)), "{r}");
        let anchor = r["anchor"].as_str().unwrap();
        assert!(
            !anchor.is_empty()
                && anchor.split('-').all(|p| !p.is_empty() && p.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit())),
            "anchor {anchor}"
        );
        let status = r["status"].as_str().unwrap();
        assert!(["pass", "fail", "skipped"].contains(&status));
        assert_eq!(r["pass"].as_bool().unwrap(), status == "pass");
        assert!(names.insert(r["name"].as_str().unwrap().to_string()), "duplicate name {}", r["name"]);
    }
    let s = &report["summary"];
    let n = report["records"].as_array().unwrap().len() as u64;
    assert_eq!(s["total"].as_u64().unwrap(), n);
    assert_eq!(s["passed"].as_u64().unwrap() + s["failed"].as_u64().unwrap() + s["skipped"].as_u64().unwrap(), n);
}

#[test]
fn demo_matches_schema_and_is_sorted() {
    let out = flowlab(&["--quiet", "demo", "--seed", "42"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let report: Value = serde_json::from_str(&text).unwrap();
    let schema: Value = serde_json::from_str(
        &std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/report.schema.json")).unwrap(),
    )
    .unwrap();
    check_against_schema(&report, &schema);
    // Re-serializing the parsed value (sorted map) reproduces the bytes.
    let mut again = serde_json::to_string_pretty(&report).unwrap();
    again.push('\n');
    assert_eq!(again, text);
    assert!(!text.contains("time") && !text.contains("elapsed"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("demo.json");
    let out = flowlab(&["--quiet", "demo", "--seed", "42", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(path).unwrap(), text);
}
