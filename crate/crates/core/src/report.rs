//! Check records, JSON reports and trajectory CSV files.
//!
//! Every check produces a [`Record`] with a stable anchor string naming the
//! property it tests. Reports serialize with sorted keys and shortest
//! round-trip floats, and carry no wall-clock data, so a fixed seed gives
//! byte-identical output.

use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::argument::CheckStatus;
use crate::geom::Point;
use crate::tracer::Trajectory;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// A hypothesis failed; the check makes no claim.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub name: String,
    pub anchor: String,
    pub inputs: Value,
    pub measured: Value,
    pub bound: Value,
    pub status: Status,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl Record {
    fn new(name: &str, anchor: &str, inputs: Value, measured: Value, bound: Value, status: Status) -> Self {
        Record {
            name: name.into(),
            anchor: anchor.into(),
            inputs,
            measured,
            bound,
            pass: status == Status::Pass,
            status,
            reason: None,
        }
    }

    /// Passes when `measured <= bound` (a NaN never passes).
    pub fn at_most(name: &str, anchor: &str, inputs: Value, measured: f64, bound: f64) -> Self {
        let status = if measured <= bound { Status::Pass } else { Status::Fail };
        Self::new(name, anchor, inputs, json!(measured), json!(bound), status)
    }

    /// Passes when `measured >= bound`.
    pub fn at_least(name: &str, anchor: &str, inputs: Value, measured: f64, bound: f64) -> Self {
        let status = if measured >= bound { Status::Pass } else { Status::Fail };
        Self::new(name, anchor, inputs, json!(measured), json!({ "min": bound }), status)
    }

    /// Passes when the measured value equals the expected one.
    pub fn equals(name: &str, anchor: &str, inputs: Value, measured: Value, expected: Value) -> Self {
        let status = if measured == expected { Status::Pass } else { Status::Fail };
        Self::new(name, anchor, inputs, measured, json!({ "equals": expected }), status)
    }

    /// Passes when `cond` holds; `measured` documents what was seen.
    pub fn holds(name: &str, anchor: &str, inputs: Value, measured: Value, cond: bool) -> Self {
        let status = if cond { Status::Pass } else { Status::Fail };
        Self::new(name, anchor, inputs, measured, Value::Null, status)
    }

    pub fn skipped(name: &str, anchor: &str, inputs: Value, reason: impl Into<String>) -> Self {
        let mut r = Self::new(name, anchor, inputs, Value::Null, Value::Null, Status::Skipped);
        r.reason = Some(reason.into());
        r
    }

    /// Record from a hypothesis-gated check.
    pub fn from_check(name: &str, anchor: &str, inputs: Value, measured: f64, bound: f64, status: &CheckStatus) -> Self {
        let (st, reason) = match status {
            CheckStatus::Pass => (Status::Pass, None),
            CheckStatus::Fail => (Status::Fail, None),
            CheckStatus::Skipped { reason } => (Status::Skipped, Some(reason.clone())),
        };
        let mut r = Self::new(name, anchor, inputs, json!(measured), json!(bound), st);
        r.reason = reason;
        r
    }

    pub fn with_reason(mut self, reason: impl Into<String>) -> Self {
        self.reason = Some(reason.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: Value,
    pub records: Vec<Record>,
    pub summary: Summary,
}

impl Report {
    pub fn new(command: &str, config: Value, records: Vec<Record>) -> Self {
        let count = |s: Status| records.iter().filter(|r| r.status == s).count();
        let summary = Summary {
            total: records.len(),
            passed: count(Status::Pass),
            failed: count(Status::Fail),
            skipped: count(Status::Skipped),
        };
        Report {
            schema_version: SCHEMA_VERSION,
            tool: "flowlab".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config,
            records,
            summary,
        }
    }

    pub fn has_failures(&self) -> bool {
        self.summary.failed > 0
    }
}

/// Canonical JSON: keys sorted at every level, two-space indentation,
/// shortest round-trip floats, non-finite numbers as `null`, trailing LF.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    // Going through `Value` sorts object keys (its map is ordered).
    let v = serde_json::to_value(value).expect("report values serialize");
    let mut s = serde_json::to_string_pretty(&v).expect("values serialize");
    s.push('\n');
    s
}

/// CSV header of trajectory files.
pub const CSV_HEADER: &str = "t,x1,x2,v1,v2,u";

/// Writes samples as CSV, followed by one `# event,<kind>,<t>` line per
/// terminating event.
pub fn write_trajectory_csv<W: Write>(traj: &Trajectory, mut w: W) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for s in traj.samples() {
        writeln!(w, "{},{},{},{},{},{}", s.t, s.x[0], s.x[1], s.velocity[0], s.velocity[1], s.u)?;
    }
    for e in traj.events() {
        writeln!(w, "# event,{},{}", e.kind.as_str(), e.t)?;
    }
    Ok(())
}

/// Rows of a trajectory CSV: `(t, x, tangent)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvCurve {
    pub ts: Vec<f64>,
    pub points: Vec<Point>,
    pub tangents: Vec<Point>,
}

/// Reads a trajectory CSV; comment lines and the header are skipped. Errors
/// carry the 1-based line number.
pub fn read_trajectory_csv<R: BufRead>(r: R) -> Result<CsvCurve, (usize, String)> {
    let mut out = CsvCurve { ts: vec![], points: vec![], tangents: vec![] };
    for (i, line) in r.lines().enumerate() {
        let line = line.map_err(|e| (i + 1, e.to_string()))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('t') {
            continue;
        }
        let vals: Result<Vec<f64>, _> = line.split(',').map(|c| c.trim().parse::<f64>()).collect();
        let vals = vals.map_err(|e| (i + 1, format!("bad number: {e}")))?;
        if vals.len() < 3 {
            return Err((i + 1, format!("expected at least 3 columns, found {}", vals.len())));
        }
        out.ts.push(vals[0]);
        out.points.push([vals[1], vals[2]]);
        if vals.len() >= 5 {
            out.tangents.push([vals[3], vals[4]]);
        }
    }
    if !out.tangents.is_empty() && out.tangents.len() != out.ts.len() {
        return Err((0, "tangent columns present on some rows only".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Builtin;
    use crate::tracer::{trace_gradient, IntegratorConfig};

    #[test]
    fn keys_are_sorted_and_floats_round_trip() {
        let r = Record::at_most("z", "a", json!({"b": 1, "a": 0.1}), 0.30000000000000004, 1e-10);
        let rep = Report::new("test", json!({"seed": 42}), vec![r]);
        let s = to_canonical_json(&rep);
        let keys: Vec<usize> =
            ["\"command\"", "\"config\"", "\"records\"", "\"schema_version\"", "\"summary\"", "\"tool\""]
                .iter()
                .map(|k| s.find(k).unwrap())
                .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
        assert!(s.contains("0.30000000000000004"));
        assert!(s.find("\"a\": 0.1").unwrap() < s.find("\"b\": 1").unwrap());
        assert!(!s.contains('\r'));
        let back: Report = serde_json::from_str(&s).unwrap();
        assert_eq!(back, rep);
        assert_eq!(to_canonical_json(&f64::INFINITY), "null\n");
    }

    #[test]
    fn csv_round_trip() {
        let f = Builtin::Cosh.build().unwrap();
        let traj = trace_gradient(&f, [0.0, 0.0], &IntegratorConfig::span(-1.0, 2.0)).unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&traj, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,x1,x2,v1,v2,u\n"));
        assert!(text.contains("# event,span_end,2"));
        let c = read_trajectory_csv(text.as_bytes()).unwrap();
        assert_eq!(c.ts.len(), traj.samples().len());
        assert_eq!(c.points[3], traj.samples()[3].x);
        let bad = read_trajectory_csv("t,x1,x2\n0,1,x\n".as_bytes()).unwrap_err();
        assert_eq!(bad.0, 2);
    }
}
