//! Machine-readable run reports.
//!
//! A report is a fixed-layout JSON document: struct fields serialize in
//! declaration order and free-form `data` maps are key-sorted, so identical
//! inputs give byte-identical output.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA: &str = "pseudoboson-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Info,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Info => "info",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// The identity being verified.
    pub tag: String,
    pub status: Status,
    pub residual: Option<f64>,
    pub threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    /// Passes iff `residual ≤ threshold` (NaN fails).
    pub fn bound(name: &str, tag: &str, residual: f64, threshold: f64) -> Check {
        let status = if residual <= threshold { Status::Pass } else { Status::Fail };
        Check {
            name: name.into(),
            tag: tag.into(),
            status,
            residual: Some(residual),
            threshold: Some(threshold),
            detail: None,
        }
    }

    pub fn flag(name: &str, tag: &str, ok: bool, detail: impl Into<String>) -> Check {
        Check {
            name: name.into(),
            tag: tag.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            residual: None,
            threshold: None,
            detail: Some(detail.into()),
        }
    }

    pub fn info(name: &str, tag: &str, residual: Option<f64>, detail: impl Into<String>) -> Check {
        Check {
            name: name.into(),
            tag: tag.into(),
            status: Status::Info,
            residual,
            threshold: None,
            detail: Some(detail.into()),
        }
    }

    /// A check that could not be evaluated because the computation failed.
    pub fn error(name: &str, tag: &str, err: &crate::Error) -> Check {
        Check::flag(name, tag, false, format!("error: {err}"))
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Check {
        self.detail = Some(detail.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    pub info: usize,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub version: String,
    pub command: String,
    pub config: Value,
    pub checks: Vec<Check>,
    pub data: Value,
    pub summary: Summary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl Report {
    pub fn new(command: &str, config: Value) -> Report {
        Report {
            schema: SCHEMA.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config,
            checks: Vec::new(),
            data: Value::Object(Default::default()),
            summary: Summary { ok: true, ..Summary::default() },
            wall_time_ms: None,
        }
    }

    pub fn push(&mut self, check: Check) {
        match check.status {
            Status::Pass => self.summary.passed += 1,
            Status::Fail => self.summary.failed += 1,
            Status::Info => self.summary.info += 1,
        }
        self.summary.ok = self.summary.failed == 0;
        self.checks.push(check);
    }

    pub fn set_data(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("report data serializes");
        if let Value::Object(map) = &mut self.data {
            map.insert(key.into(), v);
        }
    }

    pub fn ok(&self) -> bool {
        self.summary.ok
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// `name,tag,status,residual,threshold` with empty cells for missing
    /// values.
    pub fn checks_csv(&self) -> String {
        let mut out = String::from("name,tag,status,residual,threshold\n");
        let num = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                csv_field(&c.name),
                csv_field(&c.tag),
                c.status.as_str(),
                num(c.residual),
                num(c.threshold)
            );
        }
        out
    }
}

/// Quotes a CSV field when it contains a delimiter, quote or newline.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Writes `bytes` to a temporary file next to `path` and renames it into
/// place, so readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_tracks_statuses() {
        let mut r = Report::new("x", Value::Null);
        r.push(Check::bound("a", "t", 1e-16, 1e-14));
        r.push(Check::info("b", "t", None, "note"));
        assert!(r.ok());
        r.push(Check::bound("c", "t", f64::NAN, 1e-14));
        assert!(!r.ok());
        assert_eq!((r.summary.passed, r.summary.failed, r.summary.info), (1, 1, 1));
    }

    #[test]
    fn json_layout_is_fixed() {
        let mut r = Report::new("cmd", serde_json::json!({"b": 1, "a": 2}));
        r.set_data("z", 1.5);
        r.set_data("a", [1, 2]);
        let s = r.to_json();
        assert!(s.starts_with("{\n  \"schema\": \"pseudoboson-report/1\""));
        assert!(s.find("\"a\": [").unwrap() < s.find("\"z\": 1.5").unwrap());
        assert!(!s.contains("wall_time_ms"));
        let back: Report = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn csv_quoting() {
        let mut r = Report::new("cmd", Value::Null);
        r.push(Check::bound("comm", "[A,B]=1", 0.0, 1e-14));
        let csv = r.checks_csv();
        assert_eq!(csv.lines().nth(1).unwrap(), "comm,\"[A,B]=1\",pass,0e0,1e-14");
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
