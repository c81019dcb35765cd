//! Versioned JSON reports and CSV dumps.

use crate::config::{CliError, CliResult};
use qflow::ResidualReport;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const SCHEMA: u32 = 1;

/// One run: asserted checks plus free-form records (integrals, summaries).
/// Contains nothing time- or host-dependent, so reruns at a fixed thread
/// count are byte-identical.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub state: String,
    pub t_samples: Vec<f64>,
    pub threads: usize,
    pub pass: bool,
    pub checks: Vec<ResidualReport>,
    pub records: Vec<Value>,
}

impl Report {
    pub fn new(command: &str, state: &str, t_samples: Vec<f64>, threads: usize) -> Report {
        Report {
            schema: SCHEMA,
            command: command.to_string(),
            state: state.to_string(),
            t_samples,
            threads,
            pass: true,
            checks: Vec::new(),
            records: Vec::new(),
        }
    }

    pub fn check(&mut self, r: ResidualReport) {
        self.pass &= r.pass;
        self.checks.push(r);
    }

    /// Tags a serializable record with its kind.
    pub fn record<T: Serialize>(&mut self, kind: &str, value: &T) -> CliResult<()> {
        let mut v = serde_json::to_value(value).map_err(|e| CliError::Config(e.to_string()))?;
        match v.as_object_mut() {
            Some(map) => {
                map.insert("record".into(), Value::String(kind.into()));
            }
            None => v = serde_json::json!({ "record": kind, "value": v }),
        }
        self.records.push(v);
        Ok(())
    }

    pub fn failures(&self) -> impl Iterator<Item = &ResidualReport> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Writes to `path`, or to stdout without one.
    pub fn emit(&self, path: Option<&Path>) -> CliResult<()> {
        let text = self.to_json();
        match path {
            Some(p) => std::fs::write(p, text).map_err(|e| CliError::Config(format!("cannot write {}: {e}", p.display()))),
            None => std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Config(e.to_string())),
        }
    }

    pub fn load(path: &Path) -> CliResult<Report> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let r: Report = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if r.schema != SCHEMA {
            return Err(CliError::Config(format!("{}: unsupported schema {}", path.display(), r.schema)));
        }
        Ok(r)
    }

    /// One line per check: `PASS|FAIL name rel tolerance`.
    pub fn summary(&self) -> String {
        let mut out = format!(
            "{} {} [{}]: {} of {} checks pass\n",
            self.command,
            self.state,
            if self.pass { "pass" } else { "FAIL" },
            self.checks.iter().filter(|c| c.pass).count(),
            self.checks.len()
        );
        for c in &self.checks {
            out.push_str(&format!(
                "  {} {:<32} rel={:.3e} tol={:.1e}\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.rel,
                c.tolerance
            ));
        }
        out
    }
}

/// CSV table with a fixed header; numbers use Rust's locale-free formatting.
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Table {
        Table {
            name: name.to_string(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, dir: &Path) -> CliResult<PathBuf> {
        let io = |e: &dyn std::fmt::Display| CliError::Config(format!("cannot write CSV in {}: {e}", dir.display()));
        std::fs::create_dir_all(dir).map_err(|e| io(&e))?;
        let path = dir.join(format!("{}.csv", self.name));
        let mut w = csv::Writer::from_path(&path).map_err(|e| io(&e))?;
        w.write_record(&self.header).map_err(|e| io(&e))?;
        for row in &self.rows {
            w.write_record(row.iter().map(|x| x.to_string())).map_err(|e| io(&e))?;
        }
        w.flush().map_err(|e| io(&e))?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failing_checks_clear_the_pass_flag() {
        let mut r = Report::new("verify", "H", vec![0.0], 1);
        r.check(ResidualReport::absolute("a", "a = 0", 0.0, 0.0, 1e-9));
        assert!(r.pass);
        r.check(ResidualReport::absolute("b", "b = 0", 1.0, 0.0, 1e-9));
        assert!(!r.pass);
        assert_eq!(r.failures().next().unwrap().name, "b");
    }

    #[test]
    fn records_are_tagged_and_round_trip() {
        let mut r = Report::new("fields", "H", vec![0.0], 1);
        r.record("scalar", &1.5).unwrap();
        r.record("pair", &serde_json::json!({"x": 1})).unwrap();
        let back: Report = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back.records[0]["record"], "scalar");
        assert_eq!(back.records[1]["x"], 1);
        assert_eq!(back.schema, SCHEMA);
    }

    #[test]
    fn csv_uses_point_decimals_and_header() {
        let dir = std::env::temp_dir().join(format!("qflow-csv-{}", std::process::id()));
        let mut t = Table::new("probe", &["x", "y", "z", "rho"]);
        t.push(vec![0.5, -1.0, 2.0, 1e-12]);
        let p = t.write(&dir).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        std::fs::remove_dir_all(&dir).unwrap();
        assert_eq!(text, "x,y,z,rho\n0.5,-1,2,0.000000000001\n");
    }
}
