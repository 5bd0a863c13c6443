use std::fmt::Display;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

/// An expected or computed value: a float, or an exact value compared as text.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Float(f64),
    Exact(String),
}

impl Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Float(x) => write!(f, "{x:e}"),
            Value::Exact(s) => f.write_str(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub id: String,
    pub claim: String,
    pub expected: Value,
    pub computed: Option<Value>,
    /// absolute tolerance for float records; `None` means exact comparison
    pub tolerance: Option<f64>,
    pub pass: bool,
    pub error: Option<String>,
    /// error estimate of an extrapolated value; informational, not part of the pass rule
    pub uncertainty: Option<f64>,
}

impl Record {
    /// Passes iff |computed − expected| ≤ tol. NaN fails.
    pub fn float(id: impl Into<String>, claim: impl Into<String>, expected: f64, computed: f64, tol: f64) -> Self {
        let pass = (computed - expected).abs() <= tol;
        Record {
            id: id.into(),
            claim: claim.into(),
            expected: Value::Float(expected),
            computed: Some(Value::Float(computed)),
            tolerance: Some(tol),
            pass,
            error: None,
            uncertainty: None,
        }
    }

    pub fn with_uncertainty(mut self, u: f64) -> Self {
        self.uncertainty = Some(u);
        self
    }

    pub fn exact(id: impl Into<String>, claim: impl Into<String>, expected: impl Display, computed: impl Display) -> Self {
        let (e, c) = (expected.to_string(), computed.to_string());
        Record {
            id: id.into(),
            claim: claim.into(),
            pass: e == c,
            expected: Value::Exact(e),
            computed: Some(Value::Exact(c)),
            tolerance: None,
            error: None,
            uncertainty: None,
        }
    }

    /// The check could not be carried out.
    pub fn failed(id: impl Into<String>, claim: impl Into<String>, expected: Value, err: impl Display) -> Self {
        Record {
            id: id.into(),
            claim: claim.into(),
            expected,
            computed: None,
            tolerance: None,
            pass: false,
            error: Some(err.to_string()),
            uncertainty: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub config_hash: String,
    /// from SOURCE_DATE_EPOCH when set, so reports stay reproducible
    pub timestamp: Option<u64>,
    /// modelling choices that hold for every record of this run
    pub notes: Vec<String>,
    pub records: Vec<Record>,
    pub passed: bool,
}

impl Report {
    pub fn new(suite: &str, config_hash: String, notes: &[&str], records: Vec<Record>) -> Self {
        let timestamp = std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|s| s.trim().parse().ok());
        let passed = records.iter().all(|r| r.pass);
        let notes = notes.iter().map(|n| n.to_string()).collect();
        Report { suite: suite.into(), config_hash, timestamp, notes, records, passed }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| !r.pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["id", "claim", "expected", "computed", "tolerance", "pass", "uncertainty", "error"])?;
        for r in &self.records {
            w.write_record([
                r.id.clone(),
                r.claim.clone(),
                r.expected.to_string(),
                r.computed.as_ref().map(|v| v.to_string()).unwrap_or_default(),
                r.tolerance.map(|t| format!("{t:e}")).unwrap_or_default(),
                r.pass.to_string(),
                r.uncertainty.map(|u| format!("{u:e}")).unwrap_or_default(),
                r.error.clone().unwrap_or_default(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }

    /// Writes `<suite>.json` and `<suite>.csv` into `dir`, returning both paths.
    pub fn write(&self, dir: &Path) -> std::io::Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let json = dir.join(format!("{}.json", self.suite));
        let csvp = dir.join(format!("{}.csv", self.suite));
        std::fs::write(&json, self.to_json())?;
        let table = self.to_csv().map_err(std::io::Error::other)?;
        std::fs::write(&csvp, table)?;
        Ok((json, csvp))
    }
}
