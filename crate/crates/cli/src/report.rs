//! Run reports and their JSON / CSV renderings.

use std::collections::BTreeMap;

use serde::ser::{Serialize, Serializer};
use serde_json::value::RawValue;

/// A float written with 17 significant digits; non-finite values become
/// `null`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Real(pub f64);

impl Real {
    pub fn text(self) -> String {
        if self.0.is_finite() {
            format!("{:.16e}", self.0)
        } else {
            "null".to_string()
        }
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let raw = RawValue::from_string(self.text()).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
#[serde(untagged)]
pub enum Param {
    Real(Real),
    Int(u64),
    Text(String),
    Flag(bool),
    Reals(Vec<Real>),
}

impl From<bool> for Param {
    fn from(v: bool) -> Self {
        Param::Flag(v)
    }
}

impl From<f64> for Param {
    fn from(v: f64) -> Self {
        Param::Real(Real(v))
    }
}

impl From<usize> for Param {
    fn from(v: usize) -> Self {
        Param::Int(v as u64)
    }
}

impl From<&str> for Param {
    fn from(v: &str) -> Self {
        Param::Text(v.to_string())
    }
}

impl From<String> for Param {
    fn from(v: String) -> Self {
        Param::Text(v)
    }
}

impl From<&[f64]> for Param {
    fn from(v: &[f64]) -> Self {
        Param::Reals(v.iter().map(|&x| Real(x)).collect())
    }
}

/// Row index: `n`, `[m, n]`, or a word such as `"AA*"`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
#[serde(untagged)]
pub enum Index {
    Single(usize),
    Pair([usize; 2]),
    Word(String),
}

impl std::fmt::Display for Index {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Index::Single(n) => write!(f, "{n}"),
            Index::Pair([m, n]) => write!(f, "{m},{n}"),
            Index::Word(w) => f.write_str(w),
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ValueRow {
    pub index: Index,
    pub method: String,
    pub value: Real,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr: Option<Real>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<Real>,
}

impl ValueRow {
    pub fn new(index: Index, method: impl Into<String>, value: f64) -> Self {
        Self {
            index,
            method: method.into(),
            value: Real(value),
            stderr: None,
            samples: None,
            reference: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CheckRow {
    pub check: String,
    pub method: String,
    pub residual: Real,
    pub tolerance: Real,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckRow {
    /// Passes when `residual <= tolerance`; a NaN residual fails.
    pub fn within(check: impl Into<String>, method: &str, residual: f64, tolerance: f64) -> Self {
        Self {
            check: check.into(),
            method: method.to_string(),
            residual: Real(residual),
            tolerance: Real(tolerance),
            pass: residual <= tolerance,
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
#[serde(untagged)]
pub enum Row {
    Value(ValueRow),
    Check(CheckRow),
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct RunReport {
    pub command: String,
    pub params: BTreeMap<String, Param>,
    pub results: Vec<Row>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_s: Option<Real>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            params: BTreeMap::new(),
            results: Vec::new(),
            elapsed_s: None,
            seed: None,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<Param>) -> &mut Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn value(&mut self, row: ValueRow) {
        self.results.push(Row::Value(row));
    }

    pub fn check(&mut self, row: CheckRow) {
        self.results.push(Row::Check(row));
    }

    pub fn checks(&self) -> impl Iterator<Item = &CheckRow> {
        self.results.iter().filter_map(|r| match r {
            Row::Check(c) => Some(c),
            Row::Value(_) => None,
        })
    }

    pub fn all_pass(&self) -> bool {
        self.checks().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Value rows under `index,method,value[,stderr,samples][,reference]`;
    /// check rows under `check,residual,tolerance,pass`, separated from the
    /// value block by an empty line.
    pub fn to_csv(&self) -> String {
        let values: Vec<&ValueRow> = self
            .results
            .iter()
            .filter_map(|r| match r {
                Row::Value(v) => Some(v),
                Row::Check(_) => None,
            })
            .collect();
        let checks: Vec<&CheckRow> = self.checks().collect();
        let mut blocks = Vec::new();
        if !values.is_empty() {
            let spread = values.iter().any(|v| v.stderr.is_some());
            let reference = values.iter().any(|v| v.reference.is_some());
            let mut header = vec!["index", "method", "value"];
            if spread {
                header.extend(["stderr", "samples"]);
            }
            if reference {
                header.push("reference");
            }
            let opt = |r: Option<Real>| r.map(Real::text).unwrap_or_default();
            let records = values.iter().map(|v| {
                let mut rec = vec![v.index.to_string(), v.method.clone(), v.value.text()];
                if spread {
                    rec.push(opt(v.stderr));
                    rec.push(v.samples.map(|s| s.to_string()).unwrap_or_default());
                }
                if reference {
                    rec.push(opt(v.reference));
                }
                rec
            });
            blocks.push(csv_block(&header, records));
        }
        if !checks.is_empty() {
            let records = checks.iter().map(|c| {
                vec![
                    c.check.clone(),
                    c.residual.text(),
                    c.tolerance.text(),
                    c.pass.to_string(),
                ]
            });
            blocks.push(csv_block(
                &["check", "residual", "tolerance", "pass"],
                records,
            ));
        }
        blocks.join("\n")
    }
}

fn csv_block(header: &[&str], records: impl Iterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for rec in records {
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 output")
}
