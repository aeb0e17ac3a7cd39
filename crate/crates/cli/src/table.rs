//! Rectangular result tables with CSV and JSON emitters that parse back exactly.
//!
//! Non-finite values are stored as empty cells.

use std::collections::BTreeMap;

use adnovel_core::propagate::ConvergenceCertificate;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub unit: String,
}

impl Column {
    pub fn new(name: impl Into<String>, unit: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            unit: unit.into(),
        }
    }

    fn header(&self) -> String {
        if self.unit.is_empty() {
            self.name.clone()
        } else {
            format!("{} [{}]", self.name, self.unit)
        }
    }

    fn parse_header(h: &str) -> Self {
        match h.strip_suffix(']').and_then(|s| s.rsplit_once(" [")) {
            Some((name, unit)) => Self::new(name, unit),
            None => Self::new(h, ""),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub cells: Vec<Option<f64>>,
    #[serde(default)]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub substeps: usize,
    pub max_change: f64,
}

impl From<&ConvergenceCertificate> for Certificate {
    fn from(c: &ConvergenceCertificate) -> Self {
        Self {
            substeps: c.substeps,
            max_change: c.max_change,
        }
    }
}

impl Certificate {
    /// Worst case over several certificates.
    pub fn merge(certs: impl IntoIterator<Item = Certificate>) -> Option<Self> {
        certs.into_iter().reduce(|a, b| Self {
            substeps: a.substeps.max(b.substeps),
            max_change: a.max_change.max(b.max_change),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub config_hash: String,
    pub tol: f64,
    pub n_steps: usize,
    #[serde(default)]
    pub certificate: Option<Certificate>,
    pub columns: Vec<Column>,
    #[serde(default)]
    pub info: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub metadata: Metadata,
    pub rows: Vec<Row>,
}

fn clean(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

impl ResultTable {
    pub fn new(columns: Vec<Column>, tol: f64, n_steps: usize) -> Self {
        Self {
            metadata: Metadata {
                config_hash: String::new(),
                tol,
                n_steps,
                certificate: None,
                columns,
                info: BTreeMap::new(),
            },
            rows: Vec::new(),
        }
    }

    pub fn columns(&self) -> &[Column] {
        &self.metadata.columns
    }

    pub fn push(&mut self, values: &[f64]) {
        self.push_row(values.iter().map(|&v| clean(v)).collect(), None);
    }

    pub fn push_error(&mut self, leading: &[f64], error: impl Into<String>) {
        let mut cells: Vec<Option<f64>> = leading.iter().map(|&v| clean(v)).collect();
        cells.resize(self.columns().len(), None);
        self.push_row(cells, Some(error.into()));
    }

    fn push_row(&mut self, cells: Vec<Option<f64>>, error: Option<String>) {
        assert_eq!(cells.len(), self.columns().len(), "row width must match columns");
        self.rows.push(Row { cells, error });
    }

    pub fn info(&mut self, key: &str, value: impl ToString) {
        let v = value.to_string().replace(['\n', '\r'], " ");
        self.metadata.info.insert(key.to_string(), v);
    }

    pub fn info_f64(&self, key: &str) -> Option<f64> {
        self.metadata.info.get(key)?.parse().ok()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns().iter().position(|c| c.name == name)
    }

    /// All values of a column, `None` where a cell is empty.
    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r.cells[i]).collect())
    }

    pub fn column_f64(&self, name: &str) -> Option<Vec<f64>> {
        self.column(name)?.into_iter().collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let t: Self = serde_json::from_str(text).map_err(|e| CliError::validation("table", e.to_string()))?;
        t.check_shape()?;
        Ok(t)
    }

    fn check_shape(&self) -> Result<()> {
        let w = self.columns().len();
        match self.rows.iter().position(|r| r.cells.len() != w) {
            Some(i) => Err(CliError::validation(format!("rows[{i}]"), format!("expected {w} cells"))),
            None => Ok(()),
        }
    }

    pub fn to_csv(&self) -> String {
        let m = &self.metadata;
        let mut out = String::new();
        out.push_str(&format!("# config_hash: {}\n", m.config_hash));
        out.push_str(&format!("# tol: {}\n", m.tol));
        out.push_str(&format!("# n_steps: {}\n", m.n_steps));
        if let Some(c) = m.certificate {
            out.push_str(&format!("# certificate.substeps: {}\n", c.substeps));
            out.push_str(&format!("# certificate.max_change: {}\n", c.max_change));
        }
        for (k, v) in &m.info {
            out.push_str(&format!("# info.{k}: {v}\n"));
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
        let mut header: Vec<String> = self.columns().iter().map(Column::header).collect();
        header.push("error".into());
        w.write_record(&header).expect("in-memory write");
        for row in &self.rows {
            let mut rec: Vec<String> = row.cells.iter().map(|c| c.map(|v| v.to_string()).unwrap_or_default()).collect();
            rec.push(row.error.clone().unwrap_or_default());
            w.write_record(&rec).expect("in-memory write");
        }
        out.push_str(&String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8"));
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let bad = |what: String| CliError::validation("csv", what);
        let mut meta = BTreeMap::new();
        let mut body_start = 0;
        for line in text.split_inclusive('\n') {
            let Some(rest) = line.strip_prefix("# ") else { break };
            let (k, v) = rest
                .trim_end_matches(['\n', '\r'])
                .split_once(": ")
                .ok_or_else(|| bad(format!("malformed metadata line {line:?}")))?;
            meta.insert(k.to_string(), v.to_string());
            body_start += line.len();
        }
        let take = |meta: &mut BTreeMap<String, String>, k: &str| meta.remove(k).ok_or_else(|| bad(format!("missing {k}")));
        let config_hash = take(&mut meta, "config_hash")?;
        let tol = take(&mut meta, "tol")?.parse().map_err(|_| bad("tol".into()))?;
        let n_steps = take(&mut meta, "n_steps")?.parse().map_err(|_| bad("n_steps".into()))?;
        let certificate = match (meta.remove("certificate.substeps"), meta.remove("certificate.max_change")) {
            (Some(s), Some(m)) => Some(Certificate {
                substeps: s.parse().map_err(|_| bad("certificate.substeps".into()))?,
                max_change: m.parse().map_err(|_| bad("certificate.max_change".into()))?,
            }),
            _ => None,
        };
        let mut info = BTreeMap::new();
        for (k, v) in meta {
            let key = k.strip_prefix("info.").ok_or_else(|| bad(format!("unknown metadata key {k}")))?;
            info.insert(key.to_string(), v);
        }
        let mut r = csv::ReaderBuilder::new().from_reader(text[body_start..].as_bytes());
        let headers = r.headers().map_err(|e| bad(e.to_string()))?.clone();
        let n = headers.len();
        if n == 0 || &headers[n - 1] != "error" {
            return Err(bad("last column must be error".into()));
        }
        let columns: Vec<Column> = headers.iter().take(n - 1).map(Column::parse_header).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            let cells = rec
                .iter()
                .take(n - 1)
                .map(|c| if c.is_empty() { Ok(None) } else { c.parse::<f64>().map(Some) })
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| bad(e.to_string()))?;
            let error = Some(rec[n - 1].to_string()).filter(|e| !e.is_empty());
            rows.push(Row { cells, error });
        }
        Ok(Self {
            metadata: Metadata {
                config_hash,
                tol,
                n_steps,
                certificate,
                columns,
                info,
            },
            rows,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut t = ResultTable::new(vec![Column::new("t", "us"), Column::new("P", "")], 1e-6, 3);
        t.push(&[0.5, f64::NAN]);
        t.push_error(&[1.0], "diverged");
        let csv = t.to_csv();
        assert!(csv.contains("t [us],P,error\r\n"));
        assert!(csv.contains("0.5,,\r\n"));
        assert!(csv.contains("1,,diverged\r\n"));
        assert_eq!(t.column("P").unwrap(), vec![None, None]);
    }

    #[test]
    fn merged_certificate_is_worst_case() {
        let c = Certificate::merge([
            Certificate { substeps: 8, max_change: 1e-3 },
            Certificate { substeps: 64, max_change: 1e-7 },
        ])
        .unwrap();
        assert_eq!((c.substeps, c.max_change), (64, 1e-3));
        assert!(Certificate::merge([]).is_none());
    }
}
