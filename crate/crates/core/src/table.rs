// SPDX-License-Identifier: Apache-2.0

//! Numeric tables with a metadata block, exported as CSV or JSON.
//!
//! CSV layout: `# key: value` metadata lines, one header line, then rows.
//! Floats use Rust's shortest round-trip formatting, so values parse back
//! bit-for-bit and identical inputs give identical bytes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub metadata: BTreeMap<String, String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl SweepTable {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        SweepTable {
            metadata: BTreeMap::new(),
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.set_meta(key, value);
        self
    }

    /// Metadata values must fit on one line.
    pub fn set_meta(&mut self, key: &str, value: impl ToString) {
        let value = value.to_string().replace(['\n', '\r'], " ");
        self.metadata.insert(key.to_string(), value);
    }

    pub fn push_row(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::invalid(
                "table row",
                format!(
                    "has {} values, table has {} columns",
                    row.len(),
                    self.columns.len()
                ),
            ));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            writer
                .write_record(row.iter().map(|v| v.to_string()))
                .expect("in-memory write");
        }
        let body = writer.into_inner().expect("in-memory flush");
        out.push_str(std::str::from_utf8(&body).expect("csv output is UTF-8"));
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut metadata = BTreeMap::new();
        let mut body_start = 0;
        for line in text.split_inclusive('\n') {
            let Some(meta) = line.strip_prefix("# ") else {
                break;
            };
            let (k, v) = meta
                .trim_end_matches(['\n', '\r'])
                .split_once(": ")
                .ok_or_else(|| {
                    Error::invalid("csv metadata", format!("malformed line {line:?}"))
                })?;
            metadata.insert(k.to_string(), v.to_string());
            body_start += line.len();
        }
        let parse_err = |e: csv::Error| Error::invalid("csv table", e.to_string());
        let mut reader = csv::Reader::from_reader(&text.as_bytes()[body_start..]);
        let columns = reader
            .headers()
            .map_err(parse_err)?
            .iter()
            .map(String::from)
            .collect();
        let mut table = SweepTable {
            metadata,
            columns,
            rows: Vec::new(),
        };
        for record in reader.records() {
            let row = record
                .map_err(parse_err)?
                .iter()
                .map(|v| {
                    v.parse::<f64>()
                        .map_err(|_| Error::invalid("csv table", format!("not a number: {v:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            table.push_row(row)?;
        }
        Ok(table)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("table serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let table: SweepTable =
            serde_json::from_str(text).map_err(|e| Error::invalid("json table", e.to_string()))?;
        if let Some(bad) = table.rows.iter().find(|r| r.len() != table.columns.len()) {
            return Err(Error::invalid(
                "table row",
                format!(
                    "has {} values, table has {} columns",
                    bad.len(),
                    table.columns.len()
                ),
            ));
        }
        Ok(table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SweepTable {
        let mut t = SweepTable::new(["k_over_k0", "F"])
            .with_meta("gamma", 1000.0)
            .with_meta("regime", "n=1, n'=0");
        t.push_row(vec![0.95, 0.958976802695]).unwrap();
        t.push_row(vec![1.0, 1.0]).unwrap();
        t.push_row(vec![1.0 / 3.0, 1e-300]).unwrap();
        t
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let t = sample();
        let text = t.to_csv();
        assert!(text.starts_with("# gamma: 1000\n# regime: n=1, n'=0\nk_over_k0,F\n"));
        assert_eq!(SweepTable::from_csv(&text).unwrap(), t);
    }

    #[test]
    fn json_round_trip_is_exact() {
        let t = sample();
        assert_eq!(SweepTable::from_json(&t.to_json()).unwrap(), t);
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let mut t = SweepTable::new(["a", "b"]);
        assert!(t.push_row(vec![1.0]).is_err());
        assert!(SweepTable::from_csv("a,b\n1,2\n3\n").is_err());
        assert!(
            SweepTable::from_json(r#"{"metadata":{},"columns":["a"],"rows":[[1,2]]}"#).is_err()
        );
    }
}
