//! Minimal CSV with `#` comment headers.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so
//! parsing a file gives back exactly the `f64` values that were written.
//! Empty cells stand for "no value".

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// A CSV document under construction.
#[derive(Debug, Clone, Default)]
pub struct CsvDoc {
    comments: Vec<String>,
    columns: Vec<String>,
    rows: Vec<Vec<Option<f64>>>,
}

impl CsvDoc {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            ..Default::default()
        }
    }

    pub fn comment(&mut self, line: impl Into<String>) -> &mut Self {
        self.comments.push(line.into());
        self
    }

    pub fn row(&mut self, values: Vec<Option<f64>>) -> Result<&mut Self> {
        if values.len() != self.columns.len() {
            return Err(Error::Usage(format!(
                "row has {} cells, header has {}",
                values.len(),
                self.columns.len()
            )));
        }
        self.rows.push(values);
        Ok(self)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            let _ = writeln!(out, "# {c}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for r in &self.rows {
            let cells: Vec<String> = r
                .iter()
                .map(|v| v.map(|x| x.to_string()).unwrap_or_default())
                .collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

/// Parsed CSV document.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl CsvTable {
    pub fn parse(text: &str) -> Result<Self> {
        let mut comments = Vec::new();
        let mut columns: Option<Vec<String>> = None;
        let mut rows = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            if let Some(c) = line.strip_prefix('#') {
                comments.push(c.strip_prefix(' ').unwrap_or(c).to_string());
                continue;
            }
            if line.is_empty() {
                continue;
            }
            match &columns {
                None => columns = Some(line.split(',').map(str::to_string).collect()),
                Some(cols) => {
                    let cells = line
                        .split(',')
                        .map(|c| {
                            if c.is_empty() {
                                Ok(None)
                            } else {
                                c.parse::<f64>().map(Some).map_err(|_| {
                                    Error::Config(format!("line {}: {c:?} is not a number", ln + 1))
                                })
                            }
                        })
                        .collect::<Result<Vec<_>>>()?;
                    if cells.len() != cols.len() {
                        return Err(Error::Config(format!(
                            "line {}: {} cells, header has {}",
                            ln + 1,
                            cells.len(),
                            cols.len()
                        )));
                    }
                    rows.push(cells);
                }
            }
        }
        Ok(Self {
            comments,
            columns: columns.ok_or_else(|| Error::Config("CSV has no header row".into()))?,
            rows,
        })
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}
