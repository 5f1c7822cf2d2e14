//! CSV result tables with a commented header.
//!
//! Layout: `# ` lines hold the resolved configuration as TOML (strip the
//! prefix and it parses back), `#! key = value` lines hold metadata, then one
//! header row and the data rows. Floats are written with 17 significant
//! digits; a missing value is an empty cell.

use std::fmt::Write as _;
use std::io::Write;

use anyhow::{ensure, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Column {
    Numbers(Vec<Option<f64>>),
    Labels(Vec<String>),
}

impl Column {
    fn len(&self) -> usize {
        match self {
            Column::Numbers(v) => v.len(),
            Column::Labels(v) => v.len(),
        }
    }

    fn cell(&self, i: usize) -> String {
        match self {
            Column::Numbers(v) => v[i].map(format_float).unwrap_or_default(),
            Column::Labels(v) => v[i].clone(),
        }
    }
}

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResultTable {
    config: String,
    metadata: Vec<(String, String)>,
    columns: Vec<(String, Column)>,
}

impl ResultTable {
    pub fn new(config_toml: &str) -> Self {
        Self { config: config_toml.to_string(), ..Self::default() }
    }

    pub fn meta(&mut self, key: impl Into<String>, value: impl ToString) {
        self.metadata.push((key.into(), value.to_string()));
    }

    pub fn meta_float(&mut self, key: impl Into<String>, value: f64) {
        self.meta(key, format_float(value));
    }

    pub fn numbers(&mut self, name: impl Into<String>, values: Vec<Option<f64>>) {
        self.columns.push((name.into(), Column::Numbers(values)));
    }

    pub fn dense(&mut self, name: impl Into<String>, values: Vec<f64>) {
        self.numbers(name, values.into_iter().map(Some).collect());
    }

    pub fn labels(&mut self, name: impl Into<String>, values: Vec<String>) {
        self.columns.push((name.into(), Column::Labels(values)));
    }

    pub fn column_names(&self) -> Vec<&str> {
        self.columns.iter().map(|(n, _)| n.as_str()).collect()
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, |(_, c)| c.len())
    }

    pub fn render(&self) -> Result<String> {
        let rows = self.rows();
        for (name, c) in &self.columns {
            ensure!(c.len() == rows, "column `{name}` has {} rows, expected {rows}", c.len());
        }
        let mut out = String::new();
        for line in self.config.lines() {
            writeln!(out, "# {line}")?;
        }
        for (k, v) in &self.metadata {
            writeln!(out, "#! {k} = {v}")?;
        }
        writeln!(out, "{}", self.column_names().join(","))?;
        for i in 0..rows {
            let cells: Vec<String> = self.columns.iter().map(|(_, c)| c.cell(i)).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(out)
    }

    pub fn write(&self, mut w: impl Write) -> Result<()> {
        w.write_all(self.render()?.as_bytes())?;
        Ok(())
    }
}

/// The configuration section of a rendered table.
#[cfg(test)]
pub fn config_section(csv: &str) -> String {
    csv.lines()
        .filter(|l| l.starts_with("# ") || *l == "#")
        .map(|l| l.strip_prefix("# ").unwrap_or(""))
        .fold(String::new(), |mut s, l| {
            s.push_str(l);
            s.push('\n');
            s
        })
}
