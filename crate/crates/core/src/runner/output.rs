use serde::Serialize;
use std::io::Write;

use super::config::OutputFormat;
use crate::error::Result;

/// Version of the column layout of every command's table.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Self::Float(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Self::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Self::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Self::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Self::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Self::Text(v)
    }
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Float(v) => f.write_str(&format_float(*v)),
            Self::Int(v) => write!(f, "{v}"),
            Self::Text(s) => {
                if s.contains([',', '"', '\n']) {
                    write!(f, "\"{}\"", s.replace('"', "\"\""))
                } else {
                    f.write_str(s)
                }
            }
        }
    }
}

/// Shortest digit string that parses back to the same double; scientific
/// notation outside [1e-5, 1e16).
pub fn format_float(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || !a.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// Result of a run: metadata, one table, and summary values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunOutput {
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Vec<(String, Cell)>,
}

impl RunOutput {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            metadata: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            summary: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.push((key.to_string(), value.to_string()));
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn summary(&mut self, key: &str, value: impl Into<Cell>) {
        self.summary.push((key.to_string(), value.into()));
    }

    pub fn summary_value(&self, key: &str) -> Option<&Cell> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    /// CSV: `# key: value` metadata lines, a header, the rows, then
    /// `summary,key,value` lines.
    pub fn write_csv(&self, w: &mut impl Write) -> Result<()> {
        for (k, v) in &self.metadata {
            writeln!(w, "# {k}: {v}")?;
        }
        writeln!(w, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|c| c.to_string()).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        for (k, v) in &self.summary {
            writeln!(w, "summary,{k},{v}")?;
        }
        Ok(())
    }

    pub fn write_json(&self, w: &mut impl Write) -> Result<()> {
        let doc = serde_json::json!({
            "metadata": self.metadata.iter().map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone()))).collect::<serde_json::Map<String, serde_json::Value>>(),
            "columns": self.columns,
            "rows": self.rows,
            "summary": self.summary.iter().map(|(k, v)| (k.clone(), serde_json::to_value(v).unwrap_or(serde_json::Value::Null))).collect::<serde_json::Map<_, _>>(),
        });
        serde_json::to_writer_pretty(&mut *w, &doc).map_err(|e| crate::Error::Io(e.to_string()))?;
        writeln!(w)?;
        Ok(())
    }

    pub fn write(&self, format: OutputFormat, w: &mut impl Write) -> Result<()> {
        match format {
            OutputFormat::Csv => self.write_csv(w),
            OutputFormat::Json => self.write_json(w),
        }
    }

    pub fn to_string(&self, format: OutputFormat) -> String {
        let mut buf = Vec::new();
        self.write(format, &mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("utf-8 output")
    }
}

/// Strips `# ...` metadata lines, leaving header, rows and summary.
pub fn csv_data_section(text: &str) -> String {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RunOutput {
        let mut o = RunOutput::new(&["run", "x", "label"]);
        o.meta("seed", 3);
        o.push(vec![0usize.into(), 0.1.into(), "a,b".into()]);
        o.push(vec![1usize.into(), 1e-300.into(), "c".into()]);
        o.summary("mean", 0.30000000000000004);
        o
    }

    #[test]
    fn csv_layout() {
        let s = sample().to_string(OutputFormat::Csv);
        assert_eq!(
            s,
            "# seed: 3\nrun,x,label\n0,0.1,\"a,b\"\n1,1e-300,c\nsummary,mean,0.30000000000000004\n"
        );
        assert!(!csv_data_section(&s).contains("seed"));
    }

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-17, 1e16, 99999.99, 1.5e-5, 0.0] {
            let c = Cell::Float(v).to_string();
            assert_eq!(c.parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn json_layout() {
        let s = sample().to_string(OutputFormat::Json);
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["columns"][2], "label");
        assert_eq!(v["rows"][0][1], 0.1);
        assert_eq!(v["summary"]["mean"], 0.30000000000000004);
        assert_eq!(v["metadata"]["seed"], "3");
    }
}
