use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::args::{Format, OutputArgs};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    /// Deliberately blank, e.g. θ_g at a gap closing.
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format_sig(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => json!(x),
            Cell::Int(i) => json!(i),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

/// 12 significant digits in scientific notation.
pub fn format_sig(x: f64) -> String {
    format!("{x:.11e}")
}

/// Rows with a fixed header, a footer of key/value comments and a sidecar error log.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub footer: Vec<(String, String)>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
            footer: Vec::new(),
        }
    }

    /// Appends a row; non-finite numbers are refused so they never reach a data file.
    pub fn push(&mut self, row: Vec<Cell>) -> anyhow::Result<()> {
        if row.len() != self.columns.len() {
            bail!(
                "row has {} cells for {} columns",
                row.len(),
                self.columns.len()
            );
        }
        if let Some((i, _)) = row
            .iter()
            .enumerate()
            .find(|(_, c)| matches!(c, Cell::Num(x) if !x.is_finite()))
        {
            bail!("non-finite value in column {}", self.columns[i]);
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.footer.push((key.to_string(), value.to_string()));
    }

    fn write_csv(&self, w: &mut dyn Write) -> io::Result<()> {
        writeln!(w, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        for (k, v) in &self.footer {
            writeln!(w, "# {k}={v}")?;
        }
        Ok(())
    }

    fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
            .collect();
        let footer: Map<String, Value> = self
            .footer
            .iter()
            .map(|(k, v)| (k.clone(), json!(v)))
            .collect();
        json!({ "columns": self.columns, "rows": rows, "footer": footer })
    }
}

pub fn config_hash(config: &Value) -> String {
    let bytes = serde_json::to_vec(config).expect("config serializes");
    Sha256::digest(&bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Standard footer: config hash, step scheme and (unless reproducible) a timestamp.
pub fn stamp(table: &mut Table, config: &Value, scheme: Option<&str>, output: &OutputArgs) {
    table.note("config_sha256", config_hash(config));
    if let Some(s) = scheme {
        table.note("step_scheme", s);
    }
    if !output.reproducible {
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        table.note("generated_unix", secs);
    }
}

fn sink(out: &Option<PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn write_table(table: &Table, output: &OutputArgs, default: Format) -> anyhow::Result<()> {
    let mut w = sink(&output.out)?;
    match output.format.unwrap_or(default) {
        Format::Csv => table.write_csv(&mut w)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, &table.to_json())?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_json(value: &Value, output: &OutputArgs) -> anyhow::Result<()> {
    let mut w = sink(&output.out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Error lines go next to the data file as `<out>.log`, or to stderr without `--out`.
pub struct ErrorLog {
    path: Option<PathBuf>,
    lines: Vec<String>,
}

impl ErrorLog {
    pub fn new(out: &Option<PathBuf>) -> Self {
        Self {
            path: out.as_deref().map(log_path),
            lines: Vec::new(),
        }
    }

    pub fn record(&mut self, line: String) {
        self.lines.push(line);
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn finish(self) -> anyhow::Result<()> {
        match &self.path {
            Some(p) => {
                if self.lines.is_empty() {
                    // a stale log from an earlier run would be misleading
                    if p.exists() {
                        std::fs::remove_file(p)?;
                    }
                    return Ok(());
                }
                let mut f = BufWriter::new(File::create(p)?);
                for l in &self.lines {
                    writeln!(f, "{l}")?;
                }
                f.flush()?;
            }
            None => {
                for l in &self.lines {
                    eprintln!("{l}");
                }
            }
        }
        Ok(())
    }
}

pub fn log_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".log");
    PathBuf::from(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_sig(0.018933), "1.89330000000e-2");
        assert_eq!(format_sig(-3.0), "-3.00000000000e0");
        assert_eq!(format_sig(0.0), "0.00000000000e0");
    }

    #[test]
    fn refuses_nan() {
        let mut t = Table::new(vec!["a".into(), "b".into()]);
        assert!(t.push(vec![Cell::Num(1.0), Cell::Num(f64::NAN)]).is_err());
        assert!(t.push(vec![Cell::Num(1.0)]).is_err());
        assert!(t.push(vec![Cell::Num(1.0), Cell::Empty]).is_ok());
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b\n1.00000000000e0,\n");
    }

    #[test]
    fn hash_is_stable() {
        let a = json!({"b": 1, "a": [1.5, 2]});
        let b = json!({"a": [1.5, 2], "b": 1});
        assert_eq!(config_hash(&a), config_hash(&b));
        assert_eq!(config_hash(&a).len(), 64);
    }
}
