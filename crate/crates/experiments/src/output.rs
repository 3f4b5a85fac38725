//! CSV tables with fixed headers and significant-digit formatting.

use std::path::{Path, PathBuf};

use crate::AppError;

/// Formats `v` with `digits` significant digits. Plain notation is used for
/// moderate magnitudes, scientific otherwise; trailing zeros are dropped.
pub fn fmt_num(v: f64, digits: usize) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let digits = digits.clamp(1, 17);
    let mag = v.abs().log10().floor() as i32;
    if (-5..15).contains(&mag) {
        let decimals = (digits as i32 - 1 - mag).max(0) as usize;
        let s = format!("{v:.decimals$}");
        trim_zeros(s)
    } else {
        let s = format!("{:.*e}", digits - 1, v);
        match s.split_once('e') {
            Some((m, e)) => format!("{}e{}", trim_zeros(m.to_string()), e),
            None => s,
        }
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" {
        "0".into()
    } else {
        t.to_string()
    }
}

/// A CSV table assembled in memory and written in one go.
#[derive(Debug, Clone)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    digits: usize,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S], digits: usize) -> Self {
        Self { header: header.iter().map(|s| s.as_ref().to_string()).collect(), rows: Vec::new(), digits }
    }

    pub fn num(&self, v: f64) -> String {
        fmt_num(v, self.digits)
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Row of numbers only.
    pub fn push_nums(&mut self, vals: &[f64]) {
        let row = vals.iter().map(|&v| self.num(v)).collect();
        self.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn write(&self, path: &Path) -> Result<(), AppError> {
        let mut w = csv::Writer::from_path(path).map_err(|e| AppError::Io(format!("{}: {e}", path.display())))?;
        let io = |e: csv::Error| AppError::Io(format!("{}: {e}", path.display()));
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        w.flush().map_err(|e| AppError::Io(format!("{}: {e}", path.display())))?;
        Ok(())
    }
}

/// Output directory plus precision, shared by all commands.
#[derive(Debug, Clone)]
pub struct Sink {
    pub dir: PathBuf,
    pub digits: usize,
}

impl Sink {
    pub fn new(dir: PathBuf, digits: usize) -> Result<Self, AppError> {
        std::fs::create_dir_all(&dir).map_err(|e| AppError::Io(format!("{}: {e}", dir.display())))?;
        Ok(Self { dir, digits })
    }

    pub fn table<S: AsRef<str>>(&self, header: &[S]) -> Table {
        Table::new(header, self.digits)
    }

    pub fn save(&self, name: &str, table: &Table) -> Result<PathBuf, AppError> {
        let path = self.dir.join(name);
        table.write(&path)?;
        Ok(path)
    }
}
