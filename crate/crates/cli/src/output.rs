use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Comma-separated table with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push_numeric(&mut self, row: &[f64]) {
        self.rows.push(row.iter().map(|&v| fmt_f64(v)).collect());
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_csv(&self, timestamp: bool) -> String {
        let mut s = String::new();
        if timestamp {
            let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
            s.push_str(&format!("# generated unix={secs}\n"));
        }
        s.push_str(&self.header.join(","));
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }
}

/// Destination directory plus the header policy.
#[derive(Debug, Clone)]
pub struct Sink {
    pub dir: PathBuf,
    pub timestamp: bool,
}

impl Sink {
    pub fn new(dir: &Path, timestamp: bool) -> Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self { dir: dir.to_path_buf(), timestamp })
    }

    pub fn write_table(&self, name: &str, t: &Table) -> Result<PathBuf> {
        let path = self.dir.join(name);
        std::fs::write(&path, t.to_csv(self.timestamp)).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    pub fn write_text(&self, name: &str, text: &str) -> Result<PathBuf> {
        let path = self.dir.join(name);
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    /// Two-column `x y` file for plotting.
    pub fn write_series(&self, name: &str, xs: &[f64], ys: &[f64]) -> Result<PathBuf> {
        let mut t = Table::new(&["x", "y"]);
        for (x, y) in xs.iter().zip(ys) {
            t.push_numeric(&[*x, *y]);
        }
        self.write_table(name, &t)
    }
}
