//! CSV tables: header row, LF endings, 12 significant digits.

use std::path::Path;

/// Scientific notation with 12 significant digits; NaN (undefined) becomes an empty cell.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.11e}")
    }
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Power in W and dBm, as two cells.
pub fn power(w: f64) -> [String; 2] {
    [num(w), num(radcoex::dbm(w))]
}

pub fn opt_power(w: Option<f64>) -> [String; 2] {
    match w {
        Some(w) => power(w),
        None => [String::new(), String::new()],
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path) -> csv::Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path)?;
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn join_warnings<I: IntoIterator<Item = String>>(w: I) -> String {
    let mut v: Vec<String> = w.into_iter().filter(|s| !s.is_empty()).collect();
    v.dedup();
    v.join("; ")
}
