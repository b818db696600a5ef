//! Sweep output table and CSV serialization.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Sweep output: named columns, rows of optional reals (empty = sentinel
/// for undefined observables), plus provenance lines echoed into the CSV
/// header.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
    pub provenance: Vec<String>,
}

impl ResultTable {
    pub fn validate(&self) -> Result<()> {
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != self.columns.len() {
                return Err(Error::ShapeMismatch {
                    context: format!(
                        "row {i} has {} fields, table has {} columns",
                        row.len(),
                        self.columns.len()
                    ),
                });
            }
        }
        Ok(())
    }

    /// Index of a column by name.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// All present (non-sentinel) values of a column.
    pub fn column_values(&self, name: &str) -> Vec<f64> {
        match self.column(name) {
            Some(idx) => self.rows.iter().filter_map(|r| r[idx]).collect(),
            None => Vec::new(),
        }
    }

    /// Serialize to CSV: `#`-prefixed provenance lines, a header row, then
    /// one comma-separated data row per grid point. Floats carry 17
    /// significant digits so a reparse is bit-exact; sentinel values are
    /// empty fields.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        for line in &self.provenance {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let mut first = true;
            for cell in row {
                if !first {
                    out.push(',');
                }
                first = false;
                if let Some(v) = cell {
                    out.push_str(&format_float(*v));
                }
            }
            out.push('\n');
        }
        out
    }
}

/// 17 significant digits, scientific, locale-independent.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Write the table to `path` as CSV.
pub fn write_csv(table: &ResultTable, path: &Path) -> Result<()> {
    table.validate()?;
    let mut file = File::create(path)?;
    file.write_all(table.to_csv_string().as_bytes())?;
    Ok(())
}
