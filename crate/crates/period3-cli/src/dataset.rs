//! Rectangular CSV datasets with a `#`-prefixed provenance header.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Extra `# key: value` header lines.
    pub notes: Vec<(String, String)>,
}

/// Shortest round-trip formatting, so a re-run reproduces the file exactly.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x}")
    }
}

impl Dataset {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn note(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.notes.push((key.into(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: &[f64]) {
        self.push_cells(row.iter().map(|&x| num(x)).collect());
    }

    pub fn push_cells(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.columns.len(), "row width differs from the header in {}", self.name);
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn render(&self, provenance: &[(String, String)]) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# dataset: {}", self.name);
        let _ = writeln!(s, "# generator: period3 {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(s, "# units: scaled rotating-frame units");
        for (k, v) in provenance.iter().chain(&self.notes) {
            let _ = writeln!(s, "# {k}: {v}");
        }
        let _ = writeln!(s, "{}", self.columns.join(","));
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|c| c.replace([',', '\n'], ";")).collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }

    pub fn write(&self, dir: &Path, provenance: &[(String, String)]) -> io::Result<PathBuf> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(format!("{}.csv", self.name));
        std::fs::write(&path, self.render(provenance))?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_then_rectangular_rows() {
        let mut d = Dataset::new("demo", &["a", "b"]);
        d.push(&[1.0, 0.1]);
        d.push_cells(vec!["x,y".into(), "nan".into()]);
        let text = d.render(&[("command".into(), "test".into())]);
        let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(body, ["a,b", "1,0.1", "x;y,nan"]);
        assert!(text.contains("# command: test"));
    }
}
