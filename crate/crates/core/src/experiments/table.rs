//! String table with CSV output and trailing metadata comments.

use std::io::Write;

use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Emitted as `# key=value` lines after the rows.
    pub notes: Vec<(String, String)>,
}

impl ResultTable {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), ..Self::default() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.notes.push((key.to_string(), value.to_string()));
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Writes header, rows, notes and finally `# config_hash=<hash>`.
    pub fn write_csv<W: Write>(&self, mut out: W, config_hash: &str) -> Result<()> {
        {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(&self.header)?;
            for row in &self.rows {
                w.write_record(row)?;
            }
            w.flush()?;
        }
        for (k, v) in &self.notes {
            writeln!(out, "# {k}={v}")?;
        }
        writeln!(out, "# config_hash={config_hash}")?;
        Ok(())
    }
}

/// Shortest round-trip rendering; empty for `None`.
pub fn num(x: f64) -> String {
    format!("{x}")
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout() {
        let mut t = ResultTable::new(&["a", "b"]);
        t.push(vec![num(1.5), opt(None)]);
        t.note("x", 3);
        let mut buf = Vec::new();
        t.write_csv(&mut buf, "ab12").unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b\n1.5,\n# x=3\n# config_hash=ab12\n");
        assert_eq!(t.column("b"), Some(1));
    }
}
