//! CSV emission helpers. All floats are serialized with 17 significant
//! digits so a round-trip through text is exact for `f64`.

/// Formats a float with 17 significant digits (round-trip exact).
pub fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        return "NaN".to_string();
    }
    format!("{v:.16e}")
}

/// A CSV table with a mandatory header row.
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        CsvTable {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, cells: Vec<String>) {
        assert_eq!(cells.len(), self.header.len(), "row arity mismatch");
        self.rows.push(cells);
    }

    pub fn push_floats(&mut self, values: &[f64]) {
        self.push_row(values.iter().map(|&v| fmt_float(v)).collect());
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Cell helper: integer column.
pub fn cell_usize(v: usize) -> String {
    v.to_string()
}
