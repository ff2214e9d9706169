/// Numeric table written as CSV with `name [unit]` headers and 17
/// significant digits per value.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<(&'static str, &'static str)>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[(&'static str, &'static str)]) -> Self {
        Self { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(self.columns.iter().map(|(n, u)| format!("{n} [{u}]")))
            .expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format!("{v:.16e}"))).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ASCII output")
    }

    /// Reads back a table written by [`Table::to_csv`]: column names
    /// (units stripped) and rows.
    pub fn parse_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>), String> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let names = r
            .headers()
            .map_err(|e| e.to_string())?
            .iter()
            .map(|h| h.split(" [").next().unwrap_or(h).to_owned())
            .collect();
        let mut rows = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec.map_err(|e| e.to_string())?;
            let row: Result<Vec<f64>, _> = rec.iter().map(str::parse).collect();
            rows.push(row.map_err(|e| format!("row {}: {e}", i + 1))?);
        }
        Ok((names, rows))
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|(n, _)| *n == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}
