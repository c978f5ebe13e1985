use std::fmt::Write as _;

/// Rounds to 12 significant digits and prints the shortest form that reads
/// back to the rounded value.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0.0".into();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float");
    format!("{rounded:?}")
}

/// A CSV table with optional trailing comment lines. Rows are strings so
/// mixed columns (cut labels, flags) need no special casing.
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    notes: Vec<String>,
}

impl Table {
    pub fn new(cols: &[&str]) -> Self {
        Self { header: cols.iter().map(|s| s.to_string()).collect(), rows: Vec::new(), notes: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.notes.push(line.into());
    }

    /// Appends a `converged` column, used only when some solve failed.
    pub fn add_converged(&mut self, flags: &[bool]) {
        self.header.push("converged".into());
        for (row, ok) in self.rows.iter_mut().zip(flags) {
            row.push(ok.to_string());
        }
    }

    pub fn render(&self, seed: u64) -> String {
        let mut s = String::new();
        writeln!(s, "# gme-lab {} seed={seed}", gme_core::VERSION).unwrap();
        writeln!(s, "{}", self.header.join(",")).unwrap();
        for r in &self.rows {
            writeln!(s, "{}", r.join(",")).unwrap();
        }
        for n in &self.notes {
            writeln!(s, "# {n}").unwrap();
        }
        s
    }
}

#[macro_export]
macro_rules! row {
    ($($x:expr),* $(,)?) => {
        vec![$($crate::table::Cell::cell(&$x)),*]
    };
}

pub trait Cell {
    fn cell(&self) -> String;
}

impl Cell for f64 {
    fn cell(&self) -> String {
        num(*self)
    }
}

macro_rules! display_cell {
    ($($t:ty),*) => {
        $(impl Cell for $t {
            fn cell(&self) -> String {
                self.to_string()
            }
        })*
    };
}

display_cell!(usize, u64, bool, &str, String);

impl<T: Cell> Cell for Option<T> {
    fn cell(&self) -> String {
        self.as_ref().map(Cell::cell).unwrap_or_default()
    }
}
