use std::io::Write;
use std::path::Path;

use crate::CliError;

/// Significant digits of every numeric cell.
pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Int(i64),
    Num(f64),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// `%.12g`-style rendering: fixed notation for exponents in `-5..12`,
/// scientific otherwise, trailing zeros trimmed.
pub fn format_g(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if (-5..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa.to_string()), exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn render(table: &Table, sink: impl Write) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink);
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|c| match c {
            Cell::Text(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Num(v) => format_g(*v),
        }))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `table` as comma-separated UTF-8 with a header row, to `path` or
/// to stdout.
pub fn write_csv(table: &Table, path: Option<&Path>) -> Result<(), CliError> {
    for row in &table.rows {
        for (cell, name) in row.iter().zip(&table.header) {
            if let Cell::Num(v) = cell {
                if !v.is_finite() {
                    return Err(CliError::NonFinite { column: name.clone() });
                }
            }
        }
    }
    match path {
        Some(path) => {
            let io = |source| CliError::Io {
                path: path.to_path_buf(),
                source,
            };
            let file = std::fs::File::create(path).map_err(io)?;
            render(table, std::io::BufWriter::new(file)).map_err(|e| io(e.into()))
        }
        None => render(table, std::io::stdout().lock()).map_err(|e| CliError::Io {
            path: "<stdout>".into(),
            source: e.into(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn general_format() {
        assert_eq!(format_g(0.0), "0");
        assert_eq!(format_g(4.0), "4");
        assert_eq!(format_g(0.3), "0.3");
        assert_eq!(format_g(-2.5), "-2.5");
        assert_eq!(format_g(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_g(2.50201166034), "2.50201166034");
        assert_eq!(format_g(1e-3), "0.001");
        assert_eq!(format_g(1.5e-7), "1.5e-07");
        assert_eq!(format_g(123456789012345.0), "1.23456789012e+14");
        assert_eq!(format_g(0.15000000000000002), "0.15");
    }
}
