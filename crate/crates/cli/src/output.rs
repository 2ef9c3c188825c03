use crate::spec::{Format, RunSpec};
use serde::Serialize;
use serde_json::{json, Map, Value};
use std::io::Write;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Num(v as f64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Prepends a constant column to every row.
    pub fn with_leading(mut self, name: &str, value: Cell) -> Self {
        self.columns.insert(0, name.to_string());
        for r in &mut self.rows {
            r.insert(0, value.clone());
        }
        self
    }

    /// Appends the rows of `other`, which must have the same columns.
    pub fn extend(&mut self, other: Table) {
        if self.columns.is_empty() {
            *self = other;
        } else {
            self.rows.extend(other.rows);
        }
    }
}

/// Metadata reported next to every result.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct Meta {
    /// Largest 1 − Σ_{j<J} A_j over every parameter set the run touched.
    pub residual_mass: f64,
}

/// 12 significant digits, shortest form.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "NaN".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{v:.decimals$}");
        trim_fraction(&s)
    } else {
        let s = format!("{v:.11e}");
        let (mantissa, e) = s.split_once('e').unwrap_or((&s, "0"));
        format!("{}e{}", trim_fraction(mantissa), e)
    }
}

fn trim_fraction(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

pub fn write_table(
    out: &mut dyn Write,
    table: &Table,
    spec: &RunSpec,
    meta: &Meta,
) -> std::io::Result<()> {
    match spec.format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(out);
            w.write_record(&table.columns)?;
            for row in &table.rows {
                w.write_record(row.iter().map(|c| match c {
                    Cell::Num(v) => format_number(*v),
                    Cell::Text(t) => t.clone(),
                }))?;
            }
            w.flush()?;
            Ok(())
        }
        Format::Json => {
            let mut columns = Map::new();
            for (i, name) in table.columns.iter().enumerate() {
                let values: Vec<Value> = table
                    .rows
                    .iter()
                    .map(|r| match &r[i] {
                        Cell::Num(v) => number(*v),
                        Cell::Text(t) => Value::String(t.clone()),
                    })
                    .collect();
                columns.insert(name.clone(), Value::Array(values));
            }
            let mut inputs = serde_json::to_value(spec)?;
            if let Value::Object(m) = &mut inputs {
                m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
            }
            let doc = json!({
                "inputs": inputs,
                "metadata": meta,
                "column_order": table.columns,
                "columns": columns,
            });
            serde_json::to_writer_pretty(&mut *out, &doc)?;
            out.write_all(b"\n")
        }
    }
}

fn number(v: f64) -> Value {
    // round through the 12-digit text form so CSV and JSON carry the same values
    format_number(v)
        .parse::<f64>()
        .ok()
        .and_then(serde_json::Number::from_f64)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_number(1.0), "1");
        assert_eq!(format_number(0.1 + 0.2), "0.3");
        assert_eq!(format_number(std::f64::consts::PI), "3.14159265359");
        assert_eq!(format_number(-2.5e-7), "-2.5e-7");
        assert_eq!(format_number(6.02214076e23), "6.02214076e23");
        assert_eq!(format_number(123456789012.0), "123456789012");
        assert_eq!(format_number(0.000123456789012345), "0.000123456789012");
        assert_eq!(format_number(0.0), "0");
    }
}
