use std::io::Write;

use rug::Float;
use serde_json::{Map, Value};

/// One output cell.
#[derive(Debug, Clone)]
pub enum Cell {
    Empty,
    Text(String),
    Int(i64),
    Real(f64),
    Bool(bool),
    /// Extended-precision value printed with `digits` significant digits.
    Big(Float, usize),
}

impl Cell {
    pub fn big(v: Float) -> Self {
        let digits = digits_for(v.prec());
        Cell::Big(v, digits)
    }

    fn text(&self) -> String {
        match self {
            Cell::Empty => String::new(),
            Cell::Text(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Real(x) => format_real(*x),
            Cell::Bool(b) => b.to_string(),
            Cell::Big(v, d) => format_big(v, *d),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Empty => Value::Null,
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Int(i) => Value::from(*i),
            Cell::Real(x) if x.is_finite() => Value::from(*x),
            Cell::Bool(b) => Value::Bool(*b),
            // strings keep every printed digit; non-finite reals have no JSON number
            other => Value::String(other.text()),
        }
    }
}

/// Significant decimal digits carried by a mantissa of `bits` bits, less a guard digit.
pub fn digits_for(bits: u32) -> usize {
    ((bits as f64 * std::f64::consts::LOG10_2).floor() as usize)
        .saturating_sub(1)
        .max(15)
}

pub fn format_real(x: f64) -> String {
    if x == 0.0 || (x.abs() >= 1e-4 && x.abs() < 1e15) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn format_big(v: &Float, digits: usize) -> String {
    if v.is_zero() {
        return "0".into();
    }
    if !v.is_finite() {
        return format_real(v.to_f64());
    }
    let s = v.to_string_radix(10, Some(digits));
    // drop trailing zeros of the mantissa for readability
    let (mantissa, exponent) = match s.find('e') {
        Some(i) => (&s[..i], &s[i..]),
        None => (s.as_str(), ""),
    };
    let mantissa = if mantissa.contains('.') {
        mantissa.trim_end_matches('0').trim_end_matches('.')
    } else {
        mantissa
    };
    format!("{mantissa}{exponent}")
}

/// A rectangular result with named columns.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.columns)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::text))?;
                }
                w.flush()
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let mut m = Map::new();
                        for (k, v) in self.columns.iter().zip(row) {
                            m.insert(k.clone(), v.json());
                        }
                        Value::Object(m)
                    })
                    .collect();
                serde_json::to_writer_pretty(&mut *out, &Value::Array(rows))?;
                writeln!(out)
            }
        }
    }
}
