//! Tabular output as CSV or JSON.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde_json::{Map, Number, Value};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Significant digits for floating-point output (1-15)
    #[arg(long, global = true, default_value_t = 9, value_parser = clap::value_parser!(u8).range(1..=15))]
    pub precision: u8,

    /// Write to this file instead of standard output
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    /// Printed with the shortest round-trip representation.
    Exact(f64),
    Int(u64),
    Bool(bool),
    Text(String),
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(headers: impl IntoIterator<Item = S>) -> Self {
        Self { headers: headers.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }
}

/// `v` with `digits` significant digits, trailing zeros removed.
pub fn format_sig(v: f64, digits: usize) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let s = format!("{:.*e}", digits - 1, v);
    // rounding can carry into the next decade
    let (mantissa, e) = s.split_once('e').unwrap();
    let e: i32 = e.parse().unwrap();
    if (-5..digits as i32).contains(&e) {
        let decimals = (digits as i32 - 1 - e).max(0) as usize;
        trim(format!("{v:.decimals$}"))
    } else {
        format!("{}e{e}", trim(mantissa.to_string()))
    }
}

fn trim(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

impl Cell {
    fn text(&self, digits: usize) -> String {
        match self {
            Cell::Num(v) => format_sig(*v, digits),
            Cell::Exact(v) => format!("{v:?}"),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self, digits: usize) -> Value {
        match self {
            Cell::Num(_) | Cell::Exact(_) => {
                let s = self.text(digits);
                s.parse::<f64>().ok().and_then(Number::from_f64).map_or(Value::String(s), Value::Number)
            }
            Cell::Int(v) => Value::from(*v),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn emit(table: &Table, args: &OutputArgs) -> Result<(), CliError> {
    let digits = args.precision as usize;
    let mut w = sink(&args.out)?;
    match args.format {
        Format::Csv => {
            let mut csv = csv::Writer::from_writer(&mut w);
            csv.write_record(&table.headers)?;
            for row in &table.rows {
                csv.write_record(row.iter().map(|c| c.text(digits)))?;
            }
            csv.flush()?;
        }
        Format::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> =
                        table.headers.iter().cloned().zip(row.iter().map(|c| c.json(digits))).collect();
                    Value::Object(obj)
                })
                .collect();
            serde_json::to_writer_pretty(&mut w, &rows).map_err(|e| CliError::Io(e.to_string()))?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}
