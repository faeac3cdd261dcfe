//! CSV and JSON tables of sweep rows.
//!
//! CSV numbers are written with 17 significant digits (`{:.16e}`), which
//! round-trips every f64 exactly; missing values are empty fields.

use std::io::{Read, Write};

use serde::Serialize;
use thiserror::Error;

use super::SweepRow;

pub const CSV_HEADER: [&str; 15] = [
    "axis_value",
    "total",
    "thermal_term",
    "m_term",
    "n_term",
    "vacuum_term",
    "squeezing_percent",
    "q_s",
    "abs_c_s",
    "multistable",
    "stable",
    "linearization_valid",
    "quad_error",
    "tolerance_met",
    "check_residual",
];

#[derive(Debug, Error)]
pub enum OutputError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("bad field `{field}` = {value:?} on line {line}")]
    BadField {
        field: &'static str,
        value: String,
        line: u64,
    },
    #[error("unexpected header: {0:?}")]
    BadHeader(Vec<String>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(format_f64).unwrap_or_default()
}

fn record(r: &SweepRow) -> [String; 15] {
    [
        format_f64(r.axis_value),
        opt(r.total),
        opt(r.thermal_term),
        opt(r.m_term),
        opt(r.n_term),
        opt(r.vacuum_term),
        opt(r.squeezing_percent),
        opt(r.q_s),
        opt(r.abs_c_s),
        r.multistable.to_string(),
        r.stable.to_string(),
        r.linearization_valid.to_string(),
        opt(r.quad_error),
        r.tolerance_met.to_string(),
        opt(r.check_residual),
    ]
}

pub fn write_csv<W: Write>(rows: &[SweepRow], w: W) -> Result<(), OutputError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_HEADER)?;
    for r in rows {
        out.write_record(record(r))?;
    }
    out.flush()?;
    Ok(())
}

/// Nested sweep as one table with a leading `outer_value` column.
pub fn write_csv_2d<W: Write>(table: &[(f64, Vec<SweepRow>)], w: W) -> Result<(), OutputError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(std::iter::once("outer_value").chain(CSV_HEADER))?;
    for (outer, rows) in table {
        for r in rows {
            out.write_record(std::iter::once(format_f64(*outer)).chain(record(r)))?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(r: R) -> Result<Vec<SweepRow>, OutputError> {
    let mut reader = csv::Reader::from_reader(r);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    if header != CSV_HEADER {
        return Err(OutputError::BadHeader(header));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| record.get(i).unwrap_or("");
        let num = |i: usize| -> Result<Option<f64>, OutputError> {
            let s = field(i);
            if s.is_empty() {
                return Ok(None);
            }
            s.parse().map(Some).map_err(|_| OutputError::BadField {
                field: CSV_HEADER[i],
                value: s.to_owned(),
                line,
            })
        };
        let flag = |i: usize| -> Result<bool, OutputError> {
            field(i).parse().map_err(|_| OutputError::BadField {
                field: CSV_HEADER[i],
                value: field(i).to_owned(),
                line,
            })
        };
        rows.push(SweepRow {
            axis_value: num(0)?.ok_or(OutputError::BadField {
                field: "axis_value",
                value: String::new(),
                line,
            })?,
            total: num(1)?,
            thermal_term: num(2)?,
            m_term: num(3)?,
            n_term: num(4)?,
            vacuum_term: num(5)?,
            squeezing_percent: num(6)?,
            q_s: num(7)?,
            abs_c_s: num(8)?,
            multistable: flag(9)?,
            stable: flag(10)?,
            linearization_valid: flag(11)?,
            quad_error: num(12)?,
            tolerance_met: flag(13)?,
            check_residual: num(14)?,
        });
    }
    Ok(rows)
}

pub fn write_json<W: Write>(rows: &[SweepRow], mut w: W) -> Result<(), OutputError> {
    serde_json::to_writer_pretty(&mut w, rows)?;
    writeln!(w)?;
    Ok(())
}

#[derive(Serialize)]
struct Block<'a> {
    outer_value: f64,
    rows: &'a [SweepRow],
}

pub fn write_json_2d<W: Write>(table: &[(f64, Vec<SweepRow>)], mut w: W) -> Result<(), OutputError> {
    let blocks: Vec<Block> = table.iter().map(|(v, rows)| Block { outer_value: *v, rows }).collect();
    serde_json::to_writer_pretty(&mut w, &blocks)?;
    writeln!(w)?;
    Ok(())
}

pub fn write_table_2d<W: Write>(table: &[(f64, Vec<SweepRow>)], format: Format, w: W) -> Result<(), OutputError> {
    match format {
        Format::Csv => write_csv_2d(table, w),
        Format::Json => write_json_2d(table, w),
    }
}

pub fn write_rows<W: Write>(rows: &[SweepRow], format: Format, w: W) -> Result<(), OutputError> {
    match format {
        Format::Csv => write_csv(rows, w),
        Format::Json => write_json(rows, w),
    }
}
