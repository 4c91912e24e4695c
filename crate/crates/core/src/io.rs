//! CSV formats: portfolio files in, result tables out.
//!
//! Portfolio files are UTF-8 with a mandatory header `id,f,p,r,w1,...,wm`; the
//! factor count `m` is the number of columns after `r`. Result tables have the
//! fixed header [`RESULT_HEADER`] and `\n` line endings. Floats are written in
//! Rust's shortest round-trip form, so a file written here reads back to the
//! identical bits.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{LoanRecord, Portfolio, ValidationOptions};

pub const RESULT_HEADER: [&str; 9] = [
    "attach",
    "detach",
    "method",
    "order",
    "nodes",
    "value",
    "std_error",
    "runtime_ms",
    "floored_points",
];

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

/// Reads and validates a portfolio from CSV text.
pub fn read_portfolio<R: Read>(reader: R, opts: ValidationOptions) -> Result<Portfolio> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers().map_err(csv_err)?.clone();
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Err(Error::EmptyPortfolio);
    }
    let fixed = ["id", "f", "p", "r"];
    let names_ok = header.len() > fixed.len()
        && header.iter().zip(fixed).all(|(h, want)| h == want)
        && header
            .iter()
            .skip(fixed.len())
            .enumerate()
            .all(|(k, h)| h == format!("w{}", k + 1));
    if !names_ok {
        return Err(Error::Parse(format!(
            "header must be `id,f,p,r,w1[,w2,...]`, found `{}`",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let factors = header.len() - fixed.len();

    let mut records = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let line = row + 2;
        let num = |col: usize| -> Result<f64> {
            let raw = &rec[col];
            raw.parse::<f64>().map_err(|_| {
                Error::Parse(format!("line {line}: column `{}` is not a number: `{raw}`", &header[col]))
            })
        };
        records.push(LoanRecord {
            id: rec[0].to_string(),
            notional: num(1)?,
            default_prob: num(2)?,
            recovery: num(3)?,
            loadings: (4..header.len()).map(num).collect::<Result<_>>()?,
        });
    }
    Portfolio::validate(records, factors, opts)
}

pub fn read_portfolio_file(path: &Path, opts: ValidationOptions) -> Result<Portfolio> {
    let file = File::open(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    read_portfolio(file, opts)
}

/// Writes a portfolio in the format [`read_portfolio`] accepts.
pub fn write_portfolio<W: Write>(portfolio: &Portfolio, writer: W) -> Result<()> {
    let mut wtr = lf_writer(writer);
    let mut header = vec!["id".to_string(), "f".into(), "p".into(), "r".into()];
    header.extend((1..=portfolio.factors()).map(|k| format!("w{k}")));
    wtr.write_record(&header).map_err(csv_err)?;
    for loan in portfolio.loans() {
        let mut row = vec![
            loan.id().to_string(),
            loan.notional().to_string(),
            loan.default_prob().to_string(),
            loan.recovery().to_string(),
        ];
        row.extend(loan.loadings().iter().map(f64::to_string));
        wtr.write_record(&row).map_err(csv_err)?;
    }
    wtr.flush().map_err(|e| Error::Io {
        path: "<output>".into(),
        message: e.to_string(),
    })
}

fn lf_writer<W: Write>(writer: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer)
}

/// One line of a result table. Absent fields are written as empty cells.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub attach: f64,
    pub detach: f64,
    pub method: &'static str,
    pub order: Option<usize>,
    pub nodes: Option<usize>,
    pub value: f64,
    pub std_error: Option<f64>,
    pub runtime_ms: Option<f64>,
    pub floored_points: Option<usize>,
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_results<W: Write>(rows: &[ResultRow], writer: W) -> Result<()> {
    let mut wtr = lf_writer(writer);
    wtr.write_record(RESULT_HEADER).map_err(csv_err)?;
    for r in rows {
        wtr.write_record([
            r.attach.to_string(),
            r.detach.to_string(),
            r.method.to_string(),
            opt(r.order),
            opt(r.nodes),
            r.value.to_string(),
            opt(r.std_error),
            opt(r.runtime_ms),
            opt(r.floored_points),
        ])
        .map_err(csv_err)?;
    }
    wtr.flush().map_err(|e| Error::Io {
        path: "<output>".into(),
        message: e.to_string(),
    })
}
