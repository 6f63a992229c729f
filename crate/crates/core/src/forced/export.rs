//! CSV schemas.
//!
//! * trace: `t, re_x1, im_x1, …, re_xm, im_xm, norm`
//! * sweep: `mu, sup, verdict`
//! * per-period sup: `n, sup`

use std::io::{Read, Write};

use num_complex::Complex;

use super::{BoundednessStatus, ForcedTrace, SweepResult};
use crate::error::{Error, Result};
use crate::linalg::vector;
use crate::scalar::Real;

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(format!("csv: {e}"))
}

fn io_err(e: std::io::Error) -> Error {
    Error::Parse(format!("csv: {e}"))
}

pub fn write_trace_csv<T: Real, W: Write>(trace: &ForcedTrace<T>, out: W) -> Result<()> {
    let m = trace.values.first().map_or(0, |v| v.len());
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string()];
    for k in 1..=m {
        header.push(format!("re_x{k}"));
        header.push(format!("im_x{k}"));
    }
    header.push("norm".into());
    w.write_record(&header).map_err(csv_err)?;
    for (t, v) in trace.sample_times.iter().zip(&trace.values) {
        let mut row = Vec::with_capacity(2 * m + 2);
        row.push(format!("{}", t.as_f64()));
        for z in v {
            row.push(format!("{}", z.re.as_f64()));
            row.push(format!("{}", z.im.as_f64()));
        }
        row.push(format!("{}", vector::norm(v).as_f64()));
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(io_err)
}

/// Reads a trace CSV back; the period is needed to rebuild the per-period sup.
pub fn read_trace_csv<R: Read>(input: R, period: f64) -> Result<ForcedTrace<f64>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(csv_err)?.clone();
    let cols = header.len();
    if cols < 4 || (cols - 2) % 2 != 0 || &header[0] != "t" || &header[cols - 1] != "norm" {
        return Err(Error::Parse(format!("unexpected trace header {header:?}")));
    }
    let m = (cols - 2) / 2;
    for k in 0..m {
        if header[1 + 2 * k] != format!("re_x{}", k + 1) || header[2 + 2 * k] != format!("im_x{}", k + 1) {
            return Err(Error::Parse(format!("unexpected trace header {header:?}")));
        }
    }
    let mut times = Vec::new();
    let mut values = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let num = |i: usize| -> Result<f64> {
            rec[i]
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("trace column {i}: {e}")))
        };
        times.push(num(0)?);
        values.push(
            (0..m)
                .map(|k| Ok(Complex::new(num(1 + 2 * k)?, num(2 + 2 * k)?)))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    Ok(ForcedTrace::from_samples(times, values, period))
}

/// One row of a sweep CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub mu: f64,
    pub sup: f64,
    pub verdict: BoundednessStatus,
}

pub fn write_sweep_csv<T: Real, W: Write>(sweep: &SweepResult<T>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["mu", "sup", "verdict"]).map_err(csv_err)?;
    for ((mu, sup), status) in sweep.mu_grid.iter().zip(&sweep.sups).zip(&sweep.statuses) {
        w.write_record([
            format!("{}", mu.as_f64()),
            format!("{}", sup.as_f64()),
            status.as_str().to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn read_sweep_csv<R: Read>(input: R) -> Result<Vec<SweepRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(csv_err)?.clone();
    if header.iter().collect::<Vec<_>>() != ["mu", "sup", "verdict"] {
        return Err(Error::Parse(format!("unexpected sweep header {header:?}")));
    }
    r.records()
        .map(|rec| {
            let rec = rec.map_err(csv_err)?;
            let num = |i: usize| {
                rec[i]
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("sweep column {i}: {e}")))
            };
            Ok(SweepRow {
                mu: num(0)?,
                sup: num(1)?,
                verdict: rec[2].parse()?,
            })
        })
        .collect()
}

pub fn write_period_sup_csv<T: Real, W: Write>(sups: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "sup"]).map_err(csv_err)?;
    for (k, s) in sups.iter().enumerate() {
        w.write_record([format!("{}", k + 1), format!("{}", s.as_f64())])
            .map_err(csv_err)?;
    }
    w.flush().map_err(io_err)
}

/// Returns `R_1…R_N`; rows must be numbered `1…N` in order.
pub fn read_period_sup_csv<R: Read>(input: R) -> Result<Vec<f64>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(csv_err)?.clone();
    if header.iter().collect::<Vec<_>>() != ["n", "sup"] {
        return Err(Error::Parse(format!("unexpected per-period header {header:?}")));
    }
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let n: usize = rec[0].parse().map_err(|e| Error::Parse(format!("period index: {e}")))?;
        if n != out.len() + 1 {
            return Err(Error::Parse(format!("period index {n} out of order")));
        }
        out.push(rec[1].parse::<f64>().map_err(|e| Error::Parse(format!("sup: {e}")))?);
    }
    Ok(out)
}
