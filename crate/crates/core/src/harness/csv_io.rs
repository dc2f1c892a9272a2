use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::experiment::{Trace, TraceRow};
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 7] = [
    "t",
    "mean_rel_err",
    "min_rel_err",
    "max_rel_err",
    "mean_drift_sq",
    "bound",
    "baseline_rel_err",
];

const CONFIG_PREFIX: &str = "# config: ";
const LABEL_PREFIX: &str = "# label: ";

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes the trace as CSV: two `#` comment lines (config, label), a header
/// row, then one row per recorded iteration with 17 significant digits.
pub fn emit_csv(trace: &Trace, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let io = |e| Error::io(path, e);
    let mut file = File::create(path).map_err(io)?;
    write!(
        file,
        "{CONFIG_PREFIX}{}\n{LABEL_PREFIX}{}\n",
        trace.config, trace.label
    )
    .map_err(io)?;

    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file);
    let csv_err = |e: csv::Error| Error::Parse(format!("{}: {e}", path.display()));
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in &trace.rows {
        w.write_record([
            r.t.to_string(),
            num(r.mean_rel_err),
            num(r.min_rel_err),
            num(r.max_rel_err),
            num(r.mean_drift_sq),
            num(r.bound),
            num(r.baseline_rel_err),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(io)
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Trace> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = BufReader::new(file);
    let mut config = String::new();
    let mut label = String::new();
    for (prefix, slot) in [(CONFIG_PREFIX, &mut config), (LABEL_PREFIX, &mut label)] {
        let mut line = String::new();
        reader
            .read_line(&mut line)
            .map_err(|e| Error::io(path, e))?;
        *slot = line
            .trim_end_matches('\n')
            .strip_prefix(prefix)
            .ok_or_else(|| {
                Error::Parse(format!(
                    "{}: missing `{}` line",
                    path.display(),
                    prefix.trim()
                ))
            })?
            .to_string();
    }

    let bad = |msg: String| Error::Parse(format!("{}: {msg}", path.display()));
    let mut csv = csv::Reader::from_reader(reader);
    let header = csv.headers().map_err(|e| bad(e.to_string()))?;
    if header.iter().ne(CSV_HEADER) {
        return Err(bad(format!("unexpected header {header:?}")));
    }
    let mut rows = Vec::new();
    for rec in csv.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let f = |i: usize| -> Result<f64> {
            rec[i]
                .parse()
                .map_err(|e| bad(format!("column {}: {e}", CSV_HEADER[i])))
        };
        rows.push(TraceRow {
            t: rec[0].parse().map_err(|e| bad(format!("column t: {e}")))?,
            mean_rel_err: f(1)?,
            min_rel_err: f(2)?,
            max_rel_err: f(3)?,
            mean_drift_sq: f(4)?,
            bound: f(5)?,
            baseline_rel_err: f(6)?,
        });
    }
    Ok(Trace {
        label,
        config,
        rows,
    })
}
