//! Trace CSV format: header `id,<cell_0>,...,<cell_{LE-1}>`, one row per
//! individual, cells flattened row-major, values 0/1.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::{TraceDataset, TraceMatrix};
use crate::{Error, Result};

/// Read a trace CSV for a `sites × epochs` grid.
pub fn ingest_traces_csv(path: impl AsRef<Path>, sites: usize, epochs: usize) -> Result<TraceDataset> {
    let path = path.as_ref();
    let (_, dataset) = read_traces_csv(File::open(path)?, path, sites, epochs)?;
    Ok(dataset)
}

/// Parse trace CSV from any reader; returns ids alongside the dataset.
/// `path` is only used in error messages.
pub fn read_traces_csv(
    reader: impl Read,
    path: &Path,
    sites: usize,
    epochs: usize,
) -> Result<(Vec<String>, TraceDataset)> {
    let width = sites * epochs;
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);

    let mut ids = Vec::new();
    let mut traces = Vec::new();
    let mut header_seen = false;
    let mut dense = vec![0u8; width];
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if !header_seen {
            header_seen = true;
            if record.get(0).map(str::trim) != Some("id") {
                return Err(parse_err(line, "header must start with `id`".into()));
            }
            if record.len() != width + 1 {
                return Err(parse_err(
                    line,
                    format!(
                        "header has {} cell columns but the {sites}x{epochs} grid needs {width}",
                        record.len() - 1
                    ),
                ));
            }
            continue;
        }
        if record.len() != width + 1 {
            return Err(parse_err(
                line,
                format!("expected {} fields, found {}", width + 1, record.len()),
            ));
        }
        for (slot, field) in dense.iter_mut().zip(record.iter().skip(1)) {
            *slot = match field.trim() {
                "0" => 0,
                "1" => 1,
                other => return Err(parse_err(line, format!("non-binary cell value `{other}`"))),
            };
        }
        ids.push(record[0].trim().to_string());
        traces.push(TraceMatrix::from_dense(sites, epochs, &dense)?);
    }
    if traces.is_empty() {
        return Err(Error::NoTraces);
    }
    Ok((ids, TraceDataset::new(traces)?))
}

/// Write a dataset as trace CSV with ids `0..n`.
pub fn write_traces_csv(mut writer: impl Write, dataset: &TraceDataset) -> Result<()> {
    let (sites, epochs) = dataset.dims();
    let mut line = String::from("id");
    for c in 0..sites * epochs {
        line.push_str(&format!(",c{c}"));
    }
    writeln!(writer, "{line}")?;
    for (id, trace) in dataset.traces().iter().enumerate() {
        line.clear();
        line.push_str(&id.to_string());
        for v in trace.to_dense() {
            line.push(',');
            line.push(if v == 1 { '1' } else { '0' });
        }
        writeln!(writer, "{line}")?;
    }
    Ok(())
}
