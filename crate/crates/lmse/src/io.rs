//! CSV formats.
//!
//! All tables are RFC-4180 style with a header row, `.` as decimal
//! separator and LF line endings. Reals are written in the shortest form
//! that parses back to the same `f64`. Summary values follow the table on a
//! single line starting with `#`, which CSV readers configured for `#`
//! comments skip.

use std::io::{Read, Write};
use std::path::Path;

use lmse_core::sir::{AggregateRow, BenchmarkRecord};
use lmse_core::{residuals, Allocation, Method, ResampleCounts, WeightVector};

use crate::error::{CliError, Result};

/// Shortest round-trip representation of a real.
pub fn fmt_real(x: f64) -> String {
    format!("{x:?}")
}

/// Parses a comma-separated inline list such as `0.46,0.34,0.20`.
pub fn parse_inline_weights(list: &str) -> Result<Vec<f64>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .enumerate()
        .map(|(i, s)| {
            s.parse::<f64>()
                .map_err(|_| CliError::Validation(format!("weight {i} ({s:?}) is not a number")))
        })
        .collect()
}

/// Reads one weight per row from the first column.
///
/// A non-numeric first row is taken as a header and skipped; lines starting
/// with `#` are ignored.
pub fn read_weights<R: Read>(reader: R) -> Result<Vec<f64>> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut weights = Vec::new();
    for (row, record) in csv.records().enumerate() {
        let record = record?;
        let Some(field) = record.get(0) else {
            continue;
        };
        if field.is_empty() {
            continue;
        }
        match field.parse::<f64>() {
            Ok(w) => weights.push(w),
            Err(_) if row == 0 => {}
            Err(_) => {
                return Err(CliError::Validation(format!(
                    "row {} ({field:?}) is not a number",
                    row + 1
                )))
            }
        }
    }
    Ok(weights)
}

pub fn read_weights_file(path: &Path) -> Result<Vec<f64>> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    read_weights(file).map_err(|e| match e {
        CliError::Io { path: None, source } => CliError::io(path, source),
        other => other,
    })
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

/// `index,weight,expected,size,residual` per bin, then
/// `# mse=<v>,mae=<v>`.
pub fn write_partition<W: Write>(
    out: W,
    w: &WeightVector,
    a: &Allocation,
    mse: f64,
    mae: f64,
) -> Result<()> {
    let n = a.total();
    let r = residuals(w, n)?;
    let mut csv = writer(out);
    csv.write_record(["index", "weight", "expected", "size", "residual"])?;
    for (m, ((&weight, &size), &residual)) in w.iter().zip(a.sizes()).zip(r.as_slice()).enumerate()
    {
        csv.write_record([
            m.to_string(),
            fmt_real(weight),
            fmt_real(n as f64 * weight),
            size.to_string(),
            fmt_real(residual),
        ])?;
    }
    let mut out = csv
        .into_inner()
        .map_err(|e| CliError::from(e.into_error()))?;
    writeln!(out, "# mse={},mae={}", fmt_real(mse), fmt_real(mae))?;
    out.flush()?;
    Ok(())
}

/// `index,weight,count` per particle, then `# sv=<v>`.
pub fn write_resample<W: Write>(
    out: W,
    w: &WeightVector,
    c: &ResampleCounts,
    sv: f64,
) -> Result<()> {
    let mut csv = writer(out);
    csv.write_record(["index", "weight", "count"])?;
    for (m, (&weight, &count)) in w.iter().zip(c.counts()).enumerate() {
        csv.write_record([m.to_string(), fmt_real(weight), count.to_string()])?;
    }
    let mut out = csv
        .into_inner()
        .map_err(|e| CliError::from(e.into_error()))?;
    writeln!(out, "# sv={}", fmt_real(sv))?;
    out.flush()?;
    Ok(())
}

/// Long format: `run,t,x_true,y_obs,method,estimate,sv`, one row per run,
/// step and method.
pub fn write_records<W: Write>(out: W, records: &[BenchmarkRecord]) -> Result<()> {
    let mut csv = writer(out);
    csv.write_record(["run", "t", "x_true", "y_obs", "method", "estimate", "sv"])?;
    for record in records {
        for result in &record.results {
            csv.write_record([
                record.run.to_string(),
                record.t.to_string(),
                fmt_real(record.x_true),
                fmt_real(record.y_obs),
                result.method.to_string(),
                fmt_real(result.estimate),
                fmt_real(result.sv),
            ])?;
        }
    }
    csv.flush()?;
    Ok(())
}

/// Wide format: `t,<method>,...` with the mean sampling variance of each
/// method at each step.
pub fn write_aggregate<W: Write>(out: W, methods: &[Method], rows: &[AggregateRow]) -> Result<()> {
    let mut csv = writer(out);
    let header: Vec<&str> = std::iter::once("t")
        .chain(methods.iter().map(|m| m.as_str()))
        .collect();
    csv.write_record(&header)?;
    for row in rows {
        let fields: Vec<String> = std::iter::once(row.t.to_string())
            .chain(row.mean_sv.iter().map(|&v| fmt_real(v)))
            .collect();
        csv.write_record(&fields)?;
    }
    csv.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inline_weights() {
        assert_eq!(
            parse_inline_weights("0.46, 0.34,0.20").unwrap(),
            vec![0.46, 0.34, 0.2]
        );
        assert!(matches!(
            parse_inline_weights("0.5,abc"),
            Err(CliError::Validation(_))
        ));
    }

    #[test]
    fn weights_file_with_header_and_comments() {
        let text = "weight,label\n0.25,a\n# skipped\n0.75,b\n";
        assert_eq!(read_weights(text.as_bytes()).unwrap(), vec![0.25, 0.75]);
        assert!(read_weights("0.5\nx\n".as_bytes()).is_err());
    }

    #[test]
    fn partition_table_layout() {
        let w = WeightVector::new(vec![1.0]).unwrap();
        let a = Allocation::new(vec![7]).unwrap();
        let mut buf = Vec::new();
        write_partition(&mut buf, &w, &a, 0.0, 0.0).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "index,weight,expected,size,residual\n0,1.0,7.0,7,0.0\n# mse=0.0,mae=0.0\n"
        );
    }

    #[test]
    fn reals_round_trip() {
        for x in [0.1, 1.0 / 3.0, 1e-300, 123456.789, 0.46] {
            assert_eq!(fmt_real(x).parse::<f64>().unwrap(), x);
        }
    }
}
