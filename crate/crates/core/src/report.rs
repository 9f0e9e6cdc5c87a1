//! CSV rendering shared by the table-producing operations.

use crate::error::{Result, SpinError};

/// Lossless decimal form: the shortest string that parses back to `x`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

/// Renders a header and rows as RFC 4180 CSV with `\n` line endings.
pub fn csv_string<R, I>(header: &[&str], rows: R) -> Result<String>
where
    R: IntoIterator<Item = I>,
    I: IntoIterator<Item = String>,
{
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let io = |e: csv::Error| SpinError::Invalid(format!("csv: {e}"));
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(row.into_iter().collect::<Vec<_>>()).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| SpinError::Invalid(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| SpinError::Invalid(format!("csv: {e}")))
}
