//! Deterministic CSV sweep tables.
//!
//! Fixed layout per subcommand: the swept coordinate first, then the fixed
//! parameters repeated on every row, then the value columns. Reals print
//! with 17 significant digits and a `.` decimal separator; rows are emitted
//! in ascending x regardless of evaluation order, lines end with LF.

use std::io::{self, Write};

/// One row: the swept coordinate and the value columns.
pub struct SweepRecord {
    pub x: f64,
    pub columns: Vec<f64>,
}

/// A whole sweep with its header metadata.
pub struct SweepTable {
    pub x_name: &'static str,
    /// (name, preformatted value) pairs repeated on every row.
    pub fixed: Vec<(&'static str, String)>,
    pub column_names: Vec<&'static str>,
    pub rows: Vec<SweepRecord>,
}

/// 17 significant digits, lossless for f64.
pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

impl SweepTable {
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        for r in &self.rows {
            debug_assert_eq!(r.columns.len(), self.column_names.len());
            if !r.x.is_finite() || r.columns.iter().any(|v| !v.is_finite()) {
                return Err(io::Error::new(
                    io::ErrorKind::InvalidData,
                    format!("non-finite value in sweep row at x = {}", r.x),
                ));
            }
        }
        let mut header = vec![self.x_name.to_string()];
        header.extend(self.fixed.iter().map(|(name, _)| name.to_string()));
        header.extend(self.column_names.iter().map(|n| n.to_string()));
        out.write_all(header.join(",").as_bytes())?;
        out.write_all(b"\n")?;
        for r in &self.rows {
            let mut fields = vec![fmt_real(r.x)];
            fields.extend(self.fixed.iter().map(|(_, v)| v.clone()));
            fields.extend(r.columns.iter().map(|v| fmt_real(*v)));
            out.write_all(fields.join(",").as_bytes())?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// `count` evenly spaced points including both endpoints.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    debug_assert!(count >= 2);
    let step = (hi - lo) / (count - 1) as f64;
    (0..count)
        .map(|i| {
            if i + 1 == count {
                hi
            } else {
                lo + step * i as f64
            }
        })
        .collect()
}

/// The nearest integer when `v` is within `tol` of one.
pub fn near_integer(v: f64, tol: f64) -> Option<i64> {
    let r = v.round();
    ((v - r).abs() <= tol).then_some(r as i64)
}
