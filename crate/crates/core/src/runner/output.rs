use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::diagnostics::DiagnosticsRecord;
use crate::error::Result;

/// Shortest decimal string that parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    let mut buf = ryu::Buffer::new();
    buf.format(x).to_string()
}

pub const TIMESERIES_COLUMNS: [&str; 12] = [
    "time",
    "h1",
    "h2",
    "H_cum",
    "bkm_integral",
    "m0",
    "lower_bound",
    "max_abs_omega",
    "min_vzz_halfdomain",
    "min_D",
    "min_Qz",
    "uz_bound_ratio",
];

pub fn timeseries_header(k_max: u32) -> String {
    let mut cols: Vec<String> = TIMESERIES_COLUMNS.iter().map(|c| c.to_string()).collect();
    for k in 0..=k_max {
        cols.push(format!("u_v{}", k + 1));
        cols.push(format!("omega_v{k}"));
    }
    cols.join(",")
}

pub fn timeseries_row(r: &DiagnosticsRecord) -> String {
    let mut values = vec![
        r.time,
        r.h1,
        r.h2,
        r.h_cum,
        r.bkm_integral,
        r.m0,
        r.lower_bound,
        r.max_abs_omega,
        r.min_vzz_halfdomain,
        r.min_d,
        r.min_qz,
        r.uz_bound_ratio,
    ];
    for &(u, w) in &r.vk_norms {
        values.push(u);
        values.push(w);
    }
    join(&values)
}

pub(crate) fn join(values: &[f64]) -> String {
    values.iter().map(|&v| fmt_f64(v)).collect::<Vec<_>>().join(",")
}

/// Line-oriented CSV file written as rows arrive.
pub struct CsvWriter {
    inner: BufWriter<File>,
}

impl CsvWriter {
    pub fn create(path: &Path, header: &str) -> Result<Self> {
        let mut inner = BufWriter::new(File::create(path)?);
        writeln!(inner, "{header}")?;
        Ok(Self { inner })
    }

    pub fn row(&mut self, line: &str) -> Result<()> {
        writeln!(self.inner, "{line}")?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.inner.flush()?;
        Ok(())
    }
}

/// `snapshot_<i>.csv` with columns `z, u, omega, v`.
pub fn write_snapshot(path: &Path, z: &[f64], u: &[f64], omega: &[f64], v: &[f64]) -> Result<()> {
    let mut w = CsvWriter::create(path, "z,u,omega,v")?;
    for j in 0..z.len() {
        w.row(&join(&[z[j], u[j], omega[j], v[j]]))?;
    }
    w.finish()
}
