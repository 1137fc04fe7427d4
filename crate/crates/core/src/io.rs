//! Signal CSV files with header `t,re,im`.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::signal::ComplexSignal;

pub fn write_signal<W: Write>(y: &ComplexSignal, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "re", "im"])?;
    for (i, z) in y.samples().iter().enumerate() {
        w.write_record([(i + 1).to_string(), format!("{:.17e}", z.re), format!("{:.17e}", z.im)])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a signal; `t` must run `1, 2, …, N` without gaps.
pub fn read_signal<R: Read>(input: R) -> Result<ComplexSignal> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = r.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Parse(format!("missing column `{name}` (expected t,re,im)")))
    };
    let (ct, cre, cim) = (col("t")?, col("re")?, col("im")?);
    let mut samples = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let field = |c: usize| -> Result<f64> {
            let s = rec.get(c).unwrap_or("");
            s.parse::<f64>().map_err(|_| Error::Parse(format!("row {}: `{s}` is not a number", line + 2)))
        };
        let t = field(ct)?;
        if t != (samples.len() + 1) as f64 {
            return Err(Error::Parse(format!("row {}: expected t = {}, got {t}", line + 2, samples.len() + 1)));
        }
        samples.push(Complex64::new(field(cre)?, field(cim)?));
    }
    if samples.is_empty() {
        return Err(Error::Parse("signal file has no samples".into()));
    }
    ComplexSignal::new(samples)
}

pub fn read_signal_file(path: &Path) -> Result<ComplexSignal> {
    read_signal(File::open(path)?)
}

pub fn write_signal_file(y: &ComplexSignal, path: &Path) -> Result<()> {
    write_signal(y, File::create(path)?)
}
