//! Near-field CSV: a header row holding `d,k,a,b,m`, then `d` rows of `d`
//! entries written as `re±imj` with 17 significant digits.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;

use super::{ForwardError, MeasurementLine, NearFieldMatrix};
use crate::greens::WaveConfig;
use crate::linalg::ComplexMatrix;

pub fn write_near_field<W: Write>(n: &NearFieldMatrix, mut out: W) -> Result<(), ForwardError> {
    let line = n.line();
    writeln!(out, "{},{},{},{},{}", line.d, n.wave().k(), line.a, line.b, line.height)?;
    let e = n.entries();
    for i in 0..e.rows() {
        let row: Vec<String> = e.row(i).iter().map(|z| format_entry(*z)).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn read_near_field<R: BufRead>(input: R) -> Result<NearFieldMatrix, ForwardError> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| ForwardError::Format("empty file".into()))??;
    let fields: Vec<&str> = header.trim().split(',').collect();
    if fields.len() != 5 {
        return Err(ForwardError::Format(format!(
            "header must hold d,k,a,b,m; got {header:?}"
        )));
    }
    let d: usize = fields[0]
        .parse()
        .map_err(|_| ForwardError::Format(format!("bad d in header: {:?}", fields[0])))?;
    let num = |s: &str| -> Result<f64, ForwardError> {
        s.parse()
            .map_err(|_| ForwardError::Format(format!("bad number in header: {s:?}")))
    };
    let wave = WaveConfig::new(num(fields[1])?)?;
    let line = MeasurementLine::new(num(fields[2])?, num(fields[3])?, num(fields[4])?, d)?;

    let mut data = Vec::with_capacity(d * d);
    let mut rows = 0;
    for (idx, text) in lines.enumerate() {
        let text = text?;
        if text.trim().is_empty() {
            continue;
        }
        rows += 1;
        let before = data.len();
        for cell in text.trim().split(',') {
            data.push(parse_entry(cell).ok_or_else(|| {
                ForwardError::Format(format!("row {}: cannot parse entry {cell:?}", idx + 1))
            })?);
        }
        if data.len() - before != d {
            return Err(ForwardError::Format(format!(
                "row {} has {} entries, expected {d}",
                idx + 1,
                data.len() - before
            )));
        }
    }
    if rows != d {
        return Err(ForwardError::Format(format!("expected {d} rows, found {rows}")));
    }
    let entries = ComplexMatrix::from_vec(d, d, data)?;
    NearFieldMatrix::new(entries, wave, line)
}

pub fn save_near_field(n: &NearFieldMatrix, path: impl AsRef<Path>) -> Result<(), ForwardError> {
    let mut w = BufWriter::new(File::create(path)?);
    write_near_field(n, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn load_near_field(path: impl AsRef<Path>) -> Result<NearFieldMatrix, ForwardError> {
    read_near_field(BufReader::new(File::open(path)?))
}

fn format_entry(z: Complex64) -> String {
    format!("{:.16e}{:+.16e}j", z.re, z.im)
}

fn parse_entry(s: &str) -> Option<Complex64> {
    let body = s.trim().strip_suffix('j')?;
    let bytes = body.as_bytes();
    // the imaginary part starts at the last sign not belonging to an exponent
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'))?;
    let re = body[..split].parse().ok()?;
    let im = body[split..].parse().ok()?;
    Some(Complex64::new(re, im))
}
