//! Binary field format: one JSON header line
//! `{"grid":{"N_g":..,"L":..},"name":..,"time":..}` followed by
//! little-endian `f64` pairs `(re, im)` in row-major order.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ComplexField, Grid2D};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldHeader {
    pub grid: Grid2D,
    pub name: String,
    pub time: f64,
}

pub fn write_field<W: Write>(mut w: W, field: &ComplexField, name: &str, time: f64) -> Result<()> {
    let header = FieldHeader {
        grid: *field.grid(),
        name: name.to_owned(),
        time,
    };
    let mut line = serde_json::to_string(&header)?;
    line.push('\n');
    let mut bytes = line.into_bytes();
    bytes.reserve(field.values().len() * 16);
    for z in field.values() {
        bytes.extend_from_slice(&z.re.to_le_bytes());
        bytes.extend_from_slice(&z.im.to_le_bytes());
    }
    w.write_all(&bytes).map_err(|e| Error::io("<field writer>", e))
}

pub fn read_field<R: Read>(r: R) -> Result<(FieldHeader, ComplexField)> {
    let mut reader = BufReader::new(r);
    let mut line = String::new();
    reader
        .read_line(&mut line)
        .map_err(|e| Error::io("<field reader>", e))?;
    let header: FieldHeader = serde_json::from_str(line.trim_end())?;
    let grid = header.grid.validated()?;
    let mut raw = Vec::with_capacity(grid.len() * 16);
    reader
        .read_to_end(&mut raw)
        .map_err(|e| Error::io("<field reader>", e))?;
    if raw.len() != grid.len() * 16 {
        return Err(Error::arg(format!(
            "field payload has {} bytes, expected {}",
            raw.len(),
            grid.len() * 16
        )));
    }
    let values = raw
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            Complex64::new(re, im)
        })
        .collect();
    Ok((header, ComplexField::from_values(grid, values)?))
}

pub fn save_field(path: &Path, field: &ComplexField, name: &str, time: f64) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_field(&mut w, field, name, time)?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn load_field(path: &Path) -> Result<(FieldHeader, ComplexField)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_field(file)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        let g = Grid2D::new(8, 2.0).unwrap();
        let f = ComplexField::constant(g, Complex64::new(1.0, -2.0));
        let mut buf = Vec::new();
        write_field(&mut buf, &f, "u", 0.5).unwrap();
        let nl = buf.iter().position(|&b| b == b'\n').unwrap();
        assert_eq!(
            std::str::from_utf8(&buf[..nl]).unwrap(),
            r#"{"grid":{"N_g":8,"L":2.0},"name":"u","time":0.5}"#
        );
        assert_eq!(buf.len() - nl - 1, 64 * 16);
        assert_eq!(&buf[nl + 1..nl + 9], &1.0f64.to_le_bytes());
        assert_eq!(&buf[nl + 9..nl + 17], &(-2.0f64).to_le_bytes());
        let (h, back) = read_field(&buf[..]).unwrap();
        assert_eq!(h.name, "u");
        assert_eq!(back, f);
    }

    #[test]
    fn truncated_payload_is_rejected() {
        let g = Grid2D::new(8, 2.0).unwrap();
        let mut buf = Vec::new();
        write_field(&mut buf, &ComplexField::zeros(g), "u", 0.0).unwrap();
        buf.truncate(buf.len() - 3);
        assert!(read_field(&buf[..]).is_err());
    }
}
