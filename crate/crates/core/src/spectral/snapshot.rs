//! Field snapshot files: one JSON header line, then raw little-endian
//! `f64` values, row-major with x outer and y inner.
//!
//! `physical` snapshots hold `Mx·My` real samples. `spectral` snapshots hold
//! `Mx·My` complex coefficients in signed order as interleaved `(re, im)`.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::{PhysicalField, SpectralField};
use super::grid::GridSpec;
use crate::error::{Result, ZkError};

pub const FORMAT_TAG: &str = "zkcyl-field";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Physical,
    Spectral,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotHeader {
    pub format: String,
    pub version: u32,
    pub kind: FieldKind,
    pub endianness: String,
    pub x_scale: f64,
    pub y_scale: f64,
    pub mx: usize,
    pub my: usize,
    pub dt: f64,
    pub time: f64,
}

impl SnapshotHeader {
    fn new(grid: &GridSpec, kind: FieldKind, time: f64) -> Self {
        Self {
            format: FORMAT_TAG.into(),
            version: 1,
            kind,
            endianness: "little".into(),
            x_scale: grid.x_scale,
            y_scale: grid.y_scale,
            mx: grid.mx,
            my: grid.my,
            dt: grid.dt,
            time,
        }
    }

    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::new(self.x_scale, self.y_scale, self.mx, self.my, self.dt)
    }
}

pub enum Snapshot {
    Physical(PhysicalField),
    Spectral(SpectralField),
}

pub fn write_physical<W: Write>(mut w: W, field: &PhysicalField, time: f64) -> Result<()> {
    let header = SnapshotHeader::new(field.grid(), FieldKind::Physical, time);
    write_header(&mut w, &header)?;
    let mut buf = Vec::with_capacity(field.values().len() * 8);
    for v in field.values().iter() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn write_spectral<W: Write>(mut w: W, field: &SpectralField, time: f64) -> Result<()> {
    let header = SnapshotHeader::new(field.grid(), FieldKind::Spectral, time);
    write_header(&mut w, &header)?;
    let signed = field.to_signed();
    let mut buf = Vec::with_capacity(signed.len() * 16);
    for c in signed.iter() {
        buf.extend_from_slice(&c.re.to_le_bytes());
        buf.extend_from_slice(&c.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

fn write_header<W: Write>(w: &mut W, header: &SnapshotHeader) -> Result<()> {
    let line = serde_json::to_string(header).map_err(|e| ZkError::Format(e.to_string()))?;
    w.write_all(line.as_bytes())?;
    w.write_all(b"\n")?;
    Ok(())
}

pub fn read<R: Read>(r: R) -> Result<(SnapshotHeader, Snapshot)> {
    let mut reader = BufReader::new(r);
    let mut line = String::new();
    reader.read_line(&mut line)?;
    let header: SnapshotHeader =
        serde_json::from_str(line.trim_end()).map_err(|e| ZkError::Format(e.to_string()))?;
    if header.format != FORMAT_TAG || header.endianness != "little" {
        return Err(ZkError::Format(format!(
            "unsupported snapshot header {:?}/{:?}",
            header.format, header.endianness
        )));
    }
    let grid = header.grid()?;
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;
    let floats: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    let per_value = match header.kind {
        FieldKind::Physical => 1,
        FieldKind::Spectral => 2,
    };
    if bytes.len() % 8 != 0 || floats.len() != grid.len() * per_value {
        return Err(ZkError::Format(format!(
            "payload holds {} bytes, expected {}",
            bytes.len(),
            grid.len() * per_value * 8
        )));
    }
    let snap = match header.kind {
        FieldKind::Physical => {
            let values = Array2::from_shape_vec(grid.shape(), floats)
                .map_err(|e| ZkError::Format(e.to_string()))?;
            Snapshot::Physical(PhysicalField::new(grid, values)?)
        }
        FieldKind::Spectral => {
            let cs: Vec<Complex64> = floats
                .chunks_exact(2)
                .map(|p| Complex64::new(p[0], p[1]))
                .collect();
            let signed = Array2::from_shape_vec(grid.shape(), cs)
                .map_err(|e| ZkError::Format(e.to_string()))?;
            Snapshot::Spectral(SpectralField::from_signed(grid, &signed)?)
        }
    };
    Ok((header, snap))
}

pub fn save_physical(path: &Path, field: &PhysicalField, time: f64) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_physical(std::io::BufWriter::new(file), field, time)
}

pub fn load(path: &Path) -> Result<(SnapshotHeader, Snapshot)> {
    read(std::fs::File::open(path)?)
}
