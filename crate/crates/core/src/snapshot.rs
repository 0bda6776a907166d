//! Binary snapshot formats.
//!
//! Field snapshot ("SNLS"): magic, format version u16, dim u8, per-axis
//! point count u32, per-axis box length f64, eps f64, t f64, then the
//! row-major samples as interleaved (re, im) f64. All little-endian.
//!
//! Wigner table ("SWIG"): magic, version u16, then nx u32, nxi u32,
//! x0, dx, xi0, dxi, eps, t as f64, then the row-major real table values.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{Field, Space};
use crate::grid::Grid;
use crate::wigner::WignerTable;

pub const SNLS_MAGIC: &[u8; 4] = b"SNLS";
pub const SWIG_MAGIC: &[u8; 4] = b"SWIG";
pub const FORMAT_VERSION: u16 = 1;

/// Write a physical-space field snapshot.
pub fn write_field(path: &Path, f: &Field, eps: f64, t: f64) -> Result<()> {
    f.require_space(Space::Physical)?;
    let tmp = tmp_path(path);
    {
        let mut w = std::io::BufWriter::new(std::fs::File::create(&tmp)?);
        w.write_all(SNLS_MAGIC)?;
        w.write_all(&FORMAT_VERSION.to_le_bytes())?;
        w.write_all(&[f.dim() as u8])?;
        for ax in f.grid().axes() {
            w.write_all(&(ax.points as u32).to_le_bytes())?;
        }
        for ax in f.grid().axes() {
            w.write_all(&ax.length.to_le_bytes())?;
        }
        w.write_all(&eps.to_le_bytes())?;
        w.write_all(&t.to_le_bytes())?;
        for v in f.values() {
            w.write_all(&v.re.to_le_bytes())?;
            w.write_all(&v.im.to_le_bytes())?;
        }
        w.flush()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Read a field snapshot; returns the field plus its (eps, t) stamps.
pub fn read_field(path: &Path) -> Result<(Field, f64, f64)> {
    let mut r = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != SNLS_MAGIC {
        return Err(Error::SnapshotFormat(format!("bad magic {magic:?}")));
    }
    let version = read_u16(&mut r)?;
    if version != FORMAT_VERSION {
        return Err(Error::SnapshotFormat(format!("unsupported version {version}")));
    }
    let mut dim_byte = [0u8; 1];
    r.read_exact(&mut dim_byte)?;
    let dim = dim_byte[0] as usize;
    if dim == 0 || dim > 2 {
        return Err(Error::SnapshotFormat(format!("bad dimension {dim}")));
    }
    let mut points = Vec::new();
    for _ in 0..dim {
        points.push(read_u32(&mut r)? as usize);
    }
    let mut lengths = Vec::new();
    for _ in 0..dim {
        lengths.push(read_f64(&mut r)?);
    }
    let eps = read_f64(&mut r)?;
    let t = read_f64(&mut r)?;
    let axes: Vec<(f64, usize)> = lengths.into_iter().zip(points).collect();
    let grid = Grid::new(&axes)?;
    let n = grid.len();
    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        let re = read_f64(&mut r)?;
        let im = read_f64(&mut r)?;
        values.push(Complex64::new(re, im));
    }
    Ok((Field::new(grid, Space::Physical, values), eps, t))
}

/// Write a Wigner table in the binary twin format.
pub fn write_wigner(path: &Path, w: &WignerTable, t: f64) -> Result<()> {
    let tmp = tmp_path(path);
    {
        let mut out = std::io::BufWriter::new(std::fs::File::create(&tmp)?);
        out.write_all(SWIG_MAGIC)?;
        out.write_all(&FORMAT_VERSION.to_le_bytes())?;
        out.write_all(&(w.nx as u32).to_le_bytes())?;
        out.write_all(&(w.nxi as u32).to_le_bytes())?;
        for v in [w.x0, w.dx, w.xi0, w.dxi, w.eps, t] {
            out.write_all(&v.to_le_bytes())?;
        }
        for v in &w.values {
            out.write_all(&v.to_le_bytes())?;
        }
        out.flush()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Flattened (x, xi, W) CSV of a Wigner table.
pub fn write_wigner_csv(path: &Path, w: &WignerTable) -> Result<()> {
    let tmp = tmp_path(path);
    {
        let mut out = std::io::BufWriter::new(std::fs::File::create(&tmp)?);
        writeln!(out, "x,xi,w")?;
        for i in 0..w.nx {
            for j in 0..w.nxi {
                writeln!(out, "{},{},{}", w.x(i), w.xi(j), w.at(i, j))?;
            }
        }
        out.flush()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn tmp_path(path: &Path) -> std::path::PathBuf {
    let mut os = path.as_os_str().to_owned();
    os.push(".tmp");
    std::path::PathBuf::from(os)
}

fn read_u16(r: &mut impl Read) -> Result<u16> {
    let mut b = [0u8; 2];
    r.read_exact(&mut b)?;
    Ok(u16::from_le_bytes(b))
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}
