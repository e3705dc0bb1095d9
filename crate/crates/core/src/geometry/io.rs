//! CSV and binary serialisation of fields.
//!
//! CSV: a `# fraclap-field ...` header line followed by one row per node with
//! the node coordinate and the component values. Binary: magic `FLF1`, one
//! geometry byte (0 line, 1 circle), half width `f64`, point count `u64`,
//! component count `u64`, then the row-major `f64` payload, all little endian.

use std::io::{BufRead, BufReader, Read, Write};

use super::{Field, Grid};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"FLF1";

fn header(f: &Field) -> String {
    let (geometry, half_width) = match f.grid() {
        Grid::Line(g) => ("line", g.half_width()),
        Grid::Circle(_) => ("circle", std::f64::consts::PI),
    };
    format!(
        "# fraclap-field geometry={geometry} half_width={half_width:e} n_points={} components={}",
        f.n_points(),
        f.components()
    )
}

pub fn write_csv<W: Write>(f: &Field, mut out: W) -> Result<()> {
    writeln!(out, "{}", header(f))?;
    for j in 0..f.n_points() {
        write!(out, "{:e}", f.grid().node(j))?;
        for v in f.row(j) {
            write!(out, ",{v:e}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

fn parse_header(line: &str) -> Result<(Grid, usize)> {
    let rest =
        line.strip_prefix("# fraclap-field").ok_or_else(|| Error::Parse("missing '# fraclap-field' header".into()))?;
    let (mut geometry, mut half_width, mut n, mut m) = (None, None, None, None);
    for kv in rest.split_whitespace() {
        let (k, v) = kv.split_once('=').ok_or_else(|| Error::Parse(format!("bad header token '{kv}'")))?;
        let num = |s: &str| s.parse::<f64>().map_err(|e| Error::Parse(format!("{k}: {e}")));
        match k {
            "geometry" => geometry = Some(v.to_string()),
            "half_width" => half_width = Some(num(v)?),
            "n_points" => n = Some(num(v)? as usize),
            "components" => m = Some(num(v)? as usize),
            _ => {}
        }
    }
    let n = n.ok_or_else(|| Error::Parse("header lacks n_points".into()))?;
    let m = m.ok_or_else(|| Error::Parse("header lacks components".into()))?;
    let grid = match geometry.as_deref() {
        Some("line") => Grid::line(half_width.ok_or_else(|| Error::Parse("header lacks half_width".into()))?, n)?,
        Some("circle") => Grid::circle(n)?,
        other => return Err(Error::Parse(format!("unknown geometry {other:?}"))),
    };
    Ok((grid, m))
}

pub fn read_csv<R: Read>(input: R) -> Result<Field> {
    let mut lines = BufReader::new(input).lines();
    let first = lines.next().ok_or_else(|| Error::Parse("empty input".into()))??;
    let (grid, m) = parse_header(first.trim())?;
    let mut samples = Vec::with_capacity(grid.n_points() * m);
    for (row, line) in lines.enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cells = line.split(',');
        cells.next();
        let mut count = 0;
        for c in cells {
            let v: f64 = c.trim().parse().map_err(|e| Error::Parse(format!("row {row}: {e}")))?;
            samples.push(v);
            count += 1;
        }
        if count != m {
            return Err(Error::Parse(format!("row {row} has {count} values, expected {m}")));
        }
    }
    Field::new(grid, m, samples)
}

pub fn write_binary<W: Write>(f: &Field, mut out: W) -> Result<()> {
    out.write_all(MAGIC)?;
    let (tag, half_width) = match f.grid() {
        Grid::Line(g) => (0u8, g.half_width()),
        Grid::Circle(_) => (1u8, std::f64::consts::PI),
    };
    out.write_all(&[tag])?;
    out.write_all(&half_width.to_le_bytes())?;
    out.write_all(&(f.n_points() as u64).to_le_bytes())?;
    out.write_all(&(f.components() as u64).to_le_bytes())?;
    let mut buf = Vec::with_capacity(f.samples().len() * 8);
    for v in f.samples() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

pub fn read_binary<R: Read>(mut input: R) -> Result<Field> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Parse("bad magic; not a fraclap binary field".into()));
    }
    let mut tag = [0u8; 1];
    input.read_exact(&mut tag)?;
    let mut b8 = [0u8; 8];
    input.read_exact(&mut b8)?;
    let half_width = f64::from_le_bytes(b8);
    input.read_exact(&mut b8)?;
    let n = u64::from_le_bytes(b8) as usize;
    input.read_exact(&mut b8)?;
    let m = u64::from_le_bytes(b8) as usize;
    let grid = match tag[0] {
        0 => Grid::line(half_width, n)?,
        1 => Grid::circle(n)?,
        t => return Err(Error::Parse(format!("unknown geometry tag {t}"))),
    };
    let len = n.checked_mul(m).ok_or_else(|| Error::Parse("size overflow".into()))?;
    let mut payload = vec![0u8; len * 8];
    input.read_exact(&mut payload)?;
    let samples = payload.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    Field::new(grid, m, samples)
}
