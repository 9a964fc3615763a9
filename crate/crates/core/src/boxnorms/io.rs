//! Dense kernel storage: CSV or little-endian binary, each carrying a JSON
//! header {shape, measure, bounded_mode}.

use super::space::{BoundedMode, Kernel2, MeasuredSpace};
use crate::error::{Error, Result};
use crate::scalar::{parse_ratio, Scalar};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Read, Write};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelHeader {
    pub shape: Vec<usize>,
    /// One weight list per axis, or None for uniform measures.
    pub measure: Option<Vec<Vec<String>>>,
    pub bounded_mode: BoundedMode,
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::invalid(format!("kernel i/o: {e}"))
}

fn parse_scalar<S: Scalar>(s: &str) -> Result<S> {
    let s = s.trim();
    if let Ok(v) = s.parse::<S>() {
        return Ok(v);
    }
    parse_ratio(s).map(|r| S::from_ratio(&r)).ok_or_else(|| io_err(format!("unparseable value {s:?}")))
}

fn header_of<S: Scalar>(k: &Kernel2<S>) -> KernelHeader {
    let uniform = k.x().is_uniform() && k.y().is_uniform();
    KernelHeader {
        shape: vec![k.nx(), k.ny()],
        measure: (!uniform).then(|| {
            [k.x(), k.y()].iter().map(|sp| sp.weights().iter().map(|w| w.to_string()).collect()).collect()
        }),
        bounded_mode: k.bound(),
    }
}

fn build<S: Scalar>(h: &KernelHeader, values: Vec<S>) -> Result<Kernel2<S>> {
    let [nx, ny] = h.shape[..] else {
        return Err(io_err("expected a two-axis shape"));
    };
    let (x, y) = match &h.measure {
        None => (MeasuredSpace::uniform(nx), MeasuredSpace::uniform(ny)),
        Some(m) if m.len() == 2 => {
            let axis = |ws: &Vec<String>| -> Result<MeasuredSpace<S>> {
                MeasuredSpace::new(ws.iter().map(|w| parse_scalar(w)).collect::<Result<Vec<S>>>()?)
            };
            (axis(&m[0])?, axis(&m[1])?)
        }
        Some(_) => return Err(io_err("measure must list two axes")),
    };
    Kernel2::new(x, y, values)?.with_bound(h.bounded_mode)
}

/// First line `# {header}`, then one comma-separated row per x.
pub fn write_kernel_csv<S: Scalar, W: Write>(k: &Kernel2<S>, mut w: W) -> Result<()> {
    let header = serde_json::to_string(&header_of(k)).map_err(io_err)?;
    writeln!(w, "# {header}").map_err(io_err)?;
    for i in 0..k.nx() {
        let row: Vec<String> = k.row(i).iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", row.join(",")).map_err(io_err)?;
    }
    Ok(())
}

pub fn read_kernel_csv<S: Scalar, R: BufRead>(r: R) -> Result<Kernel2<S>> {
    let mut lines = r.lines();
    let first = lines.next().ok_or_else(|| io_err("empty input"))?.map_err(io_err)?;
    let json = first.strip_prefix('#').ok_or_else(|| io_err("missing '# {header}' line"))?;
    let h: KernelHeader = serde_json::from_str(json.trim()).map_err(io_err)?;
    let mut values = Vec::new();
    for line in lines {
        let line = line.map_err(io_err)?;
        if line.trim().is_empty() {
            continue;
        }
        for cell in line.split(',') {
            values.push(parse_scalar(cell)?);
        }
    }
    build(&h, values)
}

/// u32 header length, JSON header, then f64 values, all little-endian.
pub fn write_kernel_binary<W: Write>(k: &Kernel2<f64>, mut w: W) -> Result<()> {
    let header = serde_json::to_vec(&header_of(k)).map_err(io_err)?;
    w.write_all(&(header.len() as u32).to_le_bytes()).map_err(io_err)?;
    w.write_all(&header).map_err(io_err)?;
    for v in k.values() {
        w.write_all(&v.to_le_bytes()).map_err(io_err)?;
    }
    Ok(())
}

pub fn read_kernel_binary<R: Read>(mut r: R) -> Result<Kernel2<f64>> {
    let mut len = [0u8; 4];
    r.read_exact(&mut len).map_err(io_err)?;
    let mut header = vec![0u8; u32::from_le_bytes(len) as usize];
    r.read_exact(&mut header).map_err(io_err)?;
    let h: KernelHeader = serde_json::from_slice(&header).map_err(io_err)?;
    let n: usize = h.shape.iter().product();
    let mut values = Vec::with_capacity(n);
    let mut buf = [0u8; 8];
    for _ in 0..n {
        r.read_exact(&mut buf).map_err(io_err)?;
        values.push(f64::from_le_bytes(buf));
    }
    build(&h, values)
}
