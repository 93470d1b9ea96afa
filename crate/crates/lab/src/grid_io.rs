//! Torus grid files.
//!
//! Binary layout: a 32-byte header `b"CMAGRID1"`, `m: u64`, `n: u64`,
//! `reserved: u64 = 0`, followed by `n^{2m}` little-endian `f64` values in
//! row-major order (last axis fastest). CSV layout: header
//! `x1,y1,value` (`m = 1`) or `x1,y1,x2,y2,value` (`m = 2`), one row per node
//! with integer indices in the same order. Files ending in `.csv` use the CSV
//! layout, everything else the binary one.

use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::error::{LabError, Result};
use crate::output::fmt_f64;

pub const MAGIC: &[u8; 8] = b"CMAGRID1";
pub const HEADER_LEN: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub m: usize,
    pub n: usize,
    pub data: Vec<f64>,
}

impl Grid {
    pub fn new(m: usize, n: usize, data: Vec<f64>) -> Result<Self> {
        if m != 1 && m != 2 {
            return Err(LabError::input(format!("grid dimension m = {m} must be 1 or 2")));
        }
        let len = n.checked_pow(2 * m as u32).ok_or_else(|| LabError::input("grid too large"))?;
        if n == 0 || data.len() != len {
            return Err(LabError::input(format!("grid m = {m}, n = {n} needs {len} values, got {}", data.len())));
        }
        Ok(Grid { m, n, data })
    }
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

pub fn encode_binary(g: &Grid) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * g.data.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(g.m as u64).to_le_bytes());
    out.extend_from_slice(&(g.n as u64).to_le_bytes());
    out.extend_from_slice(&0u64.to_le_bytes());
    for x in &g.data {
        out.extend_from_slice(&x.to_le_bytes());
    }
    out
}

pub fn decode_binary(bytes: &[u8]) -> Result<Grid> {
    if bytes.len() < HEADER_LEN || &bytes[..8] != MAGIC {
        return Err(LabError::input("not a CMAGRID1 file"));
    }
    let word = |i: usize| u64::from_le_bytes(bytes[8 * i..8 * i + 8].try_into().expect("8-byte slice"));
    let (m, n) = (word(1), word(2));
    if m > 2 || n > 1 << 20 {
        return Err(LabError::input(format!("implausible grid header m = {m}, n = {n}")));
    }
    let body = &bytes[HEADER_LEN..];
    if !body.len().is_multiple_of(8) {
        return Err(LabError::input("grid body is not a whole number of f64 values"));
    }
    let data = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk"))).collect();
    Grid::new(m as usize, n as usize, data)
}

pub fn encode_csv(g: &Grid) -> String {
    let dims = 2 * g.m;
    let names = ["x1", "y1", "x2", "y2"];
    let mut s = names[..dims].join(",") + ",value\n";
    for (i, x) in g.data.iter().enumerate() {
        for a in 0..dims {
            let stride = g.n.pow((dims - 1 - a) as u32);
            s += &((i / stride) % g.n).to_string();
            s.push(',');
        }
        s += &fmt_f64(*x);
        s.push('\n');
    }
    s
}

pub fn decode_csv(text: &str) -> Result<Grid> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| LabError::input("empty grid CSV"))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let m = match cols.as_slice() {
        ["x1", "y1", "value"] => 1,
        ["x1", "y1", "x2", "y2", "value"] => 2,
        _ => return Err(LabError::input(format!("unexpected grid CSV header {header:?}"))),
    };
    let dims = 2 * m;
    let mut idx = Vec::new();
    let mut data = Vec::new();
    for (k, line) in lines.enumerate() {
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != dims + 1 {
            return Err(LabError::input(format!("grid CSV row {} has {} fields", k + 2, f.len())));
        }
        let mut c = [0usize; 4];
        for a in 0..dims {
            c[a] = f[a].parse().map_err(|_| LabError::input(format!("grid CSV row {}: bad index", k + 2)))?;
        }
        idx.push(c);
        data.push(f[dims].parse::<f64>().map_err(|_| LabError::input(format!("grid CSV row {}: bad value", k + 2)))?);
    }
    let n = (data.len() as f64).powf(1.0 / dims as f64).round() as usize;
    let g = Grid::new(m, n, data)?;
    for (i, c) in idx.iter().enumerate() {
        for a in 0..dims {
            if c[a] != (i / n.pow((dims - 1 - a) as u32)) % n {
                return Err(LabError::input(format!("grid CSV row {} is out of row-major order", i + 2)));
            }
        }
    }
    Ok(g)
}

pub fn read_grid(path: &Path) -> Result<Grid> {
    if is_csv(path) {
        decode_csv(&std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?)
    } else {
        decode_binary(&std::fs::read(path).map_err(|e| LabError::io(path, e))?)
    }
}

pub fn write_grid(path: &Path, g: &Grid) -> Result<()> {
    let res = if is_csv(path) {
        std::fs::write(path, encode_csv(g))
    } else {
        std::fs::write(path, encode_binary(g))
    };
    res.map_err(|e| LabError::io(path, e))
}

/// `path` with `.json` appended.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

pub fn write_sidecar(path: &Path, v: &Value) -> Result<()> {
    let p = sidecar_path(path);
    std::fs::write(&p, crate::output::pretty(v)).map_err(|e| LabError::io(&p, e))
}
