//! Result writing, run manifests and plain-text renderings.

use std::io::Write;
use std::path::Path;
use std::time::Duration;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use cyclic_cdc::TowerSpec;

#[derive(Serialize)]
pub struct Manifest {
    pub command: String,
    pub params: Value,
    pub tower: Option<TowerSpec>,
    pub version: &'static str,
    pub wall_time_ms: u128,
    pub timings_ms: Vec<(String, u128)>,
    pub result_sha256: String,
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes `bytes` to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()
        }
    }
}

pub fn write_manifest(path: Option<&Path>, manifest: &Manifest) -> std::io::Result<()> {
    let mut bytes = serde_json::to_vec_pretty(manifest).expect("manifest serializes");
    bytes.push(b'\n');
    match path {
        Some(p) => std::fs::write(p, bytes),
        None => std::io::stderr().lock().write_all(&bytes),
    }
}

pub fn millis(d: Duration) -> u128 {
    d.as_millis()
}

/// Comma-separated rows with a header line; fields containing commas are
/// quoted.
pub fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let field = |s: &str| {
        if s.contains(',') || s.contains('"') {
            format!("\"{}\"", s.replace('"', "\"\""))
        } else {
            s.to_string()
        }
    };
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.iter().map(|s| field(s)).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

/// Left-aligned columns padded to the widest entry.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let widths: Vec<usize> = (0..header.len())
        .map(|c| {
            rows.iter()
                .map(|r| r[c].chars().count())
                .chain([header[c].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: Vec<&str>| {
        cells
            .iter()
            .zip(&widths)
            .map(|(s, w)| format!("{s:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let mut out = line(header.to_vec());
    out.push('\n');
    for r in rows {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quotes_commas() {
        let s = csv(&["a", "b"], &[vec!["1".into(), "x,y".into()]]);
        assert_eq!(s, "a,b\n1,\"x,y\"\n");
    }

    #[test]
    fn table_pads_columns() {
        let s = table(&["n", "size"], &[vec!["10".into(), "33759".into()]]);
        assert_eq!(s, "n   size\n10  33759\n");
    }
}
