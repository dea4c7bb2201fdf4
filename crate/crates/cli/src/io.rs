//! File formats: EMB1 binary embeddings, CSV embeddings, one-per-line labels
//! and assignments.

use std::fs;
use std::io::Write;
use std::path::Path;

use specclust::data::{Clustering, EmbeddingSet};
use specclust::ndarray::Array2;

use crate::error::{io_err, CliError, Result};

pub const EMB1_MAGIC: &[u8; 4] = b"EMB1";
const HEADER: usize = 12;

fn format_err(path: &Path, offset: u64, message: impl Into<String>) -> CliError {
    CliError::Format { path: path.to_path_buf(), offset, message: message.into() }
}

/// EMB1 bytes for a row-major matrix; values are stored as f32.
pub fn encode_emb1(x: &Array2<f64>) -> Vec<u8> {
    let (n, d) = x.dim();
    let mut out = Vec::with_capacity(HEADER + 4 * n * d);
    out.extend_from_slice(EMB1_MAGIC);
    out.extend_from_slice(&(n as u32).to_le_bytes());
    out.extend_from_slice(&(d as u32).to_le_bytes());
    for v in x.iter() {
        out.extend_from_slice(&(*v as f32).to_le_bytes());
    }
    out
}

pub fn decode_emb1(path: &Path, bytes: &[u8]) -> Result<Array2<f64>> {
    if bytes.len() < 4 || &bytes[..4] != EMB1_MAGIC {
        return Err(format_err(path, 0, "missing EMB1 magic bytes"));
    }
    if bytes.len() < HEADER {
        return Err(format_err(path, bytes.len() as u64, "truncated header"));
    }
    let n = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes")) as usize;
    let d = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes")) as usize;
    let want = n
        .checked_mul(d)
        .and_then(|c| c.checked_mul(4))
        .and_then(|c| c.checked_add(HEADER))
        .ok_or_else(|| format_err(path, 4, "dimensions overflow"))?;
    if bytes.len() != want {
        let offset = bytes.len().min(want) as u64;
        return Err(format_err(path, offset, format!("expected {want} bytes for {n} x {d}, found {}", bytes.len())));
    }
    let values: Vec<f64> = bytes[HEADER..]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")) as f64)
        .collect();
    Array2::from_shape_vec((n, d), values).map_err(|e| format_err(path, 4, e.to_string()))
}

/// Parse CSV floats. A first row that does not parse as numbers is a header.
pub fn decode_csv(path: &Path, text: &str) -> Result<Array2<f64>> {
    let mut rows: Vec<Vec<f64>> = vec![];
    let mut offset = 0u64;
    for (line_no, line) in text.split_inclusive('\n').enumerate() {
        let start = offset;
        offset += line.len() as u64;
        let body = line.trim_end_matches(['\n', '\r']);
        if body.trim().is_empty() {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = body.split(',').map(|f| f.trim().parse::<f64>()).collect();
        match parsed {
            Ok(r) => {
                if let Some(first) = rows.first() {
                    if first.len() != r.len() {
                        return Err(format_err(path, start, format!("expected {} fields, found {}", first.len(), r.len())));
                    }
                }
                rows.push(r);
            }
            Err(_) if line_no == 0 => continue,
            Err(e) => return Err(format_err(path, start, format!("line {}: {e}", line_no + 1))),
        }
    }
    if rows.is_empty() {
        return Err(format_err(path, offset, "no data rows"));
    }
    let (n, d) = (rows.len(), rows[0].len());
    Ok(Array2::from_shape_vec((n, d), rows.into_iter().flatten().collect()).expect("rectangular"))
}

pub fn encode_csv(x: &Array2<f64>) -> String {
    let mut s = String::new();
    for row in x.rows() {
        let fields: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        s.push_str(&fields.join(","));
        s.push('\n');
    }
    s
}

/// Read a raw matrix, choosing the format from the magic bytes.
pub fn read_matrix(path: &Path) -> Result<Array2<f64>> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    if bytes.starts_with(EMB1_MAGIC) || path.extension().is_some_and(|e| e == "emb1") {
        return decode_emb1(path, &bytes);
    }
    let text = std::str::from_utf8(&bytes)
        .map_err(|e| format_err(path, e.valid_up_to() as u64, "neither EMB1 nor UTF-8 CSV"))?;
    decode_csv(path, text)
}

pub fn read_embeddings(path: &Path) -> Result<EmbeddingSet> {
    Ok(EmbeddingSet::new(read_matrix(path)?)?)
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut lines: Vec<String> = text.lines().map(|l| l.trim_end_matches('\r').to_string()).collect();
    while lines.last().is_some_and(|l| l.is_empty()) {
        lines.pop();
    }
    Ok(lines)
}

/// One UTF-8 label per line.
pub fn read_labels(path: &Path) -> Result<Vec<String>> {
    read_lines(path)
}

/// One non-negative cluster id per line; ids are re-indexed densely.
pub fn read_assignment(path: &Path) -> Result<Clustering> {
    let mut offset = 0u64;
    let mut ids = vec![];
    for line in read_lines(path)? {
        let id: usize = line
            .trim()
            .parse()
            .map_err(|_| format_err(path, offset, format!("cluster id {line:?} is not a non-negative integer")))?;
        ids.push(id);
        offset += line.len() as u64 + 1;
    }
    Ok(Clustering::from_raw(&ids)?)
}

pub fn write_lines<T: std::fmt::Display>(path: &Path, items: impl IntoIterator<Item = T>) -> Result<()> {
    let mut s = String::new();
    for it in items {
        s.push_str(&it.to_string());
        s.push('\n');
    }
    write_bytes(path, s.as_bytes())
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let mut f = fs::File::create(path).map_err(io_err(path))?;
    f.write_all(bytes).map_err(io_err(path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use specclust::ndarray::array;

    #[test]
    fn emb1_round_trip() {
        let x = array![[0.5, -1.25, 3.0], [1.0, 2.0, -0.125]];
        let b = encode_emb1(&x);
        assert_eq!(&b[..4], b"EMB1");
        assert_eq!(b.len(), 12 + 24);
        assert_eq!(decode_emb1(Path::new("x"), &b).unwrap(), x);
    }

    #[test]
    fn emb1_errors_report_offsets() {
        let x = array![[1.0, 2.0]];
        let mut b = encode_emb1(&x);
        b[0] = b'X';
        match decode_emb1(Path::new("x"), &b) {
            Err(CliError::Format { offset, .. }) => assert_eq!(offset, 0),
            other => panic!("{other:?}"),
        }
        let b = encode_emb1(&x);
        match decode_emb1(Path::new("x"), &b[..b.len() - 2]) {
            Err(CliError::Format { offset, .. }) => assert_eq!(offset, 18),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn csv_header_detection() {
        let p = Path::new("x.csv");
        let with = decode_csv(p, "a,b\n1,2\n3.5,-4\n").unwrap();
        let without = decode_csv(p, "1,2\r\n3.5,-4\r\n").unwrap();
        assert_eq!(with, without);
        assert_eq!(with, array![[1.0, 2.0], [3.5, -4.0]]);
        assert!(matches!(decode_csv(p, "1,2\n3\n"), Err(CliError::Format { offset: 4, .. })));
        assert!(decode_csv(p, "1,2\nx,y\n").is_err());
    }
}
