use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Result, RpcaError};
use crate::matrix::DenseMatrix;

pub const BIN_MAGIC: [u8; 4] = *b"RPCM";
pub const BIN_VERSION: u16 = 1;
/// Magic, version, row count and column count.
pub const BIN_HEADER_LEN: usize = 4 + 2 + 8 + 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixFormat {
    Csv,
    Bin,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixFile {
    pub format: MatrixFormat,
    pub path: PathBuf,
}

impl MatrixFile {
    pub fn bin(path: impl Into<PathBuf>) -> Self {
        Self {
            format: MatrixFormat::Bin,
            path: path.into(),
        }
    }

    pub fn csv(path: impl Into<PathBuf>) -> Self {
        Self {
            format: MatrixFormat::Csv,
            path: path.into(),
        }
    }

    /// Picks the format from a `.csv` or `.bin` extension.
    pub fn infer(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase);
        match ext.as_deref() {
            Some("csv") => Ok(Self::csv(path)),
            Some("bin") => Ok(Self::bin(path)),
            _ => Err(RpcaError::InvalidParam(format!(
                "cannot tell the matrix format of {}; use a .csv or .bin extension",
                path.display()
            ))),
        }
    }
}

pub fn read_matrix(file: &MatrixFile) -> Result<DenseMatrix> {
    match file.format {
        MatrixFormat::Bin => decode_bin(&fs::read(&file.path)?),
        MatrixFormat::Csv => parse_csv(&fs::read_to_string(&file.path)?),
    }
}

pub fn write_matrix(m: &DenseMatrix, file: &MatrixFile) -> Result<()> {
    match file.format {
        MatrixFormat::Bin => fs::write(&file.path, encode_bin(m)?)?,
        MatrixFormat::Csv => fs::write(&file.path, format_csv(m)?)?,
    }
    Ok(())
}

pub fn encode_bin(m: &DenseMatrix) -> Result<Vec<u8>> {
    if m.is_empty() {
        return Err(RpcaError::EmptyMatrix);
    }
    let mut out = Vec::with_capacity(BIN_HEADER_LEN + 8 * m.as_slice().len());
    out.extend_from_slice(&BIN_MAGIC);
    out.extend_from_slice(&BIN_VERSION.to_le_bytes());
    out.extend_from_slice(&(m.rows() as u64).to_le_bytes());
    out.extend_from_slice(&(m.cols() as u64).to_le_bytes());
    for v in m.as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

pub fn decode_bin(bytes: &[u8]) -> Result<DenseMatrix> {
    if bytes.len() < BIN_HEADER_LEN {
        return Err(RpcaError::MalformedHeader(format!(
            "{} bytes is shorter than the {BIN_HEADER_LEN}-byte header",
            bytes.len()
        )));
    }
    if bytes[..4] != BIN_MAGIC {
        return Err(RpcaError::MalformedHeader(format!(
            "bad magic {:?}",
            &bytes[..4]
        )));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != BIN_VERSION {
        return Err(RpcaError::MalformedHeader(format!(
            "unsupported version {version}"
        )));
    }
    let word = |at: usize| u64::from_le_bytes(bytes[at..at + 8].try_into().expect("8 bytes"));
    let (rows, cols) = (word(6), word(14));
    if rows == 0 || cols == 0 {
        return Err(RpcaError::EmptyMatrix);
    }
    let payload = &bytes[BIN_HEADER_LEN..];
    let expected = rows
        .checked_mul(cols)
        .and_then(|n| n.checked_mul(8))
        .filter(|&n| n == payload.len() as u64)
        .ok_or_else(|| {
            RpcaError::MalformedHeader(format!(
                "{rows}x{cols} does not match a payload of {} bytes",
                payload.len()
            ))
        })?;
    let data: Vec<f64> = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    debug_assert_eq!(data.len() as u64 * 8, expected);
    DenseMatrix::new(rows as usize, cols as usize, data)
}

/// One line per row. Values use the shortest decimal form that parses back
/// to the same `f64`.
pub fn format_csv(m: &DenseMatrix) -> Result<String> {
    if m.is_empty() {
        return Err(RpcaError::EmptyMatrix);
    }
    let mut out = String::new();
    for i in 0..m.rows() {
        for (j, v) in m.row(i).iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            write!(out, "{v:?}").expect("writing to a String");
        }
        out.push('\n');
    }
    Ok(out)
}

/// Parses comma-separated rows. Blank lines are skipped; line numbers in
/// errors are 1-based.
pub fn parse_csv(text: &str) -> Result<DenseMatrix> {
    let mut data = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let start = data.len();
        for token in line.split(',') {
            let token = token.trim();
            let v: f64 = token.parse().map_err(|_| RpcaError::Parse {
                line: idx + 1,
                token: token.to_string(),
            })?;
            if !v.is_finite() {
                return Err(RpcaError::NonFinite {
                    row: rows,
                    col: data.len() - start,
                });
            }
            data.push(v);
        }
        let found = data.len() - start;
        match cols {
            None => cols = Some(found),
            Some(expected) if expected != found => {
                return Err(RpcaError::RaggedRows {
                    line: idx + 1,
                    expected,
                    found,
                });
            }
            Some(_) => {}
        }
        rows += 1;
    }
    match cols {
        None => Err(RpcaError::EmptyMatrix),
        Some(cols) => DenseMatrix::new(rows, cols, data),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_literal() {
        let m = parse_csv("1,2\n3,4\n").unwrap();
        assert_eq!(m, DenseMatrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]));
        assert_eq!(
            format_csv(&DenseMatrix::from_rows(&[[0.5]])).unwrap(),
            "0.5\n"
        );
    }

    #[test]
    fn csv_errors_are_distinct() {
        assert!(matches!(
            parse_csv("1,2\n3\n"),
            Err(RpcaError::RaggedRows {
                line: 2,
                expected: 2,
                found: 1
            })
        ));
        assert!(matches!(
            parse_csv("1,x\n"),
            Err(RpcaError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_csv("1,NaN\n"),
            Err(RpcaError::NonFinite { row: 0, col: 1 })
        ));
        assert!(matches!(parse_csv("\n\n"), Err(RpcaError::EmptyMatrix)));
    }

    #[test]
    fn bin_layout() {
        let bytes = encode_bin(&DenseMatrix::from_rows(&[[42.0]])).unwrap();
        assert_eq!(bytes.len(), 30);
        assert_eq!(&bytes[..4], b"RPCM");
        assert_eq!(&bytes[4..6], &[1, 0]);
        assert_eq!(f64::from_le_bytes(bytes[22..].try_into().unwrap()), 42.0);
        assert!(matches!(
            encode_bin(&DenseMatrix::zeros(0, 3)),
            Err(RpcaError::EmptyMatrix)
        ));
    }

    #[test]
    fn bin_errors_are_distinct() {
        let good = encode_bin(&DenseMatrix::from_rows(&[[1.0, 2.0]])).unwrap();
        let mut bad = good.clone();
        bad[0] = b'X';
        assert!(matches!(
            decode_bin(&bad),
            Err(RpcaError::MalformedHeader(_))
        ));
        assert!(matches!(
            decode_bin(&good[..10]),
            Err(RpcaError::MalformedHeader(_))
        ));
        assert!(matches!(
            decode_bin(&good[..good.len() - 1]),
            Err(RpcaError::MalformedHeader(_))
        ));
        let mut nan = good.clone();
        nan[30..].copy_from_slice(&f64::NAN.to_le_bytes());
        assert!(matches!(
            decode_bin(&nan),
            Err(RpcaError::NonFinite { row: 0, col: 1 })
        ));
        let mut empty = good[..BIN_HEADER_LEN].to_vec();
        empty[6..14].copy_from_slice(&0u64.to_le_bytes());
        assert!(matches!(decode_bin(&empty), Err(RpcaError::EmptyMatrix)));
    }

    #[test]
    fn format_from_extension() {
        assert_eq!(
            MatrixFile::infer("a/D.csv").unwrap().format,
            MatrixFormat::Csv
        );
        assert_eq!(
            MatrixFile::infer("D.BIN").unwrap().format,
            MatrixFormat::Bin
        );
        assert!(MatrixFile::infer("D.txt").is_err());
    }
}
