// SPDX-License-Identifier: Apache-2.0

//! `cmx v1` plain-text matrix files.
//!
//! ```text
//! cmx 1 <dim>
//! <re> <im>        # dim² lines, row-major
//! ```
//!
//! Values are written in scientific notation with 17 significant digits so a
//! round trip is bit-exact.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

pub fn write_cmx_string(m: &ComplexMatrix) -> String {
    let mut out = String::with_capacity(48 * m.dim() * m.dim() + 16);
    writeln!(out, "cmx 1 {}", m.dim()).unwrap();
    for z in m.as_slice() {
        writeln!(out, "{:.16e} {:.16e}", z.re, z.im).unwrap();
    }
    out
}

pub fn write_cmx(path: impl AsRef<Path>, m: &ComplexMatrix) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, write_cmx_string(m)).map_err(|e| Error::io(path, e))
}

pub fn read_cmx(path: impl AsRef<Path>) -> Result<ComplexMatrix> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    read_cmx_str(&text)
}

pub fn read_cmx_str(text: &str) -> Result<ComplexMatrix> {
    let err = |line: usize, reason: String| Error::Cmx { line, reason };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));

    let (_, header) = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let dim = match fields.as_slice() {
        ["cmx", "1", dim] => dim
            .parse::<usize>()
            .ok()
            .filter(|&d| d >= 1)
            .ok_or_else(|| err(1, format!("invalid dimension `{dim}`")))?,
        _ => return Err(err(1, format!("expected `cmx 1 <dim>`, found `{header}`"))),
    };

    let expected = dim
        .checked_mul(dim)
        .ok_or_else(|| err(1, format!("dimension {dim} too large")))?;
    let mut data = Vec::with_capacity(expected);
    let mut last_line = 1;
    for (lineno, line) in lines {
        last_line = lineno;
        if line.is_empty() {
            continue;
        }
        if data.len() == expected {
            return Err(err(lineno, format!("more than {expected} entries")));
        }
        let mut parts = line.split_whitespace();
        let (re, im) = match (parts.next(), parts.next(), parts.next()) {
            (Some(re), Some(im), None) => (re, im),
            _ => return Err(err(lineno, format!("expected `<re> <im>`, found `{line}`"))),
        };
        let parse = |s: &str| -> Result<f64> {
            let v: f64 = s
                .parse()
                .map_err(|_| err(lineno, format!("invalid number `{s}`")))?;
            if !v.is_finite() {
                return Err(err(lineno, format!("non-finite value `{s}`")));
            }
            Ok(v)
        };
        data.push(Complex64::new(parse(re)?, parse(im)?));
    }
    if data.len() != expected {
        return Err(err(
            last_line,
            format!("expected {expected} entries, found {}", data.len()),
        ));
    }
    ComplexMatrix::new(dim, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli::sigma_y;
    use proptest::prelude::*;

    #[test]
    fn header_and_line_count() {
        let text = write_cmx_string(&sigma_y());
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "cmx 1 2");
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[2], "0.0000000000000000e0 -1.0000000000000000e0");
    }

    #[test]
    fn rejects_wrong_count() {
        assert!(matches!(
            read_cmx_str("cmx 1 2\n1 0\n0 0\n0 0\n"),
            Err(Error::Cmx { .. })
        ));
        assert!(read_cmx_str("cmx 1 1\n1 0\n0 0\n").is_err());
    }

    #[test]
    fn rejects_non_finite_and_bad_header() {
        assert!(read_cmx_str("cmx 1 1\nNaN 0\n").is_err());
        assert!(read_cmx_str("cmx 1 1\ninf 0\n").is_err());
        assert!(read_cmx_str("cmx 2 1\n1 0\n").is_err());
        assert!(read_cmx_str("cmx 1 0\n").is_err());
        assert!(read_cmx_str("").is_err());
        assert!(read_cmx_str("cmx 1 1\n1 0 0\n").is_err());
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("y.cmx");
        write_cmx(&path, &sigma_y()).unwrap();
        assert_eq!(read_cmx(&path).unwrap(), sigma_y());
    }

    proptest! {
        #[test]
        fn round_trip_is_bit_exact(
            dim in 1usize..6,
            vals in proptest::collection::vec(-1e300f64..1e300, 72),
        ) {
            let data: Vec<Complex64> = (0..dim * dim)
                .map(|k| Complex64::new(vals[2 * k] * 1e-300f64.powf((k % 3) as f64 / 2.0), vals[2 * k + 1]))
                .collect();
            let m = ComplexMatrix::new(dim, data).unwrap();
            let back = read_cmx_str(&write_cmx_string(&m)).unwrap();
            prop_assert_eq!(back.as_slice(), m.as_slice());
        }
    }
}
