//! Line-oriented text format for complex and quaternion matrices.
//!
//! ```text
//! quatmat 1
//! kind complex          # or: quaternion
//! rows 2
//! cols 2
//! entries
//! 0 0                   # one entry per line, row-major
//! 1 0                   # complex: re im
//! -1 0                  # quaternion: a b c d
//! 0 0
//! ```
//!
//! Blank lines and text after `#` are ignored.

use std::fmt;

use num_complex::Complex64;

use crate::embedding::{chi, chi_inv, CMatrix};
use crate::error::Result as QResult;
use crate::quaternion::{QuatMatrix, Quaternion};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    Complex,
    Quaternion,
}

impl MatrixKind {
    fn as_str(self) -> &'static str {
        match self {
            MatrixKind::Complex => "complex",
            MatrixKind::Quaternion => "quaternion",
        }
    }

    fn width(self) -> usize {
        match self {
            MatrixKind::Complex => 2,
            MatrixKind::Quaternion => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MatrixFile {
    Complex(CMatrix),
    Quaternion(QuatMatrix),
}

/// A parse failure naming the offending field.
#[derive(Debug, Clone, PartialEq)]
pub struct FormatError {
    pub field: String,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: field `{}`: {}", self.field, self.message),
            None => write!(f, "field `{}`: {}", self.field, self.message),
        }
    }
}

impl std::error::Error for FormatError {}

fn err(field: &str, line: Option<usize>, message: impl Into<String>) -> FormatError {
    FormatError {
        field: field.to_string(),
        line,
        message: message.into(),
    }
}

impl MatrixFile {
    pub fn kind(&self) -> MatrixKind {
        match self {
            MatrixFile::Complex(_) => MatrixKind::Complex,
            MatrixFile::Quaternion(_) => MatrixKind::Quaternion,
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        match self {
            MatrixFile::Complex(m) => m.shape(),
            MatrixFile::Quaternion(q) => (q.rows(), q.cols()),
        }
    }

    /// The complex matrix itself, or `chi` of a quaternion matrix.
    pub fn to_complex(&self) -> CMatrix {
        match self {
            MatrixFile::Complex(m) => m.clone(),
            MatrixFile::Quaternion(q) => chi(q),
        }
    }

    /// The quaternion matrix itself, or `chi^-1` of a quaternionic complex
    /// matrix.
    pub fn to_quaternion(&self, tol: f64) -> QResult<QuatMatrix> {
        match self {
            MatrixFile::Complex(m) => chi_inv(m, tol),
            MatrixFile::Quaternion(q) => Ok(q.clone()),
        }
    }

    pub fn parse(text: &str) -> Result<MatrixFile, FormatError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());

        let mut header = |field: &str| -> Result<(usize, String), FormatError> {
            let (no, line) = lines
                .next()
                .ok_or_else(|| err(field, None, "missing header line"))?;
            let mut parts = line.split_whitespace();
            let key = parts.next().unwrap_or("");
            if key != field {
                return Err(err(field, Some(no), format!("expected `{field}`, found `{key}`")));
            }
            Ok((no, parts.collect::<Vec<_>>().join(" ")))
        };

        let (no, version) = header("quatmat")?;
        match version.parse::<u32>() {
            Ok(FORMAT_VERSION) => {}
            _ => return Err(err("quatmat", Some(no), format!("unsupported version `{version}`"))),
        }
        let (no, kind) = header("kind")?;
        let kind = match kind.as_str() {
            "complex" => MatrixKind::Complex,
            "quaternion" => MatrixKind::Quaternion,
            other => return Err(err("kind", Some(no), format!("unknown kind `{other}`"))),
        };
        let mut dim = |field: &str| -> Result<usize, FormatError> {
            let (no, v) = header(field)?;
            v.parse::<usize>()
                .map_err(|_| err(field, Some(no), format!("`{v}` is not a nonnegative integer")))
        };
        let rows = dim("rows")?;
        let cols = dim("cols")?;
        let (no, rest) = header("entries")?;
        if !rest.is_empty() {
            return Err(err("entries", Some(no), "unexpected text after `entries`"));
        }

        let width = kind.width();
        let mut values: Vec<Vec<f64>> = Vec::with_capacity(rows * cols);
        for (no, line) in lines {
            let nums = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<f64>()
                        .map_err(|_| err("entries", Some(no), format!("`{t}` is not a number")))
                })
                .collect::<Result<Vec<f64>, _>>()?;
            if nums.len() != width {
                return Err(err(
                    "entries",
                    Some(no),
                    format!("a {} entry has {width} components, found {}", kind.as_str(), nums.len()),
                ));
            }
            values.push(nums);
        }
        if values.len() != rows * cols {
            return Err(err(
                "entries",
                None,
                format!(
                    "entry count {} does not match rows x cols = {rows} x {cols} = {}",
                    values.len(),
                    rows * cols
                ),
            ));
        }
        Ok(match kind {
            MatrixKind::Complex => {
                MatrixFile::Complex(CMatrix::from_fn(rows, cols, |i, j| {
                    let v = &values[i * cols + j];
                    Complex64::new(v[0], v[1])
                }))
            }
            MatrixKind::Quaternion => MatrixFile::Quaternion(QuatMatrix::from_fn(rows, cols, |i, j| {
                let v = &values[i * cols + j];
                Quaternion::new(v[0], v[1], v[2], v[3])
            })),
        })
    }

    pub fn serialize(&self) -> String {
        let (rows, cols) = self.shape();
        let mut out = format!(
            "quatmat {FORMAT_VERSION}\nkind {}\nrows {rows}\ncols {cols}\nentries\n",
            self.kind().as_str()
        );
        for i in 0..rows {
            for j in 0..cols {
                match self {
                    MatrixFile::Complex(m) => {
                        let z = m[(i, j)];
                        out.push_str(&format!("{:.16e} {:.16e}\n", z.re, z.im));
                    }
                    MatrixFile::Quaternion(q) => {
                        let e = q[(i, j)];
                        out.push_str(&format!("{:.16e} {:.16e} {:.16e} {:.16e}\n", e.a, e.b, e.c, e.d));
                    }
                }
            }
        }
        out
    }
}
