//! Parity-check matrix files.
//!
//! Two formats are supported:
//!
//! - **dense**: one row per line, written as `0`/`1` characters with no
//!   separators. Blank lines are ignored.
//! - **alist**: the usual LDPC layout. Line 1 holds `n m` (columns, rows),
//!   line 2 the maximum column and row degree, lines 3 and 4 the per-column
//!   and per-row degrees, then one line per column listing its rows and one
//!   line per row listing its columns. Indices are 1-based; `0` entries are
//!   padding.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use qldpc_core::{BitMatrix, BitVector};

#[derive(Debug, thiserror::Error)]
pub enum PcmError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("file contains no matrix")]
    Empty,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: inconsistent alist declaration: {msg}")]
    Inconsistent { line: usize, msg: String },
    #[error("unknown matrix format '{0}' (expected dense, alist or auto)")]
    UnknownFormat(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PcmFormat {
    #[default]
    Dense,
    Alist,
}

impl PcmFormat {
    /// `.alist` files are alist, anything else dense.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("alist") => Self::Alist,
            _ => Self::Dense,
        }
    }
}

impl FromStr for PcmFormat {
    type Err = PcmError;

    fn from_str(s: &str) -> Result<Self, PcmError> {
        match s.to_ascii_lowercase().as_str() {
            "dense" => Ok(Self::Dense),
            "alist" => Ok(Self::Alist),
            other => Err(PcmError::UnknownFormat(other.to_string())),
        }
    }
}

pub fn load_pcm(path: &Path, format: PcmFormat) -> Result<BitMatrix, PcmError> {
    let text = fs::read_to_string(path).map_err(|source| PcmError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_pcm(&text, format)
}

pub fn parse_pcm(text: &str, format: PcmFormat) -> Result<BitMatrix, PcmError> {
    match format {
        PcmFormat::Dense => parse_dense(text),
        PcmFormat::Alist => parse_alist(text),
    }
}

pub fn write_pcm(m: &BitMatrix, format: PcmFormat) -> String {
    match format {
        PcmFormat::Dense => write_dense(m),
        PcmFormat::Alist => write_alist(m),
    }
}

pub fn save_pcm(path: &Path, m: &BitMatrix, format: PcmFormat) -> Result<(), PcmError> {
    fs::write(path, write_pcm(m, format)).map_err(|source| PcmError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn parse_dense(text: &str) -> Result<BitMatrix, PcmError> {
    let mut rows = Vec::new();
    let mut width = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let mut bits = Vec::with_capacity(line.len());
        for ch in line.chars() {
            match ch {
                '0' => bits.push(false),
                '1' => bits.push(true),
                other => {
                    return Err(PcmError::Parse {
                        line: lineno,
                        msg: format!("unexpected character {other:?}"),
                    })
                }
            }
        }
        match width {
            None => width = Some(bits.len()),
            Some(w) if w != bits.len() => {
                return Err(PcmError::Parse {
                    line: lineno,
                    msg: format!("row has {} entries, expected {w}", bits.len()),
                })
            }
            Some(_) => {}
        }
        rows.push(BitVector::from_bools(&bits));
    }
    let cols = width.ok_or(PcmError::Empty)?;
    Ok(BitMatrix::from_rows(cols, rows).expect("row widths checked"))
}

pub fn write_dense(m: &BitMatrix) -> String {
    m.to_string()
}

struct Lines<'a> {
    inner: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate().peekable(),
            last: 0,
        }
    }

    /// Next non-blank line as integers.
    fn numbers(&mut self, what: &str) -> Result<(usize, Vec<usize>), PcmError> {
        loop {
            let Some((idx, raw)) = self.inner.next() else {
                return Err(PcmError::Parse {
                    line: self.last + 1,
                    msg: format!("unexpected end of file, expected {what}"),
                });
            };
            self.last = idx + 1;
            if raw.trim().is_empty() {
                continue;
            }
            return parse_numbers(raw, idx + 1).map(|v| (idx + 1, v));
        }
    }

    /// For zero-degree entries: consume the next line only if it is blank or
    /// all padding.
    fn padding_line(&mut self) -> Result<(), PcmError> {
        if let Some(&(idx, raw)) = self.inner.peek() {
            let nums = parse_numbers(raw, idx + 1)?;
            if nums.iter().all(|&x| x == 0) {
                self.inner.next();
                self.last = idx + 1;
            }
        }
        Ok(())
    }
}

fn parse_numbers(raw: &str, line: usize) -> Result<Vec<usize>, PcmError> {
    raw.split_whitespace()
        .map(|tok| {
            tok.parse::<usize>().map_err(|_| PcmError::Parse {
                line,
                msg: format!("'{tok}' is not a non-negative integer"),
            })
        })
        .collect()
}

fn expect_len(line: usize, nums: &[usize], n: usize, what: &str) -> Result<(), PcmError> {
    if nums.len() != n {
        return Err(PcmError::Parse {
            line,
            msg: format!("expected {n} values for {what}, found {}", nums.len()),
        });
    }
    Ok(())
}

/// Reads one adjacency list per entity (column or row) and checks it against
/// the declared degree.
fn read_lists(
    lines: &mut Lines<'_>,
    degrees: &[usize],
    limit: usize,
    what: &str,
) -> Result<Vec<(usize, Vec<usize>)>, PcmError> {
    let mut out = Vec::with_capacity(degrees.len());
    for (i, &deg) in degrees.iter().enumerate() {
        if deg == 0 {
            lines.padding_line()?;
            out.push((lines.last, Vec::new()));
            continue;
        }
        let (line, nums) = lines.numbers(what)?;
        let entries: Vec<usize> = nums.into_iter().filter(|&x| x != 0).collect();
        if entries.len() != deg {
            return Err(PcmError::Inconsistent {
                line,
                msg: format!(
                    "{what} {} declares degree {deg} but lists {} entries",
                    i + 1,
                    entries.len()
                ),
            });
        }
        if let Some(&bad) = entries.iter().find(|&&x| x > limit) {
            return Err(PcmError::Parse {
                line,
                msg: format!("index {bad} out of range 1..={limit}"),
            });
        }
        let mut idx: Vec<usize> = entries.into_iter().map(|x| x - 1).collect();
        idx.sort_unstable();
        if idx.windows(2).any(|w| w[0] == w[1]) {
            return Err(PcmError::Parse {
                line,
                msg: "repeated index".to_string(),
            });
        }
        out.push((line, idx));
    }
    Ok(out)
}

pub fn parse_alist(text: &str) -> Result<BitMatrix, PcmError> {
    if text.trim().is_empty() {
        return Err(PcmError::Empty);
    }
    let mut lines = Lines::new(text);

    let (l1, dims) = lines.numbers("'n m'")?;
    expect_len(l1, &dims, 2, "'n m'")?;
    let (n, m) = (dims[0], dims[1]);

    let (l2, maxes) = lines.numbers("maximum degrees")?;
    expect_len(l2, &maxes, 2, "maximum degrees")?;

    let (l3, col_deg) = lines.numbers("column degrees")?;
    expect_len(l3, &col_deg, n, "column degrees")?;
    let (l4, row_deg) = lines.numbers("row degrees")?;
    expect_len(l4, &row_deg, m, "row degrees")?;

    let max_col = col_deg.iter().copied().max().unwrap_or(0);
    let max_row = row_deg.iter().copied().max().unwrap_or(0);
    if max_col != maxes[0] || max_row != maxes[1] {
        return Err(PcmError::Inconsistent {
            line: l2,
            msg: format!(
                "declared maxima ({}, {}) but degrees give ({max_col}, {max_row})",
                maxes[0], maxes[1]
            ),
        });
    }
    if col_deg.iter().sum::<usize>() != row_deg.iter().sum::<usize>() {
        return Err(PcmError::Inconsistent {
            line: l4,
            msg: "column and row degrees sum to different edge counts".to_string(),
        });
    }

    let cols = read_lists(&mut lines, &col_deg, m, "column")?;
    let rows = read_lists(&mut lines, &row_deg, n, "row")?;

    let mut mat = BitMatrix::zeros(m, n);
    for (i, (_, list)) in rows.iter().enumerate() {
        for &j in list {
            mat.set(i, j, true);
        }
    }
    for (j, (line, list)) in cols.iter().enumerate() {
        for &i in list {
            if !mat.get(i, j) {
                return Err(PcmError::Inconsistent {
                    line: *line,
                    msg: format!(
                        "column {} lists row {} but that row does not list the column",
                        j + 1,
                        i + 1
                    ),
                });
            }
        }
    }
    Ok(mat)
}

pub fn write_alist(m: &BitMatrix) -> String {
    let t = m.transpose();
    let col_lists: Vec<Vec<usize>> = t.row_iter().map(|r| r.support()).collect();
    let row_lists: Vec<Vec<usize>> = m.row_iter().map(|r| r.support()).collect();
    let max_col = col_lists.iter().map(Vec::len).max().unwrap_or(0);
    let max_row = row_lists.iter().map(Vec::len).max().unwrap_or(0);

    let join = |xs: &mut dyn Iterator<Item = usize>| {
        xs.map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
    };
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", m.cols(), m.rows());
    let _ = writeln!(out, "{max_col} {max_row}");
    let _ = writeln!(out, "{}", join(&mut col_lists.iter().map(Vec::len)));
    let _ = writeln!(out, "{}", join(&mut row_lists.iter().map(Vec::len)));
    for (lists, width) in [(&col_lists, max_col), (&row_lists, max_row)] {
        for list in lists {
            let mut padded = list.iter().map(|x| x + 1).chain(std::iter::repeat(0));
            let _ = writeln!(out, "{}", join(&mut padded.by_ref().take(width)));
        }
    }
    out
}
