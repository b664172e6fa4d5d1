//! Plain-text input and output.
//!
//! Series files hold one value per line. An empty line or `NA` marks a
//! missing value, lines starting with `#` are comments, and a non-numeric
//! first data line is taken as a header. When a line has several
//! comma-separated fields the last one is used.
//!
//! Floats are written with the shortest representation that parses back to
//! the same value, so files round-trip exactly.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::estimators::FluctuationCurve;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
}

fn is_missing(field: &str) -> bool {
    field.is_empty() || field.eq_ignore_ascii_case("na") || field.eq_ignore_ascii_case("nan")
}

fn last_field(line: &str) -> &str {
    line.rsplit(',').next().unwrap_or("").trim()
}

/// Parses a series; `None` entries are missing.
pub fn parse_series<R: Read>(reader: R, path: &str) -> Result<Vec<Option<f64>>, InputError> {
    let mut out = Vec::new();
    let mut seen_data = false;
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(|source| InputError::Io {
            path: path.into(),
            source,
        })?;
        let trimmed = line.trim();
        if trimmed.starts_with('#') {
            continue;
        }
        let field = last_field(trimmed);
        if is_missing(field) {
            out.push(None);
            seen_data = true;
            continue;
        }
        match field.parse::<f64>() {
            Ok(v) if v.is_finite() => out.push(Some(v)),
            Ok(_) => {
                return Err(InputError::Parse {
                    path: path.into(),
                    line: i + 1,
                    msg: format!("non-finite value '{field}'"),
                })
            }
            Err(_) if !seen_data => {}
            Err(_) => {
                return Err(InputError::Parse {
                    path: path.into(),
                    line: i + 1,
                    msg: format!("not a number: '{field}'"),
                })
            }
        }
        seen_data = true;
    }
    Ok(out)
}

pub fn read_series(path: &Path) -> Result<Vec<Option<f64>>, InputError> {
    let name = path.display().to_string();
    if name == "-" {
        return parse_series(io::stdin().lock(), "<stdin>");
    }
    let f = File::open(path).map_err(|source| InputError::Io {
        path: name.clone(),
        source,
    })?;
    parse_series(f, &name)
}

/// Parses a mask file: one of `1`/`0`/`true`/`false` per line (`1` =
/// present). Comments and a header line are allowed as for series.
pub fn parse_mask<R: Read>(reader: R, path: &str) -> Result<Vec<bool>, InputError> {
    let mut out = Vec::new();
    let mut seen_data = false;
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(|source| InputError::Io {
            path: path.into(),
            source,
        })?;
        let trimmed = line.trim();
        if trimmed.starts_with('#') || trimmed.is_empty() {
            continue;
        }
        match last_field(trimmed).to_ascii_lowercase().as_str() {
            "1" | "true" => out.push(true),
            "0" | "false" => out.push(false),
            _ if !seen_data => {}
            other => {
                return Err(InputError::Parse {
                    path: path.into(),
                    line: i + 1,
                    msg: format!("invalid mask entry '{other}'"),
                })
            }
        }
        seen_data = true;
    }
    Ok(out)
}

pub fn read_mask(path: &Path) -> Result<Vec<bool>, InputError> {
    let name = path.display().to_string();
    let f = File::open(path).map_err(|source| InputError::Io {
        path: name.clone(),
        source,
    })?;
    parse_mask(f, &name)
}

/// Writes `# key: value` lines.
pub fn write_header<W: Write>(w: &mut W, comments: &[String]) -> io::Result<()> {
    for c in comments {
        for line in c.lines() {
            writeln!(w, "# {line}")?;
        }
    }
    Ok(())
}

/// Series with `NA` at missing positions.
pub fn write_series<W: Write>(
    w: &mut W,
    values: &[f64],
    mask: Option<&[bool]>,
    comments: &[String],
) -> io::Result<()> {
    write_header(w, comments)?;
    writeln!(w, "x")?;
    for (i, v) in values.iter().enumerate() {
        if mask.is_some_and(|m| !m[i]) {
            writeln!(w, "NA")?;
        } else {
            writeln!(w, "{v}")?;
        }
    }
    Ok(())
}

pub fn write_mask<W: Write>(w: &mut W, mask: &[bool], comments: &[String]) -> io::Result<()> {
    write_header(w, comments)?;
    writeln!(w, "present")?;
    for &d in mask {
        writeln!(w, "{}", u8::from(d))?;
    }
    Ok(())
}

/// Columns `scale,F,F_squared,n_windows,defined`. `F` is empty where the
/// curve is undefined; `F_squared` keeps the raw value.
pub fn write_curve<W: Write>(
    w: &mut W,
    curve: &FluctuationCurve,
    comments: &[String],
) -> io::Result<()> {
    write_header(w, comments)?;
    writeln!(w, "scale,F,F_squared,n_windows,defined")?;
    for p in &curve.points {
        let f = p.f().map(|f| f.to_string()).unwrap_or_default();
        let f2 = if p.f2.is_nan() {
            String::new()
        } else {
            p.f2.to_string()
        };
        writeln!(
            w,
            "{},{},{},{},{}",
            p.scale,
            f,
            f2,
            p.n_windows,
            u8::from(p.is_defined())
        )?;
    }
    Ok(())
}

/// Formats an optional float, leaving the field empty when absent or NaN.
pub fn opt(v: Option<f64>) -> String {
    match v {
        Some(x) if !x.is_nan() => x.to_string(),
        _ => String::new(),
    }
}

/// Buffered writer to a file, or to stdout for `None` / `-`.
pub fn output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    match path {
        Some(p) if p.as_os_str() != "-" => Ok(Box::new(BufWriter::new(File::create(p)?))),
        _ => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}
