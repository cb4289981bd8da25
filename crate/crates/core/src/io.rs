//! Point-list ingestion (CSV, JSON) and CSV/JSON point output.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointFormat {
    /// One point per line, comma-separated, optional header row.
    Csv,
    /// An array of arrays of numbers.
    Json,
}

impl PointFormat {
    /// Guesses from the file extension, defaulting to CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => PointFormat::Json,
            _ => PointFormat::Csv,
        }
    }
}

impl FromStr for PointFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(PointFormat::Csv),
            "json" => Ok(PointFormat::Json),
            other => Err(Error::InvalidConfig(format!("unknown format '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Header {
    /// Skip the first row if any of its fields is not a number.
    #[default]
    Auto,
    /// Every row is data.
    Absent,
}

pub fn load_points(path: &Path, format: PointFormat, header: Header) -> Result<Vec<Vec<f64>>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    match format {
        PointFormat::Csv => parse_csv(&text, header),
        PointFormat::Json => parse_json(&text),
    }
}

pub fn parse_csv(text: &str, header: Header) -> Result<Vec<Vec<f64>>> {
    let mut points: Vec<Vec<f64>> = Vec::new();
    let mut first_row = true;
    for (lineno, line) in text.lines().enumerate().map(|(i, l)| (i + 1, l)) {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: Vec<std::result::Result<f64, _>> =
            fields.iter().map(|f| f.parse::<f64>()).collect();
        let is_header = first_row && header == Header::Auto && parsed.iter().any(|r| r.is_err());
        first_row = false;
        if is_header {
            continue;
        }
        let mut row = Vec::with_capacity(fields.len());
        for (col, (value, raw)) in parsed.into_iter().zip(&fields).enumerate() {
            match value {
                Ok(x) => row.push(x),
                Err(_) => {
                    return Err(Error::Parse {
                        line: lineno,
                        column: col + 1,
                        message: format!("'{raw}' is not a number"),
                    })
                }
            }
        }
        if let Some(first) = points.first() {
            if first.len() != row.len() {
                return Err(Error::DimensionMismatch {
                    expected: first.len(),
                    found: row.len(),
                    line: Some(lineno),
                });
            }
        }
        points.push(row);
    }
    if points.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(points)
}

/// Parses `[[x, y, ...], ...]`. Mismatched rows report their 1-based
/// position in the outer array as the line.
pub fn parse_json(text: &str) -> Result<Vec<Vec<f64>>> {
    if text.trim().is_empty() {
        return Err(Error::EmptyDataset);
    }
    let points: Vec<Vec<f64>> = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let first = points.first().ok_or(Error::EmptyDataset)?;
    for (i, p) in points.iter().enumerate() {
        if p.len() != first.len() {
            return Err(Error::DimensionMismatch {
                expected: first.len(),
                found: p.len(),
                line: Some(i + 1),
            });
        }
    }
    Ok(points)
}

/// Writes points one per line using shortest round-trip float formatting.
pub fn write_csv<'a, W: Write>(
    mut out: W,
    points: impl IntoIterator<Item = &'a [f64]>,
) -> std::io::Result<()> {
    for p in points {
        let mut first = true;
        for x in p {
            if !first {
                out.write_all(b",")?;
            }
            write!(out, "{x}")?;
            first = false;
        }
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn write_json<'a, W: Write>(
    out: W,
    points: impl IntoIterator<Item = &'a [f64]>,
) -> Result<()> {
    let rows: Vec<&[f64]> = points.into_iter().collect();
    serde_json::to_writer(out, &rows)?;
    Ok(())
}

pub fn save_points<'a>(
    path: &Path,
    format: PointFormat,
    points: impl IntoIterator<Item = &'a [f64]>,
) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    match format {
        PointFormat::Csv => write_csv(&mut out, points).map_err(|e| Error::io(path, e))?,
        PointFormat::Json => write_json(&mut out, points)?,
    }
    out.flush().map_err(|e| Error::io(path, e))
}
