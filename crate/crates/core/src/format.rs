//! Text formats: point clouds, explicit complexes and barcodes.
//!
//! Floating-point values are written with Rust's shortest round-trip
//! formatting, so a value written and parsed back is bit-identical.

use std::fmt::Write as _;

use thiserror::Error;

use crate::complex::{Cell, Chain, FilteredPair};
use crate::field::PrimeField;
use crate::prh::{Bar, Barcode, Pipeline};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {reason}")]
pub struct ParseError {
    pub line: usize,
    pub reason: String,
}

fn err(line: usize, reason: impl Into<String>) -> ParseError {
    ParseError {
        line,
        reason: reason.into(),
    }
}

/// Non-empty lines with comments (`#`) stripped, numbered from 1.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(n, l)| (n + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn parse_f64(line: usize, s: &str, what: &str) -> Result<f64, ParseError> {
    s.parse::<f64>()
        .map_err(|_| err(line, format!("invalid {what} `{s}`")))
}

/// One point per line; coordinates separated by whitespace and/or commas.
pub fn parse_points(text: &str) -> Result<Vec<Vec<f64>>, ParseError> {
    let mut points: Vec<Vec<f64>> = Vec::new();
    for (n, line) in content_lines(text) {
        let pt = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| parse_f64(n, s, "coordinate"))
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(first) = points.first() {
            if first.len() != pt.len() {
                return Err(err(n, format!("expected {} coordinates, found {}", first.len(), pt.len())));
            }
        }
        if pt.iter().any(|x| !x.is_finite()) {
            return Err(err(n, "non-finite coordinate"));
        }
        points.push(pt);
    }
    if points.is_empty() {
        return Err(err(0, "no points"));
    }
    Ok(points)
}

/// Explicit complex: one cell per line, `id dim b_F b_G face:coeff,...`.
/// Ids must be dense from 0 in order. Coefficients may be negative and are
/// reduced mod p. `b_G` may be `inf` for cells that never enter the
/// subcomplex before the terminal value.
pub fn parse_complex(text: &str, field: &PrimeField) -> Result<FilteredPair, ParseError> {
    let mut cells = Vec::new();
    for (n, line) in content_lines(text) {
        let tok: Vec<&str> = line.split_whitespace().collect();
        if !(4..=5).contains(&tok.len()) {
            return Err(err(n, "expected `id dim b_F b_G [face:coeff,...]`"));
        }
        let id: usize = tok[0].parse().map_err(|_| err(n, "invalid id"))?;
        if id != cells.len() {
            return Err(err(n, format!("expected id {}, found {id}", cells.len())));
        }
        let dim: usize = tok[1].parse().map_err(|_| err(n, "invalid dimension"))?;
        let birth_f = parse_f64(n, tok[2], "b_F")?;
        let birth_g = parse_f64(n, tok[3], "b_G")?;
        let mut boundary = Vec::new();
        if let Some(faces) = tok.get(4) {
            for term in faces.split(',').filter(|s| !s.is_empty()) {
                let (face, coeff) = term
                    .split_once(':')
                    .ok_or_else(|| err(n, format!("boundary term `{term}` is not face:coeff")))?;
                let face: usize = face.parse().map_err(|_| err(n, format!("invalid face `{face}`")))?;
                let coeff: i64 = coeff
                    .parse()
                    .map_err(|_| err(n, format!("invalid coefficient `{coeff}`")))?;
                let c = field.reduce(coeff);
                if c == 0 {
                    return Err(err(n, format!("coefficient on face {face} vanishes mod {}", field.modulus())));
                }
                boundary.push((face, c));
            }
        }
        boundary.sort_unstable_by_key(|e: &(usize, u32)| e.0);
        if boundary.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(err(n, "repeated face"));
        }
        cells.push(Cell {
            dim,
            boundary,
            birth_f,
            birth_g,
        });
    }
    Ok(FilteredPair::new(field.clone(), cells))
}

pub fn write_complex(pair: &FilteredPair) -> String {
    let mut out = String::new();
    for (id, c) in pair.cells().iter().enumerate() {
        let _ = write!(out, "{id} {} {} {}", c.dim, c.birth_f, c.birth_g);
        if !c.boundary.is_empty() {
            out.push(' ');
            out.push_str(&Chain::new(c.boundary.clone()).to_string());
        }
        out.push('\n');
    }
    out
}

/// Barcode file:
///
/// ```text
/// relhom-barcode 1
/// field 2
/// pipeline general
/// cells 57
/// bars 2
/// 1 0.5 0.75 3:1,4:1
/// ...
/// ```
///
/// Each bar line is `dim birth death representative`.
pub fn write_barcode(barcode: &Barcode) -> String {
    let mut out = String::from("relhom-barcode 1\n");
    let _ = writeln!(out, "field {}", barcode.modulus);
    let _ = writeln!(out, "pipeline {}", barcode.pipeline);
    let _ = writeln!(out, "cells {}", barcode.cell_count);
    let _ = writeln!(out, "bars {}", barcode.bars.len());
    for b in &barcode.bars {
        let _ = writeln!(out, "{} {} {} {}", b.dim, b.birth, b.death, b.representative);
    }
    out
}

pub fn parse_barcode(text: &str) -> Result<Barcode, ParseError> {
    let mut lines = content_lines(text);
    let mut header = |key: &str| -> Result<(usize, String), ParseError> {
        let (n, l) = lines.next().ok_or_else(|| err(0, format!("missing `{key}` line")))?;
        let rest = l
            .strip_prefix(key)
            .ok_or_else(|| err(n, format!("expected `{key}`")))?;
        Ok((n, rest.trim().to_string()))
    };
    let (n, version) = header("relhom-barcode")?;
    if version != "1" {
        return Err(err(n, format!("unsupported version {version}")));
    }
    let (n, field) = header("field")?;
    let modulus: u32 = field.parse().map_err(|_| err(n, "invalid field"))?;
    let (n, pipeline) = header("pipeline")?;
    let pipeline = match pipeline.as_str() {
        "general" => Pipeline::General,
        "lag" => Pipeline::Lag,
        other => return Err(err(n, format!("unknown pipeline `{other}`"))),
    };
    let (n, cells) = header("cells")?;
    let cell_count: usize = cells.parse().map_err(|_| err(n, "invalid cell count"))?;
    let (n, count) = header("bars")?;
    let count: usize = count.parse().map_err(|_| err(n, "invalid bar count"))?;
    let mut bars = Vec::with_capacity(count);
    for (n, line) in lines {
        let tok: Vec<&str> = line.split_whitespace().collect();
        if tok.len() != 4 {
            return Err(err(n, "expected `dim birth death representative`"));
        }
        let dim: usize = tok[0].parse().map_err(|_| err(n, "invalid dimension"))?;
        let birth = parse_f64(n, tok[1], "birth")?;
        let death = parse_f64(n, tok[2], "death")?;
        let terms = tok[3]
            .split(',')
            .map(|t| {
                let (c, v) = t.split_once(':').ok_or_else(|| err(n, "invalid representative term"))?;
                Ok((
                    c.parse().map_err(|_| err(n, "invalid cell id"))?,
                    v.parse().map_err(|_| err(n, "invalid coefficient"))?,
                ))
            })
            .collect::<Result<Vec<(usize, u32)>, ParseError>>()?;
        bars.push(Bar {
            dim,
            birth,
            death,
            representative: Chain::new(terms),
        });
    }
    if bars.len() != count {
        return Err(err(0, format!("header announces {count} bars, found {}", bars.len())));
    }
    Ok(Barcode::new(bars, modulus, pipeline, cell_count))
}
