//! Plain-text family documents.
//!
//! A document holds a point list with exact fractional coordinates, polygon
//! index lists, and a sorted metadata map. The serializer is canonical:
//! reduced fractions, single spaces, metadata sorted by key, every line
//! newline-terminated. The parser is strict and reports the offending line
//! number for every malformed input.
//!
//! Layout, in order:
//!
//! ```text
//! polyfam-family v1
//! meta <key> <value>        (zero or more, sorted by key when written)
//! points <n>
//! <x> <y> <z>               (n lines, coordinates as `p` or `p/q`)
//! polygons <m>
//! <i0> <i1> ... <ik>        (m lines, point indices, at least three each)
//! ```

use crate::kernel::Point3;
use crate::model::{Family, ModelError, PointSet};
use crate::scalar::parse_scalar;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

/// The only format version this build reads and writes.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum DocError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid document: {0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

fn parse_err(line: usize, msg: impl Into<String>) -> DocError {
    DocError::Parse {
        line,
        msg: msg.into(),
    }
}

/// In-memory form of a family document. Coordinates are exact scalars; the
/// string fraction syntax exists only at the text boundary.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FamilyDocument {
    pub format_version: u32,
    pub metadata: BTreeMap<String, String>,
    pub points: Vec<Point3>,
    pub polygons: Vec<Vec<usize>>,
}

impl FamilyDocument {
    /// Captures a validated family. Polygon index lists come out in their
    /// canonical rotation, so serializing the result is canonical too.
    pub fn from_family(family: &Family) -> FamilyDocument {
        FamilyDocument {
            format_version: FORMAT_VERSION,
            metadata: family.metadata().clone(),
            points: family.point_set().points().to_vec(),
            polygons: family
                .polygons()
                .iter()
                .map(|p| p.vertices().to_vec())
                .collect(),
        }
    }

    /// Validates the document into a family: distinct points, convex planar
    /// polygons, no duplicates.
    pub fn to_family(&self) -> Result<Family, DocError> {
        let ps = PointSet::new(self.points.clone())?;
        let mut family = Family::new(ps, &self.polygons)?;
        for (k, v) in &self.metadata {
            family.set_metadata(k, v);
        }
        Ok(family)
    }

    fn check_writable(&self) -> Result<(), DocError> {
        if self.format_version != FORMAT_VERSION {
            return Err(DocError::Invalid(format!(
                "cannot write format version {} (this build writes version {})",
                self.format_version, FORMAT_VERSION
            )));
        }
        for (k, v) in &self.metadata {
            if k.is_empty() || k.chars().any(char::is_whitespace) {
                return Err(DocError::Invalid(format!(
                    "metadata key {k:?} must be nonempty and free of whitespace"
                )));
            }
            if v.is_empty() || v.contains('\n') || v != v.trim() {
                return Err(DocError::Invalid(format!(
                    "metadata value {v:?} for key {k:?} must be nonempty, single-line, \
                     and free of leading or trailing whitespace"
                )));
            }
        }
        Ok(())
    }

    /// Canonical text form. Byte-stable: serializing, parsing, and
    /// serializing again reproduces the same bytes.
    pub fn serialize(&self) -> Result<String, DocError> {
        self.check_writable()?;
        let mut out = String::new();
        let _ = writeln!(out, "polyfam-family v{}", self.format_version);
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "meta {k} {v}");
        }
        let _ = writeln!(out, "points {}", self.points.len());
        for p in &self.points {
            let _ = writeln!(out, "{} {} {}", p.x, p.y, p.z);
        }
        let _ = writeln!(out, "polygons {}", self.polygons.len());
        for poly in &self.polygons {
            let line: Vec<String> = poly.iter().map(|i| i.to_string()).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        Ok(out)
    }

    /// Strict parse with line-numbered errors. Accepts any run of blanks
    /// between tokens; canonical spacing is restored on write.
    pub fn parse(text: &str) -> Result<FamilyDocument, DocError> {
        // Where a missing line would have started, for end-of-input errors.
        let eof_line = text.lines().count() + 1;
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

        let (lineno, header) = lines
            .next()
            .ok_or_else(|| parse_err(1, "empty document; expected `polyfam-family v1` header"))?;
        let version = match header.split_once(' ') {
            Some(("polyfam-family", v)) => v
                .strip_prefix('v')
                .and_then(|n| n.parse::<u32>().ok())
                .ok_or_else(|| {
                    parse_err(lineno, format!("malformed version token {v:?}; expected `v1`"))
                })?,
            _ => {
                return Err(parse_err(
                    lineno,
                    format!("bad header {header:?}; expected `polyfam-family v1`"),
                ))
            }
        };
        if version != FORMAT_VERSION {
            return Err(parse_err(
                lineno,
                format!("unsupported format version {version} (this build reads version {FORMAT_VERSION})"),
            ));
        }

        // Metadata block: zero or more `meta <key> <value>` lines.
        let mut metadata = BTreeMap::new();
        let mut pending: Option<(usize, &str)> = None;
        for (lineno, line) in lines.by_ref() {
            if let Some(rest) = line.strip_prefix("meta ") {
                let (key, value) = rest.split_once(' ').ok_or_else(|| {
                    parse_err(lineno, format!("metadata line {line:?} needs a key and a value"))
                })?;
                if key.is_empty() || value.trim().is_empty() {
                    return Err(parse_err(
                        lineno,
                        format!("metadata line {line:?} needs a nonempty key and value"),
                    ));
                }
                if value != value.trim() {
                    return Err(parse_err(
                        lineno,
                        format!("metadata value {value:?} has leading or trailing whitespace"),
                    ));
                }
                if metadata.insert(key.to_string(), value.to_string()).is_some() {
                    return Err(parse_err(lineno, format!("duplicate metadata key {key:?}")));
                }
            } else {
                pending = Some((lineno, line));
                break;
            }
        }

        // Points block.
        let (lineno, line) = pending
            .take()
            .ok_or_else(|| parse_err(eof_line, "unexpected end of document; expected `points <n>`"))?;
        let n_points = parse_count(lineno, line, "points")?;
        let mut points = Vec::with_capacity(n_points);
        for _ in 0..n_points {
            let (lineno, line) = lines.next().ok_or_else(|| {
                parse_err(eof_line, format!("unexpected end of document; expected {n_points} point lines"))
            })?;
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() != 3 {
                return Err(parse_err(
                    lineno,
                    format!("expected three coordinates, found {} in {line:?}", tokens.len()),
                ));
            }
            let mut coords = Vec::with_capacity(3);
            for t in &tokens {
                coords.push(parse_scalar(t).map_err(|e| {
                    parse_err(lineno, format!("bad coordinate {t:?}: {e}"))
                })?);
            }
            let z = coords.pop().expect("three coords");
            let y = coords.pop().expect("three coords");
            let x = coords.pop().expect("three coords");
            points.push(Point3::new(x, y, z));
        }

        // Polygons block.
        let (lineno, line) = lines
            .next()
            .ok_or_else(|| parse_err(eof_line, "unexpected end of document; expected `polygons <m>`"))?;
        let n_polys = parse_count(lineno, line, "polygons")?;
        let mut polygons = Vec::with_capacity(n_polys);
        for _ in 0..n_polys {
            let (lineno, line) = lines.next().ok_or_else(|| {
                parse_err(eof_line, format!("unexpected end of document; expected {n_polys} polygon lines"))
            })?;
            let mut indices = Vec::new();
            for t in line.split_whitespace() {
                let idx: usize = t
                    .parse()
                    .map_err(|_| parse_err(lineno, format!("bad point index {t:?}")))?;
                if idx >= points.len() {
                    return Err(parse_err(
                        lineno,
                        format!("point index {idx} out of range for {} points", points.len()),
                    ));
                }
                indices.push(idx);
            }
            if indices.len() < 3 {
                return Err(parse_err(
                    lineno,
                    format!("a polygon needs at least three point indices, found {}", indices.len()),
                ));
            }
            polygons.push(indices);
        }

        if let Some((lineno, line)) = lines.next() {
            return Err(parse_err(
                lineno,
                format!("unexpected trailing content {line:?}"),
            ));
        }

        Ok(FamilyDocument {
            format_version: version,
            metadata,
            points,
            polygons,
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), DocError> {
        let text = self.serialize()?;
        std::fs::write(path, text).map_err(|source| DocError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<FamilyDocument, DocError> {
        let text = std::fs::read_to_string(path).map_err(|source| DocError::Io {
            path: path.display().to_string(),
            source,
        })?;
        FamilyDocument::parse(&text)
    }
}

fn parse_count(lineno: usize, line: &str, keyword: &str) -> Result<usize, DocError> {
    let mut tokens = line.split_whitespace();
    match (tokens.next(), tokens.next(), tokens.next()) {
        (Some(k), Some(n), None) if k == keyword => n
            .parse()
            .map_err(|_| parse_err(lineno, format!("bad {keyword} count {n:?}"))),
        _ => Err(parse_err(
            lineno,
            format!("expected `{keyword} <count>`, found {line:?}"),
        )),
    }
}

/// Writes a family as a canonical document.
pub fn save_family(family: &Family, path: &Path) -> Result<(), DocError> {
    FamilyDocument::from_family(family).save(path)
}

/// Reads and validates a family document.
pub fn load_family(path: &Path) -> Result<Family, DocError> {
    FamilyDocument::load(path)?.to_family()
}

/// Full canonicalization of document text: parse, validate the geometry,
/// and re-serialize. Fractions come out reduced, metadata sorted, polygon
/// index lists in canonical rotation, spacing normalized. Idempotent.
pub fn canonical_text(text: &str) -> Result<String, DocError> {
    let family = FamilyDocument::parse(text)?.to_family()?;
    FamilyDocument::from_family(&family).serialize()
}
