//! The `.poly` dialect read and written here:
//!
//! ```text
//! # comments run to the end of the line; blank lines are ignored
//! <vertex count> 2 0 0
//! <i> <x> <y>            one line per vertex, i = 1, 2, ...
//! <segment count> 0
//! <j> <a> <b>            one line per segment, endpoints are vertex indices
//! 0                      hole count (optional, must be zero)
//! ```
//!
//! Attributes, boundary markers and holes are not supported.

use std::fs;
use std::path::Path;

use super::{num, IoError};
use crate::cdt::Pslg;
use crate::geom::Point2;

pub fn read_poly(path: &Path) -> Result<Pslg, IoError> {
    let text = fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    parse_poly(&text)
}

pub fn write_poly(pslg: &Pslg, path: &Path) -> Result<(), IoError> {
    fs::write(path, to_poly_string(pslg)).map_err(|e| IoError::io(path, e))
}

pub fn to_poly_string(pslg: &Pslg) -> String {
    let mut out = format!("{} 2 0 0\n", pslg.vertices.len());
    for (i, p) in pslg.vertices.iter().enumerate() {
        out += &format!("{} {} {}\n", i + 1, num(p.x), num(p.y));
    }
    out += &format!("{} 0\n", pslg.segments.len());
    for (j, [a, b]) in pslg.segments.iter().enumerate() {
        out += &format!("{} {} {}\n", j + 1, a + 1, b + 1);
    }
    out += "0\n";
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    /// Next non-empty line with comments stripped, as (line number, fields).
    fn next_record(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (i, raw) in self.inner.by_ref() {
            self.last = i + 1;
            let body = raw.split('#').next().unwrap_or("");
            let fields: Vec<&str> = body.split_whitespace().collect();
            if !fields.is_empty() {
                return Some((i + 1, fields));
            }
        }
        None
    }

    fn expect_record(&mut self, what: &str) -> Result<(usize, Vec<&'a str>), IoError> {
        self.next_record()
            .ok_or_else(|| IoError::parse(self.last + 1, format!("unexpected end of file, expected {what}")))
    }
}

fn field<T: std::str::FromStr>(line: usize, fields: &[&str], i: usize, what: &str) -> Result<T, IoError> {
    let s = fields.get(i).ok_or_else(|| IoError::parse(line, format!("missing {what}")))?;
    s.parse().map_err(|_| IoError::parse(line, format!("cannot parse {what} from {s:?}")))
}

fn expect_zero(line: usize, fields: &[&str], i: usize, what: &str) -> Result<(), IoError> {
    if fields.len() > i && field::<usize>(line, fields, i, what)? != 0 {
        return Err(IoError::parse(line, format!("{what} are not supported")));
    }
    Ok(())
}

pub fn parse_poly(text: &str) -> Result<Pslg, IoError> {
    let mut lines = Lines { inner: text.lines().enumerate(), last: 0 };

    let (line, header) = lines.expect_record("vertex header")?;
    let nv: usize = field(line, &header, 0, "vertex count")?;
    if nv == 0 {
        return Err(IoError::parse(line, "empty vertex section"));
    }
    if header.len() > 1 && field::<usize>(line, &header, 1, "dimension")? != 2 {
        return Err(IoError::parse(line, "only two-dimensional files are supported"));
    }
    expect_zero(line, &header, 2, "vertex attributes")?;
    expect_zero(line, &header, 3, "boundary markers")?;

    let mut vertices = Vec::with_capacity(nv);
    for k in 1..=nv {
        let (line, f) = lines.expect_record("vertex record")?;
        let index: usize = field(line, &f, 0, "vertex index")?;
        if index != k {
            return Err(IoError::parse(line, format!("vertex index {index}, expected {k}")));
        }
        let x: f64 = field(line, &f, 1, "x")?;
        let y: f64 = field(line, &f, 2, "y")?;
        let p = Point2::try_new(x, y).map_err(|e| IoError::parse(line, e.to_string()))?;
        vertices.push(p);
    }

    let (line, header) = lines.expect_record("segment header")?;
    let ns: usize = field(line, &header, 0, "segment count")?;
    expect_zero(line, &header, 1, "boundary markers")?;
    let mut segments = Vec::with_capacity(ns);
    for k in 1..=ns {
        let (line, f) = lines.expect_record("segment record")?;
        let index: usize = field(line, &f, 0, "segment index")?;
        if index != k {
            return Err(IoError::parse(line, format!("segment index {index}, expected {k}")));
        }
        let mut ends = [0usize; 2];
        for (e, slot) in ends.iter_mut().enumerate() {
            let v: usize = field(line, &f, 1 + e, "segment endpoint")?;
            if v == 0 || v > nv {
                return Err(IoError::parse(line, format!("segment {k} references vertex {v} of {nv}")));
            }
            *slot = v - 1;
        }
        segments.push(ends);
    }

    if let Some((line, f)) = lines.next_record() {
        if field::<usize>(line, &f, 0, "hole count")? != 0 {
            return Err(IoError::parse(line, "holes are not supported"));
        }
        if let Some((line, _)) = lines.next_record() {
            return Err(IoError::parse(line, "trailing content after hole count"));
        }
    }

    Ok(Pslg::new(vertices, segments)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let pslg = Pslg::new(
            vec![Point2::new(0.1, -1.0 / 3.0), Point2::new(1e-300, 2.5), Point2::new(7.0, 0.0)],
            vec![[0, 1], [1, 2]],
        )
        .unwrap();
        assert_eq!(parse_poly(&to_poly_string(&pslg)).unwrap(), pslg);
    }

    #[test]
    fn dangling_segment_names_its_line() {
        let text = "# triangle\n3 2 0 0\n1 0 0\n2 1 0\n3 0 1\n1 0\n1 1 99\n";
        let err = parse_poly(text).unwrap_err().to_string();
        assert!(err.starts_with("line 7:"), "{err}");
        assert!(err.contains("99"), "{err}");
    }

    #[test]
    fn empty_vertex_section_is_rejected() {
        assert!(matches!(parse_poly("0 2 0 0\n0 0\n"), Err(IoError::Parse { line: 1, .. })));
    }

    #[test]
    fn truncated_file_and_bad_numbers() {
        assert!(matches!(parse_poly("3 2 0 0\n1 0 0\n"), Err(IoError::Parse { line: 3, .. })));
        assert!(matches!(parse_poly("1 2 0 0\n1 zero 0\n"), Err(IoError::Parse { line: 2, .. })));
        assert!(matches!(parse_poly("1 2 1 0\n"), Err(IoError::Parse { line: 1, .. })));
    }
}
