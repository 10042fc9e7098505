//! JSON-lines traces. Each line is one event:
//!
//! ```text
//! {"seq":0,"kind":"insert_circumcenter","point":[x,y],"triangle":[[x,y],[x,y],[x,y]]}
//! {"seq":1,"kind":"split_subsegment","point":[x,y],"segment":[[x,y],[x,y]]}
//! ```
//!
//! Numbers carry 17 significant digits, so doubles survive the round trip.

use std::fs;
use std::path::Path;

use serde::Deserialize;

use super::{num, IoError};
use crate::geom::Point2;
use crate::refine::{EventKind, RefinementTrace, TraceEvent};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Line {
    seq: usize,
    kind: EventKind,
    point: [f64; 2],
    triangle: Option<[[f64; 2]; 3]>,
    segment: Option<[[f64; 2]; 2]>,
}

fn pt(p: Point2) -> String {
    format!("[{},{}]", num(p.x), num(p.y))
}

fn pts(ps: &[Point2]) -> String {
    let inner: Vec<String> = ps.iter().map(|&p| pt(p)).collect();
    format!("[{}]", inner.join(","))
}

fn kind_name(kind: EventKind) -> &'static str {
    match kind {
        EventKind::InsertCircumcenter => "insert_circumcenter",
        EventKind::RejectCircumcenter => "reject_circumcenter",
        EventKind::SplitSubsegment => "split_subsegment",
    }
}

pub fn to_trace_string(trace: &[TraceEvent]) -> String {
    let mut out = String::new();
    for (seq, e) in trace.iter().enumerate() {
        out += &format!("{{\"seq\":{seq},\"kind\":\"{}\",\"point\":{}", kind_name(e.kind), pt(e.point));
        if let Some(t) = &e.triangle {
            out += &format!(",\"triangle\":{}", pts(t));
        }
        if let Some(s) = &e.segment {
            out += &format!(",\"segment\":{}", pts(s));
        }
        out += "}\n";
    }
    out
}

pub fn write_trace(trace: &[TraceEvent], path: &Path) -> Result<(), IoError> {
    fs::write(path, to_trace_string(trace)).map_err(|e| IoError::io(path, e))
}

pub fn read_trace(path: &Path) -> Result<RefinementTrace, IoError> {
    let text = fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    parse_trace(&text)
}

fn point(line: usize, [x, y]: [f64; 2]) -> Result<Point2, IoError> {
    Point2::try_new(x, y).map_err(|e| IoError::parse(line, e.to_string()))
}

pub fn parse_trace(text: &str) -> Result<RefinementTrace, IoError> {
    let mut trace = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let rec: Line = serde_json::from_str(raw).map_err(|e| IoError::parse(line, e.to_string()))?;
        if rec.seq != trace.len() {
            return Err(IoError::parse(line, format!("seq {} out of order, expected {}", rec.seq, trace.len())));
        }
        let triangle = match rec.triangle {
            Some(t) => Some([point(line, t[0])?, point(line, t[1])?, point(line, t[2])?]),
            None => None,
        };
        let segment = match rec.segment {
            Some(s) => Some([point(line, s[0])?, point(line, s[1])?]),
            None => None,
        };
        trace.push(TraceEvent { kind: rec.kind, triangle, point: point(line, rec.point)?, segment });
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RefinementTrace {
        let p = |x, y| Point2::new(x, y);
        vec![
            TraceEvent {
                kind: EventKind::InsertCircumcenter,
                triangle: Some([p(1.0, 0.0), p(0.0, 0.0), p(1.0, -1.796_321_903_259_857_2)]),
                point: p(0.5, -0.898_160_951_629_928_6),
                segment: None,
            },
            TraceEvent {
                kind: EventKind::RejectCircumcenter,
                triangle: Some([p(0.0, 0.0), p(-1.0 / 3.0, 0.1), p(0.5, -0.9)]),
                point: p(-0.556_693_095_032_778_9, -0.898_160_951_629_928_7),
                segment: Some([p(0.0, 0.0), p(-1.0 / 3.0, 0.1)]),
            },
            TraceEvent {
                kind: EventKind::SplitSubsegment,
                triangle: None,
                point: p(-1.0 / 6.0, 0.05),
                segment: Some([p(0.0, 0.0), p(-1.0 / 3.0, 0.1)]),
            },
        ]
    }

    #[test]
    fn round_trip_is_exact() {
        let t = sample();
        assert_eq!(parse_trace(&to_trace_string(&t)).unwrap(), t);
    }

    #[test]
    fn truncated_last_line_is_an_error() {
        let text = to_trace_string(&sample());
        let cut = &text[..text.len() - 10];
        assert!(matches!(parse_trace(cut), Err(IoError::Parse { line: 3, .. })));
    }

    #[test]
    fn empty_file_is_an_empty_trace() {
        assert!(parse_trace("").unwrap().is_empty());
    }

    #[test]
    fn sequence_numbers_must_count_up() {
        let text = to_trace_string(&sample()).replace("\"seq\":1", "\"seq\":5");
        assert!(matches!(parse_trace(&text), Err(IoError::Parse { line: 2, .. })));
    }
}
