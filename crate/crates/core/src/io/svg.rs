//! Standalone SVG snapshots in the style of the classic refinement figures:
//! input vertices black, inserted circumcenters dark blue, rejected
//! circumcenters light blue, midpoints red, with skinny triangles and
//! diametral circles as optional overlays.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::IoError;
use crate::cdt::Triangulation;
use crate::geom::{self, Point2};
use crate::refine::{EventKind, TraceEvent};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointRole {
    Input,
    InsertedCircumcenter,
    RejectedCircumcenter,
    Midpoint,
}

impl PointRole {
    fn class(self) -> &'static str {
        match self {
            PointRole::Input => "input",
            PointRole::InsertedCircumcenter => "inserted",
            PointRole::RejectedCircumcenter => "rejected",
            PointRole::Midpoint => "midpoint",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Overlay {
    Point(Point2, PointRole),
    /// Diametral circle of a subsegment.
    DiametralCircle([Point2; 2]),
    Circumcircle([Point2; 3]),
    SkinnyTriangle([Point2; 3]),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvgStyle {
    pub width_px: f64,
    pub triangle_fill: String,
    pub edge: String,
    pub subsegment: String,
    pub skinny_fill: String,
    pub circle: String,
    pub input: String,
    pub inserted: String,
    pub rejected: String,
    pub midpoint: String,
}

impl Default for SvgStyle {
    fn default() -> Self {
        SvgStyle {
            width_px: 800.0,
            triangle_fill: "#ffffff".into(),
            edge: "#9a9a9a".into(),
            subsegment: "#000000".into(),
            skinny_fill: "#f2d98c".into(),
            circle: "#4c9a4c".into(),
            input: "#000000".into(),
            inserted: "#1f3b8c".into(),
            rejected: "#8fb8e8".into(),
            midpoint: "#d02020".into(),
        }
    }
}

/// Overlays describing every event of `trace`.
pub fn overlays_from_trace(trace: &[TraceEvent]) -> Vec<Overlay> {
    let mut out = Vec::new();
    for e in trace {
        match e.kind {
            EventKind::InsertCircumcenter => {
                if let Some(t) = e.triangle {
                    out.push(Overlay::SkinnyTriangle(t));
                }
                out.push(Overlay::Point(e.point, PointRole::InsertedCircumcenter));
            }
            EventKind::RejectCircumcenter => {
                if let Some(t) = e.triangle {
                    out.push(Overlay::SkinnyTriangle(t));
                }
                if let Some(s) = e.segment {
                    out.push(Overlay::DiametralCircle(s));
                }
                out.push(Overlay::Point(e.point, PointRole::RejectedCircumcenter));
            }
            EventKind::SplitSubsegment => out.push(Overlay::Point(e.point, PointRole::Midpoint)),
        }
    }
    out
}

fn circle_of(o: &Overlay) -> Option<(Point2, f64)> {
    match *o {
        Overlay::DiametralCircle([a, b]) => Some((a.midpoint(b), 0.5 * a.dist(b))),
        Overlay::Circumcircle([a, b, c]) => {
            let cc = geom::circumcenter(a, b, c).ok()?;
            Some((cc, cc.dist(a)))
        }
        _ => None,
    }
}

fn polygon(out: &mut String, pts: &[Point2], class: &str, fill: &str) {
    let coords: Vec<String> = pts.iter().map(|p| format!("{},{}", p.x, p.y)).collect();
    let _ =
        writeln!(out, r#"<polygon class="{class}" points="{}" fill="{fill}" fill-opacity="0.6"/>"#, coords.join(" "));
}

/// Renders `mesh` with `overlays` drawn on top.
pub fn svg_string(mesh: &Triangulation, overlays: &[Overlay], style: &SvgStyle) -> String {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    let mut grow = |p: Point2, r: f64| {
        lo = [lo[0].min(p.x - r), lo[1].min(p.y - r)];
        hi = [hi[0].max(p.x + r), hi[1].max(p.y + r)];
    };
    for &p in mesh.points() {
        grow(p, 0.0);
    }
    for o in overlays {
        if let Some((c, r)) = circle_of(o) {
            grow(c, r);
        }
    }
    let (lo, hi) = (Point2::new(lo[0], lo[1]), Point2::new(hi[0], hi[1]));
    let size = (hi - lo).norm().max(f64::MIN_POSITIVE);
    let pad = 0.03 * size;
    let (w, h) = (hi.x - lo.x + 2.0 * pad, hi.y - lo.y + 2.0 * pad);
    let dot = 0.006 * size;
    let px = w / style.width_px;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="{} {} {w} {h}">"#,
        style.width_px,
        (style.width_px * h / w).ceil(),
        lo.x - pad,
        -hi.y - pad,
    );
    let _ = writeln!(out, r#"<g transform="scale(1,-1)" stroke-linejoin="round" stroke-width="{px}">"#);

    let _ = writeln!(out, r#"<g class="triangles" stroke="{}">"#, style.edge);
    for (id, _) in mesh.triangles() {
        let t = mesh.triangle_points(id).expect("live triangle");
        let coords: Vec<String> = t.iter().map(|p| format!("{},{}", p.x, p.y)).collect();
        let _ = writeln!(out, r#"<polygon points="{}" fill="{}"/>"#, coords.join(" "), style.triangle_fill);
    }
    let _ = writeln!(out, "</g>");

    let _ = writeln!(out, r#"<g class="overlays" fill="none" stroke="{}">"#, style.circle);
    for o in overlays {
        match o {
            Overlay::SkinnyTriangle(t) => polygon(&mut out, t, "skinny", &style.skinny_fill),
            _ => {
                if let Some((c, r)) = circle_of(o) {
                    let _ = writeln!(out, r#"<circle class="circle" cx="{}" cy="{}" r="{r}"/>"#, c.x, c.y);
                }
            }
        }
    }
    let _ = writeln!(out, "</g>");

    let _ = writeln!(out, r#"<g class="subsegments" stroke="{}" stroke-width="{}">"#, style.subsegment, 2.5 * px);
    for (_, s) in mesh.subsegments() {
        let (a, b) = (mesh.point(s.a), mesh.point(s.b));
        let _ = writeln!(out, r#"<line x1="{}" y1="{}" x2="{}" y2="{}"/>"#, a.x, a.y, b.x, b.y);
    }
    let _ = writeln!(out, "</g>");

    let color = |role: PointRole| match role {
        PointRole::Input => &style.input,
        PointRole::InsertedCircumcenter => &style.inserted,
        PointRole::RejectedCircumcenter => &style.rejected,
        PointRole::Midpoint => &style.midpoint,
    };
    let _ = writeln!(out, r#"<g class="points" stroke="none">"#);
    let inputs = mesh.input().vertices.iter().map(|&p| (p, PointRole::Input));
    let marked = overlays.iter().filter_map(|o| match *o {
        Overlay::Point(p, role) => Some((p, role)),
        _ => None,
    });
    for (p, role) in inputs.chain(marked) {
        let _ = writeln!(
            out,
            r#"<circle class="{}" cx="{}" cy="{}" r="{dot}" fill="{}"/>"#,
            role.class(),
            p.x,
            p.y,
            color(role)
        );
    }
    let _ = writeln!(out, "</g>\n</g>\n</svg>");
    out
}

/// Writes [`svg_string`] with the default style to `path`.
pub fn render_svg(mesh: &Triangulation, overlays: &[Overlay], path: &Path) -> Result<(), IoError> {
    fs::write(path, svg_string(mesh, overlays, &SvgStyle::default())).map_err(|e| IoError::io(path, e))
}
