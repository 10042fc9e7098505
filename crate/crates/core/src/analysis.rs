//! Trace analysis: self-similar cycle detection, matching against the
//! designed per-cycle event pattern, and the floating-point replay horizon.
//!
//! Cycle structure is read from the vertex-adding events only (circumcenter
//! insertions and midpoint splits); rejections annotate the splits that
//! follow them. One cycle of either construction therefore has period 4.
//!
//! The designed cycle lives at the hub vertex. Far from it, the refinement
//! keeps grading the mesh toward the shrinking hub configuration, and under
//! worst-angle-first ordering those insertions interleave with the cycle.
//! Matching and similarity detection therefore look at the events that touch
//! a hub: a circumcenter event whose triangle has a corner there, or a split
//! of a subsegment ending there.
//!
//! A detected cycle is evidence *consistent with* non-termination, never a
//! proof: it says that the last few cycles reproduced one another at a fixed
//! scale about a fixed center within tolerance.

use std::fmt;

use serde::Serialize;

use crate::construction::{ConstructionResult, Example};
use crate::geom::Point2;
use crate::refine::{EventKind, TraceEvent};

pub const DEFAULT_SIMILARITY_TOL: f64 = 1e-9;

/// Relative per-cycle deviation beyond which a replayed cycle is no longer
/// considered clean.
pub const HORIZON_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleReport {
    /// Vertex-adding events per cycle.
    pub period: usize,
    pub scale_factor: f64,
    pub center: Point2,
    pub cycles_observed: usize,
    /// Largest relative deviation from the fitted similarity.
    pub max_deviation: f64,
    /// Index (among the vertex-adding events considered) where the first
    /// cycle starts.
    pub offset: usize,
    /// Hub the events were restricted to, if the whole trace did not repeat.
    pub hub: Option<Point2>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityParams {
    pub tol: f64,
    pub min_cycles: usize,
    pub max_period: usize,
    /// Cycles after which the tolerance doubles per cycle.
    pub relax_after: usize,
}

impl Default for SimilarityParams {
    fn default() -> Self {
        SimilarityParams { tol: DEFAULT_SIMILARITY_TOL, min_cycles: 3, max_period: 32, relax_after: 15 }
    }
}

fn insertions<'a>(events: impl IntoIterator<Item = &'a TraceEvent>) -> Vec<(EventKind, Point2)> {
    events.into_iter().filter(|e| e.kind.inserts()).map(|e| (e.kind, e.point)).collect()
}

/// Whether `e` touches `hub`.
pub fn touches(e: &TraceEvent, hub: Point2) -> bool {
    e.triangle.is_some_and(|t| t.contains(&hub)) || e.segment.is_some_and(|s| s.contains(&hub))
}

/// Events touching `hub`, with their indices in `trace`.
pub fn hub_events(trace: &[TraceEvent], hub: Point2) -> Vec<(usize, &TraceEvent)> {
    trace.iter().enumerate().filter(|(_, e)| touches(e, hub)).collect()
}

/// Subsegment endpoints shared by the most splits, most frequent first.
fn hub_candidates(trace: &[TraceEvent], limit: usize) -> Vec<Point2> {
    let mut counts: Vec<(Point2, usize)> = Vec::new();
    for e in trace.iter().filter(|e| e.kind == EventKind::SplitSubsegment) {
        for q in e.segment.into_iter().flatten() {
            match counts.iter_mut().find(|(p, _)| *p == q) {
                Some((_, n)) => *n += 1,
                None => counts.push((q, 1)),
            }
        }
    }
    counts.retain(|&(_, n)| n >= 3);
    counts.sort_by_key(|&(_, n)| std::cmp::Reverse(n));
    counts.into_iter().take(limit).map(|(p, _)| p).collect()
}

type View = (Option<Point2>, Vec<(EventKind, Point2)>);

/// The whole trace first, then its restriction to each likely hub.
fn candidate_views(trace: &[TraceEvent]) -> Vec<View> {
    let mut views = vec![(None, insertions(trace))];
    for hub in hub_candidates(trace, 3) {
        views.push((Some(hub), insertions(trace.iter().filter(|e| touches(e, hub)))));
    }
    views
}

struct Fit {
    scale: f64,
    center: Point2,
}

/// Similarity `x -> center + scale (x - center)` mapping block `offset` onto
/// block `offset + period`, estimated from the first two pairs.
fn fit(pts: &[(EventKind, Point2)], period: usize, offset: usize) -> Option<Fit> {
    let (a, b, c) = (pts[offset].1, pts[offset + period].1, pts[offset + 2 * period].1);
    let d1 = b - a;
    let d2 = c - b;
    let n1 = d1.dot(d1);
    if n1 == 0.0 {
        return None;
    }
    let scale = d2.dot(d1) / n1;
    if !(scale > 0.0 && scale < 1.0 - 1e-6) {
        return None;
    }
    let center = (1.0 / (1.0 - scale)) * (b - scale * a);
    Some(Fit { scale, center })
}

fn deviation(fit: &Fit, from: Point2, to: Point2) -> f64 {
    let predicted = fit.center + fit.scale * (from - fit.center);
    let size = fit.scale * from.dist(fit.center);
    to.dist(predicted) / size.max(f64::MIN_POSITIVE)
}

fn kinds_periodic(pts: &[(EventKind, Point2)], period: usize, offset: usize) -> bool {
    (offset..pts.len() - period).all(|i| pts[i].0 == pts[i + period].0)
}

/// Smallest period and offset for which the vertex-adding events repeat at a
/// single contraction about a single center, with at least three cycles.
pub fn detect_self_similarity(trace: &[TraceEvent], tol: f64) -> Option<CycleReport> {
    detect_self_similarity_with(trace, &SimilarityParams { tol, ..Default::default() })
}

pub fn detect_self_similarity_with(trace: &[TraceEvent], params: &SimilarityParams) -> Option<CycleReport> {
    candidate_views(trace)
        .into_iter()
        .filter_map(|(hub, pts)| detect_in(&pts, params).map(|r| CycleReport { hub, ..r }))
        .min_by_key(|r| r.period)
}

fn detect_in(pts: &[(EventKind, Point2)], params: &SimilarityParams) -> Option<CycleReport> {
    let n = pts.len();
    let min_cycles = params.min_cycles.max(3);
    for period in 1..=params.max_period.min(n / min_cycles) {
        for offset in 0..=(n - min_cycles * period) {
            if !kinds_periodic(pts, period, offset) {
                continue;
            }
            let Some(fit) = fit(pts, period, offset) else { continue };
            let mut max_deviation: f64 = 0.0;
            let ok = (offset..n - period).all(|i| {
                let cycle = (i - offset) / period;
                let tol = if cycle >= params.relax_after {
                    params.tol * 2f64.powi((cycle + 1 - params.relax_after) as i32)
                } else {
                    params.tol
                };
                let d = deviation(&fit, pts[i].1, pts[i + period].1);
                max_deviation = max_deviation.max(d);
                d <= tol
            });
            if ok {
                return Some(CycleReport {
                    period,
                    scale_factor: fit.scale,
                    center: fit.center,
                    cycles_observed: (n - offset) / period,
                    max_deviation,
                    offset,
                    hub: None,
                });
            }
        }
    }
    None
}

/// Number of leading cycles that replay cleanly: cycle `k` is clean when
/// every event deviates from the similarity image of its counterpart in cycle
/// `k - 1` by at most [`HORIZON_TOL`]. The first cycle is the reference and
/// counts when the second one is clean. Zero for traces without a repeating
/// structure.
pub fn precision_horizon(trace: &[TraceEvent]) -> usize {
    candidate_views(trace).iter().map(|(_, pts)| horizon_in(pts)).max().unwrap_or(0)
}

fn horizon_in(pts: &[(EventKind, Point2)]) -> usize {
    let n = pts.len();
    for period in 1..=(n / 3) {
        for offset in 0..=(n - 3 * period) {
            if !kinds_periodic(pts, period, offset) {
                continue;
            }
            let Some(fit) = fit(pts, period, offset) else { continue };
            let cycles = (n - offset) / period;
            let clean_pairs = (1..cycles)
                .take_while(|&k| {
                    let start = offset + k * period;
                    (start..start + period).all(|i| deviation(&fit, pts[i - period].1, pts[i].1) <= HORIZON_TOL)
                })
                .count();
            if clean_pairs >= 2 {
                return clean_pairs + 1;
            }
        }
    }
    0
}

/// Rays from the hub `v0` that each designed event must lie on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Ray {
    V0V1,
    V0V2,
    V0V3,
    V0V4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExpectedEvent {
    pub kind: EventKind,
    pub ray: Ray,
}

impl fmt::Display for ExpectedEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} on {:?}", self.kind, self.ray)
    }
}

/// The per-cycle event pattern of a construction, in its own coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedCycle {
    pub example: Example,
    pub hub: Point2,
    /// Directions from the hub to v1, v2, v3, v4.
    pub directions: [Point2; 4],
    /// Relative collinearity tolerance.
    pub tol: f64,
}

impl ExpectedCycle {
    pub fn from_construction(r: &ConstructionResult) -> Self {
        ExpectedCycle::new(r.example, r)
    }

    /// Pattern of `example` laid over the geometry of `r` (which may come from
    /// the other example).
    pub fn new(example: Example, r: &ConstructionResult) -> Self {
        ExpectedCycle {
            example,
            hub: r.v0,
            directions: [r.v1 - r.v0, r.v2 - r.v0, r.v3 - r.v0, r.v4 - r.v0],
            tol: 1e-6,
        }
    }

    pub fn pattern(&self) -> Vec<ExpectedEvent> {
        use EventKind::*;
        let first = match self.example {
            Example::One => InsertCircumcenter,
            Example::Two => SplitSubsegment,
        };
        let ev = |kind, ray| ExpectedEvent { kind, ray };
        vec![
            ev(first, Ray::V0V4),
            ev(RejectCircumcenter, Ray::V0V2),
            ev(SplitSubsegment, Ray::V0V2),
            ev(RejectCircumcenter, Ray::V0V3),
            ev(SplitSubsegment, Ray::V0V3),
            ev(RejectCircumcenter, Ray::V0V1),
            ev(SplitSubsegment, Ray::V0V1),
        ]
    }

    fn direction(&self, ray: Ray) -> Point2 {
        self.directions[ray as usize]
    }

    fn on_ray(&self, ray: Ray, p: Point2) -> bool {
        let d = self.direction(ray);
        let v = p - self.hub;
        v.cross(d).abs() <= self.tol * v.norm() * d.norm() && v.dot(d) > 0.0
    }

    fn is_hub(&self, p: Point2) -> bool {
        p.dist(self.hub) <= 1e-12 * self.direction(Ray::V0V1).norm()
    }

    /// Whether `event` matches `expected`: rejected circumcenters must name a
    /// subsegment on the ray, inserted points and split subsegments must lie
    /// on it.
    pub fn matches(&self, expected: &ExpectedEvent, event: &TraceEvent) -> bool {
        if event.kind != expected.kind {
            return false;
        }
        let seg_ok = |seg: Option<[Point2; 2]>| {
            seg.is_some_and(|s| s.iter().all(|&q| self.is_hub(q) || self.on_ray(expected.ray, q)))
        };
        match event.kind {
            EventKind::InsertCircumcenter => self.on_ray(expected.ray, event.point),
            EventKind::RejectCircumcenter => seg_ok(event.segment),
            EventKind::SplitSubsegment => self.on_ray(expected.ray, event.point) && seg_ok(event.segment),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Deviation {
    /// Zero-based index into the trace.
    pub event_index: usize,
    /// Zero-based cycle number.
    pub cycle: usize,
    pub expected: String,
    pub found: String,
    pub context: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SequenceReport {
    pub cycles_checked: usize,
    pub conforming_cycles: usize,
    pub first_deviation: Option<Deviation>,
}

impl SequenceReport {
    pub fn conforms(&self) -> bool {
        self.first_deviation.is_none()
    }
}

/// Checks the first `cycles` cycles of the events touching the hub against
/// the designed pattern. Events elsewhere are ignored. A trace that ends early
/// deviates at its end.
pub fn match_expected_sequence(trace: &[TraceEvent], expected: &ExpectedCycle, cycles: usize) -> SequenceReport {
    let pattern = expected.pattern();
    let local = hub_events(trace, expected.hub);
    let mut conforming = 0;
    for cycle in 0..cycles {
        for (j, want) in pattern.iter().enumerate() {
            let k = cycle * pattern.len() + j;
            let (event_index, found) = match local.get(k) {
                None => (trace.len(), "end of trace".to_string()),
                Some(&(i, ev)) if !expected.matches(want, ev) => (i, describe(ev)),
                Some(_) => continue,
            };
            let context = local[k.saturating_sub(2)..(k + 1).min(local.len())]
                .iter()
                .map(|(i, e)| format!("#{i}: {}", describe(e)))
                .collect::<Vec<_>>()
                .join("; ");
            return SequenceReport {
                cycles_checked: cycles,
                conforming_cycles: conforming,
                first_deviation: Some(Deviation { event_index, cycle, expected: want.to_string(), found, context }),
            };
        }
        conforming += 1;
    }
    SequenceReport { cycles_checked: cycles, conforming_cycles: conforming, first_deviation: None }
}

fn describe(e: &TraceEvent) -> String {
    match e.segment {
        Some([a, b]) => format!("{:?} at {} on segment {}-{}", e.kind, e.point, a, b),
        None => format!("{:?} at {}", e.kind, e.point),
    }
}
