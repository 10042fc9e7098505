//! Ruppert's refinement loop.
//!
//! Encroached subsegments always go first. Once none remain, the worst skinny
//! triangle (or the oldest, under [`QueuePolicy::Fifo`]) proposes its
//! circumcenter. A circumcenter inside the closed diametral disk of any
//! subsegment is rejected and every such subsegment is split at its midpoint
//! instead, wherever the circumcenter lies. A circumcenter that encroaches
//! nothing is inserted, unless it falls outside the hull, in which case the
//! triangle is skipped. Every action lands in the trace.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{self, CycleReport, SimilarityParams};
use crate::cdt::{CdtError, Location, Pslg, SubsegmentId, TriangleId, Triangulation};
use crate::geom::{self, GeomError, Point2};

pub const DEFAULT_ENCROACH_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QueuePolicy {
    /// Smallest minimum angle first; ties to the triangle with the oldest
    /// vertices.
    WorstAngleFirst,
    /// Skinny triangles in the order they were created.
    Fifo,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefinementConfig {
    /// Minimum angle threshold in degrees.
    pub alpha: f64,
    pub max_insertions: usize,
    pub queue_policy: QueuePolicy,
    pub encroach_tol: f64,
    pub cycle_detection: bool,
    /// Self-similar cycles required before stopping with
    /// [`Status::NonTerminationDetected`].
    pub min_cycles: usize,
    pub similarity_tol: f64,
}

impl Default for RefinementConfig {
    fn default() -> Self {
        RefinementConfig {
            alpha: 20.0,
            max_insertions: 10_000,
            queue_policy: QueuePolicy::WorstAngleFirst,
            encroach_tol: DEFAULT_ENCROACH_TOL,
            cycle_detection: false,
            min_cycles: 3,
            similarity_tol: analysis::DEFAULT_SIMILARITY_TOL,
        }
    }
}

impl RefinementConfig {
    pub fn with_alpha(alpha: f64) -> Self {
        RefinementConfig { alpha, ..Default::default() }
    }

    pub fn validate(&self) -> Result<(), RefineError> {
        if !(self.alpha > 0.0 && self.alpha < 60.0) {
            return Err(RefineError::Config(format!("alpha = {} must lie in (0, 60)", self.alpha)));
        }
        if self.max_insertions == 0 {
            return Err(RefineError::Config("max_insertions must be at least 1".into()));
        }
        if self.min_cycles < 3 {
            return Err(RefineError::Config("min_cycles must be at least 3".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    InsertCircumcenter,
    RejectCircumcenter,
    SplitSubsegment,
}

impl EventKind {
    /// Whether the event adds a vertex to the mesh.
    pub fn inserts(self) -> bool {
        !matches!(self, EventKind::RejectCircumcenter)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEvent {
    pub kind: EventKind,
    /// Skinny triangle behind a circumcenter event.
    pub triangle: Option<[Point2; 3]>,
    /// Inserted or rejected vertex.
    pub point: Point2,
    /// Split subsegment, or the first subsegment a rejected circumcenter
    /// encroaches.
    pub segment: Option<[Point2; 2]>,
}

pub type RefinementTrace = Vec<TraceEvent>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    Terminated,
    BudgetExhausted,
    NonTerminationDetected,
}

#[derive(Debug, Clone)]
pub struct RefinementOutcome {
    pub status: Status,
    pub trace: RefinementTrace,
    pub mesh: Triangulation,
    pub cycle_report: Option<CycleReport>,
    pub insertions: usize,
    /// Skinny triangles dropped because their circumcenter left the hull.
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RefineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{source} (after {} trace events)", trace.len())]
    Mesh { source: CdtError, trace: RefinementTrace },
}

impl From<CdtError> for RefineError {
    fn from(source: CdtError) -> Self {
        RefineError::Mesh { source, trace: Vec::new() }
    }
}

/// True iff the smallest angle of `abc` is below `alpha` degrees.
pub fn is_skinny(a: Point2, b: Point2, c: Point2, alpha: f64) -> Result<bool, GeomError> {
    Ok(geom::min_angle(a, b, c)? < alpha)
}

/// What the refinement loop would do next.
#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    SplitSubsegment {
        subsegment: SubsegmentId,
        segment: [Point2; 2],
    },
    /// Circumcenter attempt; `encroaches` lists the subsegments that would
    /// reject it.
    Circumcenter {
        triangle: TriangleId,
        vertices: [Point2; 3],
        circumcenter: Point2,
        encroaches: Vec<SubsegmentId>,
    },
    Done,
}

/// Reports the next action of a refinement started from `mesh`, without
/// mutating it.
pub fn next_action(mesh: &Triangulation, cfg: &RefinementConfig) -> Action {
    let refiner = Refiner::from_mesh(mesh.clone(), cfg.clone());
    refiner.peek()
}

/// Runs the refinement loop on `pslg`.
pub fn refine(pslg: &Pslg, cfg: &RefinementConfig) -> Result<RefinementOutcome, RefineError> {
    cfg.validate()?;
    let mesh = Triangulation::new(pslg)?;
    Refiner::from_mesh(mesh, cfg.clone()).run()
}

/// Skinny-queue entry. Minimum angles are compared after rounding to
/// [`ANGLE_QUANTUM`] so that congruent triangles tie exactly; ties go to the
/// triangle whose sorted vertex ids are smallest, i.e. the one built from the
/// oldest vertices. Both keys are independent of the coordinate frame.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Candidate {
    angle: i64,
    ids: [usize; 3],
    tri: TriangleId,
}

/// Resolution, in degrees, at which minimum angles are ranked.
pub const ANGLE_QUANTUM: f64 = 1e-9;

#[derive(Debug, Clone)]
enum SkinnyQueue {
    Worst(BinaryHeap<Reverse<Candidate>>),
    Fifo(VecDeque<TriangleId>),
}

/// Incremental refinement state.
#[derive(Debug, Clone)]
pub struct Refiner {
    mesh: Triangulation,
    cfg: RefinementConfig,
    /// (subsegment, forced): forced splits come from rejected circumcenters
    /// and are not re-checked.
    encroached: VecDeque<(SubsegmentId, bool)>,
    skinny: SkinnyQueue,
    trace: RefinementTrace,
    insertions: usize,
    skipped: usize,
}

impl Refiner {
    pub fn from_mesh(mesh: Triangulation, cfg: RefinementConfig) -> Self {
        let skinny = match cfg.queue_policy {
            QueuePolicy::WorstAngleFirst => SkinnyQueue::Worst(BinaryHeap::new()),
            QueuePolicy::Fifo => SkinnyQueue::Fifo(VecDeque::new()),
        };
        let mut r =
            Refiner { encroached: VecDeque::new(), skinny, trace: Vec::new(), insertions: 0, skipped: 0, mesh, cfg };
        for id in r.mesh.encroached_subsegments(r.cfg.encroach_tol) {
            r.encroached.push_back((id, false));
        }
        let tris: Vec<TriangleId> = r.mesh.triangles().map(|(id, _)| id).collect();
        for id in tris {
            r.push_if_skinny(id);
        }
        r
    }

    pub fn mesh(&self) -> &Triangulation {
        &self.mesh
    }

    pub fn trace(&self) -> &RefinementTrace {
        &self.trace
    }

    fn push_if_skinny(&mut self, id: TriangleId) {
        let (Some(pts), Some(mut ids)) = (self.mesh.triangle_points(id), self.mesh.triangle(id)) else { return };
        let Ok(angle) = geom::min_angle(pts[0], pts[1], pts[2]) else { return };
        if angle >= self.cfg.alpha {
            return;
        }
        match &mut self.skinny {
            SkinnyQueue::Worst(heap) => {
                ids.sort_unstable();
                let angle = (angle / ANGLE_QUANTUM).round() as i64;
                heap.push(Reverse(Candidate { angle, ids, tri: id }));
            }
            SkinnyQueue::Fifo(q) => q.push_back(id),
        }
    }

    fn is_skinny_now(&self, id: TriangleId) -> bool {
        self.mesh.triangle_points(id).and_then(|p| is_skinny(p[0], p[1], p[2], self.cfg.alpha).ok()).unwrap_or(false)
    }

    fn pop_skinny(&mut self) -> Option<TriangleId> {
        loop {
            let id = match &mut self.skinny {
                SkinnyQueue::Worst(heap) => heap.pop()?.0.tri,
                SkinnyQueue::Fifo(q) => q.pop_front()?,
            };
            if self.is_skinny_now(id) {
                return Some(id);
            }
        }
    }

    fn is_encroached(&self, id: SubsegmentId) -> bool {
        let Some(seg) = self.mesh.subsegment_geometry(id) else { return false };
        let s = self.mesh.subsegment(id).expect("live");
        self.mesh
            .points()
            .iter()
            .enumerate()
            .any(|(v, &p)| v != s.a && v != s.b && geom::in_diametral_circle(&seg, p, self.cfg.encroach_tol))
    }

    fn queue_split(&mut self, id: SubsegmentId, forced: bool) {
        if let Some(entry) = self.encroached.iter_mut().find(|(s, _)| *s == id) {
            entry.1 |= forced;
        } else {
            self.encroached.push_back((id, forced));
        }
    }

    /// The next action, without mutating anything.
    pub fn peek(&self) -> Action {
        for &(id, forced) in &self.encroached {
            if self.mesh.subsegment(id).is_some() && (forced || self.is_encroached(id)) {
                let seg = self.mesh.subsegment_geometry(id).expect("live");
                return Action::SplitSubsegment { subsegment: id, segment: [seg.a(), seg.b()] };
            }
        }
        let mut probe = self.clone();
        while let Some(id) = probe.pop_skinny() {
            let vertices = probe.mesh.triangle_points(id).expect("live");
            let Ok(cc) = geom::circumcenter(vertices[0], vertices[1], vertices[2]) else { continue };
            let encroaches = probe.mesh.subsegments_encroached_by(cc, probe.cfg.encroach_tol);
            if encroaches.is_empty() && probe.mesh.locate_from(cc, id) == Location::Outside {
                continue;
            }
            return Action::Circumcenter { triangle: id, vertices, circumcenter: cc, encroaches };
        }
        Action::Done
    }

    fn fail(&self, source: CdtError) -> RefineError {
        RefineError::Mesh { source, trace: self.trace.clone() }
    }

    fn split(&mut self, id: SubsegmentId) -> Result<(), RefineError> {
        let seg = self.mesh.subsegment_geometry(id).expect("live");
        let split = self.mesh.split_subsegment(id).map_err(|e| self.fail(e))?;
        self.insertions += 1;
        self.trace.push(TraceEvent {
            kind: EventKind::SplitSubsegment,
            triangle: None,
            point: split.midpoint,
            segment: Some([seg.a(), seg.b()]),
        });
        for h in split.halves {
            if self.is_encroached(h) {
                self.queue_split(h, false);
            }
        }
        for s in self.mesh.subsegments_encroached_by(split.midpoint, self.cfg.encroach_tol) {
            if !split.halves.contains(&s) {
                self.queue_split(s, false);
            }
        }
        for t in split.created {
            self.push_if_skinny(t);
        }
        Ok(())
    }

    fn check_cycle(&self) -> Option<CycleReport> {
        if !self.cfg.cycle_detection {
            return None;
        }
        let params =
            SimilarityParams { tol: self.cfg.similarity_tol, min_cycles: self.cfg.min_cycles, ..Default::default() };
        analysis::detect_self_similarity_with(&self.trace, &params)
    }

    fn finish(self, status: Status, cycle_report: Option<CycleReport>) -> RefinementOutcome {
        if self.skipped > 0 {
            log::warn!("{} skinny triangles kept: their circumcenters fall outside the hull", self.skipped);
        }
        RefinementOutcome {
            status,
            trace: self.trace,
            mesh: self.mesh,
            cycle_report,
            insertions: self.insertions,
            skipped: self.skipped,
        }
    }

    /// Runs until no work remains, the insertion budget is spent, or (with
    /// cycle detection) a self-similar cycle has repeated `min_cycles` times.
    pub fn run(self) -> Result<RefinementOutcome, RefineError> {
        self.run_observed(|_, _| {})
    }

    /// Like [`Refiner::run`], calling `observe` after every vertex insertion.
    pub fn run_observed(
        mut self,
        mut observe: impl FnMut(&Triangulation, &[TraceEvent]),
    ) -> Result<RefinementOutcome, RefineError> {
        loop {
            if self.insertions >= self.cfg.max_insertions {
                return Ok(self.finish(Status::BudgetExhausted, None));
            }
            if let Some((id, forced)) = self.encroached.pop_front() {
                if self.mesh.subsegment(id).is_none() || !(forced || self.is_encroached(id)) {
                    continue;
                }
                self.split(id)?;
                observe(&self.mesh, &self.trace);
                if let Some(report) = self.check_cycle() {
                    return Ok(self.finish(Status::NonTerminationDetected, Some(report)));
                }
                continue;
            }

            let Some(tri) = self.pop_skinny() else {
                return Ok(self.finish(Status::Terminated, None));
            };
            let vertices = self.mesh.triangle_points(tri).expect("live");
            let cc = geom::circumcenter(vertices[0], vertices[1], vertices[2]).map_err(|e| self.fail(e.into()))?;
            let encroached = self.mesh.subsegments_encroached_by(cc, self.cfg.encroach_tol);
            if encroached.is_empty() && self.mesh.locate_from(cc, tri) == Location::Outside {
                log::debug!("skipping skinny triangle {tri}: circumcenter {cc} is outside the hull");
                self.skipped += 1;
                continue;
            }
            if let Some(&first) = encroached.first() {
                let seg = self.mesh.subsegment_geometry(first).expect("live");
                self.trace.push(TraceEvent {
                    kind: EventKind::RejectCircumcenter,
                    triangle: Some(vertices),
                    point: cc,
                    segment: Some([seg.a(), seg.b()]),
                });
                for s in encroached {
                    self.queue_split(s, true);
                }
                self.push_if_skinny(tri);
                continue;
            }
            let ins = self.mesh.insert_vertex_near(cc, tri).map_err(|e| self.fail(e))?;
            self.insertions += 1;
            self.trace.push(TraceEvent {
                kind: EventKind::InsertCircumcenter,
                triangle: Some(vertices),
                point: cc,
                segment: None,
            });
            for t in ins.created {
                self.push_if_skinny(t);
            }
            observe(&self.mesh, &self.trace);
        }
    }
}
