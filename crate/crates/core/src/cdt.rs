//! Incremental Delaunay triangulation with tracked subsegments.
//!
//! The mesh covers the convex hull of its vertices. Hull edges are closed off
//! by *ghost* triangles that share a single vertex at infinity, so every edge
//! has a neighbor on both sides and insertion outside the hull needs no
//! special-casing. Insertion is Bowyer–Watson: the cavity of triangles whose
//! circumcircle strictly contains the new point is grown across unconstrained
//! edges only, then re-fanned around the point.
//!
//! Subsegments (input segments and the pieces they are split into) are never
//! crossed by a cavity, except the subsegment currently being split at its
//! midpoint.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::geom::{self, orient2d, GeomError, Orientation, Point2, Segment};

pub type VertexId = usize;
pub type TriangleId = usize;
pub type SubsegmentId = usize;

/// Vertex id standing for the point at infinity in ghost triangles.
const GHOST: VertexId = usize::MAX;

/// Relative duplicate-point tolerance (times the hull diameter).
pub const DUPLICATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CdtError {
    #[error("invalid PSLG: {0}")]
    InvalidPslg(String),
    #[error("all input vertices are collinear")]
    AllCollinear,
    #[error("point {point} duplicates vertex {existing}")]
    DuplicatePoint { point: Point2, existing: VertexId },
    #[error("point {0} lies outside the triangulated domain")]
    OutsideHull(Point2),
    #[error("input segment {index} ({a}, {b}) is not an edge of the Delaunay triangulation")]
    MissingSegment { index: usize, a: VertexId, b: VertexId },
    #[error("unknown subsegment {0}")]
    UnknownSubsegment(SubsegmentId),
    #[error("insertion of {0} produced a degenerate cavity")]
    DegenerateCavity(Point2),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// Planar straight-line graph: vertices plus segments given as index pairs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Pslg {
    pub vertices: Vec<Point2>,
    pub segments: Vec<[usize; 2]>,
}

impl Pslg {
    pub fn new(vertices: Vec<Point2>, segments: Vec<[usize; 2]>) -> Result<Self, CdtError> {
        let pslg = Pslg { vertices, segments };
        pslg.validate()?;
        Ok(pslg)
    }

    pub fn segment(&self, i: usize) -> Segment {
        let [a, b] = self.segments[i];
        Segment::new(self.vertices[a], self.vertices[b]).expect("validated segment")
    }

    /// Applies `f` to every vertex, keeping the segment structure.
    pub fn map_points(&self, f: impl Fn(Point2) -> Point2) -> Pslg {
        Pslg { vertices: self.vertices.iter().map(|&p| f(p)).collect(), segments: self.segments.clone() }
    }

    pub fn validate(&self) -> Result<(), CdtError> {
        let bad = |msg: String| Err(CdtError::InvalidPslg(msg));
        if self.vertices.is_empty() {
            return bad("no vertices".into());
        }
        for (i, p) in self.vertices.iter().enumerate() {
            if !p.x.is_finite() || !p.y.is_finite() {
                return bad(format!("vertex {i} is not finite"));
            }
        }
        let diam = bbox_diagonal(&self.vertices);
        for i in 0..self.vertices.len() {
            for j in (i + 1)..self.vertices.len() {
                if self.vertices[i].dist(self.vertices[j]) <= DUPLICATE_TOL * diam {
                    return bad(format!("vertices {i} and {j} coincide"));
                }
            }
        }
        let n = self.vertices.len();
        for (k, &[a, b]) in self.segments.iter().enumerate() {
            if a >= n || b >= n {
                return bad(format!("segment {k} references a missing vertex"));
            }
            if a == b {
                return bad(format!("segment {k} has identical endpoints"));
            }
            for (v, &p) in self.vertices.iter().enumerate() {
                if v != a && v != b && on_open_segment(self.vertices[a], self.vertices[b], p) {
                    return bad(format!("vertex {v} lies on segment {k}"));
                }
            }
        }
        for i in 0..self.segments.len() {
            for j in (i + 1)..self.segments.len() {
                let [a, b] = self.segments[i];
                let [c, d] = self.segments[j];
                if (a.min(b), a.max(b)) == (c.min(d), c.max(d)) {
                    return bad(format!("segments {i} and {j} are duplicates"));
                }
                let shared = a == c || a == d || b == c || b == d;
                if !shared && segments_cross(self.vertices[a], self.vertices[b], self.vertices[c], self.vertices[d]) {
                    return bad(format!("segments {i} and {j} intersect"));
                }
            }
        }
        Ok(())
    }
}

fn bbox_diagonal(points: &[Point2]) -> f64 {
    let (mut lo, mut hi) = (points[0], points[0]);
    for p in points {
        lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    lo.dist(hi)
}

/// True if `p` is collinear with `ab` and strictly between the endpoints.
fn on_open_segment(a: Point2, b: Point2, p: Point2) -> bool {
    orient2d(a, b, p) == Orientation::Collinear && (p - a).dot(b - a) > 0.0 && (p - b).dot(a - b) > 0.0
}

fn segments_cross(a: Point2, b: Point2, c: Point2, d: Point2) -> bool {
    let o1 = orient2d(a, b, c);
    let o2 = orient2d(a, b, d);
    let o3 = orient2d(c, d, a);
    let o4 = orient2d(c, d, b);
    if o1 != o2 && o3 != o4 && o1 != Orientation::Collinear && o2 != Orientation::Collinear {
        return o3 != Orientation::Collinear && o4 != Orientation::Collinear;
    }
    on_open_segment(a, b, c) || on_open_segment(a, b, d) || on_open_segment(c, d, a) || on_open_segment(c, d, b)
}

#[derive(Debug, Clone)]
struct Tri {
    /// Counter-clockwise for real triangles; ghosts keep `GHOST` last and
    /// have the outside of the hull on the left of `v[0] -> v[1]`.
    v: [VertexId; 3],
    /// `n[i]` is across the edge opposite `v[i]`.
    n: [TriangleId; 3],
    alive: bool,
}

impl Tri {
    fn is_ghost(&self) -> bool {
        self.v[2] == GHOST
    }

    fn edge(&self, i: usize) -> (VertexId, VertexId) {
        (self.v[(i + 1) % 3], self.v[(i + 2) % 3])
    }
}

/// A constrained edge: an input segment or one of the pieces it was split into.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Subsegment {
    pub a: VertexId,
    pub b: VertexId,
    /// Index of the input segment this piece belongs to.
    pub input: usize,
    alive: bool,
}

/// Result of inserting a vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Insertion {
    pub vertex: VertexId,
    /// Triangles created by the insertion, all incident to `vertex`.
    pub created: Vec<TriangleId>,
}

/// Result of splitting a subsegment at its midpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub midpoint: Point2,
    pub vertex: VertexId,
    pub halves: [SubsegmentId; 2],
    pub created: Vec<TriangleId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    /// Inside or on the boundary of a real triangle.
    Triangle(TriangleId),
    Outside,
}

#[derive(Debug, Clone)]
pub struct Triangulation {
    points: Vec<Point2>,
    tris: Vec<Tri>,
    subsegs: Vec<Subsegment>,
    constrained: HashMap<(VertexId, VertexId), SubsegmentId>,
    /// Some live triangle incident to each vertex.
    vertex_tri: Vec<TriangleId>,
    hint: TriangleId,
    hull_diameter: f64,
    input: Pslg,
}

fn edge_key(a: VertexId, b: VertexId) -> (VertexId, VertexId) {
    (a.min(b), a.max(b))
}

impl Triangulation {
    /// Delaunay triangulation of the PSLG's vertices, with every input segment
    /// registered as a subsegment. Segments that are not Delaunay edges are
    /// reported, not recovered.
    pub fn new(pslg: &Pslg) -> Result<Self, CdtError> {
        pslg.validate()?;
        let pts = &pslg.vertices;
        let first = 0;
        let second = (1..pts.len()).find(|&i| pts[i] != pts[first]).ok_or(CdtError::AllCollinear)?;
        let third = (1..pts.len())
            .find(|&i| orient2d(pts[first], pts[second], pts[i]) != Orientation::Collinear)
            .ok_or(CdtError::AllCollinear)?;
        let (a, b, c) = match orient2d(pts[first], pts[second], pts[third]) {
            Orientation::CounterClockwise => (first, second, third),
            _ => (first, third, second),
        };

        let mut t = Triangulation {
            points: pts.clone(),
            tris: Vec::new(),
            subsegs: Vec::new(),
            constrained: HashMap::new(),
            vertex_tri: vec![usize::MAX; pts.len()],
            hint: 0,
            hull_diameter: bbox_diagonal(pts),
            input: pslg.clone(),
        };
        for v in [[a, b, c], [c, b, GHOST], [a, c, GHOST], [b, a, GHOST]] {
            t.tris.push(Tri { v, n: [usize::MAX; 3], alive: true });
        }
        t.link_all();
        for id in 0..4 {
            t.touch(id);
        }
        for v in 0..pts.len() {
            if v != a && v != b && v != c {
                t.insert_existing(v, None, true)?;
            }
        }
        t.hull_diameter = t.compute_hull_diameter();

        for (index, &[a, b]) in pslg.segments.iter().enumerate() {
            if t.find_edge(a, b).is_none() {
                return Err(CdtError::MissingSegment { index, a, b });
            }
            t.add_subsegment(a, b, index);
        }
        Ok(t)
    }

    pub fn input(&self) -> &Pslg {
        &self.input
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn point(&self, v: VertexId) -> Point2 {
        self.points[v]
    }

    pub fn num_vertices(&self) -> usize {
        self.points.len()
    }

    /// Diameter of the convex hull, fixed once the triangulation is built
    /// since refinement only inserts inside the hull.
    pub fn hull_diameter(&self) -> f64 {
        self.hull_diameter
    }

    /// Live real triangles, counter-clockwise, in creation order.
    pub fn triangles(&self) -> impl Iterator<Item = (TriangleId, [VertexId; 3])> + '_ {
        self.tris.iter().enumerate().filter(|(_, t)| t.alive && !t.is_ghost()).map(|(i, t)| (i, t.v))
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles().count()
    }

    /// Vertex ids of a live real triangle.
    pub fn triangle(&self, id: TriangleId) -> Option<[VertexId; 3]> {
        self.tris.get(id).filter(|t| t.alive && !t.is_ghost()).map(|t| t.v)
    }

    pub fn triangle_points(&self, id: TriangleId) -> Option<[Point2; 3]> {
        self.triangle(id).map(|v| v.map(|i| self.points[i]))
    }

    /// Real neighbors of a live triangle (`None` across hull edges).
    pub fn neighbors(&self, id: TriangleId) -> Option<[Option<TriangleId>; 3]> {
        self.triangle(id)?;
        Some(self.tris[id].n.map(|n| (!self.tris[n].is_ghost()).then_some(n)))
    }

    /// Undirected edges of the real triangulation, sorted.
    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out: Vec<_> =
            self.triangles().flat_map(|(_, v)| (0..3).map(move |i| edge_key(v[(i + 1) % 3], v[(i + 2) % 3]))).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn subsegment(&self, id: SubsegmentId) -> Option<&Subsegment> {
        self.subsegs.get(id).filter(|s| s.alive)
    }

    /// Live subsegments in id order.
    pub fn subsegments(&self) -> impl Iterator<Item = (SubsegmentId, &Subsegment)> + '_ {
        self.subsegs.iter().enumerate().filter(|(_, s)| s.alive)
    }

    pub fn subsegment_geometry(&self, id: SubsegmentId) -> Option<Segment> {
        let s = self.subsegment(id)?;
        Some(Segment::new(self.points[s.a], self.points[s.b]).expect("distinct endpoints"))
    }

    pub fn is_constrained(&self, a: VertexId, b: VertexId) -> bool {
        self.constrained.contains_key(&edge_key(a, b))
    }

    /// Subsegments whose closed diametral disk contains a vertex other than
    /// their own endpoints.
    pub fn encroached_subsegments(&self, tol: f64) -> Vec<SubsegmentId> {
        self.subsegments()
            .filter(|(_, s)| {
                let seg = Segment::new(self.points[s.a], self.points[s.b]).expect("distinct");
                self.points
                    .iter()
                    .enumerate()
                    .any(|(v, &p)| v != s.a && v != s.b && geom::in_diametral_circle(&seg, p, tol))
            })
            .map(|(id, _)| id)
            .collect()
    }

    /// Subsegments whose closed diametral disk contains `p`.
    pub fn subsegments_encroached_by(&self, p: Point2, tol: f64) -> Vec<SubsegmentId> {
        self.subsegments()
            .filter(|(_, s)| {
                let seg = Segment::new(self.points[s.a], self.points[s.b]).expect("distinct");
                p != seg.a() && p != seg.b() && geom::in_diametral_circle(&seg, p, tol)
            })
            .map(|(id, _)| id)
            .collect()
    }

    pub fn locate(&self, p: Point2) -> Location {
        self.locate_from(p, self.hint)
    }

    /// Straight visibility walk from `start`.
    pub fn locate_from(&self, p: Point2, start: TriangleId) -> Location {
        let mut cur = if self.tris.get(start).is_some_and(|t| t.alive && !t.is_ghost()) { start } else { self.hint };
        let limit = 4 * self.tris.len() + 16;
        'walk: for step in 0..limit {
            let t = &self.tris[cur];
            if t.is_ghost() {
                return Location::Outside;
            }
            for k in 0..3 {
                let i = (k + step) % 3;
                let (a, b) = t.edge(i);
                if orient2d(self.points[a], self.points[b], p) == Orientation::Clockwise {
                    cur = t.n[i];
                    continue 'walk;
                }
            }
            return Location::Triangle(cur);
        }
        // The walk can cycle on constrained meshes; fall back to a scan.
        self.triangles()
            .find(|&(_, v)| {
                (0..3).all(|i| {
                    orient2d(self.points[v[(i + 1) % 3]], self.points[v[(i + 2) % 3]], p) != Orientation::Clockwise
                })
            })
            .map_or(Location::Outside, |(id, _)| Location::Triangle(id))
    }

    /// Inserts `p` (which must lie inside the hull) and restores the
    /// constrained Delaunay property.
    pub fn insert_vertex(&mut self, p: Point2) -> Result<Insertion, CdtError> {
        self.insert_vertex_near(p, self.hint)
    }

    /// As [`Triangulation::insert_vertex`], starting point location at `hint`.
    pub fn insert_vertex_near(&mut self, p: Point2, hint: TriangleId) -> Result<Insertion, CdtError> {
        let p = Point2::try_new(p.x, p.y)?;
        self.points.push(p);
        self.vertex_tri.push(usize::MAX);
        let v = self.points.len() - 1;
        match self.insert_existing(v, Some(hint), false) {
            Ok(created) => Ok(Insertion { vertex: v, created }),
            Err(e) => {
                self.points.pop();
                self.vertex_tri.pop();
                Err(e)
            }
        }
    }

    /// Splits a subsegment at its exact midpoint.
    pub fn split_subsegment(&mut self, id: SubsegmentId) -> Result<Split, CdtError> {
        let s = *self.subsegment(id).ok_or(CdtError::UnknownSubsegment(id))?;
        let midpoint = self.points[s.a].midpoint(self.points[s.b]);
        self.points.push(midpoint);
        self.vertex_tri.push(usize::MAX);
        let v = self.points.len() - 1;
        self.constrained.remove(&edge_key(s.a, s.b));
        let start = self.vertex_tri[s.a];
        let created = match self.insert_existing_crossing(v, Some(start), false, Some(edge_key(s.a, s.b))) {
            Ok(c) => c,
            Err(e) => {
                self.constrained.insert(edge_key(s.a, s.b), id);
                self.points.pop();
                self.vertex_tri.pop();
                return Err(e);
            }
        };
        self.subsegs[id].alive = false;
        let h1 = self.add_subsegment(s.a, v, s.input);
        let h2 = self.add_subsegment(v, s.b, s.input);
        Ok(Split { midpoint, vertex: v, halves: [h1, h2], created })
    }

    /// Checks orientation and adjacency symmetry of every live triangle.
    pub fn validate(&self) -> Result<(), String> {
        for (i, t) in self.tris.iter().enumerate().filter(|(_, t)| t.alive) {
            if !t.is_ghost() {
                let [a, b, c] = t.v.map(|k| self.points[k]);
                if orient2d(a, b, c) != Orientation::CounterClockwise {
                    return Err(format!("triangle {i} is not counter-clockwise"));
                }
            }
            for k in 0..3 {
                let n = &self.tris[t.n[k]];
                if !n.alive {
                    return Err(format!("triangle {i} points to dead neighbor {}", t.n[k]));
                }
                let (a, b) = t.edge(k);
                if !(0..3).any(|j| n.n[j] == i && n.edge(j) == (b, a)) {
                    return Err(format!("adjacency of triangle {i} edge {k} is not symmetric"));
                }
            }
        }
        for (id, s) in self.subsegments() {
            if self.find_edge(s.a, s.b).is_none() {
                return Err(format!("subsegment {id} is not a mesh edge"));
            }
        }
        Ok(())
    }

    fn add_subsegment(&mut self, a: VertexId, b: VertexId, input: usize) -> SubsegmentId {
        let id = self.subsegs.len();
        self.subsegs.push(Subsegment { a, b, input, alive: true });
        self.constrained.insert(edge_key(a, b), id);
        id
    }

    fn touch(&mut self, id: TriangleId) {
        let t = &self.tris[id];
        for &v in &t.v {
            if v != GHOST {
                self.vertex_tri[v] = id;
            }
        }
        if !t.is_ghost() {
            self.hint = id;
        }
    }

    fn link_all(&mut self) {
        let mut directed = HashMap::new();
        for (i, t) in self.tris.iter().enumerate().filter(|(_, t)| t.alive) {
            for k in 0..3 {
                directed.insert(t.edge(k), (i, k));
            }
        }
        for i in 0..self.tris.len() {
            if !self.tris[i].alive {
                continue;
            }
            for k in 0..3 {
                let (a, b) = self.tris[i].edge(k);
                let (j, _) = directed[&(b, a)];
                self.tris[i].n[k] = j;
            }
        }
    }

    fn find_directed_edge(&self, a: VertexId, b: VertexId) -> Option<(TriangleId, usize)> {
        // rotate around `a` starting from its remembered triangle
        let start = self.vertex_tri[a];
        let mut cur = start;
        for _ in 0..=self.tris.len() {
            let t = &self.tris[cur];
            let ia = t.v.iter().position(|&x| x == a)?;
            // edge a -> next is opposite the third vertex
            let opp = (ia + 2) % 3;
            if t.v[(ia + 1) % 3] == b {
                return Some((cur, opp));
            }
            // step to the neighbor across the edge (prev -> a)
            cur = t.n[(ia + 1) % 3];
            if cur == start {
                return None;
            }
        }
        None
    }

    /// Either orientation of edge `ab`, as (triangle, edge index).
    fn find_edge(&self, a: VertexId, b: VertexId) -> Option<(TriangleId, usize)> {
        self.find_directed_edge(a, b).or_else(|| self.find_directed_edge(b, a))
    }

    fn conflicts(&self, t: &Tri, p: Point2) -> bool {
        if t.is_ghost() {
            let (u, w) = (self.points[t.v[0]], self.points[t.v[1]]);
            match orient2d(u, w, p) {
                Orientation::CounterClockwise => true,
                Orientation::Clockwise => false,
                Orientation::Collinear => (p - u).dot(w - u) > 0.0 && (p - w).dot(u - w) > 0.0,
            }
        } else {
            let [a, b, c] = t.v.map(|k| self.points[k]);
            geom::incircle(a, b, c, p).map(|s| s > 0).unwrap_or(false)
        }
    }

    fn insert_existing(
        &mut self,
        v: VertexId,
        hint: Option<TriangleId>,
        allow_outside: bool,
    ) -> Result<Vec<TriangleId>, CdtError> {
        self.insert_existing_crossing(v, hint, allow_outside, None)
    }

    fn insert_existing_crossing(
        &mut self,
        v: VertexId,
        hint: Option<TriangleId>,
        allow_outside: bool,
        crossable: Option<(VertexId, VertexId)>,
    ) -> Result<Vec<TriangleId>, CdtError> {
        let p = self.points[v];
        let seed = match self.locate_from(p, hint.unwrap_or(self.hint)) {
            Location::Triangle(t) => t,
            Location::Outside if allow_outside => self.find_conflicting_ghost(p).ok_or(CdtError::OutsideHull(p))?,
            Location::Outside => return Err(CdtError::OutsideHull(p)),
        };

        // Grow the cavity.
        let mut in_cavity = HashSet::new();
        in_cavity.insert(seed);
        let mut cavity = vec![seed];
        let mut boundary: Vec<(VertexId, VertexId, TriangleId, TriangleId)> = Vec::new();
        let mut blocked_edges = Vec::new();
        let mut k = 0;
        while k < cavity.len() {
            let t = cavity[k];
            k += 1;
            for i in 0..3 {
                let (a, b) = self.tris[t].edge(i);
                let nb = self.tris[t].n[i];
                if in_cavity.contains(&nb) {
                    continue;
                }
                let blocked = a != GHOST
                    && b != GHOST
                    && self.constrained.contains_key(&edge_key(a, b))
                    && crossable != Some(edge_key(a, b));
                if !blocked && self.conflicts(&self.tris[nb], p) {
                    in_cavity.insert(nb);
                    cavity.push(nb);
                } else {
                    if blocked {
                        blocked_edges.push(nb);
                    }
                    boundary.push((a, b, nb, t));
                }
            }
        }
        // A constrained edge must never end up inside the cavity.
        if blocked_edges.iter().any(|nb| in_cavity.contains(nb)) {
            return Err(CdtError::DegenerateCavity(p));
        }
        // Boundary edges collected earlier may have become interior.
        boundary.retain(|&(_, _, nb, _)| !in_cavity.contains(&nb));

        let tol = DUPLICATE_TOL * self.hull_diameter;
        for &(a, b, _, _) in &boundary {
            for w in [a, b] {
                if w != GHOST && self.points[w].dist(p) <= tol {
                    return Err(CdtError::DuplicatePoint { point: p, existing: w });
                }
            }
            if a != GHOST && b != GHOST && orient2d(self.points[a], self.points[b], p) != Orientation::CounterClockwise
            {
                return Err(CdtError::DegenerateCavity(p));
            }
        }

        let base = self.tris.len();
        let mut by_start = HashMap::new();
        let mut by_end = HashMap::new();
        for (j, &(a, b, _, _)) in boundary.iter().enumerate() {
            by_start.insert(a, base + j);
            by_end.insert(b, base + j);
        }
        for &(a, b, outside, old) in &boundary {
            let id = self.tris.len();
            let opp_a = by_start[&b];
            let opp_b = by_end[&a];
            self.tris.push(Tri { v: [a, b, v], n: [opp_a, opp_b, outside], alive: true });
            if let Some(slot) = self.tris[outside].n.iter().position(|&x| x == old) {
                self.tris[outside].n[slot] = id;
            }
        }
        for &t in &cavity {
            self.tris[t].alive = false;
        }
        let mut created = Vec::with_capacity(boundary.len());
        for id in base..self.tris.len() {
            let t = &mut self.tris[id];
            if t.v[0] == GHOST {
                t.v.rotate_left(1);
                t.n.rotate_left(1);
            } else if t.v[1] == GHOST {
                t.v.rotate_right(1);
                t.n.rotate_right(1);
            }
            if !t.is_ghost() {
                created.push(id);
            }
        }
        for id in base..self.tris.len() {
            self.touch(id);
        }
        if let Some(&last) = created.last() {
            self.hint = last;
        }
        Ok(created)
    }

    fn find_conflicting_ghost(&self, p: Point2) -> Option<TriangleId> {
        self.tris.iter().enumerate().find(|(_, t)| t.alive && t.is_ghost() && self.conflicts(t, p)).map(|(i, _)| i)
    }

    fn hull_vertices(&self) -> Vec<VertexId> {
        let mut hull: Vec<_> = self.tris.iter().filter(|t| t.alive && t.is_ghost()).map(|t| t.v[0]).collect();
        hull.sort_unstable();
        hull.dedup();
        hull
    }

    fn compute_hull_diameter(&self) -> f64 {
        let hull = self.hull_vertices();
        let mut d: f64 = 0.0;
        for (i, &a) in hull.iter().enumerate() {
            for &b in &hull[i + 1..] {
                d = d.max(self.points[a].dist(self.points[b]));
            }
        }
        d
    }

    /// Area of the convex hull (shoelace over hull edges).
    pub fn hull_area(&self) -> f64 {
        self.tris
            .iter()
            .filter(|t| t.alive && t.is_ghost())
            .map(|t| {
                // ghost edge v0 -> v1 runs clockwise around the hull
                let (u, w) = (self.points[t.v[0]], self.points[t.v[1]]);
                0.5 * w.cross(u)
            })
            .sum()
    }

    /// Sum of the areas of all real triangles.
    pub fn total_area(&self) -> f64 {
        self.triangles()
            .map(|(_, v)| {
                let [a, b, c] = v.map(|k| self.points[k]);
                0.5 * (b - a).cross(c - a)
            })
            .sum()
    }
}
