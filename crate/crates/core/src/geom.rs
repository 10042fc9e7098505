//! Planar geometric kernel: points, segments, robust predicates, circumcenters
//! and angle measurements.
//!
//! `orient2d` and `incircle` use adaptive-precision arithmetic: a floating-point
//! fast path whose result is certified by a forward error bound, falling back
//! to exact expansion arithmetic when the determinant is too close to zero.
//! All angles crossing this module's API are in degrees.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("non-finite coordinate ({x}, {y})")]
    NonFinite { x: f64, y: f64 },
    #[error("degenerate triangle ({a}, {b}, {c})")]
    DegenerateTriangle { a: Point2, b: Point2, c: Point2 },
    #[error("zero-length segment at {0}")]
    ZeroLengthSegment(Point2),
    #[error("zero-length arm at apex {0}")]
    ZeroLengthArm(Point2),
}

/// A point in the plane. Coordinates are always finite.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    /// Builds a point; panics on non-finite input. Use [`Point2::try_new`]
    /// for untrusted data.
    pub fn new(x: f64, y: f64) -> Self {
        assert!(x.is_finite() && y.is_finite(), "non-finite point ({x}, {y})");
        Point2 { x, y }
    }

    pub fn try_new(x: f64, y: f64) -> Result<Self, GeomError> {
        if x.is_finite() && y.is_finite() {
            Ok(Point2 { x, y })
        } else {
            Err(GeomError::NonFinite { x, y })
        }
    }

    /// Point at distance `r` from the origin in direction `deg` degrees.
    pub fn polar(r: f64, deg: f64) -> Self {
        let (s, c) = deg.to_radians().sin_cos();
        Point2::new(r * c, r * s)
    }

    pub fn midpoint(self, other: Point2) -> Point2 {
        Point2::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    /// Direction of the vector in degrees, in (-180, 180].
    pub fn angle_deg(self) -> f64 {
        self.y.atan2(self.x).to_degrees()
    }

    fn coord(self) -> robust::Coord<f64> {
        robust::Coord { x: self.x, y: self.y }
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<Point2> for f64 {
    type Output = Point2;
    fn mul(self, rhs: Point2) -> Point2 {
        Point2::new(self * rhs.x, self * rhs.y)
    }
}

/// A straight segment with distinct endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    a: Point2,
    b: Point2,
}

impl Segment {
    pub fn new(a: Point2, b: Point2) -> Result<Self, GeomError> {
        if a == b {
            return Err(GeomError::ZeroLengthSegment(a));
        }
        Ok(Segment { a, b })
    }

    pub fn a(&self) -> Point2 {
        self.a
    }

    pub fn b(&self) -> Point2 {
        self.b
    }

    pub fn midpoint(&self) -> Point2 {
        self.a.midpoint(self.b)
    }

    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    CounterClockwise,
    Clockwise,
    Collinear,
}

impl Orientation {
    pub fn reversed(self) -> Self {
        match self {
            Orientation::CounterClockwise => Orientation::Clockwise,
            Orientation::Clockwise => Orientation::CounterClockwise,
            Orientation::Collinear => Orientation::Collinear,
        }
    }
}

/// Sign of the signed area of triangle `abc`.
pub fn orient2d(a: Point2, b: Point2, c: Point2) -> Orientation {
    let det = robust::orient2d(a.coord(), b.coord(), c.coord());
    if det > 0.0 {
        Orientation::CounterClockwise
    } else if det < 0.0 {
        Orientation::Clockwise
    } else {
        Orientation::Collinear
    }
}

/// In-circle test: `1` if `d` is strictly inside the circumcircle of `abc`,
/// `0` if cocircular, `-1` if outside. The result does not depend on the
/// orientation of `abc`.
pub fn incircle(a: Point2, b: Point2, c: Point2, d: Point2) -> Result<i8, GeomError> {
    let sign = match orient2d(a, b, c) {
        Orientation::CounterClockwise => 1.0,
        Orientation::Clockwise => -1.0,
        Orientation::Collinear => return Err(GeomError::DegenerateTriangle { a, b, c }),
    };
    let det = sign * robust::incircle(a.coord(), b.coord(), c.coord(), d.coord());
    Ok(if det > 0.0 {
        1
    } else if det < 0.0 {
        -1
    } else {
        0
    })
}

pub fn circumcenter(a: Point2, b: Point2, c: Point2) -> Result<Point2, GeomError> {
    if orient2d(a, b, c) == Orientation::Collinear {
        return Err(GeomError::DegenerateTriangle { a, b, c });
    }
    // Relative to `a` to keep the cancellation small.
    let (bx, by) = (b.x - a.x, b.y - a.y);
    let (cx, cy) = (c.x - a.x, c.y - a.y);
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    let d = 2.0 * (bx * cy - by * cx);
    let ux = (cy * b2 - by * c2) / d;
    let uy = (bx * c2 - cx * b2) / d;
    Point2::try_new(a.x + ux, a.y + uy)
}

pub fn circumradius(a: Point2, b: Point2, c: Point2) -> Result<f64, GeomError> {
    let cc = circumcenter(a, b, c)?;
    Ok((cc.dist(a) + cc.dist(b) + cc.dist(c)) / 3.0)
}

/// Angle `p·apex·q` in degrees, in `[0, 180]`.
pub fn angle_at(apex: Point2, p: Point2, q: Point2) -> Result<f64, GeomError> {
    if p == apex || q == apex {
        return Err(GeomError::ZeroLengthArm(apex));
    }
    let u = p - apex;
    let v = q - apex;
    Ok(u.cross(v).abs().atan2(u.dot(v)).to_degrees())
}

/// The three interior angles of `abc` (at `a`, `b`, `c`) in degrees.
pub fn angles(a: Point2, b: Point2, c: Point2) -> Result<[f64; 3], GeomError> {
    if orient2d(a, b, c) == Orientation::Collinear {
        return Err(GeomError::DegenerateTriangle { a, b, c });
    }
    Ok([angle_at(a, b, c)?, angle_at(b, c, a)?, angle_at(c, a, b)?])
}

/// Smallest interior angle of triangle `abc` in degrees.
pub fn min_angle(a: Point2, b: Point2, c: Point2) -> Result<f64, GeomError> {
    let [x, y, z] = angles(a, b, c)?;
    Ok(x.min(y).min(z))
}

/// Closed diametral-disk membership: `p` encroaches `s` when its distance to
/// the midpoint is at most the half-length, inflated by the relative `tol`.
pub fn in_diametral_circle(s: &Segment, p: Point2, tol: f64) -> bool {
    let radius = 0.5 * s.length();
    p.dist(s.midpoint()) <= radius * (1.0 + tol)
}

/// Rotation about the origin, then uniform scale, then translation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidMotion {
    pub rotation_deg: f64,
    pub scale: f64,
    pub translation: Point2,
}

impl RigidMotion {
    pub fn new(rotation_deg: f64, scale: f64, translation: Point2) -> Self {
        RigidMotion { rotation_deg, scale, translation }
    }

    pub fn apply(&self, p: Point2) -> Point2 {
        let (s, c) = self.rotation_deg.to_radians().sin_cos();
        let r = Point2::new(c * p.x - s * p.y, s * p.x + c * p.y);
        self.scale * r + self.translation
    }
}
