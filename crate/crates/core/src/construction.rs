//! The two five-vertex inputs on which Ruppert's refinement cycles forever,
//! and the one-parameter fixed-point search for their smallest threshold.
//!
//! Both inputs share a hub vertex `v0` at the origin and segments
//! `v0v1`, `v0v2`, `v0v3` (the second input adds `v0v4`). Around `v0`, in
//! counter-clockwise order, sit `v1`, `v3`, `v2` and then the *anchor*
//! direction of `v4`. Each cycle inserts four vertices whose positions are
//! exactly half those of `v1..v4`, so the configuration repeats at half
//! scale:
//!
//! 1. the anchor `a` (`c1`, the circumcenter of `v0v1v4`; or `m0`, the
//!    midpoint of `v0v4`) is inserted;
//! 2. `v0v2a` is skinny, its circumcenter `c2` sits on the diametral circle
//!    of `v0v2`, so `m1` is inserted instead;
//! 3. `v0v3m1` is skinny, `c3` lies inside the diametral disk of `v0v3`,
//!    so `m2` is inserted;
//! 4. `v0v1m2` is skinny, `c4` sits on the diametral circle of `v0v1`,
//!    so `m3` is inserted.
//!
//! A circumcenter on the diametral circle of `v0x` means the inscribed angle
//! at the third vertex is 45°. Requiring the skinny angle `gamma1` to sit at
//! the far vertex fixes the remaining angle at `v0` to `135° - gamma1`, so
//! both `v2` and `m2` follow from the law of sines.

use serde::Serialize;
use thiserror::Error;

use crate::cdt::Pslg;
use crate::geom::{self, GeomError, Orientation, Point2, RigidMotion};

/// Relative tolerance on the boundary contacts of `c2` and `c4`.
pub const CONTACT_TOL: f64 = 1e-9;

/// Default bisection interval for the fixed-point search, in degrees.
pub const SEARCH_BRACKET: (f64, f64) = (25.0, 31.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Example {
    /// Isolated `v4` with a right angle at `v1`.
    One,
    /// Segment `v0v4` with a prescribed apex angle at `v0`.
    Two,
}

impl Example {
    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(Example::One),
            2 => Some(Example::Two),
            _ => None,
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Example::One => 1,
            Example::Two => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstructionError {
    #[error("gamma1 = {0}° is outside (20°, 35°)")]
    Gamma1OutOfRange(f64),
    #[error("apex = {0}° is outside [40°, 90°]")]
    ApexOutOfRange(f64),
    #[error("angle v0·v1·v4 = {angle}° is acute, so v1 lies outside the diametral circle of v0v4")]
    NoApexEncroachment { angle: f64 },
    #[error("constraint `{name}` violated: residual {residual:e}")]
    ConstraintViolated { name: &'static str, residual: f64 },
    #[error("no sign change of gamma2 - gamma1 on [{lo}°, {hi}°]: g = {g_lo:e}, {g_hi:e}")]
    NoSignChange { lo: f64, hi: f64, g_lo: f64, g_hi: f64 },
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// Every named point of a realized construction, plus its angles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstructionResult {
    pub example: Example,
    pub v0: Point2,
    pub v1: Point2,
    pub v2: Point2,
    pub v3: Point2,
    pub v4: Point2,
    pub c1: Point2,
    pub c2: Point2,
    pub c3: Point2,
    pub c4: Point2,
    pub m0: Option<Point2>,
    pub m1: Point2,
    pub m2: Point2,
    pub m3: Point2,
    pub gamma1: f64,
    pub gamma2: f64,
    /// Angle v4·v0·v1 in degrees (an input for the second example).
    pub apex: f64,
    #[serde(skip)]
    pub pslg: Pslg,
}

impl ConstructionResult {
    /// The vertex inserted first in each cycle: `c1`, or `m0` for the second
    /// example.
    pub fn anchor(&self) -> Point2 {
        self.m0.unwrap_or(self.c1)
    }

    /// Angles between consecutive input segments around `v0`, in degrees.
    pub fn input_angles(&self) -> Vec<f64> {
        let mut dirs: Vec<f64> = self
            .pslg
            .segments
            .iter()
            .map(|&[_, b]| (self.pslg.vertices[b] - self.v0).angle_deg().rem_euclid(360.0))
            .collect();
        dirs.sort_by(f64::total_cmp);
        let n = dirs.len();
        (0..n)
            .map(|i| {
                let next = if i + 1 == n { dirs[0] + 360.0 } else { dirs[i + 1] };
                next - dirs[i]
            })
            .collect()
    }

    pub fn min_input_angle(&self) -> f64 {
        self.input_angles().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Angle v2·v0·v3.
    pub fn hub_angle(&self) -> f64 {
        geom::angle_at(self.v0, self.v2, self.v3).expect("distinct points")
    }

    /// Relative depth of `c3` inside the diametral disk of `v0v3`:
    /// `1 - |c3 - m2| / (|v0v3| / 2)`. Positive means encroaching.
    pub fn c3_margin(&self) -> f64 {
        1.0 - self.c3.dist(self.m2) / (0.5 * self.v0.dist(self.v3))
    }

    /// Relative deviation of `c2` from the diametral circle of `v0v2`.
    pub fn c2_contact(&self) -> f64 {
        contact_residual(self.v0, self.v2, self.c2)
    }

    /// Relative deviation of `c4` from the diametral circle of `v0v1`.
    pub fn c4_contact(&self) -> f64 {
        contact_residual(self.v0, self.v1, self.c4)
    }

    /// Smallest angle of the final skinny triangle `v0v3m1`.
    pub fn final_min_angle(&self) -> f64 {
        geom::min_angle(self.v0, self.v3, self.m1).expect("non-degenerate")
    }

    /// The same construction under a similarity transform.
    pub fn transformed(&self, motion: &RigidMotion) -> ConstructionResult {
        self.map_points(|p| motion.apply(p))
    }

    /// Reflection across the line through `v0` and `v1`.
    pub fn mirrored(&self) -> ConstructionResult {
        self.map_points(|p| Point2::new(p.x, -p.y))
    }

    fn map_points(&self, f: impl Fn(Point2) -> Point2) -> ConstructionResult {
        ConstructionResult {
            v0: f(self.v0),
            v1: f(self.v1),
            v2: f(self.v2),
            v3: f(self.v3),
            v4: f(self.v4),
            c1: f(self.c1),
            c2: f(self.c2),
            c3: f(self.c3),
            c4: f(self.c4),
            m0: self.m0.map(&f),
            m1: f(self.m1),
            m2: f(self.m2),
            m3: f(self.m3),
            pslg: self.pslg.map_points(&f),
            ..self.clone()
        }
    }
}

fn contact_residual(a: Point2, b: Point2, p: Point2) -> f64 {
    let r = 0.5 * a.dist(b);
    (p.dist(a.midpoint(b)) - r).abs() / r
}

/// Example 1: `v4` below `v1` with a right angle at `v1` and angle `gamma1`
/// at `v4`.
pub fn construct_example1(gamma1: f64) -> Result<ConstructionResult, ConstructionError> {
    check_gamma1(gamma1)?;
    let v1 = Point2::new(1.0, 0.0);
    let v4 = Point2::new(1.0, -1.0 / gamma1.to_radians().tan());
    let c1 = geom::circumcenter(Point2::ORIGIN, v1, v4)?;
    build(Example::One, gamma1, v4, c1, None)
}

/// Example 2: `v4` at angle `apex` below `v0v1` with angle `gamma1` at `v4`;
/// the midpoint `m0` of segment `v0v4` takes the role of `c1`.
pub fn construct_example2(gamma1: f64, apex: f64) -> Result<ConstructionResult, ConstructionError> {
    check_gamma1(gamma1)?;
    if !(40.0..=90.0).contains(&apex) {
        return Err(ConstructionError::ApexOutOfRange(apex));
    }
    let at_v1 = 180.0 - apex - gamma1;
    if at_v1 < 90.0 {
        return Err(ConstructionError::NoApexEncroachment { angle: at_v1 });
    }
    let len = at_v1.to_radians().sin() / gamma1.to_radians().sin();
    let v4 = Point2::polar(len, -apex);
    let m0 = Point2::ORIGIN.midpoint(v4);
    let c1 = geom::circumcenter(Point2::ORIGIN, Point2::new(1.0, 0.0), v4)?;
    build(Example::Two, gamma1, v4, m0, Some(m0)).map(|r| ConstructionResult { c1, ..r })
}

fn check_gamma1(gamma1: f64) -> Result<(), ConstructionError> {
    if gamma1 > 20.0 && gamma1 < 35.0 {
        Ok(())
    } else {
        Err(ConstructionError::Gamma1OutOfRange(gamma1))
    }
}

fn build(
    example: Example,
    gamma1: f64,
    v4: Point2,
    anchor: Point2,
    m0: Option<Point2>,
) -> Result<ConstructionResult, ConstructionError> {
    let v0 = Point2::ORIGIN;
    let v1 = Point2::new(1.0, 0.0);
    let m3 = v0.midpoint(v1);
    let hub = 135.0 - gamma1;
    let sin45 = std::f64::consts::FRAC_1_SQRT_2;
    let sin_g = gamma1.to_radians().sin();

    // v0·v2·anchor: 45° at the anchor, gamma1 at v2, clockwise of the anchor.
    let v2 = Point2::polar(anchor.norm() * sin45 / sin_g, anchor.angle_deg() - hub);
    let c2 = geom::circumcenter(v0, v2, anchor)?;
    let m1 = v0.midpoint(v2);

    // v0·v1·m2: 45° at m2, gamma1 at v1, on the far side of v0v1 from the anchor.
    let m2 = Point2::polar(sin_g / sin45, hub);
    let c4 = geom::circumcenter(v0, v1, m2)?;
    let v3 = 2.0 * m2;

    let c3 = geom::circumcenter(v0, v3, m1)?;
    let gamma2 = geom::angle_at(v3, v0, m1)?;
    let apex = geom::angle_at(v0, v4, v1)?;

    let mut segments = vec![[0, 1], [0, 2], [0, 3]];
    if example == Example::Two {
        segments.push([0, 4]);
    }
    let pslg = Pslg::new(vec![v0, v1, v2, v3, v4], segments)
        .map_err(|_| ConstructionError::ConstraintViolated { name: "valid PSLG", residual: f64::NAN })?;

    let result = ConstructionResult {
        example,
        v0,
        v1,
        v2,
        v3,
        v4,
        c1: anchor,
        c2,
        c3,
        c4,
        m0,
        m1,
        m2,
        m3,
        gamma1,
        gamma2,
        apex,
        pslg,
    };
    verify(&result)?;
    Ok(result)
}

/// Re-checks the defining constraints on the realized coordinates.
fn verify(r: &ConstructionResult) -> Result<(), ConstructionError> {
    let check = |name, residual: f64, tol: f64| {
        if residual.abs() <= tol {
            Ok(())
        } else {
            Err(ConstructionError::ConstraintViolated { name, residual })
        }
    };
    let deg_tol = 1e-9;
    check("angle v1·v4·v0 = gamma1", geom::angle_at(r.v4, r.v1, r.v0)? - r.gamma1, deg_tol)?;
    match r.example {
        Example::One => check("angle v4·v1·v0 = 90", geom::angle_at(r.v1, r.v4, r.v0)? - 90.0, deg_tol)?,
        Example::Two => {
            let at_v1 = geom::angle_at(r.v1, r.v0, r.v4)?;
            if at_v1 < 90.0 {
                return Err(ConstructionError::NoApexEncroachment { angle: at_v1 });
            }
        }
    }
    let a = r.anchor();
    check("min angle v0·v2·anchor = gamma1", geom::min_angle(r.v0, r.v2, a)? - r.gamma1, deg_tol)?;
    check("min angle v0·v1·m2 = gamma1", geom::min_angle(r.v0, r.v1, r.m2)? - r.gamma1, deg_tol)?;
    check("c2 on diametral circle of v0v2", r.c2_contact(), CONTACT_TOL)?;
    check("c4 on diametral circle of v0v1", r.c4_contact(), CONTACT_TOL)?;
    let side_c4 = geom::orient2d(r.v0, r.v1, r.c4);
    let side_anchor = geom::orient2d(r.v0, r.v1, a);
    if side_c4 == Orientation::Collinear || side_c4 == side_anchor {
        return Err(ConstructionError::ConstraintViolated { name: "c4 opposite the anchor", residual: 0.0 });
    }
    // around v0 counter-clockwise: v1, v3, v2, anchor
    let dir = |p: Point2| (p - r.v0).angle_deg().rem_euclid(360.0);
    let (d3, d2, da) = (dir(r.v3), dir(r.v2), dir(a));
    if !(0.0 < d3 && d3 < d2 && d2 < da) {
        return Err(ConstructionError::ConstraintViolated { name: "cyclic order v1, v3, v2, v4", residual: d2 - d3 });
    }
    Ok(())
}

/// Apex angle of example 2 when none is given.
pub const DEFAULT_APEX: f64 = 60.0;

/// The construction for `example`; `apex` defaults to [`DEFAULT_APEX`] for
/// the second one and is ignored for the first.
pub fn construct(example: Example, gamma1: f64, apex: Option<f64>) -> Result<ConstructionResult, ConstructionError> {
    match example {
        Example::One => construct_example1(gamma1),
        Example::Two => construct_example2(gamma1, apex.unwrap_or(DEFAULT_APEX)),
    }
}

/// Fixed point of `gamma2(gamma1) = gamma1` and the construction there.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Threshold {
    pub gamma_star: f64,
    pub iterations: usize,
    pub result: ConstructionResult,
}

/// Solves `gamma2(gamma1) = gamma1` by bisection to `tol` degrees.
///
/// The bracket is [`SEARCH_BRACKET`], clipped for the second example to the
/// region where `v1` still encroaches `v0v4` (`gamma1 < 90° - apex`).
/// Refinement cycles for every `alpha` above the returned value.
pub fn solve_threshold(example: Example, apex: Option<f64>, tol: f64) -> Result<Threshold, ConstructionError> {
    solve_threshold_in(example, apex, SEARCH_BRACKET, tol)
}

/// [`solve_threshold`] over an explicit bracket.
pub fn solve_threshold_in(
    example: Example,
    apex: Option<f64>,
    bracket: (f64, f64),
    tol: f64,
) -> Result<Threshold, ConstructionError> {
    let (mut lo, mut hi) = bracket;
    if example == Example::Two {
        let apex = apex.unwrap_or(DEFAULT_APEX);
        hi = hi.min(90.0 - apex - 1e-9);
    }
    let g = |x: f64| construct(example, x, apex).map(|r| r.gamma2 - r.gamma1);
    let (g_lo, g_hi) = (g(lo)?, g(hi)?);
    if g_lo.signum() == g_hi.signum() {
        return Err(ConstructionError::NoSignChange { lo, hi, g_lo, g_hi });
    }
    let mut iterations = 0;
    let lo_positive = g_lo > 0.0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid)?;
        if gm == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if (gm > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let gamma_star = 0.5 * (lo + hi);
    let result = construct(example, gamma_star, apex)?;
    Ok(Threshold { gamma_star, iterations, result })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub apex: f64,
    pub threshold: Result<f64, ConstructionError>,
}

/// Second-example thresholds for each apex angle, solved in parallel.
pub fn apex_sweep(apexes: &[f64], tol: f64) -> Vec<SweepRow> {
    std::thread::scope(|s| {
        let handles: Vec<_> = apexes
            .iter()
            .map(|&apex| s.spawn(move || solve_threshold(Example::Two, Some(apex), tol).map(|t| t.gamma_star)))
            .collect();
        apexes
            .iter()
            .zip(handles)
            .map(|(&apex, h)| SweepRow { apex, threshold: h.join().expect("solver thread panicked") })
            .collect()
    })
}

/// Whether sweep thresholds increase strictly with apex (rows sorted by apex,
/// failed rows ignored).
pub fn is_monotone_increasing(rows: &[SweepRow]) -> bool {
    let mut ok: Vec<(f64, f64)> = rows.iter().filter_map(|r| r.threshold.as_ref().ok().map(|&g| (r.apex, g))).collect();
    ok.sort_by(|a, b| a.0.total_cmp(&b.0));
    ok.windows(2).all(|w| w[1].1 > w[0].1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example1_basic_invariants() {
        let r = construct_example1(29.1).unwrap();
        assert!((geom::angle_at(r.v1, r.v4, r.v0).unwrap() - 90.0).abs() < 1e-9);
        assert!(r.c1.dist(r.v0.midpoint(r.v4)) < 1e-15);
        assert!(r.m0.is_none());
        assert_eq!(r.pslg.segments.len(), 3);
        assert!(r.v4.y < 0.0 && r.v3.y > 0.0);
    }

    #[test]
    fn example2_rejects_non_obtuse_v1() {
        // 180 - 65 - 29 = 86
        assert!(matches!(construct_example2(29.0, 65.0), Err(ConstructionError::NoApexEncroachment { .. })));
        let r = construct_example2(29.06, 60.0).unwrap();
        let at_v1 = geom::angle_at(r.v1, r.v0, r.v4).unwrap();
        assert!((at_v1 - 90.94).abs() < 1e-9);
        assert!((r.apex - 60.0).abs() < 1e-9);
        assert_eq!(r.m0, Some(r.v0.midpoint(r.v4)));
    }

    #[test]
    fn parameter_ranges() {
        assert!(matches!(construct_example1(20.0), Err(ConstructionError::Gamma1OutOfRange(_))));
        assert!(matches!(construct_example1(35.0), Err(ConstructionError::Gamma1OutOfRange(_))));
        assert!(matches!(construct_example2(29.0, 39.0), Err(ConstructionError::ApexOutOfRange(_))));
    }

    #[test]
    fn mirror_flips_chirality() {
        let r = construct_example1(29.1).unwrap();
        let m = r.mirrored();
        assert_eq!(m.v4.y, -r.v4.y);
        assert_eq!(m.gamma2, r.gamma2);
        assert_eq!(m.pslg.vertices[3], m.v3);
    }

    #[test]
    fn solver_reports_missing_sign_change() {
        let err = solve_threshold_in(Example::One, None, (25.0, 26.0), 1e-6).unwrap_err();
        match err {
            ConstructionError::NoSignChange { g_lo, g_hi, .. } => assert!(g_lo > 0.0 && g_hi > 0.0),
            e => panic!("unexpected {e}"),
        }
    }
}
