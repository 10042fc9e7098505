//! The constructions checked against an independent numeric rebuild: every
//! "place X such that angle/contact holds" step is solved by bisection on
//! raw geometry instead of the closed forms the library uses.

use ruppert_core::construction::{self, ConstructionResult, Example, CONTACT_TOL};
use ruppert_core::geom::{self, Point2, Segment};

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let (flo, fhi) = (f(lo), f(hi));
    assert!(flo.signum() != fhi.signum(), "no sign change on [{lo}, {hi}]: {flo} {fhi}");
    for _ in 0..90 {
        let mid = 0.5 * (lo + hi);
        if f(mid).signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn angle(apex: Point2, p: Point2, q: Point2) -> f64 {
    geom::angle_at(apex, p, q).unwrap()
}

struct Oracle {
    v2: Point2,
    v3: Point2,
    v4: Point2,
    gamma2: f64,
}

/// Vertex on the ray at `dir_deg` from the origin whose triangle with the
/// origin and `anchor` has a right-isosceles circumcenter over the origin
/// side, i.e. a 45 degree angle at `anchor`.
fn contact_point(dir_deg: f64, anchor: Point2) -> Point2 {
    let r = bisect(1e-6, 1e3, |r| angle(anchor, Point2::ORIGIN, Point2::polar(r, dir_deg)) - 45.0);
    Point2::polar(r, dir_deg)
}

fn oracle(example: Example, gamma1: f64, apex: f64) -> Oracle {
    let o = Point2::ORIGIN;
    let v1 = Point2::new(1.0, 0.0);
    let v4 = match example {
        // right angle at v1, gamma1 at v4
        Example::One => {
            let t = bisect(1e-6, 1e3, |t| angle(Point2::new(1.0, -t), v1, o) - gamma1);
            Point2::new(1.0, -t)
        }
        // apex at v0 below v0v1, gamma1 at v4
        Example::Two => {
            let r = bisect(1e-6, 1e3, |r| gamma1 - angle(Point2::polar(r, -apex), v1, o));
            Point2::polar(r, -apex)
        }
    };
    let anchor = match example {
        Example::One => geom::circumcenter(o, v1, v4).unwrap(),
        Example::Two => v4.midpoint(o),
    };
    // v2 clockwise of the anchor, c2 on the circle of v0v2, gamma1 at v2
    let base = anchor.angle_deg();
    let turn = bisect(1.0, 134.0, |t| {
        let v2 = contact_point(base - t, anchor);
        angle(v2, o, anchor) - gamma1
    });
    let v2 = contact_point(base - turn, anchor);
    // m2 above v0v1, c4 on the circle of v0v1, gamma1 at v1
    let phi = bisect(46.0, 134.0, |phi| {
        let m2 = contact_point_from(phi, v1);
        gamma1 - angle(v1, o, m2)
    });
    let m2 = contact_point_from(phi, v1);
    let v3 = 2.0 * m2;
    let m1 = v2.midpoint(o);
    Oracle { v2, v3, v4, gamma2: angle(v3, o, m1) }
}

/// Like [`contact_point`] with the 45 degree angle at the new vertex instead.
fn contact_point_from(dir_deg: f64, v1: Point2) -> Point2 {
    let r = bisect(1e-6, 1e3, |r| 45.0 - angle(Point2::polar(r, dir_deg), Point2::ORIGIN, v1));
    Point2::polar(r, dir_deg)
}

fn close(a: Point2, b: Point2, tol: f64) -> bool {
    a.dist(b) <= tol * a.norm().max(b.norm()).max(1.0)
}

#[test]
fn example1_matches_oracle_at_27_degrees() {
    let r = construction::construct(Example::One, 27.0, None).unwrap();
    let o = oracle(Example::One, 27.0, 0.0);
    assert!(close(r.v2, o.v2, 1e-9), "{} vs {}", r.v2, o.v2);
    assert!(close(r.v3, o.v3, 1e-9), "{} vs {}", r.v3, o.v3);
    assert!(close(r.v4, o.v4, 1e-9), "{} vs {}", r.v4, o.v4);
    assert!((r.gamma2 - o.gamma2).abs() < 1e-9, "{} vs {}", r.gamma2, o.gamma2);
    // frozen from the oracle
    assert!((r.gamma2 - GAMMA2_AT_27).abs() < 1e-9, "{}", r.gamma2);
}

const GAMMA2_AT_27: f64 = 36.378_963_656_275_74;

#[test]
fn example2_matches_oracle() {
    for (g, apex) in [(27.0, 60.0), (28.5, 51.0), (29.5, 45.0)] {
        let r = construction::construct(Example::Two, g, Some(apex)).unwrap();
        let o = oracle(Example::Two, g, apex);
        assert!(close(r.v2, o.v2, 1e-9), "{g} {apex}: {} vs {}", r.v2, o.v2);
        assert!(close(r.v3, o.v3, 1e-9), "{g} {apex}: {} vs {}", r.v3, o.v3);
        assert!(close(r.v4, o.v4, 1e-9), "{g} {apex}: {} vs {}", r.v4, o.v4);
        assert!((r.gamma2 - o.gamma2).abs() < 1e-9);
    }
}

#[test]
fn thresholds_match_oracle_fixed_point() {
    for (example, apex) in [(Example::One, 0.0), (Example::Two, 60.0), (Example::Two, 45.0)] {
        let star = bisect(25.0, 29.9, |g| oracle(example, g, apex).gamma2 - g);
        let th = construction::solve_threshold(example, (example == Example::Two).then_some(apex), 1e-10).unwrap();
        assert!((th.gamma_star - star).abs() < 1e-8, "{example:?} {apex}: {} vs {star}", th.gamma_star);
    }
}

fn both(gamma1: f64) -> [ConstructionResult; 2] {
    [
        construction::construct(Example::One, gamma1, None).unwrap(),
        construction::construct(Example::Two, gamma1, Some(60.0)).unwrap(),
    ]
}

#[test]
fn midpoints_are_exactly_half_scale() {
    for k in 0..=30 {
        let g = 27.0 + 0.1 * k as f64;
        for r in both(g) {
            let pairs = [(r.m3, r.v1), (r.m1, r.v2), (r.m2, r.v3), (r.anchor(), r.v4)];
            for (half, full) in pairs {
                let want = 0.5 * (full - r.v0) + r.v0;
                assert!(close(half, want, 1e-12), "{:?} at {g}: {half} vs {want}", r.example);
            }
        }
    }
}

#[test]
fn contacts_are_on_the_circles_and_c3_is_inside() {
    for k in 0..=50 {
        let g = 25.0 + 0.1 * k as f64;
        for r in both(g) {
            assert!(r.c2_contact().abs() <= CONTACT_TOL, "{g}: c2 {}", r.c2_contact());
            assert!(r.c4_contact().abs() <= CONTACT_TOL, "{g}: c4 {}", r.c4_contact());
            assert!(r.c3_margin() > 0.0, "{g}: c3 margin {}", r.c3_margin());
            let s = Segment::new(r.v0, r.v3).unwrap();
            assert!(geom::in_diametral_circle(&s, r.c3, 0.0));
            // c4 on the far side of v0v1 from c1
            assert!(r.c4.y * r.c1.y < 0.0);
        }
    }
}

#[test]
fn published_values_example1() {
    let th = construction::solve_threshold(Example::One, None, 1e-6).unwrap();
    assert!((29.08..=29.12).contains(&th.gamma_star), "{}", th.gamma_star);
    assert!((th.result.hub_angle() - 87.3).abs() <= 0.1, "{}", th.result.hub_angle());
    assert!((th.result.min_input_angle() - th.result.hub_angle()).abs() < 1e-9);
}

#[test]
fn published_values_example2_at_sixty() {
    let th = construction::solve_threshold(Example::Two, Some(60.0), 1e-6).unwrap();
    assert!((29.04..=29.08).contains(&th.gamma_star), "{}", th.gamma_star);
}

#[test]
fn sweep_is_monotone_and_rejects_right_apex() {
    let rows = construction::apex_sweep(&[45.0, 51.0, 60.0], 1e-6);
    assert!(construction::is_monotone_increasing(&rows));
    assert!(rows.iter().all(|r| r.threshold.is_ok()));
    let right = construction::solve_threshold(Example::Two, Some(90.0), 1e-6);
    assert!(right.is_err());
}

#[test]
fn rigid_motion_preserves_angles() {
    let r = construction::construct(Example::One, 28.0, None).unwrap();
    let m = geom::RigidMotion::new(33.0, 2.5, Point2::new(-4.0, 7.0));
    let t = r.transformed(&m);
    assert!((t.hub_angle() - r.hub_angle()).abs() < 1e-9);
    assert!((t.c3_margin() - r.c3_margin()).abs() < 1e-9);
    let mirrored = r.mirrored();
    assert!((mirrored.hub_angle() - r.hub_angle()).abs() < 1e-12);
}

#[test]
fn gamma2_is_the_smallest_angle_of_the_last_triangle() {
    for k in 0..=50 {
        for r in both(25.0 + 0.1 * k as f64) {
            assert!(
                (r.final_min_angle() - r.gamma2).abs() < 1e-9,
                "gamma1 {}: {} vs {}",
                r.gamma1,
                r.final_min_angle(),
                r.gamma2
            );
        }
    }
}
