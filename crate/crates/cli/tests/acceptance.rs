//! Acceptance checks, one PASS/FAIL line per criterion. Runs the `ruppert`
//! binary where a criterion names a command and the library otherwise.
//!
//! Criteria listed in `KNOWN_RED` are expected to fail (see the README); the
//! process exits nonzero only when any other criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestError, TestRunner};
use ruppert_core::analysis;
use ruppert_core::construction::{self, Example, CONTACT_TOL};
use ruppert_core::geom::{self, Orientation, Point2, RigidMotion};
use ruppert_core::io;
use ruppert_core::refine::{self, EventKind, RefinementConfig, Status};
use ruppert_core::{Pslg, Triangulation};
use serde_json::Value;

const KNOWN_RED: &[usize] = &[3];

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ruppert(args: &[&str]) -> (i32, String) {
    let out =
        Command::new(env!("CARGO_BIN_EXE_ruppert")).args(args).env("RUST_LOG", "error").output().expect("run ruppert");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn json(args: &[&str]) -> Result<(i32, Value), String> {
    let (code, stdout) = ruppert(args);
    let v = serde_json::from_str(&stdout).map_err(|e| format!("bad JSON from {args:?}: {e}"))?;
    Ok((code, v))
}

fn num(v: &Value, key: &str) -> Result<f64, String> {
    v[key].as_f64().ok_or_else(|| format!("missing {key}"))
}

fn check(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn c1_fixed_point_example1() -> Outcome {
    let (_, v) = json(&["solve", "--example", "1", "--tol", "1e-6", "--json"])?;
    let g = num(&v, "gamma_star")?;
    check((29.08..=29.12).contains(&g), format!("gamma* = {g:.6} in [29.08, 29.12]"))
}

fn c2_fixed_point_example2() -> Outcome {
    let (_, v) = json(&["solve", "--example", "2", "--apex", "60", "--tol", "1e-6", "--json"])?;
    let g = num(&v, "gamma_star")?;
    check((29.04..=29.08).contains(&g), format!("gamma* = {g:.6} in [29.04, 29.08]"))
}

fn c3_apex_family() -> Outcome {
    let (_, v) = json(&["sweep", "--apexes", "45,51,60", "--json"])?;
    let rows = v["rows"].as_array().ok_or("missing rows")?;
    let expected = [28.00, 28.46, 29.06];
    let mut ok = v["monotone"].as_bool() == Some(true);
    let mut parts = Vec::new();
    for (row, want) in rows.iter().zip(expected) {
        let apex = num(row, "apex")?;
        let g = num(row, "gamma_star")?;
        let hit = (g - want).abs() <= 0.02;
        ok &= hit;
        parts.push(format!("apex {apex}: {g:.4} vs {want:.2}{}", if hit { "" } else { " (off)" }));
    }
    check(ok && rows.len() == 3, format!("{}; monotone {}", parts.join(", "), v["monotone"]))
}

fn c4_input_angle() -> Outcome {
    let (_, v) = json(&["construct", "--example", "1", "--at-fixed-point", "--json"])?;
    let hub = num(&v, "hub_angle")?;
    let min = num(&v, "min_input_angle")?;
    check(
        (hub - 87.3).abs() <= 0.1 && (min - hub).abs() < 1e-9,
        format!("angle v2 v0 v3 = {hub:.4} (min input angle {min:.4})"),
    )
}

fn verify_json(example: &str, extra: &[&str], trace: &Path) -> Result<(i32, Value), String> {
    let mut args = vec!["verify", "--example", example, "--cycles", "10", "--json", "--trace"];
    let t = trace.to_str().unwrap();
    args.push(t);
    args.extend_from_slice(extra);
    json(&args)
}

fn replay_summary(code: i32, v: &Value) -> Result<(bool, String), String> {
    let seq = &v["sequence"];
    let conforming = seq["conforming_cycles"].as_u64().unwrap_or(0);
    let sim = &v["similarity"];
    let scale = sim["scale_factor"].as_f64().unwrap_or(f64::NAN);
    let cx = sim["center"]["x"].as_f64().unwrap_or(f64::NAN);
    let cy = sim["center"]["y"].as_f64().unwrap_or(f64::NAN);
    let ok = code == 10
        && conforming >= 10
        && seq["first_deviation"].is_null()
        && (scale - 0.5).abs() <= 1e-9
        && cx.hypot(cy) <= 1e-9;
    Ok((
        ok,
        format!(
            "exit {code}, {conforming} conforming cycles, scale {scale:.12}, center ({cx:.1e}, {cy:.1e}), verdict: {}",
            v["verdict"].as_str().unwrap_or("?")
        ),
    ))
}

fn c5_replay_example1() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("t.jsonl");
    let (code, v) = verify_json("1", &[], &path)?;
    let (mut ok, msg) = replay_summary(code, &v)?;
    let trace = io::read_trace(&path).map_err(|e| e.to_string())?;
    ok &= trace.first().map(|e| e.kind) == Some(EventKind::InsertCircumcenter);
    check(ok, msg)
}

fn c6_replay_example2() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("t.jsonl");
    let (code, v) = verify_json("2", &["--apex", "60"], &path)?;
    let (mut ok, msg) = replay_summary(code, &v)?;
    let trace = io::read_trace(&path).map_err(|e| e.to_string())?;
    let th = construction::solve_threshold(Example::Two, Some(60.0), 1e-10).map_err(|e| e.to_string())?;
    let r = &th.result;
    let lead = trace.first().is_some_and(|e| e.kind == EventKind::SplitSubsegment && e.segment == Some([r.v0, r.v4]));
    let hub = analysis::hub_events(&trace, r.v0);
    let only_splits = hub.iter().all(|(_, e)| e.kind != EventKind::InsertCircumcenter);
    ok &= lead && only_splits;
    check(ok, format!("{msg}; leading split of v0v4: {lead}; hub cycles insert midpoints only: {only_splits}"))
}

fn c7_half_scale() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 0..=60 {
        let g = 27.0 + 0.05 * k as f64;
        for (ex, apex) in [(Example::One, None), (Example::Two, Some(60.0))] {
            let r = construction::construct(ex, g, apex).map_err(|e| format!("gamma1 {g}: {e}"))?;
            for (half, full) in [(r.m3, r.v1), (r.m1, r.v2), (r.m2, r.v3), (r.anchor(), r.v4)] {
                let want = r.v0 + 0.5 * (full - r.v0);
                worst = worst.max(half.dist(want) / full.dist(r.v0));
            }
        }
    }
    check(worst <= 1e-12, format!("max relative deviation {worst:.1e} over gamma1 in [27, 30]"))
}

fn c8_contacts() -> Outcome {
    let (mut contact, mut margin) = (0.0f64, f64::INFINITY);
    for k in 0..=100 {
        let g = 25.0 + 0.05 * k as f64;
        for (ex, apex) in [(Example::One, None), (Example::Two, Some(60.0))] {
            let r = construction::construct(ex, g, apex).map_err(|e| format!("gamma1 {g}: {e}"))?;
            contact = contact.max(r.c2_contact().abs()).max(r.c4_contact().abs());
            margin = margin.min(r.c3_margin());
        }
    }
    check(
        contact <= CONTACT_TOL && margin > 0.0,
        format!("max contact residual {contact:.1e}, min c3 margin {margin:.4} over gamma1 in [25, 30]"),
    )
}

fn c9_square_terminates() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("square.poly");
    let p = |x, y| Point2::new(x, y);
    let square = Pslg::new(vec![p(0., 0.), p(1., 0.), p(1., 1.), p(0., 1.)], vec![[0, 1], [1, 2], [2, 3], [3, 0]])
        .map_err(|e| e.to_string())?;
    io::write_poly(&square, &path).map_err(|e| e.to_string())?;
    let (code, _) = ruppert(&["refine", path.to_str().unwrap(), "--alpha", "20", "--max-insertions", "10000"]);
    let out = refine::refine(&square, &RefinementConfig::with_alpha(20.0)).map_err(|e| e.to_string())?;
    let min = out
        .mesh
        .triangles()
        .map(|(id, _)| {
            let [a, b, c] = out.mesh.triangle_points(id).unwrap();
            geom::min_angle(a, b, c).unwrap()
        })
        .fold(f64::INFINITY, f64::min);
    let encroached = out.mesh.encroached_subsegments(1e-9).len();
    check(
        code == 0 && out.status == Status::Terminated && min >= 20.0 && encroached == 0,
        format!("exit {code}, {:?}, min angle {min:.3}, {encroached} encroached", out.status),
    )
}

fn brute_force(pts: &[Point2]) -> Vec<[usize; 3]> {
    let n = pts.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if geom::orient2d(pts[i], pts[j], pts[k]) == Orientation::Collinear {
                    continue;
                }
                if (0..n)
                    .filter(|&l| l != i && l != j && l != k)
                    .all(|l| geom::incircle(pts[i], pts[j], pts[k], pts[l]).unwrap() < 0)
                {
                    out.push([i, j, k]);
                }
            }
        }
    }
    out
}

fn suite<T: std::fmt::Debug>(name: &str, r: Result<(), TestError<T>>) -> Result<(), String> {
    r.map_err(|e| format!("{name}: {e}"))
}

fn c10_kernel_properties() -> Outcome {
    let point = || (-1e3..1e3f64, -1e3..1e3f64).prop_map(|(x, y)| Point2::new(x, y));
    let mut runner = TestRunner::new(Config { cases: 500, failure_persistence: None, ..Config::default() });

    let r = runner.run(&(point(), point(), point()), |(a, b, c)| {
        let o = geom::orient2d(a, b, c);
        prop_assert_eq!(geom::orient2d(b, a, c), o.reversed());
        prop_assert_eq!(geom::orient2d(b, c, a), o);
        Ok(())
    });
    suite("antisymmetry", r)?;

    let r = runner.run(&(point(), point(), point()), |(a, b, c)| {
        prop_assume!(geom::min_angle(a, b, c).is_ok_and(|m| m > 1.0));
        let o = geom::circumcenter(a, b, c).unwrap();
        let (ra, rb, rc) = (o.dist(a), o.dist(b), o.dist(c));
        prop_assert!((ra - rb).abs() <= 1e-12 * ra && (ra - rc).abs() <= 1e-12 * ra);
        Ok(())
    });
    suite("equidistance", r)?;

    let motion = (-180.0..180.0f64, 1e-3..1e3f64, point()).prop_map(|(r, s, t)| RigidMotion::new(r, s, t));
    let r = runner.run(&(point(), point(), point(), motion), |(a, b, c, m)| {
        prop_assume!(geom::min_angle(a, b, c).is_ok_and(|m| m > 1.0));
        let before = geom::min_angle(a, b, c).unwrap();
        let after = geom::min_angle(m.apply(a), m.apply(b), m.apply(c)).unwrap();
        prop_assert!((before - after).abs() <= 1e-9);
        Ok(())
    });
    suite("min-angle similarity invariance", r)?;

    let mut oracle_runner = TestRunner::new(Config { cases: 200, failure_persistence: None, ..Config::default() });
    let cloud = prop::collection::vec(point(), 3..=12);
    let r = oracle_runner.run(&cloud, |pts| {
        let mesh = match Pslg::new(pts.clone(), vec![]).map(|p| Triangulation::new(&p)) {
            Ok(Ok(m)) => m,
            _ => return Err(TestCaseError::reject("degenerate cloud")),
        };
        let mut got: Vec<[usize; 3]> = mesh
            .triangles()
            .map(|(_, mut v)| {
                v.sort_unstable();
                v
            })
            .collect();
        got.sort_unstable();
        prop_assert_eq!(got, brute_force(&pts));
        Ok(())
    });
    suite("Delaunay vs brute force", r)?;
    Ok("antisymmetry, equidistance (1e-12), min-angle invariance (1e-9 deg), 200 Delaunay oracle instances".into())
}

fn c11_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (a, b) = (dir.path().join("a.jsonl"), dir.path().join("b.jsonl"));
    for p in [&a, &b] {
        ruppert(&["verify", "--example", "1", "--cycles", "10", "--trace", p.to_str().unwrap()]);
    }
    let (x, y) = (std::fs::read(&a).map_err(|e| e.to_string())?, std::fs::read(&b).map_err(|e| e.to_string())?);
    check(!x.is_empty() && x == y, format!("{} bytes, identical: {}", x.len(), x == y))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("fixed point, example 1", c1_fixed_point_example1),
        ("fixed point, example 2 at apex 60", c2_fixed_point_example2),
        ("apex family 45/51/60", c3_apex_family),
        ("input angle at v0", c4_input_angle),
        ("cycle replay, example 1", c5_replay_example1),
        ("cycle replay, example 2", c6_replay_example2),
        ("exact half scale", c7_half_scale),
        ("boundary contacts and c3 margin", c8_contacts),
        ("unit square terminates at 20 deg", c9_square_terminates),
        ("kernel property suites", c10_kernel_properties),
        ("determinism", c11_determinism),
    ];
    let mut unexpected = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let n = i + 1;
        let start = Instant::now();
        let result = f();
        let secs = start.elapsed().as_secs_f64();
        let known = KNOWN_RED.contains(&n);
        match result {
            Ok(msg) => println!("PASS {n:>2} {name}: {msg} [{secs:.2}s]"),
            Err(msg) => {
                let note = if known { " (known red, see README)" } else { "" };
                println!("FAIL {n:>2} {name}: {msg}{note} [{secs:.2}s]");
                if !known {
                    unexpected += 1;
                }
            }
        }
    }
    if unexpected > 0 {
        std::process::exit(1);
    }
}
