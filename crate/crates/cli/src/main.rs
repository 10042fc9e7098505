//! `ruppert`: build the non-termination counterexamples, solve for their
//! thresholds, refine PSLGs and check refinement traces for self-similar
//! cycles.
//!
//! Exit codes: 0 success (or refinement terminated), 10 refinement stopped on
//! a detected self-similar cycle, 11 insertion budget exhausted, 2 bad input,
//! 1 anything else.
//!
//! The environment variable `RUPPERT_SEED` is reserved and currently ignored:
//! every command is deterministic.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use ruppert_core::analysis::{self, ExpectedCycle};
use ruppert_core::construction::{self, ConstructionError, ConstructionResult, Example};
use ruppert_core::io::{self, IoError};
use ruppert_core::refine::{QueuePolicy, RefineError, RefinementConfig, Refiner, Status};
use ruppert_core::Triangulation;
use serde_json::json;

const EXIT_CYCLE: u8 = 10;
const EXIT_BUDGET: u8 = 11;
const EXIT_INPUT: u8 = 2;

#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct InputError(String);

#[derive(Parser)]
#[command(name = "ruppert", version, about = "Ruppert refinement non-termination toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Queue {
    Worst,
    Fifo,
}

#[derive(Subcommand)]
enum Command {
    /// Build a counterexample PSLG and report its geometry.
    Construct {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        example: u8,
        /// First skinny angle in degrees.
        #[arg(long, required_unless_present = "at_fixed_point", conflicts_with = "at_fixed_point")]
        gamma1: Option<f64>,
        /// Angle at v0 between v0v1 and v0v4 (example 2 only; default 60).
        #[arg(long)]
        apex: Option<f64>,
        /// Use the threshold angle for gamma1.
        #[arg(long)]
        at_fixed_point: bool,
        /// Reflect the construction across the x-axis.
        #[arg(long)]
        mirror: bool,
        /// Write the PSLG as a .poly file.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Refine a .poly PSLG.
    Refine {
        input: PathBuf,
        /// Minimum angle in degrees.
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        max_insertions: usize,
        #[arg(long, value_enum, default_value = "worst")]
        queue: Queue,
        /// Write the event trace as JSON lines.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write an SVG snapshot every K insertions (plus the final mesh).
        #[arg(long, value_name = "K")]
        svg_every: Option<usize>,
        #[arg(long, default_value = ".")]
        svg_dir: PathBuf,
        /// Stop with exit code 10 once this many self-similar cycles repeat.
        #[arg(long, value_name = "CYCLES")]
        detect_cycles: Option<usize>,
    },
    /// Bisect for the threshold angle of a construction.
    Solve {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        example: u8,
        #[arg(long)]
        apex: Option<f64>,
        /// Bisection tolerance in degrees.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long)]
        json: bool,
    },
    /// Thresholds of example 2 across apex angles.
    Sweep {
        #[arg(long, value_delimiter = ',', required = true)]
        apexes: Vec<f64>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long)]
        json: bool,
    },
    /// Construct at the threshold, refine just above it and check the cycle.
    Verify {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        example: u8,
        #[arg(long)]
        apex: Option<f64>,
        /// Cycles that must conform.
        #[arg(long, default_value_t = 10)]
        cycles: usize,
        /// Refine at alpha = threshold + this many degrees.
        #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
        alpha_offset: f64,
        #[arg(long, default_value_t = 20_000)]
        max_insertions: usize,
        #[arg(long)]
        trace: Option<PathBuf>,
        /// SVG of the mesh after the first cycle.
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(if is_input_error(&err) { EXIT_INPUT } else { 1 })
        }
    }
}

fn is_input_error(err: &anyhow::Error) -> bool {
    err.chain().any(|e| {
        e.is::<InputError>()
            || e.is::<IoError>()
            || matches!(
                e.downcast_ref::<ConstructionError>(),
                Some(ConstructionError::Gamma1OutOfRange(_) | ConstructionError::ApexOutOfRange(_))
            )
            || matches!(e.downcast_ref::<RefineError>(), Some(RefineError::Config(_)))
    })
}

fn example(n: u8) -> Example {
    Example::from_number(n).expect("clap restricts the range")
}

fn apex_for(ex: Example, apex: Option<f64>) -> Result<Option<f64>> {
    match (ex, apex) {
        (Example::One, Some(_)) => Err(InputError("--apex only applies to example 2".into()).into()),
        (Example::One, None) => Ok(None),
        (Example::Two, a) => Ok(Some(a.unwrap_or(construction::DEFAULT_APEX))),
    }
}

fn run(cmd: Command) -> Result<u8> {
    match cmd {
        Command::Construct { example: n, gamma1, apex, at_fixed_point, mirror, output, json } => {
            let ex = example(n);
            let apex = apex_for(ex, apex)?;
            let mut r = if at_fixed_point {
                construction::solve_threshold(ex, apex, 1e-12)?.result
            } else {
                construction::construct(ex, gamma1.expect("clap requires gamma1"), apex)?
            };
            if mirror {
                r = r.mirrored();
            }
            if let Some(path) = &output {
                io::write_poly(&r.pslg, path)?;
            }
            if json {
                println!("{}", serde_json::to_string_pretty(&construction_json(&r))?);
            } else {
                print_construction(&r);
                if let Some(path) = &output {
                    println!("wrote {}", path.display());
                }
            }
            Ok(0)
        }
        Command::Refine { input, alpha, max_insertions, queue, trace, svg_every, svg_dir, detect_cycles } => {
            let pslg = io::read_poly(&input)?;
            let cfg = RefinementConfig {
                alpha,
                max_insertions,
                queue_policy: match queue {
                    Queue::Worst => QueuePolicy::WorstAngleFirst,
                    Queue::Fifo => QueuePolicy::Fifo,
                },
                cycle_detection: detect_cycles.is_some(),
                min_cycles: detect_cycles.unwrap_or(3),
                ..Default::default()
            };
            cfg.validate()?;
            if svg_every == Some(0) {
                bail!(InputError("--svg-every must be positive".into()));
            }
            let mesh = Triangulation::new(&pslg).map_err(IoError::from)?;
            let mut snapshots = Vec::new();
            let mut count = 0usize;
            let result = Refiner::from_mesh(mesh, cfg).run_observed(|mesh, events| {
                count += 1;
                if let Some(k) = svg_every {
                    if count.is_multiple_of(k) {
                        let path = svg_dir.join(format!("refine-{count:06}.svg"));
                        let overlays = io::overlays_from_trace(&events[events.len() - 1..]);
                        snapshots.push(io::render_svg(mesh, &overlays, &path).map(|_| path));
                    }
                }
            });
            for s in snapshots {
                s?;
            }
            let out = match result {
                Ok(out) => out,
                Err(RefineError::Mesh { source, trace: partial }) => {
                    if let Some(path) = &trace {
                        io::write_trace(&partial, path)?;
                    }
                    return Err(RefineError::Mesh { source, trace: partial })
                        .context("refinement aborted; partial trace written if requested");
                }
                Err(e) => return Err(e.into()),
            };
            if let Some(path) = &trace {
                io::write_trace(&out.trace, path)?;
            }
            if svg_every.is_some() {
                io::render_svg(&out.mesh, &[], &svg_dir.join("refine-final.svg"))?;
            }
            println!("status: {:?}", out.status);
            println!("insertions: {}", out.insertions);
            println!("trace events: {}", out.trace.len());
            println!("triangles: {}", out.mesh.num_triangles());
            if out.skipped > 0 {
                println!("skipped (circumcenter outside hull): {}", out.skipped);
            }
            if let Some(c) = &out.cycle_report {
                print_cycle(c);
            }
            Ok(status_code(out.status))
        }
        Command::Solve { example: n, apex, tol, json } => {
            let ex = example(n);
            let apex = apex_for(ex, apex)?;
            let th = construction::solve_threshold(ex, apex, tol)?;
            if json {
                let v = json!({
                    "example": n,
                    "apex": apex,
                    "gamma_star": th.gamma_star,
                    "iterations": th.iterations,
                    "tol": tol,
                });
                println!("{}", serde_json::to_string_pretty(&v)?);
            } else {
                match apex {
                    Some(a) => println!("example {n}, apex {a} deg"),
                    None => println!("example {n}"),
                }
                println!("gamma* = {:.9} deg ({} bisection steps, tol {tol:e} deg)", th.gamma_star, th.iterations);
                println!("refinement cycles for alpha > gamma*");
            }
            Ok(0)
        }
        Command::Sweep { apexes, tol, json } => {
            let rows = construction::apex_sweep(&apexes, tol);
            let monotone = construction::is_monotone_increasing(&rows);
            if json {
                let rows: Vec<_> = rows
                    .iter()
                    .map(|r| match &r.threshold {
                        Ok(g) => json!({"apex": r.apex, "gamma_star": g}),
                        Err(e) => json!({"apex": r.apex, "error": e.to_string()}),
                    })
                    .collect();
                println!("{}", serde_json::to_string_pretty(&json!({"rows": rows, "monotone": monotone}))?);
            } else {
                println!("{:>10}  {:>14}", "apex", "gamma*");
                for r in &rows {
                    match &r.threshold {
                        Ok(g) => println!("{:>10.4}  {:>14.9}", r.apex, g),
                        Err(e) => println!("{:>10.4}  infeasible: {e}", r.apex),
                    }
                }
                println!("monotone increasing in apex: {}", if monotone { "yes" } else { "no" });
            }
            Ok(if rows.iter().all(|r| r.threshold.is_ok()) { 0 } else { 1 })
        }
        Command::Verify { example: n, apex, cycles, alpha_offset, max_insertions, trace, svg, json } => {
            let ex = example(n);
            let apex = apex_for(ex, apex)?;
            if cycles < 3 {
                bail!(InputError("--cycles must be at least 3".into()));
            }
            verify(ex, apex, cycles, alpha_offset, max_insertions, trace.as_deref(), svg.as_deref(), json)
        }
    }
}

fn status_code(status: Status) -> u8 {
    match status {
        Status::Terminated => 0,
        Status::NonTerminationDetected => EXIT_CYCLE,
        Status::BudgetExhausted => EXIT_BUDGET,
    }
}

#[allow(clippy::too_many_arguments)]
fn verify(
    ex: Example,
    apex: Option<f64>,
    cycles: usize,
    alpha_offset: f64,
    max_insertions: usize,
    trace_path: Option<&Path>,
    svg_path: Option<&Path>,
    json: bool,
) -> Result<u8> {
    let th = construction::solve_threshold(ex, apex, 1e-10)?;
    let r = &th.result;
    let alpha = th.gamma_star + alpha_offset;
    let cfg =
        RefinementConfig { alpha, max_insertions, cycle_detection: true, min_cycles: cycles, ..Default::default() };
    let out = ruppert_core::refine(&r.pslg, &cfg)?;
    if let Some(path) = trace_path {
        io::write_trace(&out.trace, path)?;
    }

    let template = ExpectedCycle::from_construction(r);
    let seq = analysis::match_expected_sequence(&out.trace, &template, cycles);
    let sim = analysis::detect_self_similarity(&out.trace, analysis::DEFAULT_SIMILARITY_TOL);
    let unit = r.v1.dist(r.v0);
    let similar = sim.as_ref().is_some_and(|c| {
        (c.scale_factor - 0.5).abs() <= 1e-9 && c.center.dist(r.v0) <= 1e-9 * unit && c.cycles_observed >= cycles
    });
    let consistent = seq.conforms() && similar && out.status == Status::NonTerminationDetected;
    let verdict = if consistent { "consistent with non-termination" } else { "not consistent with the designed cycle" };

    if let Some(path) = svg_path {
        let pattern_len = template.pattern().len();
        let first: Vec<_> =
            analysis::hub_events(&out.trace, r.v0).into_iter().take(pattern_len).map(|(i, _)| i).collect();
        let upto = first.last().map_or(0, |&i| i + 1);
        let replay = RefinementConfig { max_insertions: usize::MAX, cycle_detection: false, ..cfg.clone() };
        let mesh = replay_until(r, &replay, upto)?;
        let overlays: Vec<_> = first.iter().flat_map(|&i| io::overlays_from_trace(&out.trace[i..=i])).collect();
        io::render_svg(&mesh, &overlays, path)?;
    }

    if json {
        let v = json!({
            "example": ex.number(),
            "apex": apex,
            "gamma_star": th.gamma_star,
            "alpha": alpha,
            "status": format!("{:?}", out.status),
            "insertions": out.insertions,
            "trace_events": out.trace.len(),
            "sequence": seq,
            "similarity": sim,
            "precision_horizon": analysis::precision_horizon(&out.trace),
            "verdict": verdict,
        });
        println!("{}", serde_json::to_string_pretty(&v)?);
    } else {
        match apex {
            Some(a) => println!("example {}, apex {a} deg", ex.number()),
            None => println!("example {}", ex.number()),
        }
        println!("gamma* = {:.9} deg, alpha = {:.9} deg", th.gamma_star, alpha);
        println!("refinement: {:?} after {} insertions ({} events)", out.status, out.insertions, out.trace.len());
        println!("sequence: {}/{} cycles conform", seq.conforming_cycles, seq.cycles_checked);
        if let Some(d) = &seq.first_deviation {
            println!(
                "first deviation at event {} (cycle {}): expected {}, found {}",
                d.event_index, d.cycle, d.expected, d.found
            );
            println!("  context: {}", d.context);
        }
        match &sim {
            Some(c) => print_cycle(c),
            None => println!("similarity: none detected"),
        }
        println!("precision horizon: {} clean cycles", analysis::precision_horizon(&out.trace));
        println!("verdict: {verdict}");
    }
    Ok(if consistent { EXIT_CYCLE } else { status_code(out.status) })
}

/// Mesh state after the first `events` trace events of a fresh refinement.
fn replay_until(r: &ConstructionResult, cfg: &RefinementConfig, events: usize) -> Result<Triangulation> {
    let mesh = Triangulation::new(&r.pslg)?;
    let mut snapshot = None;
    let mut probe = cfg.clone();
    probe.max_insertions = events.max(1);
    let out = Refiner::from_mesh(mesh, probe).run_observed(|m, trace| {
        if snapshot.is_none() && trace.len() >= events {
            snapshot = Some(m.clone());
        }
    })?;
    Ok(snapshot.unwrap_or(out.mesh))
}

fn print_cycle(c: &analysis::CycleReport) {
    println!(
        "similarity: period {}, scale {:.12}, center ({:.3e}, {:.3e}), {} cycles, max deviation {:.2e}",
        c.period, c.scale_factor, c.center.x, c.center.y, c.cycles_observed, c.max_deviation
    );
}

fn construction_json(r: &ConstructionResult) -> serde_json::Value {
    json!({
        "construction": r,
        "input_angles": r.input_angles(),
        "min_input_angle": r.min_input_angle(),
        "hub_angle": r.hub_angle(),
        "c2_contact": r.c2_contact(),
        "c3_margin": r.c3_margin(),
        "c4_contact": r.c4_contact(),
        "final_min_angle": r.final_min_angle(),
    })
}

fn print_construction(r: &ConstructionResult) {
    println!("example {}, gamma1 = {:.9} deg, gamma2 = {:.9} deg", r.example.number(), r.gamma1, r.gamma2);
    if r.example == Example::Two {
        println!("apex = {} deg", r.apex);
    }
    for (name, p) in [("v0", r.v0), ("v1", r.v1), ("v2", r.v2), ("v3", r.v3), ("v4", r.v4)] {
        println!("{name} = ({:.12}, {:.12})", p.x, p.y);
    }
    for (name, p) in [("c1", r.c1), ("c2", r.c2), ("c3", r.c3), ("c4", r.c4), ("m1", r.m1), ("m2", r.m2), ("m3", r.m3)]
    {
        println!("{name} = ({:.12}, {:.12})", p.x, p.y);
    }
    if let Some(m0) = r.m0 {
        println!("m0 = ({:.12}, {:.12})", m0.x, m0.y);
    }
    println!("min input angle = {:.6} deg (v2 v0 v3 = {:.6} deg)", r.min_input_angle(), r.hub_angle());
    println!("c2 contact with circle of v0v2 = {:.3e}", r.c2_contact());
    println!("c4 contact with circle of v0v1 = {:.3e}", r.c4_contact());
    println!("c3 margin inside circle of v0v3 = {:.6}", r.c3_margin());
}
