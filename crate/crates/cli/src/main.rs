//! `atsp`: lift DFJ points to MTZ potentials, check points, compute bounds, run suites.
//!
//! Exit codes: 0 ok/feasible, 1 I/O or input error, 2 violation found, 64 bad usage.

use std::fs;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use atsp_core::dfj::{brute_force_optimum, dfj_lp_bound, separation_mincut, MAX_BRUTE_FORCE_N};
use atsp_core::experiments::{compare_instance, run_containment_suite, run_gap_search, InstanceDescriptor};
use atsp_core::instance::{
    check_degrees, parse_tsplib, point_from_tour, random_dfj_point, AtspInstance, FractionalPoint,
};
use atsp_core::lift::{cycle_to_cut, lift_point, LiftResult, NegativeCycle};
use atsp_core::mtz::{mtz_check, mtz_lp_bound, Potentials};
use atsp_core::{Error, Rational, Scalar};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

type Q = Rational;

const EXIT_VIOLATED: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "atsp", version, about = "DFJ/MTZ relaxations of the asymmetric TSP")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lift a point to MTZ potentials, or report the subtour cut that blocks it
    Lift {
        #[arg(long)]
        point: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Check a point against one formulation
    Check {
        #[arg(long)]
        point: PathBuf,
        #[arg(long, value_enum)]
        formulation: Formulation,
        /// Potentials to check (mtz only); lifted from the point when omitted
        #[arg(long)]
        u: Option<PathBuf>,
    },
    /// Optimal value and optimizer of a relaxation, or the integer optimum
    Bound {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum)]
        formulation: BoundKind,
    },
    /// Both relaxation bounds, the integer optimum for n <= 10, and their ordering
    Compare {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Run a batch experiment and write its JSON report
    Suite {
        #[arg(long, value_enum)]
        mode: Mode,
        /// Inclusive size range, `A..B` or a single `N`
        #[arg(long, value_parser = parse_range)]
        n: RangeInclusive<usize>,
        #[arg(long)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Report file; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit a random convex combination of tours as point JSON
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        tours: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Formulation {
    Dfj,
    Mtz,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundKind {
    Dfj,
    Mtz,
    Ip,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Containment,
    Gap,
}

fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let bad = || format!("expected A..B or N, got {s:?}");
    match s.split_once("..") {
        Some((a, b)) => {
            let a: usize = a.trim().parse().map_err(|_| bad())?;
            let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
            if a > b {
                return Err(format!("empty range {s:?}"));
            }
            Ok(a..=b)
        }
        None => s.trim().parse().map(|n| n..=n).map_err(|_| bad()),
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_point(path: &Path) -> anyhow::Result<FractionalPoint<Q>> {
    serde_json::from_str(&read(path)?).with_context(|| format!("parsing point {}", path.display()))
}

fn read_instance(path: &Path) -> anyhow::Result<AtspInstance<Q>> {
    parse_tsplib(&read(path)?).with_context(|| format!("parsing instance {}", path.display()))
}

fn render_list(values: &[Q]) -> String {
    let parts: Vec<String> = values.iter().map(Scalar::render).collect();
    format!("[{}]", parts.join(", "))
}

fn json<T: Serialize>(v: &T) -> anyhow::Result<String> {
    Ok(serde_json::to_string(v)?)
}

#[derive(Serialize)]
struct CycleReport<'a> {
    cycle: Vec<usize>,
    weight: String,
    cut: &'a atsp_core::dfj::CutCertificate<Q>,
}

fn report_cycle(p: &FractionalPoint<Q>, c: &NegativeCycle<Q>, as_json: bool) -> anyhow::Result<u8> {
    let cut = cycle_to_cut(p, &c.nodes)?;
    if as_json {
        println!(
            "{}",
            json(&CycleReport {
                cycle: c.closed(),
                weight: c.weight.render(),
                cut: &cut
            })?
        );
    } else {
        println!("negative cycle {c}");
        let q: Vec<String> = cut.q().iter().map(ToString::to_string).collect();
        println!("cut Q={{{}}} violation {}", q.join(","), cut.violation().render());
    }
    Ok(EXIT_VIOLATED)
}

fn lift(point: &Path, as_json: bool) -> anyhow::Result<u8> {
    let p = read_point(point)?;
    match lift_point(&p) {
        LiftResult::Potentials(u) => {
            if as_json {
                println!("{}", json(&u)?);
            } else {
                println!("u = {}", render_list(u.values()));
            }
            Ok(0)
        }
        LiftResult::NegativeCycle(c) => report_cycle(&p, &c, as_json),
    }
}

fn degree_failure(p: &FractionalPoint<Q>) -> Option<String> {
    if check_degrees(p) {
        return None;
    }
    let n = p.n();
    for v in 1..=n {
        let mut out = Q::from_i64(0);
        let mut inc = Q::from_i64(0);
        for w in (1..=n).filter(|&w| w != v) {
            out += p.get(v, w);
            inc += p.get(w, v);
        }
        if out != Q::from_i64(1) || inc != Q::from_i64(1) {
            return Some(format!(
                "degree violated at node {v}: out {} in {}",
                out.render(),
                inc.render()
            ));
        }
    }
    Some("degree constraints violated".into())
}

fn check(point: &Path, formulation: Formulation, u: Option<&Path>) -> anyhow::Result<u8> {
    if u.is_some() && matches!(formulation, Formulation::Dfj) {
        bail!("--u applies to --formulation mtz only");
    }
    let p = read_point(point)?;
    let potentials: Option<Potentials<Q>> = match u {
        Some(path) => {
            Some(serde_json::from_str(&read(path)?).with_context(|| format!("parsing potentials {}", path.display()))?)
        }
        None => None,
    };
    if let Some(msg) = degree_failure(&p) {
        println!("{msg}");
        return Ok(EXIT_VIOLATED);
    }
    match formulation {
        Formulation::Dfj => match separation_mincut(&p)? {
            None => {
                println!("feasible");
                Ok(0)
            }
            Some(cut) => {
                println!("violated: {cut}");
                Ok(EXIT_VIOLATED)
            }
        },
        Formulation::Mtz => {
            let u = match potentials {
                Some(u) => u,
                None => match lift_point(&p) {
                    LiftResult::Potentials(u) => u,
                    LiftResult::NegativeCycle(c) => {
                        println!("violated: no potentials exist");
                        return report_cycle(&p, &c, false);
                    }
                },
            };
            match mtz_check(&p, &u)? {
                None => {
                    println!("feasible: u = {}", render_list(u.values()));
                    Ok(0)
                }
                Some(v) => {
                    println!("violated: arc ({}, {}) slack {}", v.i, v.j, v.slack.render());
                    Ok(EXIT_VIOLATED)
                }
            }
        }
    }
}

#[derive(Serialize)]
struct BoundReport {
    formulation: &'static str,
    value: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    point: Option<FractionalPoint<Q>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    potentials: Option<Potentials<Q>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tour: Option<Vec<usize>>,
}

fn bound(instance: &Path, kind: BoundKind) -> anyhow::Result<u8> {
    let inst = read_instance(instance)?;
    let report = match kind {
        BoundKind::Dfj => {
            let b = dfj_lp_bound(&inst)?;
            BoundReport {
                formulation: "dfj",
                value: b.value.render(),
                point: Some(b.point),
                potentials: None,
                tour: None,
            }
        }
        BoundKind::Mtz => {
            let b = mtz_lp_bound(&inst)?;
            BoundReport {
                formulation: "mtz",
                value: b.value.render(),
                point: Some(b.point),
                potentials: Some(b.potentials),
                tour: None,
            }
        }
        BoundKind::Ip => {
            let (value, tour) = brute_force_optimum(&inst)?;
            BoundReport {
                formulation: "ip",
                value: value.render(),
                point: Some(point_from_tour(&tour, inst.n())?),
                potentials: None,
                tour: Some(tour.order().to_vec()),
            }
        }
    };
    println!("{}", json(&report)?);
    Ok(0)
}

fn compare(instance: &Path, as_json: bool) -> anyhow::Result<u8> {
    let inst = read_instance(instance)?;
    let descriptor = InstanceDescriptor {
        n: inst.n(),
        source: instance.display().to_string(),
        seed: None,
        trial: None,
        trials: None,
        costs: None,
    };
    let report = compare_instance(&inst, descriptor)?;
    if as_json {
        println!("{}", json(&report)?);
    } else {
        let show = |v: &Option<Q>| v.as_ref().map_or_else(|| "n/a".to_string(), Scalar::render);
        println!("dfj = {}", show(&report.dfj_value));
        println!("mtz = {}", show(&report.mtz_value));
        if inst.n() <= MAX_BRUTE_FORCE_N {
            println!("ip = {}", show(&report.ip_value));
        } else {
            println!("ip = n/a (n > {MAX_BRUTE_FORCE_N})");
        }
        let chain = if report.ip_value.is_some() {
            "mtz <= dfj <= ip"
        } else {
            "mtz <= dfj"
        };
        if !report.ordering_holds() {
            println!("ordering {chain} FAILS");
        } else if report.flagged_strict {
            println!("ordering {chain} holds; dfj > mtz strictly");
        } else {
            println!("ordering {chain} holds; dfj = mtz");
        }
    }
    Ok(if report.ordering_holds() { 0 } else { EXIT_VIOLATED })
}

fn suite(mode: Mode, n: RangeInclusive<usize>, trials: usize, seed: u64, out: Option<&Path>) -> anyhow::Result<u8> {
    let result = match mode {
        Mode::Containment => run_containment_suite(n, trials, seed),
        Mode::Gap => run_gap_search(n, trials, seed),
    };
    let reports = match result {
        Ok(r) => r,
        Err(Error::SuiteFailure(msg)) => {
            println!("suite failure: {msg}");
            return Ok(EXIT_VIOLATED);
        }
        Err(e) => return Err(e.into()),
    };
    let text = serde_json::to_string_pretty(&reports)?;
    match out {
        Some(path) => {
            fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
            let flagged = reports.iter().filter(|r| r.flagged_strict).count();
            let failures: usize = reports.iter().map(|r| r.lift.failures).sum();
            println!(
                "{} reports written to {} ({flagged} flagged strict, {failures} lift failures)",
                reports.len(),
                path.display()
            );
        }
        None => println!("{text}"),
    }
    Ok(0)
}

fn gen(n: usize, tours: usize, seed: u64) -> anyhow::Result<u8> {
    let p: FractionalPoint<Q> = random_dfj_point(n, tours, seed)?;
    println!("{}", json(&p)?);
    Ok(0)
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Lift { point, json } => lift(&point, json),
        Command::Check { point, formulation, u } => check(&point, formulation, u.as_deref()),
        Command::Bound { instance, formulation } => bound(&instance, formulation),
        Command::Compare { instance, json } => compare(&instance, json),
        Command::Suite {
            mode,
            n,
            trials,
            seed,
            out,
        } => suite(mode, n, trials, seed, out.as_deref()),
        Command::Gen { n, tours, seed } => gen(n, tours, seed),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
