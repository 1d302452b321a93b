//! Batch experiments: containment of DFJ points in the MTZ polytope, and the search for
//! instances where the DFJ bound is strictly stronger than the MTZ bound.
//!
//! Everything runs in exact arithmetic. Trials are independent and run on the rayon pool;
//! reports are assembled in trial order so the JSON output is byte-identical for a given
//! `(n_range, trials, seed)`.

use std::ops::RangeInclusive;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dfj::{brute_force_optimum, dfj_check_enumerate, dfj_lp_bound, MAX_BRUTE_FORCE_N};
use crate::error::{Error, Result};
use crate::instance::{
    check_degrees, point_from_tour, random_dfj_point, random_instance, AtspInstance, FractionalPoint, Tour,
};
use crate::lift::{cycle_to_cut, lift_point, LiftResult};
use crate::mtz::{mtz_check, mtz_lp_bound, Potentials};
use crate::scalar::{Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceDescriptor {
    pub n: usize,
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trial: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    /// Full cost matrix, so any row can be replayed on its own.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub costs: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftCounts {
    pub successes: usize,
    pub failures: usize,
}

/// Per-phase wall time; not serialized, so reports stay deterministic.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PhaseTimes {
    pub dfj: Duration,
    pub mtz: Duration,
    pub ip: Duration,
    pub lift: Duration,
}

impl PhaseTimes {
    fn add(&mut self, other: &PhaseTimes) {
        self.dfj += other.dfj;
        self.mtz += other.mtz;
        self.ip += other.ip;
        self.lift += other.lift;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub instance: InstanceDescriptor,
    #[serde(with = "opt_rational")]
    pub dfj_value: Option<Rational>,
    #[serde(with = "opt_rational")]
    pub mtz_value: Option<Rational>,
    #[serde(with = "opt_rational")]
    pub ip_value: Option<Rational>,
    pub lift: LiftCounts,
    pub flagged_strict: bool,
    #[serde(skip)]
    pub wall_time: PhaseTimes,
}

impl ExperimentReport {
    /// `mtz <= dfj <= ip` over whichever values are present.
    pub fn ordering_holds(&self) -> bool {
        let le = |a: &Option<Rational>, b: &Option<Rational>| match (a, b) {
            (Some(a), Some(b)) => a <= b,
            _ => true,
        };
        le(&self.mtz_value, &self.dfj_value)
            && le(&self.dfj_value, &self.ip_value)
            && le(&self.mtz_value, &self.ip_value)
    }

    /// Rebuilds the instance from the recorded cost matrix.
    pub fn instance(&self) -> Option<AtspInstance<Rational>> {
        let costs = self.instance.costs.as_ref()?;
        let parsed = costs
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| Rational::parse_scalar(c))
                    .collect::<Option<Vec<_>>>()
            })
            .collect::<Option<Vec<_>>>()?;
        AtspInstance::new(self.instance.source.clone(), parsed).ok()
    }
}

mod opt_rational {
    use super::*;

    pub fn serialize<Ser: Serializer>(v: &Option<Rational>, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        v.as_ref().map(Scalar::render).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Rational>, D::Error> {
        use serde::de::Error as _;
        let raw: Option<String> = Option::deserialize(d)?;
        raw.map(|s| Rational::parse_scalar(&s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}"))))
            .transpose()
    }
}

/// Independent per-trial seed derived from the suite seed (splitmix64 finalizer).
pub fn trial_seed(seed: u64, n: usize, trial: usize) -> u64 {
    let mut z = seed
        .wrapping_add((n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add((trial as u64).wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn render_costs(inst: &AtspInstance<Rational>) -> Vec<Vec<String>> {
    inst.costs()
        .iter()
        .map(|row| row.iter().map(Scalar::render).collect())
        .collect()
}

/// Both relaxation bounds, the integer optimum when `n <= 10`, and a lift of the DFJ optimizer.
pub fn compare_instance(inst: &AtspInstance<Rational>, descriptor: InstanceDescriptor) -> Result<ExperimentReport> {
    let mut times = PhaseTimes::default();
    let t = Instant::now();
    let dfj = dfj_lp_bound(inst)?;
    times.dfj = t.elapsed();

    let t = Instant::now();
    let mtz = mtz_lp_bound(inst)?;
    times.mtz = t.elapsed();

    let t = Instant::now();
    let ip = if inst.n() <= MAX_BRUTE_FORCE_N {
        Some(brute_force_optimum(inst)?.0)
    } else {
        None
    };
    times.ip = t.elapsed();

    let t = Instant::now();
    let mut lift = LiftCounts::default();
    match lift_point(&dfj.point) {
        LiftResult::Potentials(u) if mtz_check(&dfj.point, &u)?.is_none() => lift.successes += 1,
        _ => lift.failures += 1,
    }
    times.lift = t.elapsed();

    let flagged_strict = dfj.value > mtz.value;
    Ok(ExperimentReport {
        instance: descriptor,
        dfj_value: Some(dfj.value),
        mtz_value: Some(mtz.value),
        ip_value: ip,
        lift,
        flagged_strict,
        wall_time: times,
    })
}

fn check_range(range: &RangeInclusive<usize>, lo: usize, hi: usize, what: &str) -> Result<()> {
    if range.is_empty() || *range.start() < lo || *range.end() > hi {
        return Err(Error::Precondition(format!(
            "{what} needs n within {lo}..={hi}, got {}..={}",
            range.start(),
            range.end()
        )));
    }
    Ok(())
}

/// Where a containment trial's point came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointSource {
    /// Convex combination of random tours.
    TourMixture,
    /// Optimizer of the DFJ LP on a random-cost instance.
    DfjOptimizer,
}

/// The DFJ-feasible point used by containment trial `trial` (even trials mix tours, odd
/// trials take a DFJ LP optimizer).
pub fn containment_point(n: usize, seed: u64, trial: usize) -> Result<(PointSource, FractionalPoint<Rational>)> {
    let s = trial_seed(seed, n, trial);
    if trial.is_multiple_of(2) {
        let k = ChaCha8Rng::seed_from_u64(s).gen_range(1..=n);
        Ok((PointSource::TourMixture, random_dfj_point(n, k, s)?))
    } else {
        let inst = random_instance(n, s)?;
        Ok((PointSource::DfjOptimizer, dfj_lp_bound(&inst)?.point))
    }
}

fn point_json(p: &FractionalPoint<Rational>) -> String {
    serde_json::to_string(p).unwrap_or_else(|e| format!("<unserializable: {e}>"))
}

/// Verifies DFJ feasibility of `p`, lifts it, and checks the potentials.
///
/// A lift failure here would contradict containment and is reported as an error naming
/// the point.
pub fn check_containment(p: &FractionalPoint<Rational>, label: &str) -> Result<Potentials<Rational>> {
    if !check_degrees(p) {
        return Err(Error::SuiteFailure(format!(
            "{label}: generated point is not degree-feasible: {}",
            point_json(p)
        )));
    }
    if let Some(cut) = dfj_check_enumerate(p)? {
        return Err(Error::SuiteFailure(format!(
            "{label}: generated point violates {cut}: {}",
            point_json(p)
        )));
    }
    match lift_point(p) {
        LiftResult::Potentials(u) => match mtz_check(p, &u)? {
            None => Ok(u),
            Some(v) => Err(Error::SuiteFailure(format!(
                "{label}: lifted potentials violate arc ({}, {}) by {}: {}",
                v.i,
                v.j,
                v.slack.render(),
                point_json(p)
            ))),
        },
        LiftResult::NegativeCycle(c) => {
            let cut = cycle_to_cut(p, &c.nodes)
                .map(|c| c.to_string())
                .unwrap_or_else(|e| e.to_string());
            Err(Error::SuiteFailure(format!(
                "{label}: lift found negative cycle {c} ({cut}) on DFJ-feasible point {}",
                point_json(p)
            )))
        }
    }
}

/// For each `n`, lifts `trials` DFJ-feasible points and checks the resulting potentials.
/// Returns one report per `n`; any failure aborts the suite with the offending point.
pub fn run_containment_suite(
    n_range: RangeInclusive<usize>,
    trials: usize,
    seed: u64,
) -> Result<Vec<ExperimentReport>> {
    if trials == 0 {
        return Ok(Vec::new());
    }
    check_range(&n_range, 3, 10, "containment suite")?;
    let mut reports = Vec::new();
    for n in n_range {
        let outcomes: Vec<Result<PhaseTimes>> = (0..trials)
            .into_par_iter()
            .map(|trial| {
                let t = Instant::now();
                let (_, p) = containment_point(n, seed, trial)?;
                let generated = t.elapsed();
                let t = Instant::now();
                check_containment(&p, &format!("n={n} trial={trial}"))?;
                Ok(PhaseTimes {
                    dfj: generated,
                    lift: t.elapsed(),
                    ..Default::default()
                })
            })
            .collect();
        let mut times = PhaseTimes::default();
        for outcome in outcomes {
            times.add(&outcome?);
        }
        reports.push(ExperimentReport {
            instance: InstanceDescriptor {
                n,
                source: "containment".into(),
                seed: Some(seed),
                trial: None,
                trials: Some(trials),
                costs: None,
            },
            dfj_value: None,
            mtz_value: None,
            ip_value: None,
            lift: LiftCounts {
                successes: trials,
                failures: 0,
            },
            flagged_strict: false,
            wall_time: times,
        });
    }
    Ok(reports)
}

/// Lifts every one of the `(n-1)!` tours of size `n` and checks that the potentials are
/// the visit-order potentials.
pub fn run_tour_suite(n: usize) -> Result<ExperimentReport> {
    use itertools::Itertools;
    check_range(&(n..=n), 3, 8, "tour suite")?;
    let mut lift = LiftCounts::default();
    for rest in (2..=n).permutations(n - 1) {
        let mut order = vec![1];
        order.extend(rest);
        let tour = Tour::new(order)?;
        let p: FractionalPoint<Rational> = point_from_tour(&tour, n)?;
        let u = check_containment(&p, &format!("tour {:?}", tour.order()))?;
        let shift = -u.get(1).clone();
        if u.translate(&shift) != Potentials::visit_order(&tour) {
            return Err(Error::SuiteFailure(format!(
                "tour {:?}: potentials {:?} differ from visit order",
                tour.order(),
                u.values()
            )));
        }
        lift.successes += 1;
    }
    Ok(ExperimentReport {
        instance: InstanceDescriptor {
            n,
            source: "all-tours".into(),
            seed: None,
            trial: None,
            trials: None,
            costs: None,
        },
        dfj_value: None,
        mtz_value: None,
        ip_value: None,
        lift,
        flagged_strict: false,
        wall_time: PhaseTimes::default(),
    })
}

fn gap_trial(n: usize, seed: u64, trial: usize) -> Result<ExperimentReport> {
    let inst = random_instance(n, trial_seed(seed, n, trial))?;
    let descriptor = InstanceDescriptor {
        n,
        source: "random-costs".into(),
        seed: Some(seed),
        trial: Some(trial),
        trials: None,
        costs: Some(render_costs(&inst)),
    };
    compare_instance(&inst, descriptor)
}

/// Random-cost instances (integer costs in `1..=100`), `trials` per `n`; one report per
/// instance, flagged when the DFJ bound is strictly above the MTZ bound.
pub fn run_gap_search(n_range: RangeInclusive<usize>, trials: usize, seed: u64) -> Result<Vec<ExperimentReport>> {
    if trials == 0 {
        return Ok(Vec::new());
    }
    check_range(&n_range, 4, 10, "gap search")?;
    let mut reports = Vec::new();
    for n in n_range {
        let rows: Vec<Result<ExperimentReport>> = (0..trials)
            .into_par_iter()
            .map(|trial| gap_trial(n, seed, trial))
            .collect();
        for row in rows {
            reports.push(row?);
        }
    }
    Ok(reports)
}

/// Scans gap-search trials in order (cycling through `n_range`) and stops at the first
/// flagged instance, trying at most `max_trials` instances.
pub fn find_strict_gap(
    n_range: RangeInclusive<usize>,
    max_trials: usize,
    seed: u64,
) -> Result<Option<ExperimentReport>> {
    check_range(&n_range, 4, 10, "gap search")?;
    let sizes: Vec<usize> = n_range.collect();
    for k in 0..max_trials {
        let n = sizes[k % sizes.len()];
        let report = gap_trial(n, seed, k / sizes.len())?;
        if report.flagged_strict {
            return Ok(Some(report));
        }
    }
    Ok(None)
}
