//! Deterministic randomized property harness.
//!
//! Every trial draws its instance from a seed derived from the run seed, the
//! suite name and the trial index, so results do not depend on scheduling.
//! Failing instances are shrunk and serialized; a serialized instance can be
//! replayed on its own.

mod case;
mod gen;
mod suites;

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

pub use case::{halve, Case, Dim, DimKind, Slot};
pub use gen::Gen;
pub use suites::{suite, Suite, SUITES};

use crate::error::Result;
use crate::json::ring_name;
use crate::ring::RingDesc;

/// Deliberate corruption of a decider, used to exercise failure reporting.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// The flatness decider accepts every module with a free summand.
    FlatFreeSummand,
}

impl Fault {
    pub fn name(self) -> &'static str {
        match self {
            Fault::FlatFreeSummand => "flat-free-summand",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "flat-free-summand" => Some(Fault::FlatFreeSummand),
            _ => None,
        }
    }
}

pub const MAX_GENS: usize = 4;
pub const MAX_ENTRY: i64 = 10;
const MAX_EXAMPLES: usize = 3;
const SHRINK_BUDGET: usize = 400;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HarnessConfig {
    pub seed: u64,
    pub trials: usize,
    pub max_gens: usize,
    pub max_entry: i64,
    pub rings: Vec<RingDesc>,
    pub parallelism: usize,
    pub horizon: usize,
    pub fault: Option<Fault>,
    /// Suites to run; empty means all.
    pub suites: Vec<String>,
}

pub fn default_rings() -> Vec<RingDesc> {
    vec![
        RingDesc::Integers,
        RingDesc::IntegersMod(6),
        RingDesc::IntegersMod(12),
        RingDesc::Rationals,
        RingDesc::PrimeField(5),
        RingDesc::GaussianIntegers,
    ]
}

impl HarnessConfig {
    pub fn new(seed: u64, trials: usize) -> Self {
        HarnessConfig {
            seed,
            trials,
            max_gens: 3,
            max_entry: MAX_ENTRY,
            rings: default_rings(),
            parallelism: 1,
            horizon: 10,
            fault: None,
            suites: Vec::new(),
        }
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.max_gens == 0 || self.max_gens > MAX_GENS {
            return Err(format!("max_gens must lie in 1..={MAX_GENS}"));
        }
        if self.max_entry < 1 || self.max_entry > MAX_ENTRY {
            return Err(format!("max_entry must lie in 1..={MAX_ENTRY}"));
        }
        if self.rings.is_empty() {
            return Err("at least one ring is required".into());
        }
        if self.parallelism == 0 {
            return Err("parallelism must be positive".into());
        }
        if self.horizon == 0 {
            return Err("horizon must be positive".into());
        }
        for s in &self.suites {
            if suite(s).is_none() {
                return Err(format!("unknown suite `{s}`"));
            }
        }
        Ok(())
    }

    fn selected(&self) -> Vec<&'static Suite> {
        SUITES.iter().filter(|s| self.suites.is_empty() || self.suites.iter().any(|n| n == s.name)).collect()
    }

    fn to_json(&self) -> Value {
        json!({
            "seed": self.seed.to_string(),
            "trials": self.trials,
            "max_gens": self.max_gens,
            "max_entry": self.max_entry,
            "rings": self.rings.iter().map(|r| ring_name(*r)).collect::<Vec<_>>(),
            "horizon": self.horizon,
            "fault": self.fault.map(Fault::name),
        })
    }
}

/// Verdict of one property check. Tags count notable outcomes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Check {
    pub failure: Option<String>,
    pub tags: Vec<&'static str>,
}

impl Check {
    pub fn pass() -> Self {
        Check::default()
    }

    pub fn fail(&mut self, msg: impl Into<String>) {
        if self.failure.is_none() {
            self.failure = Some(msg.into());
        }
    }

    pub fn tag(&mut self, t: &'static str) {
        self.tags.push(t);
    }
}

#[derive(Clone, Debug)]
pub struct FailureReport {
    pub index: usize,
    pub message: String,
    pub shrink_steps: usize,
    pub counterexample: Case,
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub name: &'static str,
    pub trials: usize,
    pub failed: usize,
    pub tags: BTreeMap<&'static str, usize>,
    pub failures: Vec<FailureReport>,
}

impl SuiteReport {
    pub fn tag(&self, t: &str) -> usize {
        self.tags.get(t).copied().unwrap_or(0)
    }

    fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "trials": self.trials,
            "passed": self.trials - self.failed,
            "failed": self.failed,
            "tags": self.tags,
            "failures": self.failures.iter().map(|f| json!({
                "index": f.index,
                "message": f.message,
                "shrink_steps": f.shrink_steps,
                "counterexample": f.counterexample.to_json(),
            })).collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub config: HarnessConfig,
    pub suites: Vec<SuiteReport>,
}

impl Report {
    pub fn total_failures(&self) -> usize {
        self.suites.iter().map(|s| s.failed).sum()
    }

    pub fn suite(&self, name: &str) -> Option<&SuiteReport> {
        self.suites.iter().find(|s| s.name == name)
    }

    /// Independent of the parallelism degree and of timing.
    pub fn to_json(&self) -> Value {
        json!({
            "config": self.config.to_json(),
            "suites": self.suites.iter().map(SuiteReport::to_json).collect::<Vec<_>>(),
            "total_trials": self.suites.iter().map(|s| s.trials).sum::<usize>(),
            "total_failures": self.total_failures(),
        })
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn trial_seed(seed: u64, suite: &str, index: usize) -> u64 {
    let mut h = splitmix(seed);
    for b in suite.bytes() {
        h = splitmix(h ^ u64::from(b));
    }
    splitmix(h ^ index as u64)
}

/// The rings of the configuration this suite can run over.
fn applicable(s: &Suite, cfg: &HarnessConfig) -> Vec<RingDesc> {
    cfg.rings.iter().copied().filter(|r| (s.accepts)(*r)).collect()
}

pub fn instance(s: &Suite, cfg: &HarnessConfig, index: usize) -> Option<Case> {
    let rings = applicable(s, cfg);
    if rings.is_empty() {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(cfg.seed, s.name, index));
    let ring = rings[rand::Rng::gen_range(&mut rng, 0..rings.len())];
    let mut g = Gen { rng, ring, max_gens: cfg.max_gens, max_entry: cfg.max_entry };
    let mut case = Case::new(s.name, ring, cfg.horizon, cfg.fault);
    (s.generate)(&mut g, &mut case);
    Some(case)
}

/// Errors from the library count as failures: generated instances are
/// valid by construction.
pub fn evaluate(s: &Suite, case: &Case) -> Check {
    match (s.check)(case) {
        Ok(c) => c,
        Err(e) => Check { failure: Some(format!("{}: {e}", e.clause())), tags: Vec::new() },
    }
}

/// During shrinking only genuine failures count; a candidate that became
/// invalid input is rejected.
fn still_fails(s: &Suite, case: &Case) -> Option<String> {
    match (s.check)(case) {
        Ok(c) => c.failure,
        Err(e) if e.is_internal() => Some(format!("{}: {e}", e.clause())),
        Err(_) => None,
    }
}

pub fn shrink(s: &Suite, case: &Case, message: &str) -> (Case, String, usize) {
    let mut cur = case.clone();
    let mut msg = message.to_string();
    let mut steps = 0;
    let mut budget = SHRINK_BUDGET;
    'outer: loop {
        for cand in cur.shrink_candidates() {
            if budget == 0 {
                break 'outer;
            }
            budget -= 1;
            if let Some(m) = still_fails(s, &cand) {
                cur = cand;
                msg = m;
                steps += 1;
                continue 'outer;
            }
        }
        break;
    }
    (cur, msg, steps)
}

fn run_one(s: &'static Suite, cfg: &HarnessConfig) -> SuiteReport {
    let trials = if applicable(s, cfg).is_empty() { 0 } else { cfg.trials };
    let results: Vec<(Case, Check)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let case = instance(s, cfg, i).expect("applicable ring");
            let check = evaluate(s, &case);
            (case, check)
        })
        .collect();
    let mut tags = BTreeMap::new();
    for (_, c) in &results {
        for t in &c.tags {
            *tags.entry(*t).or_insert(0) += 1;
        }
    }
    let failing: Vec<(usize, &Case, &String)> = results
        .iter()
        .enumerate()
        .filter_map(|(i, (case, c))| c.failure.as_ref().map(|m| (i, case, m)))
        .collect();
    let failures = failing
        .par_iter()
        .take(MAX_EXAMPLES)
        .map(|(i, case, m)| {
            let (counterexample, message, shrink_steps) = shrink(s, case, m);
            FailureReport { index: *i, message, shrink_steps, counterexample }
        })
        .collect();
    SuiteReport { name: s.name, trials, failed: failing.len(), tags, failures }
}

pub fn run_suite(name: &str, cfg: &HarnessConfig) -> std::result::Result<SuiteReport, String> {
    let mut cfg = cfg.clone();
    cfg.suites = vec![name.to_string()];
    Ok(run(&cfg)?.suites.remove(0))
}

pub fn run(cfg: &HarnessConfig) -> std::result::Result<Report, String> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.parallelism).build().map_err(|e| e.to_string())?;
    let suites = if cfg.trials == 0 {
        Vec::new()
    } else {
        pool.install(|| cfg.selected().into_iter().map(|s| run_one(s, cfg)).collect())
    };
    Ok(Report { config: cfg.clone(), suites })
}

/// Re-run one serialized instance.
pub fn replay(case: &Case) -> Result<Check> {
    let s = suite(&case.suite)
        .ok_or_else(|| crate::error::Error::PreconditionViolation(format!("unknown suite `{}`", case.suite)))?;
    (s.check)(case)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_depend_on_every_coordinate() {
        let a = trial_seed(42, "snf", 0);
        assert_ne!(a, trial_seed(43, "snf", 0));
        assert_ne!(a, trial_seed(42, "pushout", 0));
        assert_ne!(a, trial_seed(42, "snf", 1));
        assert_eq!(a, trial_seed(42, "snf", 0));
    }

    #[test]
    fn zero_trials_give_an_empty_report() {
        let r = run(&HarnessConfig::new(42, 0)).unwrap();
        assert!(r.suites.is_empty());
        assert_eq!(r.total_failures(), 0);
    }

    #[test]
    fn config_bounds() {
        let mut c = HarnessConfig::new(1, 1);
        c.max_gens = 5;
        assert!(c.validate().is_err());
        let mut c = HarnessConfig::new(1, 1);
        c.suites = vec!["nope".into()];
        assert!(c.validate().is_err());
    }
}
