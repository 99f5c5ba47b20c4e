//! Experiment runner: seeded runs over a set of instances, aggregation with
//! censoring, and result emission.

pub mod config;
mod emit;
mod generate;

pub use emit::{emit, pivot, read_rows, render_rows, write_pivot, OutputFormat, PivotRow};
pub use generate::{biased_cost, generate_mall_instance, generate_nurse_instance, MallParams, NurseParams, Tightness};

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{Engine, EngineConfig, RunSummary};
use crate::error::{Error, Result};
use crate::hillclimb::NurseHillClimber;
use crate::mall::MallInstance;
use crate::nurse::NurseInstance;
use crate::partnering::StrategyKind;
use crate::problem::Problem;
use crate::pyramid::{build_mall_topology, build_nurse_topology, build_single_topology, Topology};

/// Score recorded for a nurse instance on which no run found a feasible schedule.
pub const CENSORED_NURSE_COST: f64 = 100.0;
/// Rent recorded for a mall instance on which no run found a feasible layout.
pub const CENSORED_MALL_RENT: f64 = 0.0;
pub const DEFAULT_RUNS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    Nurse,
    Mall,
}

impl ProblemKind {
    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::Nurse => "nurse",
            ProblemKind::Mall => "mall",
        }
    }

    pub fn censored_score(self) -> f64 {
        match self {
            ProblemKind::Nurse => CENSORED_NURSE_COST,
            ProblemKind::Mall => CENSORED_MALL_RENT,
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nurse" => Ok(ProblemKind::Nurse),
            "mall" => Ok(ProblemKind::Mall),
            _ => Err(Error::Config(format!("unknown problem `{s}`"))),
        }
    }
}

/// A partnering strategy on the pyramid, or the single-population baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Sga,
    Pyramid(StrategyKind),
}

impl Method {
    /// The seven strategies followed by the baseline.
    pub fn all() -> Vec<Method> {
        StrategyKind::ALL.into_iter().map(Method::Pyramid).chain([Method::Sga]).collect()
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Sga => f.write_str("SGA"),
            Method::Pyramid(s) => write!(f, "{s}"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("sga") {
            Ok(Method::Sga)
        } else {
            s.parse().map(Method::Pyramid)
        }
    }
}

#[derive(Debug, Clone)]
pub enum AnyInstance {
    Nurse(NurseInstance<f64>),
    Mall(MallInstance<f64>),
}

impl AnyInstance {
    pub fn kind(&self) -> ProblemKind {
        match self {
            AnyInstance::Nurse(_) => ProblemKind::Nurse,
            AnyInstance::Mall(_) => ProblemKind::Mall,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NamedInstance {
    pub id: String,
    pub instance: AnyInstance,
}

/// An instance that could not be loaded; reported instead of aborting the experiment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceFailure {
    pub id: String,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub problem: ProblemKind,
    pub instances: Vec<NamedInstance>,
    pub methods: Vec<Method>,
    pub runs: usize,
    pub base_seed: u64,
    pub hillclimber: bool,
    pub engine: EngineConfig,
    /// Multiplies every sub-population capacity.
    pub population_scale: f64,
    pub jobs: usize,
    /// Record wall time; off by default so result files are reproducible.
    pub timing: bool,
}

impl ExperimentSpec {
    pub fn new(problem: ProblemKind, instances: Vec<NamedInstance>) -> Self {
        Self {
            problem,
            instances,
            methods: Method::all(),
            runs: DEFAULT_RUNS,
            base_seed: 0,
            hillclimber: false,
            engine: EngineConfig { audit: false, ..EngineConfig::default() },
            population_scale: 1.0,
            jobs: 1,
            timing: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("no strategy selected".into()));
        }
        if !(self.population_scale > 0.0) {
            return Err(Error::Config("population scale must be positive".into()));
        }
        if self.hillclimber && self.problem == ProblemKind::Mall {
            return Err(Error::Config("the hillclimber is only defined for the nurse problem".into()));
        }
        if let Some(bad) = self.instances.iter().find(|i| i.instance.kind() != self.problem) {
            return Err(Error::Config(format!("instance `{}` is not a {} instance", bad.id, self.problem)));
        }
        self.engine.validate()
    }
}

/// Outcome of one seeded run; `best` is in reported orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub instance: String,
    pub method: String,
    pub run: usize,
    pub seed: u64,
    pub best: Option<f64>,
    pub generations: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub instance: String,
    pub strategy: String,
    pub feasibility: f64,
    pub score: f64,
    pub generations: f64,
    pub seconds: f64,
}

impl ResultRow {
    pub fn censored(&self, problem: ProblemKind) -> bool {
        self.feasibility == 0.0 && self.score == problem.censored_score()
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3))
}

/// Seed of one run; independent of the method so all methods start from the same seeds.
pub fn run_seed(base_seed: u64, instance_id: &str, run: usize) -> u64 {
    splitmix64(splitmix64(base_seed ^ fnv1a(instance_id.as_bytes())) ^ run as u64)
}

/// Seed used to generate the `index`-th instance of a suite.
pub fn instance_seed(base_seed: u64, problem: ProblemKind, index: usize) -> u64 {
    splitmix64(base_seed ^ fnv1a(problem.name().as_bytes()) ^ splitmix64(index as u64))
}

/// Strategy column label: the method, suffixed with `&H` when the hillclimber is on.
pub fn method_label(method: Method, hillclimber: bool) -> String {
    if hillclimber {
        format!("{method}&H")
    } else {
        method.to_string()
    }
}

pub fn topology_for(instance: &AnyInstance, method: Method, scale: f64) -> Result<Topology> {
    let topology = match (method, instance) {
        (Method::Sga, AnyInstance::Nurse(n)) => build_single_topology(n.nurse_count())?,
        (Method::Sga, AnyInstance::Mall(m)) => build_single_topology(m.location_count())?,
        (Method::Pyramid(_), AnyInstance::Nurse(n)) => build_nurse_topology(n)?,
        (Method::Pyramid(_), AnyInstance::Mall(m)) => build_mall_topology(m)?,
    };
    Ok(if scale == 1.0 { topology } else { topology.scaled(scale) })
}

/// Runs one method once on one instance.
pub fn run_once(instance: &AnyInstance, method: Method, hillclimber: bool, config: EngineConfig, scale: f64) -> Result<RunSummary<f64>> {
    let topology = topology_for(instance, method, scale)?;
    let strategy = match method {
        Method::Sga => StrategyKind::S,
        Method::Pyramid(s) => s,
    };
    match instance {
        AnyInstance::Nurse(inst) => {
            if hillclimber {
                let climber = NurseHillClimber::new(inst);
                Engine::with_local_search(inst, topology, strategy, config, &climber)?.run()
            } else {
                Engine::new(inst, topology, strategy, config)?.run()
            }
        }
        AnyInstance::Mall(inst) => {
            if hillclimber {
                return Err(Error::Config("the hillclimber is only defined for the nurse problem".into()));
            }
            Engine::new(inst, topology, strategy, config)?.run()
        }
    }
}

fn reported(instance: &AnyInstance, objective: f64) -> f64 {
    match instance {
        AnyInstance::Nurse(n) => n.reported(objective),
        AnyInstance::Mall(m) => m.reported(objective),
    }
}

/// Executes every (instance, method, run) combination and returns the outcomes
/// in canonical order: instance, then method, then run.
pub fn run_all(spec: &ExperimentSpec) -> Result<Vec<RunOutcome>> {
    spec.validate()?;
    let jobs: Vec<(usize, Method, usize)> = (0..spec.instances.len())
        .flat_map(|i| spec.methods.iter().flat_map(move |&m| (0..spec.runs).map(move |r| (i, m, r))))
        .collect();
    let execute = |&(i, method, run): &(usize, Method, usize)| -> Result<RunOutcome> {
        let named = &spec.instances[i];
        let seed = run_seed(spec.base_seed, &named.id, run);
        let config = EngineConfig { rng_seed: seed, ..spec.engine.clone() };
        let start = Instant::now();
        let summary = run_once(&named.instance, method, spec.hillclimber, config, spec.population_scale)?;
        Ok(RunOutcome {
            instance: named.id.clone(),
            method: method_label(method, spec.hillclimber),
            run,
            seed,
            best: summary.best_feasible.map(|b| reported(&named.instance, b)),
            generations: summary.generations,
            seconds: if spec.timing { start.elapsed().as_secs_f64() } else { 0.0 },
        })
    };
    if spec.jobs <= 1 {
        jobs.iter().map(execute).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(spec.jobs)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        pool.install(|| jobs.par_iter().map(execute).collect())
    }
}

/// Collapses run outcomes into one row per (instance, strategy), keeping first-seen order.
///
/// Feasibility is the fraction of runs that found a feasible solution. The
/// score is the mean best feasible objective over those runs, or the censored
/// value when none did.
pub fn aggregate(outcomes: &[RunOutcome], problem: ProblemKind) -> Vec<ResultRow> {
    let mut keys: Vec<(&str, &str)> = Vec::new();
    for o in outcomes {
        let key = (o.instance.as_str(), o.method.as_str());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(instance, strategy)| {
            let group: Vec<&RunOutcome> =
                outcomes.iter().filter(|o| o.instance == instance && o.method == strategy).collect();
            let runs = group.len() as f64;
            let feasible: Vec<f64> = group.iter().filter_map(|o| o.best).collect();
            let score = if feasible.is_empty() {
                problem.censored_score()
            } else {
                feasible.iter().sum::<f64>() / feasible.len() as f64
            };
            ResultRow {
                instance: instance.to_string(),
                strategy: strategy.to_string(),
                feasibility: feasible.len() as f64 / runs,
                score,
                generations: group.iter().map(|o| o.generations as f64).sum::<f64>() / runs,
                seconds: group.iter().map(|o| o.seconds).sum(),
            }
        })
        .collect()
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<ResultRow>> {
    Ok(aggregate(&run_all(spec)?, spec.problem))
}

/// A generated default suite: `count` instances of the problem at the default parameters,
/// cycling through the tightness tiers.
pub fn default_suite(problem: ProblemKind, count: usize, base_seed: u64) -> Result<Vec<NamedInstance>> {
    (0..count)
        .map(|i| {
            let tier = Tightness::ALL[i % Tightness::ALL.len()];
            let seed = instance_seed(base_seed, problem, i);
            let instance = match problem {
                ProblemKind::Nurse => AnyInstance::Nurse(generate_nurse_instance(
                    &NurseParams { tightness: tier, ..NurseParams::default() },
                    seed,
                )?),
                ProblemKind::Mall => AnyInstance::Mall(generate_mall_instance(
                    &MallParams { tightness: tier, ..MallParams::default() },
                    seed,
                )?),
            };
            Ok(NamedInstance { id: format!("{}-{:02}-{}", problem.name(), i, tier), instance })
        })
        .collect()
}

/// Reads instance files, collecting the ones that fail instead of stopping.
pub fn load_instances(problem: ProblemKind, paths: &[std::path::PathBuf]) -> (Vec<NamedInstance>, Vec<InstanceFailure>) {
    let mut loaded = Vec::new();
    let mut failed = Vec::new();
    for path in paths {
        let id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| path.display().to_string());
        let result = std::fs::read_to_string(path).map_err(Error::from).and_then(|text| match problem {
            ProblemKind::Nurse => crate::nurse::read_nurse_instance::<f64>(&text).map(AnyInstance::Nurse),
            ProblemKind::Mall => crate::mall::read_mall_instance::<f64>(&text).map(AnyInstance::Mall),
        });
        match result {
            Ok(instance) => loaded.push(NamedInstance { id, instance }),
            Err(e) => failed.push(InstanceFailure { id, message: e.to_string() }),
        }
    }
    (loaded, failed)
}

#[cfg(test)]
mod tests;
