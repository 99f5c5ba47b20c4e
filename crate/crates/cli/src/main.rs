//! `pyramid`: generate instances, run experiments, check against oracles.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pyramid_core::harness::config::ConfigFile;
use pyramid_core::harness::{
    self, generate_mall_instance, generate_nurse_instance, instance_seed, AnyInstance, ExperimentSpec, MallParams,
    Method, NamedInstance, NurseParams, OutputFormat, ProblemKind, Tightness,
};
use pyramid_core::mall::{read_mall_instance, write_mall_instance};
use pyramid_core::nurse::{read_nurse_instance, write_nurse_instance};
use pyramid_core::{Error, Problem, Result};

#[derive(Parser)]
#[command(name = "pyramid", version, about = "Pyramidal coevolutionary GA for nurse scheduling and mall layout")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate seeded synthetic instances into a directory.
    Gen(GenArgs),
    /// Run an experiment and write aggregated results.
    Run(RunArgs),
    /// Check an instance against the brute-force and recomputation oracles.
    Oracle(OracleArgs),
    /// Print an instance summary and its sub-population hierarchy.
    Describe(DescribeArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    problem: String,
    /// Number of instances.
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// loose, medium, tight, or mixed (cycle through the tiers).
    #[arg(long, default_value = "mixed")]
    tier: String,
    /// Nurses per instance.
    #[arg(long)]
    nurses: Option<usize>,
    /// Keep at most this many shift patterns.
    #[arg(long)]
    max_patterns: Option<usize>,
    /// Shop types per mall instance.
    #[arg(long)]
    types: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    /// key=value file with defaults for any flag below.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    problem: Option<String>,
    /// Comma-separated strategies out of S,R,B,D,SR,BR,RR,SGA, or `all`.
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    hillclimber: Option<Switch>,
    #[arg(long)]
    jobs: Option<usize>,
    /// Write the strategy summary instead of per-instance rows.
    #[arg(long)]
    pivot: bool,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    penalty_beta: Option<f64>,
    #[arg(long)]
    penalty_w0_scale: Option<f64>,
    /// Multiply every sub-population capacity.
    #[arg(long)]
    population_scale: Option<f64>,
    #[arg(long)]
    max_generations: Option<usize>,
    /// Generate this many default instances when no files are given.
    #[arg(long)]
    instances: Option<usize>,
    /// Record wall time per run (makes output non-reproducible).
    #[arg(long)]
    timing: bool,
    /// Instance files; a generated default suite is used when empty.
    files: Vec<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    problem: String,
    /// Comma-separated assignment to recompute; brute force when absent.
    #[arg(long)]
    assignment: Option<String>,
    file: PathBuf,
}

#[derive(Args)]
struct DescribeArgs {
    #[arg(long)]
    problem: String,
    file: Option<PathBuf>,
}

const CONFIG_KEYS: &[&str] = &[
    "problem",
    "strategy",
    "runs",
    "seed",
    "hillclimber",
    "jobs",
    "pivot",
    "format",
    "out",
    "penalty-beta",
    "penalty-w0-scale",
    "population-scale",
    "max-generations",
    "instances",
    "timing",
    "files",
];

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => gen(args),
        Command::Run(args) => run(args),
        Command::Oracle(args) => oracle(args),
        Command::Describe(args) => describe(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn gen(args: GenArgs) -> Result<()> {
    let problem: ProblemKind = args.problem.parse()?;
    let tiers: Vec<Tightness> = if args.tier == "mixed" { Tightness::ALL.to_vec() } else { vec![args.tier.parse()?] };
    std::fs::create_dir_all(&args.out).map_err(|e| Error::Io(format!("{}: {e}", args.out.display())))?;
    for i in 0..args.count {
        let tier = tiers[i % tiers.len()];
        let seed = instance_seed(args.seed, problem, i);
        let (id, text) = match problem {
            ProblemKind::Nurse => {
                let mut params = NurseParams { tightness: tier, max_patterns: args.max_patterns, ..NurseParams::default() };
                if let Some(n) = args.nurses {
                    params.nurses = n;
                }
                (format!("nurse-{i:02}-{tier}"), write_nurse_instance(&generate_nurse_instance(&params, seed)?))
            }
            ProblemKind::Mall => {
                let params = MallParams { tightness: tier, types: args.types, ..MallParams::default() };
                (format!("mall-{i:02}-{tier}"), write_mall_instance(&generate_mall_instance(&params, seed)?))
            }
        };
        let path = args.out.join(format!("{id}.txt"));
        write_file(&path, &text)?;
        println!("{}", path.display());
    }
    Ok(())
}

fn parse_methods(list: &str) -> Result<Vec<Method>> {
    if list.eq_ignore_ascii_case("all") {
        return Ok(Method::all());
    }
    list.split(',').map(|s| s.trim().parse()).collect()
}

fn parse_switch(value: &str) -> Result<bool> {
    match value {
        "on" | "true" => Ok(true),
        "off" | "false" => Ok(false),
        _ => Err(Error::Config(format!("expected on or off, got `{value}`"))),
    }
}

fn run(args: RunArgs) -> Result<()> {
    let file = match &args.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    file.reject_unknown(CONFIG_KEYS)?;

    let problem: ProblemKind = match args.problem {
        Some(p) => p.parse()?,
        None => file.parsed("problem")?.ok_or_else(|| Error::Config("--problem is required".into()))?,
    };
    let methods = parse_methods(args.strategy.as_deref().or(file.get("strategy")).unwrap_or("all"))?;
    let hillclimber = match args.hillclimber {
        Some(s) => matches!(s, Switch::On),
        None => file.get("hillclimber").map(parse_switch).transpose()?.unwrap_or(false),
    };
    let format = match args.format {
        Some(Format::Csv) => OutputFormat::Csv,
        Some(Format::Json) => OutputFormat::Json,
        None => file.parsed("format")?.unwrap_or_default(),
    };
    let pivot = args.pivot || file.get("pivot").map(parse_switch).transpose()?.unwrap_or(false);
    let timing = args.timing || file.get("timing").map(parse_switch).transpose()?.unwrap_or(false);
    let out = args.out.or_else(|| file.get("out").map(PathBuf::from));
    let seed = match args.seed {
        Some(s) => s,
        None => file.parsed("seed")?.unwrap_or(0),
    };
    let files: Vec<PathBuf> = if args.files.is_empty() {
        file.get("files").map(|v| v.split_whitespace().map(PathBuf::from).collect()).unwrap_or_default()
    } else {
        args.files
    };

    let instances: Vec<NamedInstance> = if files.is_empty() {
        let count = match args.instances {
            Some(c) => c,
            None => file.parsed("instances")?.unwrap_or(10),
        };
        harness::default_suite(problem, count, seed)?
    } else {
        let (loaded, failed) = harness::load_instances(problem, &files);
        for f in &failed {
            eprintln!("skipping instance {}: {}", f.id, f.message);
        }
        loaded
    };

    let mut spec = ExperimentSpec::new(problem, instances);
    spec.methods = methods;
    spec.hillclimber = hillclimber;
    spec.base_seed = seed;
    spec.timing = timing;
    if let Some(r) = args.runs.map(Ok).or_else(|| file.parsed("runs").transpose()) {
        spec.runs = r?;
    }
    if let Some(j) = args.jobs.map(Ok).or_else(|| file.parsed("jobs").transpose()) {
        spec.jobs = j?;
    }
    if let Some(b) = args.penalty_beta.map(Ok).or_else(|| file.parsed("penalty-beta").transpose()) {
        spec.engine.penalty.beta = b?;
    }
    if let Some(w) = args.penalty_w0_scale.map(Ok).or_else(|| file.parsed("penalty-w0-scale").transpose()) {
        spec.engine.penalty.w0_scale = w?;
    }
    if let Some(s) = args.population_scale.map(Ok).or_else(|| file.parsed("population-scale").transpose()) {
        spec.population_scale = s?;
    }
    if let Some(g) = args.max_generations.map(Ok).or_else(|| file.parsed("max-generations").transpose()) {
        spec.engine.max_generations = g?;
    }

    let rows = harness::run_experiment(&spec)?;
    let text = if pivot {
        harness::write_pivot(&harness::pivot(&rows), format)?
    } else {
        harness::render_rows(&rows, format)?
    };
    match out {
        Some(path) => write_file(&path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(problem: ProblemKind, path: &Path) -> Result<AnyInstance> {
    let text = read_file(path)?;
    Ok(match problem {
        ProblemKind::Nurse => AnyInstance::Nurse(read_nurse_instance(&text)?),
        ProblemKind::Mall => AnyInstance::Mall(read_mall_instance(&text)?),
    })
}

fn parse_assignment(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|g| g.trim().parse().map_err(|_| Error::Config(format!("bad gene `{g}`"))))
        .collect()
}

const BRUTE_FORCE_LIMIT: f64 = 1e7;

fn oracle(args: OracleArgs) -> Result<()> {
    let problem: ProblemKind = args.problem.parse()?;
    let instance = load(problem, &args.file)?;
    match (&instance, &args.assignment) {
        (AnyInstance::Nurse(inst), Some(a)) => {
            let assignment = parse_assignment(a)?;
            let check = pyramid_oracle::recompute_fitness(inst, &assignment);
            let eval = inst.evaluate_full(&assignment)?;
            println!("oracle cost={} uncovered={}", check.cost, check.uncovered);
            println!("solver cost={} uncovered={}", eval.objective, eval.violation);
            agree(check.cost == eval.objective && check.uncovered == eval.violation)
        }
        (AnyInstance::Mall(inst), Some(a)) => {
            let layout = parse_assignment(a)?;
            let check = pyramid_oracle::recompute_rent(inst, &layout);
            let rent = inst.rent(&layout)?;
            println!("oracle rent={} violation={}", check.rent, check.violation);
            println!("solver rent={} violation={}", rent.rent, rent.violation);
            agree(check.rent == rent.rent && check.violation == rent.violation)
        }
        (AnyInstance::Nurse(inst), None) => {
            let space: f64 = (0..inst.nurse_count()).map(|i| inst.feasible_set(i).len() as f64).product();
            if space > BRUTE_FORCE_LIMIT {
                return Err(Error::Config(format!("search space of {space} assignments is too large")));
            }
            match pyramid_oracle::brute_force_nurse(inst) {
                Some((cost, a)) => println!("optimum cost={cost} assignment={}", join(&a)),
                None => println!("infeasible"),
            }
            Ok(())
        }
        (AnyInstance::Mall(inst), None) => {
            let space = (inst.type_count() as f64).powi(inst.location_count() as i32);
            if space > BRUTE_FORCE_LIMIT {
                return Err(Error::Config(format!("search space of {space} layouts is too large")));
            }
            match pyramid_oracle::brute_force_mall(inst) {
                Some((rent, a)) => println!("optimum rent={rent} layout={}", join(&a)),
                None => println!("infeasible"),
            }
            Ok(())
        }
    }
}

fn agree(ok: bool) -> Result<()> {
    if ok {
        println!("agree");
        Ok(())
    } else {
        Err(Error::Config("solver and oracle disagree".into()))
    }
}

fn join(genes: &[usize]) -> String {
    genes.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

fn describe(args: DescribeArgs) -> Result<()> {
    let problem: ProblemKind = args.problem.parse()?;
    let instance = match &args.file {
        Some(path) => load(problem, path)?,
        None => harness::default_suite(problem, 1, 0)?.remove(0).instance,
    };
    match &instance {
        AnyInstance::Nurse(inst) => {
            let per_grade: Vec<usize> = (0..inst.grade_count()).map(|g| inst.grades().iter().filter(|&&x| x == g).count()).collect();
            println!(
                "nurse instance: {} nurses, {} patterns, nurses per grade {:?}",
                inst.nurse_count(),
                inst.pattern_count(),
                per_grade
            );
        }
        AnyInstance::Mall(inst) => println!(
            "mall instance: {} areas x {} locations, {} shop types",
            inst.area_count(),
            inst.locations_per_area(),
            inst.type_count()
        ),
    }
    println!("{}", harness::topology_for(&instance, Method::Pyramid(pyramid_core::StrategyKind::RR), 1.0)?.describe());
    Ok(())
}
