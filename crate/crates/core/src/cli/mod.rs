//! `pascal-ga` command line: single runs, comparison suites, ablation sweeps,
//! rank statistics and instance export.

mod output;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analytics::{friedman_nemenyi, median, overhead_report, RankSummary, ScoreMatrix, Summary};
use crate::bench::{
    normalize_scores, run_ablation, run_method, run_suite, score_rows, Axis, Instance, Method,
    MethodRuns, ScoreRow, Task, TaskConfig,
};
use crate::engine::EngineConfig;
use crate::error::{Error, Result};
use crate::genome::Genome;
use crate::problems::Direction;

pub use output::SCHEMA_VERSION;

#[derive(Debug, Parser)]
#[command(name = "pascal-ga", version, about = "Pascal-weighted recombination GA benchmarks")]
pub struct Cli {
    /// Worker threads for seed-parallel runs (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one method on one task for each seed.
    Run(RunArgs),
    /// Run the comparison method set of a task.
    Suite(SuiteArgs),
    /// Sweep one ablation axis.
    Ablate(AblateArgs),
    /// Friedman/Nemenyi ranks from score CSVs.
    Stats(StatsArgs),
    /// Write a task's generated instance as JSON.
    ExportInstance(ExportArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Seed count `N` (seeds 0..N), a range `a..b`, or a list `a,b,c`.
    #[arg(long, default_value = "20")]
    pub seeds: String,

    /// Parameter override `key=value`, repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,

    /// JSON object of `key: value` overrides, applied before `--set`.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub task: String,

    #[arg(long)]
    pub method: String,

    /// TSP or wireless instance JSON to use instead of a generated one.
    #[arg(long)]
    pub instance: Option<PathBuf>,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SuiteArgs {
    /// Task name, or `all` for the four benchmarks.
    #[arg(long)]
    pub task: String,

    #[arg(long)]
    pub instance: Option<PathBuf>,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct AblateArgs {
    /// parents, weights, sigma, tournament or beta.
    #[arg(long)]
    pub axis: String,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Treatment {
    /// Rank methods.
    Method,
    /// Rank axis values.
    Axis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Blocks {
    /// One block per task; scores pool over the other column.
    Task,
    /// One block per task and value of the non-treatment column.
    Cell,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Score CSVs written by `suite` or `ablate`.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,

    #[arg(long, value_enum, default_value = "method")]
    pub treatment: Treatment,

    #[arg(long, value_enum, default_value = "cell")]
    pub blocks: Blocks,

    /// Drop treatments that are missing from any block instead of failing.
    #[arg(long)]
    pub drop_incomplete: bool,

    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long)]
    pub task: String,

    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,

    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

/// Parses `args` and runs the command; reports go to stdout, warnings to stderr.
pub fn run_cli<I, T>(args: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    use clap::error::ErrorKind;
    match Cli::try_parse_from(args) {
        Ok(cli) => dispatch(cli),
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            Ok(())
        }
        Err(e) => Err(Error::schema("arguments", e.to_string())),
    }
}

pub fn dispatch(cli: Cli) -> Result<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Run(a) => cmd_run(&a),
        Command::Suite(a) => cmd_suite(&a),
        Command::Ablate(a) => cmd_ablate(&a),
        Command::Stats(a) => cmd_stats(&a),
        Command::ExportInstance(a) => cmd_export(&a),
    })
}

/// Parses `N`, `a..b` or `a,b,c`.
pub fn parse_seeds(spec: &str) -> Result<Vec<u64>> {
    let bad = || Error::schema("seeds", format!("expected N, a..b or a,b,c; got `{spec}`"));
    let num = |s: &str| s.trim().parse::<u64>().map_err(|_| bad());
    let seeds: Vec<u64> = if let Some((a, b)) = spec.split_once("..") {
        (num(a)?..num(b)?).collect()
    } else if spec.contains(',') {
        spec.split(',').filter(|s| !s.trim().is_empty()).map(num).collect::<Result<_>>()?
    } else {
        (0..num(spec)?).collect()
    };
    if seeds.is_empty() {
        return Err(Error::schema("seeds", "seed list is empty"));
    }
    Ok(seeds)
}

fn task_config(task: Task, config: Option<&Path>, overrides: &[String]) -> Result<TaskConfig> {
    let mut cfg = TaskConfig::defaults(task);
    if let Some(path) = config {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let json: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::Json {
            path: path.to_path_buf(),
            source: e,
        })?;
        cfg.apply_json(&json)?;
    }
    for kv in overrides {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::schema("set", format!("expected KEY=VALUE, got `{kv}`")))?;
        cfg.set(k.trim(), v)?;
    }
    Ok(cfg)
}

fn load_instance(task: Task, path: Option<&Path>) -> Result<Option<Instance>> {
    path.map(|p| {
        let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
        Instance::from_json(task, &text)
    })
    .transpose()
}

#[derive(Serialize)]
struct ChampionRecord<'a> {
    seed: u64,
    fitness: f64,
    feasible: Option<bool>,
    genome: &'a Genome,
}

#[derive(Serialize)]
struct RunSummary<'a> {
    schema_version: u32,
    task: &'static str,
    method: String,
    config: EngineConfig,
    summary: Option<Summary>,
    champions: Vec<ChampionRecord<'a>>,
}

fn cmd_run(args: &RunArgs) -> Result<()> {
    let task: Task = args.task.parse()?;
    let cfg = task_config(task, args.common.config.as_deref(), &args.common.overrides)?;
    let method = Method::parse(&args.method, cfg.boosted_mutation_factor)?;
    let seeds = parse_seeds(&args.common.seeds)?;
    let problem = cfg.problem(load_instance(task, args.instance.as_deref())?)?;
    let runs = run_method(&cfg, problem.as_ref(), &method, &seeds)?;

    let out = &args.common.out;
    output::ensure_dir(out)?;
    let stem = format!("{}_{}", task, output::file_safe(&runs.method));
    for trace in &runs.traces {
        output::write_trace(&out.join(format!("{stem}_seed{}.csv", trace.seed)), trace)?;
    }
    let summary = RunSummary {
        schema_version: SCHEMA_VERSION,
        task: task.name(),
        method: runs.method.clone(),
        config: EngineConfig {
            seed: 0,
            ..cfg.engine(&method, 0)
        },
        summary: runs.summary().ok(),
        champions: runs
            .traces
            .iter()
            .map(|t| ChampionRecord {
                seed: t.seed,
                fitness: t.champion_fitness,
                feasible: t.champion_feasible,
                genome: &t.champion,
            })
            .collect(),
    };
    output::write_json(&out.join(format!("{stem}_summary.json")), &summary)?;
    match &summary.summary {
        Some(s) => println!(
            "{task} {}: {} runs, median {:.6}, mean {:.6}, std {:.6}, iqr {:.6}",
            runs.method, s.n, s.median, s.mean, s.std, s.iqr
        ),
        None => println!("{task} {}: champion {}", runs.method, runs.traces[0].champion_fitness),
    }
    Ok(())
}

fn cmd_suite(args: &SuiteArgs) -> Result<()> {
    let tasks: Vec<Task> = if args.task == "all" {
        Task::BENCHMARKS.to_vec()
    } else {
        vec![args.task.parse()?]
    };
    if tasks.len() > 1 && args.instance.is_some() {
        return Err(Error::schema("instance", "an instance file needs a single --task"));
    }
    let seeds = parse_seeds(&args.common.seeds)?;
    let out = &args.common.out;
    output::ensure_dir(out)?;
    for task in tasks {
        let cfg = task_config(task, args.common.config.as_deref(), &args.common.overrides)?;
        let problem = cfg.problem(load_instance(task, args.instance.as_deref())?)?;
        let runs = run_suite(&cfg, problem.as_ref(), &seeds)?;
        write_suite(out, task, &runs)?;
    }
    Ok(())
}

/// Writes the summary table, long-format scores, timing and overhead files of one suite.
pub fn write_suite(out: &Path, task: Task, runs: &[MethodRuns]) -> Result<()> {
    let table = output::suite_table(task, runs)?;
    output::write_csv(&out.join(format!("{task}_suite.csv")), &table)?;

    let mut rows = score_rows(task, "", runs);
    normalize_scores(&mut rows, task.direction());
    output::write_csv(&out.join(format!("{task}_scores.csv")), &rows)?;

    output::write_csv(&out.join(format!("{task}_timing.csv")), &output::timing_rows(task, runs))?;
    let baseline = runs[0].method.clone();
    let sets: Vec<_> = runs.iter().map(|r| r.run_set(task)).collect();
    let overhead = overhead_report(&sets, &baseline)?;
    output::write_csv(&out.join(format!("{task}_overhead.csv")), &overhead)?;

    println!("{task} suite ({} seeds)", runs[0].traces.len());
    output::print_table(&table, &overhead);
    Ok(())
}

fn cmd_ablate(args: &AblateArgs) -> Result<()> {
    let axis: Axis = args.axis.parse()?;
    let seeds = parse_seeds(&args.common.seeds)?;
    let rows = run_ablation(axis, &seeds, |task| {
        task_config(task, args.common.config.as_deref(), &args.common.overrides)
    })?;
    let out = &args.common.out;
    output::ensure_dir(out)?;
    output::write_csv(&out.join(format!("ablation_{axis}.csv")), &rows)?;

    println!("ablation {axis}: mean normalized score (lower is better)");
    let mut cells: BTreeMap<(String, String, String), Vec<f64>> = BTreeMap::new();
    for r in &rows {
        cells
            .entry((r.task.clone(), r.axis_value.clone(), r.method.clone()))
            .or_default()
            .push(r.score);
    }
    for ((task, value, method), scores) in cells {
        let mean = scores.iter().sum::<f64>() / scores.len() as f64;
        println!("  {task:<9} {value:<10} {method:<12} {mean:.4}");
    }
    Ok(())
}

/// Builds a block × treatment matrix of median scores (lower is better).
pub fn score_matrix(rows: &[ScoreRow], treatment: Treatment, blocks: Blocks) -> ScoreMatrix {
    let mut cells: BTreeMap<(String, String), BTreeMap<String, Vec<f64>>> = BTreeMap::new();
    let mut treatments: Vec<String> = Vec::new();
    for r in rows {
        let (other, label) = match treatment {
            Treatment::Method => (&r.axis_value, &r.method),
            Treatment::Axis => (&r.method, &r.axis_value),
        };
        let block = match blocks {
            Blocks::Task => (r.task.clone(), String::new()),
            Blocks::Cell => (r.task.clone(), other.clone()),
        };
        let label = label.clone();
        if !treatments.contains(&label) {
            treatments.push(label.clone());
        }
        cells.entry(block).or_default().entry(label).or_default().push(r.score);
    }
    let tasks: Vec<String> = cells
        .keys()
        .map(|(t, sub)| if sub.is_empty() { t.clone() } else { format!("{t}:{sub}") })
        .collect();
    let scores = cells
        .values()
        .map(|by| treatments.iter().map(|m| by.get(m).map(|v| median(v))).collect())
        .collect();
    ScoreMatrix {
        directions: vec![Direction::Minimize; tasks.len()],
        tasks,
        methods: treatments,
        scores,
    }
}

/// Drops treatments with a missing cell in any block.
pub fn drop_incomplete(matrix: &ScoreMatrix) -> ScoreMatrix {
    let keep: Vec<usize> = (0..matrix.methods.len())
        .filter(|&m| matrix.scores.iter().all(|row| row[m].is_some()))
        .collect();
    ScoreMatrix {
        tasks: matrix.tasks.clone(),
        methods: keep.iter().map(|&m| matrix.methods[m].clone()).collect(),
        directions: matrix.directions.clone(),
        scores: matrix
            .scores
            .iter()
            .map(|row| keep.iter().map(|&m| row[m]).collect())
            .collect(),
    }
}

fn cmd_stats(args: &StatsArgs) -> Result<()> {
    let mut rows = Vec::new();
    for path in &args.inputs {
        rows.extend(output::read_scores(path)?);
    }
    let mut matrix = score_matrix(&rows, args.treatment, args.blocks);
    if args.drop_incomplete {
        let trimmed = drop_incomplete(&matrix);
        for m in matrix.methods.iter().filter(|m| !trimmed.methods.contains(m)) {
            eprintln!("warning: dropping incomplete treatment `{m}`");
        }
        matrix = trimmed;
    }
    if matrix.tasks.len() < 2 {
        eprintln!("warning: a single block makes the critical difference degenerate");
    }
    let ranks: RankSummary = friedman_nemenyi(&matrix)?;
    output::ensure_dir(&args.out)?;
    output::write_json(&args.out.join("ranks.json"), &output::RankFile::new(&ranks, &matrix.tasks))?;
    output::write_csv(&args.out.join("cd.csv"), &output::cd_rows(&ranks))?;

    println!(
        "{} blocks, {} treatments: Friedman chi2 = {:.4}, Nemenyi CD = {:.4}",
        ranks.n_tasks,
        ranks.methods.len(),
        ranks.friedman_statistic,
        ranks.nemenyi_cd
    );
    let mut order: Vec<usize> = (0..ranks.methods.len()).collect();
    order.sort_by(|&a, &b| ranks.mean_ranks[a].total_cmp(&ranks.mean_ranks[b]));
    for i in order {
        println!("  {:<12} {:.4}", ranks.methods[i], ranks.mean_ranks[i]);
    }
    Ok(())
}

fn cmd_export(args: &ExportArgs) -> Result<()> {
    let task: Task = args.task.parse()?;
    let cfg = task_config(task, None, &args.overrides)?;
    output::ensure_dir(&args.out)?;
    let path = args.out.join(format!("{task}_instance.json"));
    output::write_json(&path, &cfg.export_instance()?)?;
    println!("wrote {}", path.display());
    Ok(())
}

/// Process exit status for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Schema { .. } => 2,
        Error::Io { .. } | Error::Csv { .. } | Error::Json { .. } => 3,
        Error::IncompleteDesign(_) | Error::InsufficientData(_) => 4,
        _ => 1,
    }
}
