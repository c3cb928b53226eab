//! Benchmark harness: per-task defaults, method names, comparison suites and
//! ablation sweeps.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analytics::{summarize, RunSet, Summary};
use crate::engine::{run_seeds, EngineConfig, RunTrace};
use crate::error::{Error, Result};
use crate::operators::{
    MutationSpec, OperatorSpec, DEFAULT_BLX_ALPHA, DEFAULT_DE_F, DEFAULT_SBX_ETA,
};
use crate::problems::{
    generate_tsp, generate_wireless, Direction, FirParams, FirProblem, PidProblem, Problem,
    Sphere, TspInstance, WirelessProblem,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Pid,
    Fir,
    Wireless,
    Tsp,
    Sphere,
}

impl Task {
    pub const ALL: [Task; 5] = [Task::Pid, Task::Fir, Task::Wireless, Task::Tsp, Task::Sphere];
    /// The four engineering benchmarks.
    pub const BENCHMARKS: [Task; 4] = [Task::Pid, Task::Fir, Task::Wireless, Task::Tsp];

    pub fn name(self) -> &'static str {
        match self {
            Task::Pid => "pid",
            Task::Fir => "fir",
            Task::Wireless => "wireless",
            Task::Tsp => "tsp",
            Task::Sphere => "sphere",
        }
    }

    pub fn direction(self) -> Direction {
        match self {
            Task::Wireless => Direction::Maximize,
            _ => Direction::Minimize,
        }
    }

    pub fn is_continuous(self) -> bool {
        self != Task::Tsp
    }

    /// Method list of the comparison suite.
    pub fn suite_methods(self) -> &'static [&'static str] {
        match self {
            Task::Pid | Task::Fir | Task::Sphere => &["arith", "blx", "pwr3", "pwr5"],
            Task::Wireless => &["arith", "sbx", "de", "pwr3", "pwr5", "pwr3+mut"],
            Task::Tsp => &["pmx", "pwr3"],
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Task::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| {
                Error::schema(
                    "task",
                    format!("unknown task `{s}`; valid tasks: pid, fir, wireless, tsp, sphere"),
                )
            })
    }
}

/// A recombination operator plus the mutation scaling it runs with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Method {
    pub operator: OperatorSpec,
    /// Multiplies the Gaussian and flip mutation rates.
    pub mutation_factor: f64,
}

/// Method names accepted on the command line.
pub const METHOD_NAMES: &str =
    "arith, blx, sbx, de, pmx, pwrN, pwr3+mut, equalN, dirichletN (N in 2..=64)";

impl Method {
    pub fn parse(name: &str, boosted_factor: f64) -> Result<Self> {
        let plain = |operator| Method {
            operator,
            mutation_factor: 1.0,
        };
        let parents = |prefix: &str| -> Option<usize> {
            name.strip_prefix(prefix)?.parse().ok().filter(|m| (2..=64).contains(m))
        };
        let method = match name {
            "arith" => plain(OperatorSpec::arithmetic()),
            "blx" => plain(OperatorSpec::blx(DEFAULT_BLX_ALPHA)),
            "sbx" => plain(OperatorSpec::sbx(DEFAULT_SBX_ETA)),
            "de" => plain(OperatorSpec::de_style(DEFAULT_DE_F)),
            "pmx" => plain(OperatorSpec::pmx()),
            "pwr3+mut" => Method {
                operator: OperatorSpec::pwr(3),
                mutation_factor: boosted_factor,
            },
            _ => {
                if let Some(m) = parents("pwr") {
                    plain(OperatorSpec::pwr(m))
                } else if let Some(m) = parents("equal") {
                    plain(OperatorSpec::equal_weight(m))
                } else if let Some(m) = parents("dirichlet") {
                    plain(OperatorSpec::dirichlet(m))
                } else {
                    return Err(Error::schema(
                        "method",
                        format!("unknown method `{name}`; valid methods: {METHOD_NAMES}"),
                    ));
                }
            }
        };
        Ok(method)
    }

    pub fn label(&self) -> String {
        if self.mutation_factor != 1.0 {
            format!("{}+mut", self.operator.label())
        } else {
            self.operator.label()
        }
    }
}

/// Engine and problem parameters of one task, overridable by dotted keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskConfig {
    pub task: Task,
    pub population_size: usize,
    pub generations: usize,
    pub tournament_k: usize,
    pub elitism_count: usize,
    pub mutation_rate: f64,
    pub sigma0: f64,
    /// Per-generation sigma factor; `None` decays to a tenth over the run.
    pub decay: Option<f64>,
    pub swap_rate: f64,
    pub flip_rate: f64,
    /// Mutation scaling of `pwr3+mut`.
    pub boosted_mutation_factor: f64,
    /// Seed of the generated TSP or wireless instance.
    pub instance_seed: u64,
    pub pid_dt: f64,
    pub pid_horizon: f64,
    pub fir_grid_size: usize,
    pub wireless_links: usize,
    pub wireless_beta: f64,
    pub tsp_cities: usize,
    pub sphere_dim: usize,
}

/// Keys accepted by [`TaskConfig::set`].
pub const CONFIG_KEYS: &[&str] = &[
    "pop",
    "population_size",
    "generations",
    "tournament_k",
    "elitism",
    "mutation.rate",
    "mutation.sigma0",
    "mutation.decay",
    "mutation.swap_rate",
    "mutation.flip_rate",
    "mutation.boost",
    "instance_seed",
    "pid.dt",
    "pid.horizon",
    "fir.grid_size",
    "wireless.links",
    "wireless.beta",
    "tsp.cities",
    "sphere.dim",
];

impl TaskConfig {
    pub fn defaults(task: Task) -> Self {
        let base = TaskConfig {
            task,
            population_size: 40,
            generations: 80,
            tournament_k: 3,
            elitism_count: 2,
            mutation_rate: 1.0,
            sigma0: 0.05,
            decay: None,
            swap_rate: 0.25,
            flip_rate: 0.05,
            boosted_mutation_factor: 1.5,
            instance_seed: 0,
            pid_dt: 0.001,
            pid_horizon: 10.0,
            fir_grid_size: 512,
            wireless_links: 8,
            wireless_beta: 100.0,
            tsp_cities: 32,
            sphere_dim: 5,
        };
        match task {
            Task::Pid | Task::Sphere => base,
            Task::Fir => TaskConfig {
                population_size: 30,
                generations: 40,
                ..base
            },
            // Below 1 so that the boosted variant can raise it.
            Task::Wireless => TaskConfig {
                population_size: 50,
                generations: 120,
                mutation_rate: 0.5,
                ..base
            },
            Task::Tsp => TaskConfig {
                population_size: 60,
                generations: 150,
                ..base
            },
        }
    }

    /// Applies one `key=value` override.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .trim()
                .parse()
                .map_err(|_| Error::schema(key, format!("cannot parse `{value}`")))
        }
        match key {
            "pop" | "population_size" => self.population_size = parse(key, value)?,
            "generations" => self.generations = parse(key, value)?,
            "tournament_k" => self.tournament_k = parse(key, value)?,
            "elitism" => self.elitism_count = parse(key, value)?,
            "mutation.rate" => self.mutation_rate = parse(key, value)?,
            "mutation.sigma0" => self.sigma0 = parse(key, value)?,
            "mutation.decay" => self.decay = Some(parse(key, value)?),
            "mutation.swap_rate" => self.swap_rate = parse(key, value)?,
            "mutation.flip_rate" => self.flip_rate = parse(key, value)?,
            "mutation.boost" => self.boosted_mutation_factor = parse(key, value)?,
            "instance_seed" => self.instance_seed = parse(key, value)?,
            "pid.dt" => self.pid_dt = parse(key, value)?,
            "pid.horizon" => self.pid_horizon = parse(key, value)?,
            "fir.grid_size" => self.fir_grid_size = parse(key, value)?,
            "wireless.links" => self.wireless_links = parse(key, value)?,
            "wireless.beta" => self.wireless_beta = parse(key, value)?,
            "tsp.cities" => self.tsp_cities = parse(key, value)?,
            "sphere.dim" => self.sphere_dim = parse(key, value)?,
            _ => {
                return Err(Error::schema(
                    key,
                    format!("unknown key; valid keys: {}", CONFIG_KEYS.join(", ")),
                ))
            }
        }
        Ok(())
    }

    /// Applies a flat JSON object of dotted keys.
    pub fn apply_json(&mut self, json: &serde_json::Value) -> Result<()> {
        let obj = json
            .as_object()
            .ok_or_else(|| Error::schema("config", "expected a flat JSON object"))?;
        for (key, value) in obj {
            let text = match value {
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Number(n) => n.to_string(),
                other => {
                    return Err(Error::schema(key, format!("expected a number or string, got {other}")))
                }
            };
            self.set(key, &text)?;
        }
        Ok(())
    }

    pub fn mutation(&self, factor: f64) -> MutationSpec {
        MutationSpec {
            rate: (self.mutation_rate * factor).min(1.0),
            sigma0: self.sigma0,
            decay: self
                .decay
                .unwrap_or_else(|| MutationSpec::decay_over(self.generations)),
            swap_rate: self.swap_rate,
            flip_rate: (self.flip_rate * factor).min(1.0),
        }
    }

    pub fn engine(&self, method: &Method, seed: u64) -> EngineConfig {
        EngineConfig {
            population_size: self.population_size,
            generations: self.generations,
            tournament_k: self.tournament_k,
            elitism_count: self.elitism_count,
            operator: method.operator,
            mutation: self.mutation(method.mutation_factor),
            seed,
            direction: None,
        }
    }

    /// Builds the task's problem, generating an instance unless one is given.
    pub fn problem(&self, instance: Option<Instance>) -> Result<Box<dyn Problem>> {
        Ok(match (self.task, instance) {
            (Task::Pid, None) => {
                let p = PidProblem::new(self.pid_horizon, self.pid_dt)?;
                Box::new(p)
            }
            (Task::Fir, None) => Box::new(FirProblem::new(FirParams {
                grid_size: self.fir_grid_size,
                ..FirParams::default()
            })?),
            (Task::Wireless, None) => Box::new(
                generate_wireless(self.wireless_links, self.instance_seed)?
                    .with_beta(self.wireless_beta)?,
            ),
            (Task::Wireless, Some(Instance::Wireless(w))) => Box::new(w),
            (Task::Tsp, None) => Box::new(generate_tsp(self.tsp_cities, self.instance_seed)?),
            (Task::Tsp, Some(Instance::Tsp(t))) => Box::new(t),
            (Task::Sphere, None) => Box::new(Sphere::new(self.sphere_dim, 1.0)?),
            (task, Some(_)) => {
                return Err(Error::schema(
                    "instance",
                    format!("instance files apply to tsp and wireless, not {task}"),
                ))
            }
        })
    }

    /// The generated instance in its JSON form, for the tasks that have one.
    pub fn export_instance(&self) -> Result<serde_json::Value> {
        let value = match self.task {
            Task::Tsp => serde_json::to_value(generate_tsp(self.tsp_cities, self.instance_seed)?),
            Task::Wireless => serde_json::to_value(
                generate_wireless(self.wireless_links, self.instance_seed)?
                    .with_beta(self.wireless_beta)?,
            ),
            Task::Pid => serde_json::to_value(PidProblem::new(self.pid_horizon, self.pid_dt)?),
            Task::Fir => serde_json::to_value(FirParams {
                grid_size: self.fir_grid_size,
                ..FirParams::default()
            }),
            Task::Sphere => serde_json::to_value(Sphere::new(self.sphere_dim, 1.0)?),
        };
        value.map_err(|e| Error::schema("instance", e.to_string()))
    }
}

/// A loaded instance file.
#[derive(Debug, Clone)]
pub enum Instance {
    Tsp(TspInstance),
    Wireless(WirelessProblem),
}

impl Instance {
    pub fn from_json(task: Task, text: &str) -> Result<Self> {
        let bad = |e: serde_json::Error| Error::schema("instance", e.to_string());
        match task {
            Task::Tsp => Ok(Instance::Tsp(serde_json::from_str(text).map_err(bad)?)),
            Task::Wireless => Ok(Instance::Wireless(serde_json::from_str(text).map_err(bad)?)),
            other => Err(Error::schema(
                "instance",
                format!("instance files apply to tsp and wireless, not {other}"),
            )),
        }
    }
}

/// All runs of one method on one task.
#[derive(Debug, Clone)]
pub struct MethodRuns {
    pub method: String,
    pub traces: Vec<RunTrace>,
}

impl MethodRuns {
    pub fn champions(&self) -> Vec<f64> {
        self.traces.iter().map(|t| t.champion_fitness).collect()
    }

    pub fn run_set(&self, task: Task) -> RunSet {
        RunSet {
            task: task.name().into(),
            method: self.method.clone(),
            champions: self.champions(),
            wallclock_ms: self.traces.iter().map(|t| t.mean_wallclock_ms()).collect(),
            feasible: self.traces.iter().filter_map(|t| t.champion_feasible).collect(),
        }
    }

    pub fn summary(&self) -> Result<Summary> {
        summarize(&self.champions())
    }
}

pub fn run_method(
    config: &TaskConfig,
    problem: &dyn Problem,
    method: &Method,
    seeds: &[u64],
) -> Result<MethodRuns> {
    let traces = run_seeds(problem, &config.engine(method, 0), seeds)?;
    Ok(MethodRuns {
        method: method.label(),
        traces,
    })
}

/// Runs every method of the task's comparison suite.
pub fn run_suite(config: &TaskConfig, problem: &dyn Problem, seeds: &[u64]) -> Result<Vec<MethodRuns>> {
    config
        .task
        .suite_methods()
        .iter()
        .map(|name| {
            let method = Method::parse(name, config.boosted_mutation_factor)?;
            run_method(config, problem, &method, seeds)
        })
        .collect()
}

/// One champion in long format. `score` is the min-max normalized value over
/// the whole sweep of its task, oriented so that lower is better.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub task: String,
    pub method: String,
    pub axis_value: String,
    pub seed: u64,
    pub raw: f64,
    pub score: f64,
    /// Empty for tasks without constraints.
    pub feasible: Option<bool>,
}

/// Fills `score` for rows of one task.
pub fn normalize_scores(rows: &mut [ScoreRow], direction: Direction) {
    let lo = rows.iter().map(|r| r.raw).fold(f64::INFINITY, f64::min);
    let hi = rows.iter().map(|r| r.raw).fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    for r in rows {
        r.score = if span > 0.0 {
            match direction {
                Direction::Minimize => (r.raw - lo) / span,
                Direction::Maximize => (hi - r.raw) / span,
            }
        } else {
            0.0
        };
    }
}

pub fn score_rows(task: Task, axis_value: &str, runs: &[MethodRuns]) -> Vec<ScoreRow> {
    runs.iter()
        .flat_map(|mr| {
            mr.traces.iter().map(move |t| ScoreRow {
                task: task.name().into(),
                method: mr.method.clone(),
                axis_value: axis_value.into(),
                seed: t.seed,
                raw: t.champion_fitness,
                score: 0.0,
                feasible: t.champion_feasible,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Parents,
    Weights,
    Sigma,
    Tournament,
    Beta,
}

impl Axis {
    pub const ALL: [Axis; 5] = [Axis::Parents, Axis::Weights, Axis::Sigma, Axis::Tournament, Axis::Beta];

    pub fn name(self) -> &'static str {
        match self {
            Axis::Parents => "parents",
            Axis::Weights => "weights",
            Axis::Sigma => "sigma",
            Axis::Tournament => "tournament",
            Axis::Beta => "beta",
        }
    }

    /// Tasks the sweep runs on.
    pub fn tasks(self) -> Vec<Task> {
        match self {
            Axis::Parents | Axis::Weights | Axis::Tournament => Task::BENCHMARKS.to_vec(),
            Axis::Sigma => vec![Task::Pid, Task::Fir, Task::Wireless],
            Axis::Beta => vec![Task::Wireless],
        }
    }

    /// Grid cells as `(axis value, method, adjusted config)`.
    pub fn cells(self, base: &TaskConfig) -> Result<Vec<(String, Method, TaskConfig)>> {
        let boost = base.boosted_mutation_factor;
        let pwr3 = Method::parse("pwr3", boost)?;
        let mut cells = Vec::new();
        match self {
            Axis::Parents => {
                for m in [2usize, 3, 4, 5, 7] {
                    cells.push((m.to_string(), Method::parse(&format!("pwr{m}"), boost)?, base.clone()));
                }
            }
            Axis::Weights => {
                for (value, name) in [("pascal", "pwr3"), ("equal", "equal3"), ("dirichlet", "dirichlet3")] {
                    cells.push((value.to_string(), Method::parse(name, boost)?, base.clone()));
                }
            }
            Axis::Sigma => {
                for sigma in [0.01, 0.02, 0.05, 0.1] {
                    let cfg = TaskConfig {
                        sigma0: sigma,
                        ..base.clone()
                    };
                    for name in ["arith", "blx", "pwr3"] {
                        cells.push((sigma.to_string(), Method::parse(name, boost)?, cfg.clone()));
                    }
                }
            }
            Axis::Tournament => {
                for k in [2usize, 3, 5] {
                    let cfg = TaskConfig {
                        tournament_k: k,
                        ..base.clone()
                    };
                    cells.push((k.to_string(), pwr3, cfg));
                }
            }
            Axis::Beta => {
                for beta in [10.0, 50.0, 100.0, 300.0] {
                    let cfg = TaskConfig {
                        wireless_beta: beta,
                        ..base.clone()
                    };
                    cells.push((beta.to_string(), pwr3, cfg));
                }
            }
        }
        Ok(cells)
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Axis::ALL.into_iter().find(|a| a.name() == s).ok_or_else(|| {
            Error::schema(
                "axis",
                format!("unknown axis `{s}`; valid axes: parents, weights, sigma, tournament, beta"),
            )
        })
    }
}

/// Runs an ablation sweep; `configure` supplies the base config of each task.
pub fn run_ablation(
    axis: Axis,
    seeds: &[u64],
    configure: impl Fn(Task) -> Result<TaskConfig>,
) -> Result<Vec<ScoreRow>> {
    let mut all = Vec::new();
    for task in axis.tasks() {
        let base = configure(task)?;
        let mut rows = Vec::new();
        for (value, method, cfg) in axis.cells(&base)? {
            let problem = cfg.problem(None)?;
            let runs = run_method(&cfg, problem.as_ref(), &method, seeds)?;
            rows.extend(score_rows(task, &value, &[runs]));
        }
        normalize_scores(&mut rows, task.direction());
        all.extend(rows);
    }
    Ok(all)
}
