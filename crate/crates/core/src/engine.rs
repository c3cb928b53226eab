//! Generational GA loop with tournament selection and elitism.
//!
//! Every offspring draws from its own ChaCha stream keyed by
//! `(seed, generation, slot)`, so a run is a pure function of its
//! configuration regardless of how the work is scheduled.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genome::{Bounds, Genome, Modulation};
use crate::operators::{
    crossover_arithmetic, crossover_blx, crossover_pmx, crossover_sbx, de_style_step,
    mutate_bits, mutate_modulation, mutate_real, mutate_swap, pwr_logit, pwr_permutation,
    pwr_real, select_alleles, MutationSpec, OperatorKind, OperatorSpec,
};
use crate::pascal::WeightVector;
use crate::problems::{Direction, Encoding, Problem};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub population_size: usize,
    pub generations: usize,
    pub tournament_k: usize,
    pub elitism_count: usize,
    pub operator: OperatorSpec,
    pub mutation: MutationSpec,
    pub seed: u64,
    /// Overrides the problem's own direction when set.
    #[serde(default)]
    pub direction: Option<Direction>,
}

impl EngineConfig {
    pub fn validate(&self) -> Result<()> {
        self.operator.validate()?;
        self.mutation.validate()?;
        if self.population_size < self.operator.m.max(1) {
            return Err(Error::config(format!(
                "population_size {} is smaller than the parent count {}",
                self.population_size, self.operator.m
            )));
        }
        if self.elitism_count >= self.population_size {
            return Err(Error::config(format!(
                "elitism_count {} must be below population_size {}",
                self.elitism_count, self.population_size
            )));
        }
        if self.tournament_k < 2 {
            return Err(Error::config(format!(
                "tournament_k must be at least 2, got {}",
                self.tournament_k
            )));
        }
        if self.tournament_k > self.population_size {
            return Err(Error::config(format!(
                "tournament_k {} exceeds population_size {}",
                self.tournament_k, self.population_size
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    /// Best fitness seen so far.
    pub best: f64,
    pub mean: f64,
    pub std: f64,
    pub wallclock_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub per_generation: Vec<GenerationStats>,
    pub champion: Genome,
    pub champion_fitness: f64,
    /// Constraint status of the champion, for constrained problems.
    pub champion_feasible: Option<bool>,
    pub seed: u64,
}

impl RunTrace {
    /// Mean wall-clock time per generation in milliseconds.
    pub fn mean_wallclock_ms(&self) -> f64 {
        if self.per_generation.is_empty() {
            return 0.0;
        }
        self.per_generation.iter().map(|g| g.wallclock_ms).sum::<f64>()
            / self.per_generation.len() as f64
    }
}

/// Draws `k` distinct indices and returns the fittest; ties go to the smaller index.
pub fn tournament_select<R: Rng + ?Sized>(
    fitness: &[f64],
    k: usize,
    direction: Direction,
    rng: &mut R,
) -> Result<usize> {
    if k < 2 {
        return Err(Error::config(format!("tournament size must be at least 2, got {k}")));
    }
    if k > fitness.len() {
        return Err(Error::config(format!(
            "tournament size {k} exceeds population {}",
            fitness.len()
        )));
    }
    let mut best: Option<usize> = None;
    for i in rand::seq::index::sample(rng, fitness.len(), k) {
        best = match best {
            None => Some(i),
            Some(b) if direction.better(fitness[i], fitness[b]) => Some(i),
            Some(b) if fitness[i] == fitness[b] && i < b => Some(i),
            keep => keep,
        };
    }
    Ok(best.expect("k >= 2"))
}

/// Runs the GA to completion.
pub fn run(problem: &dyn Problem, config: &EngineConfig) -> Result<RunTrace> {
    config.validate()?;
    let encoding = problem.encoding();
    check_compatible(&encoding, &config.operator)?;
    let direction = config.direction.unwrap_or_else(|| problem.direction());
    let n = config.population_size;

    let mut init_rng = stream(config.seed, 0);
    let mut population: Vec<Genome> = (0..n).map(|_| random_genome(&encoding, &mut init_rng)).collect();
    let mut fitness = evaluate_all(problem, &population)?;

    let mut champion_idx = best_index(&fitness, direction);
    let mut champion = population[champion_idx].clone();
    let mut champion_fitness = fitness[champion_idx];
    let mut per_generation = Vec::with_capacity(config.generations);

    for generation in 0..config.generations {
        let start = Instant::now();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| direction.cmp_best(fitness[a], fitness[b]));

        let mut next = Vec::with_capacity(n);
        let mut next_fitness = Vec::with_capacity(n);
        for &i in &order[..config.elitism_count] {
            next.push(population[i].clone());
            next_fitness.push(fitness[i]);
        }
        for slot in config.elitism_count..n {
            let mut rng = stream(config.seed, ((generation as u64 + 1) << 32) | slot as u64);
            let parents: Vec<&Genome> = (0..config.operator.m)
                .map(|_| tournament_select(&fitness, config.tournament_k, direction, &mut rng))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .map(|i| &population[i])
                .collect();
            let child = recombine(&encoding, &config.operator, &parents, &mut rng)?;
            let child = mutate(&encoding, &config.mutation, generation, child, &mut rng)?;
            next_fitness.push(evaluate(problem, &child)?);
            next.push(child);
        }
        population = next;
        fitness = next_fitness;

        champion_idx = best_index(&fitness, direction);
        if direction.better(fitness[champion_idx], champion_fitness) {
            champion = population[champion_idx].clone();
            champion_fitness = fitness[champion_idx];
        }
        let (mean, std) = mean_std(&fitness);
        per_generation.push(GenerationStats {
            best: champion_fitness,
            mean,
            std,
            wallclock_ms: start.elapsed().as_secs_f64() * 1e3,
        });
    }

    Ok(RunTrace {
        per_generation,
        champion_feasible: problem.feasible(&champion),
        champion,
        champion_fitness,
        seed: config.seed,
    })
}

/// One run per seed, in parallel; results follow the order of `seeds`.
pub fn run_seeds(problem: &dyn Problem, config: &EngineConfig, seeds: &[u64]) -> Result<Vec<RunTrace>> {
    seeds
        .par_iter()
        .map(|&seed| {
            run(
                problem,
                &EngineConfig {
                    seed,
                    ..config.clone()
                },
            )
        })
        .collect()
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

fn evaluate(problem: &dyn Problem, genome: &Genome) -> Result<f64> {
    let value = problem.evaluate(genome)?;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Evaluation {
            value,
            genome: genome.to_string(),
        })
    }
}

fn evaluate_all(problem: &dyn Problem, population: &[Genome]) -> Result<Vec<f64>> {
    population.iter().map(|g| evaluate(problem, g)).collect()
}

fn best_index(fitness: &[f64], direction: Direction) -> usize {
    let mut best = 0;
    for (i, &f) in fitness.iter().enumerate().skip(1) {
        if direction.better(f, fitness[best]) {
            best = i;
        }
    }
    best
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn check_compatible(encoding: &Encoding<'_>, op: &OperatorSpec) -> Result<()> {
    let ok = match encoding {
        Encoding::Real { .. } | Encoding::PowerModulation { .. } => {
            !matches!(op.kind, OperatorKind::Pmx)
        }
        Encoding::Bits { .. } => op.is_multi_parent(),
        Encoding::Permutation { .. } => op.is_multi_parent() || op.kind == OperatorKind::Pmx,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::config(format!(
            "operator {} cannot recombine {} genomes",
            op.label(),
            encoding.name()
        )))
    }
}

fn random_genome<R: Rng + ?Sized>(encoding: &Encoding<'_>, rng: &mut R) -> Genome {
    let uniform = |bounds: &[Bounds], rng: &mut R| -> Vec<f64> {
        bounds
            .iter()
            .map(|b| if b.hi > b.lo { rng.gen_range(b.lo..=b.hi) } else { b.lo })
            .collect()
    };
    match encoding {
        Encoding::Real { bounds } => Genome::Real(uniform(bounds, rng)),
        Encoding::Bits { len } => Genome::Bits((0..*len).map(|_| rng.gen()).collect()),
        Encoding::Permutation { distance } => {
            let mut p: Vec<usize> = (0..distance.n()).collect();
            p.shuffle(rng);
            Genome::Permutation(p)
        }
        Encoding::PowerModulation { bounds } => {
            let powers = uniform(bounds, rng);
            let modulations = (0..bounds.len())
                .map(|_| Modulation::ALL[rng.gen_range(0..Modulation::ALL.len())])
                .collect();
            Genome::PowerModulation {
                powers,
                modulations,
            }
        }
    }
}

fn recombine<R: Rng + ?Sized>(
    encoding: &Encoding<'_>,
    op: &OperatorSpec,
    parents: &[&Genome],
    rng: &mut R,
) -> Result<Genome> {
    let weights = op.weights_for_offspring(rng)?;
    match encoding {
        Encoding::Real { bounds } => {
            let reals = collect(parents, |g| match g {
                Genome::Real(v) => Some(v.as_slice()),
                _ => None,
            })?;
            Ok(Genome::Real(recombine_real(op, weights.as_ref(), &reals, bounds, rng)?))
        }
        Encoding::Bits { .. } => {
            let bits = collect(parents, |g| match g {
                Genome::Bits(v) => Some(v.as_slice()),
                _ => None,
            })?;
            let w = weights.ok_or_else(|| Error::config("bit genomes need a weighted operator"))?;
            Ok(Genome::Bits(pwr_logit(&bits, &w, rng)?))
        }
        Encoding::Permutation { distance } => {
            let perms = collect(parents, |g| match g {
                Genome::Permutation(v) => Some(v.as_slice()),
                _ => None,
            })?;
            let child = match (&op.kind, weights) {
                (_, Some(w)) => pwr_permutation(&perms, &w, distance, rng)?,
                (OperatorKind::Pmx, None) => crossover_pmx(perms[0], perms[1], rng)?,
                _ => return Err(Error::config(format!("{} cannot recombine permutations", op.label()))),
            };
            Ok(Genome::Permutation(child))
        }
        Encoding::PowerModulation { bounds } => {
            let powers = collect(parents, |g| match g {
                Genome::PowerModulation { powers, .. } => Some(powers.as_slice()),
                _ => None,
            })?;
            let mods = collect(parents, |g| match g {
                Genome::PowerModulation { modulations, .. } => Some(modulations.as_slice()),
                _ => None,
            })?;
            let child_powers = recombine_real(op, weights.as_ref(), &powers, bounds, rng)?;
            let allele_weights = match weights {
                Some(w) => w,
                None => WeightVector::equal(parents.len())?,
            };
            let child_mods = select_alleles(&mods, &allele_weights, rng)?;
            Ok(Genome::PowerModulation {
                powers: child_powers,
                modulations: child_mods,
            })
        }
    }
}

fn recombine_real<R: Rng + ?Sized>(
    op: &OperatorSpec,
    weights: Option<&WeightVector>,
    parents: &[&[f64]],
    bounds: &[Bounds],
    rng: &mut R,
) -> Result<Vec<f64>> {
    if let Some(w) = weights {
        return pwr_real(parents, w, rng);
    }
    match op.kind {
        OperatorKind::TwoParentArithmetic => crossover_arithmetic(parents[0], parents[1], rng),
        OperatorKind::Blx { alpha } => crossover_blx(parents[0], parents[1], alpha, bounds, rng),
        OperatorKind::Sbx { eta } => Ok(crossover_sbx(parents[0], parents[1], eta, bounds, rng)?.0),
        OperatorKind::DeStyle { f } => de_style_step(parents[0], parents[1], parents[2], f, bounds),
        _ => Err(Error::config(format!("{} cannot recombine real vectors", op.label()))),
    }
}

fn mutate<R: Rng + ?Sized>(
    encoding: &Encoding<'_>,
    spec: &MutationSpec,
    generation: usize,
    child: Genome,
    rng: &mut R,
) -> Result<Genome> {
    Ok(match (encoding, child) {
        (Encoding::Real { bounds }, Genome::Real(v)) => {
            Genome::Real(mutate_real(&v, spec, generation, bounds, rng)?)
        }
        (Encoding::Bits { .. }, Genome::Bits(b)) => Genome::Bits(mutate_bits(&b, spec.rate, rng)),
        (Encoding::Permutation { .. }, Genome::Permutation(p)) => {
            Genome::Permutation(mutate_swap(&p, spec.swap_rate, rng))
        }
        (
            Encoding::PowerModulation { bounds },
            Genome::PowerModulation {
                powers,
                modulations,
            },
        ) => Genome::PowerModulation {
            powers: mutate_real(&powers, spec, generation, bounds, rng)?,
            modulations: mutate_modulation(&modulations, spec.flip_rate, rng),
        },
        (enc, g) => {
            return Err(Error::config(format!(
                "{} genome produced for {} encoding",
                g.kind(),
                enc.name()
            )))
        }
    })
}

fn collect<'a, T>(
    parents: &[&'a Genome],
    pick: impl Fn(&'a Genome) -> Option<&'a [T]>,
) -> Result<Vec<&'a [T]>> {
    parents
        .iter()
        .map(|g| pick(g).ok_or_else(|| Error::config(format!("unexpected {} parent", g.kind()))))
        .collect()
}
