//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use pascal_ga::analytics::{friedman_nemenyi, ScoreMatrix};
use pascal_ga::bench::{run_ablation, run_method, run_suite, Axis, Method, MethodRuns, Task, TaskConfig};
use pascal_ga::cli::write_suite;
use pascal_ga::genome::is_permutation;
use pascal_ga::operators::{
    crossover_pmx, provisional_selection, pwr_permutation, pwr_real, repair_permutation,
};
use pascal_ga::pascal::{bernstein_basis, fibonacci_diagonal, pascal_weights, variance_ratio};
use pascal_ga::problems::{generate_tsp, DistanceMatrix, PidProblem};
use pascal_ga::{Direction, WeightVector};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn seeds() -> Vec<u64> {
    (0..20).collect()
}

fn median(v: &[f64]) -> f64 {
    pascal_ga::analytics::median(v)
}

fn sample_std(v: &[f64]) -> f64 {
    pascal_ga::analytics::summarize(v).unwrap().std
}

fn weight_identities() -> Outcome {
    let start = Instant::now();
    let (mut sum_err, mut bern_err, mut var_err) = (0.0f64, 0.0f64, 0.0f64);
    for m in 2..=64 {
        let w = pascal_weights(m).unwrap();
        sum_err = sum_err.max((w.weights().iter().sum::<f64>() - 1.0).abs());
        let b = bernstein_basis(m - 1, 0.5).unwrap();
        for (x, y) in w.weights().iter().zip(&b) {
            bern_err = bern_err.max((x - y).abs());
        }
        var_err = var_err.max((w.sum_of_squares() - variance_ratio(m).unwrap()).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        sum_err <= 1e-15 && bern_err <= 1e-12 && var_err <= 1e-12 && secs < 1.0,
        format!("max |Σw−1| {sum_err:.1e}, bernstein {bern_err:.1e}, variance {var_err:.1e}, {secs:.3}s"),
    )
}

fn variance_law() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut parts = Vec::new();
    let mut pass = true;
    for (m, expected) in [(2, 0.5), (3, 0.375), (5, 70.0 / 256.0)] {
        let w = pascal_weights(m).unwrap();
        let n = 1_000_000;
        let (mut s, mut s2) = (0.0f64, 0.0f64);
        for _ in 0..n {
            let genes: Vec<[f64; 1]> = (0..m).map(|_| [rng.sample(StandardNormal)]).collect();
            let parents: Vec<&[f64]> = genes.iter().map(|g| g.as_slice()).collect();
            let x = pwr_real(&parents, &w, &mut rng).unwrap()[0];
            s += x;
            s2 += x * x;
        }
        let mean = s / n as f64;
        let var = (s2 - n as f64 * mean * mean) / (n - 1) as f64;
        let rel = (var - expected).abs() / expected;
        pass &= rel < 0.01;
        parts.push(format!("m={m} {var:.5} vs {expected:.5}"));
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(pass && secs < 30.0, format!("{}, {secs:.1}s", parts.join("; ")))
}

fn convex_hull() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut violations = 0usize;
    for _ in 0..100_000 {
        let d = rng.gen_range(1..=16);
        let m = rng.gen_range(2..=7);
        let genes: Vec<Vec<f64>> = (0..m)
            .map(|_| (0..d).map(|_| rng.gen_range(-100.0..100.0)).collect())
            .collect();
        let parents: Vec<&[f64]> = genes.iter().map(|g| g.as_slice()).collect();
        let child = pwr_real(&parents, &pascal_weights(m).unwrap(), &mut rng).unwrap();
        for (g, &x) in child.iter().enumerate() {
            let lo = genes.iter().map(|p| p[g]).fold(f64::INFINITY, f64::min);
            let hi = genes.iter().map(|p| p[g]).fold(f64::NEG_INFINITY, f64::max);
            if x < lo || x > hi {
                violations += 1;
            }
        }
    }
    outcome(violations == 0, format!("{violations} violations in 1e5 applications"))
}

fn permutation_validity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut invalid, mut moved, mut calls) = (0usize, 0usize, 0usize);
    for i in 0..10_000 {
        let n = rng.gen_range(4..=64);
        let pts: Vec<[f64; 2]> = (0..n).map(|_| [rng.gen(), rng.gen()]).collect();
        let dist = DistanceMatrix::from_points(&pts);
        let m = rng.gen_range(2..=7);
        let perms: Vec<Vec<usize>> = (0..m)
            .map(|_| {
                let mut p: Vec<usize> = (0..n).collect();
                rand::seq::SliceRandom::shuffle(p.as_mut_slice(), &mut rng);
                p
            })
            .collect();
        let parents: Vec<&[usize]> = perms.iter().map(|p| p.as_slice()).collect();
        let w = pascal_weights(m).unwrap();
        if i % 2 == 0 {
            let child = pwr_permutation(&parents, &w, &dist, &mut rng).unwrap();
            invalid += usize::from(!is_permutation(&child) || child.len() != n);
            let provisional = provisional_selection(&parents, &w, &mut rng).unwrap();
            let repair = repair_permutation(&provisional, &dist).unwrap();
            invalid += usize::from(!is_permutation(&repair.tour));
            moved += (0..n)
                .filter(|k| !repair.holes.contains(k) && repair.tour[*k] != provisional[*k])
                .count();
        } else {
            let child = crossover_pmx(parents[0], parents[1], &mut rng).unwrap();
            invalid += usize::from(!is_permutation(&child) || child.len() != n);
        }
        calls += 1;
    }
    outcome(
        invalid == 0 && moved == 0,
        format!("{calls} calls, {invalid} invalid, {moved} retained positions changed"),
    )
}

fn fibonacci() -> Outcome {
    let (mut a, mut b) = (0u64, 1u64);
    let mut mismatches = 0;
    for n in 0..=90u32 {
        // b = F(n+1)
        if fibonacci_diagonal(n).unwrap() != b {
            mismatches += 1;
        }
        let next = a + b;
        a = b;
        b = next;
    }
    outcome(mismatches == 0, format!("{mismatches} mismatches for n in 0..=90"))
}

fn brute_force_tour(d: &DistanceMatrix) -> f64 {
    fn permute(rest: &mut Vec<usize>, k: usize, d: &DistanceMatrix, best: &mut f64) {
        if k == rest.len() {
            // Fix city 0 first; count each direction once.
            if rest[0] < rest[rest.len() - 1] {
                let mut tour = vec![0];
                tour.extend_from_slice(rest);
                *best = best.min(d.cyclic_length(&tour));
            }
            return;
        }
        for i in k..rest.len() {
            rest.swap(k, i);
            permute(rest, k + 1, d, best);
            rest.swap(k, i);
        }
    }
    let mut rest: Vec<usize> = (1..d.n()).collect();
    let mut best = f64::INFINITY;
    permute(&mut rest, 0, d, &mut best);
    best
}

fn tsp_oracle() -> Outcome {
    let start = Instant::now();
    let instance = generate_tsp(8, 42).unwrap();
    let optimum = brute_force_tour(instance.distance());
    let cfg = TaskConfig {
        tsp_cities: 8,
        ..TaskConfig::defaults(Task::Tsp)
    };
    let runs = run_method(&cfg, &instance, &Method::parse("pwr3", 1.5).unwrap(), &seeds()).unwrap();
    let champions = runs.champions();
    let hits = champions.iter().filter(|&&c| (c - optimum).abs() <= 1e-9).count();
    let below = champions.iter().filter(|&&c| c < optimum - 1e-9).count();
    let secs = start.elapsed().as_secs_f64();
    outcome(
        hits >= 15 && below == 0 && secs < 120.0,
        format!("optimum {optimum:.6}, matched {hits}/20, below {below}, {secs:.1}s"),
    )
}

fn pid_sanity() -> Outcome {
    let exact = 50.0;
    let coarse = PidProblem::new(10.0, 0.002).unwrap().itae([0.0; 3]);
    let fine = PidProblem::new(10.0, 0.001).unwrap().itae([0.0; 3]);
    let rel = (fine - exact).abs() / exact;
    let ratio = (coarse - exact).abs() / (fine - exact).abs();
    outcome(
        rel < 0.005 && ratio >= 1.8,
        format!("ITAE {fine:.6} vs T²/2 = 50 (rel {rel:.1e}); halving ratio {ratio:.3}"),
    )
}

fn suite(task: Task, dir: &Path) -> Vec<MethodRuns> {
    let cfg = TaskConfig::defaults(task);
    let problem = cfg.problem(None).unwrap();
    let runs = run_suite(&cfg, problem.as_ref(), &seeds()).unwrap();
    write_suite(dir, task, &runs).unwrap();
    runs
}

fn find<'a>(runs: &'a [MethodRuns], method: &str) -> &'a MethodRuns {
    runs.iter().find(|r| r.method == method).unwrap()
}

fn pid_direction(runs: &[MethodRuns], secs: f64) -> Outcome {
    let (p, a) = (find(runs, "pwr3").champions(), find(runs, "arith").champions());
    let (mp, ma, sp, sa) = (median(&p), median(&a), sample_std(&p), sample_std(&a));
    outcome(
        mp < ma && sp < sa && secs < 600.0,
        format!("median {mp:.6} vs {ma:.6}, std {sp:.2e} vs {sa:.2e}, {secs:.1}s"),
    )
}

fn fir_direction(runs: &[MethodRuns]) -> Outcome {
    let (mp, ma) = (median(&find(runs, "pwr3").champions()), median(&find(runs, "arith").champions()));
    outcome(mp < ma, format!("median J {mp:.5} vs {ma:.5}"))
}

fn wireless_direction(runs: &[MethodRuns]) -> Outcome {
    let feas = |r: &MethodRuns| r.run_set(Task::Wireless).feasibility().unwrap_or(0.0);
    let (p, a) = (find(runs, "pwr3"), find(runs, "arith"));
    let (mp, ma) = (median(&p.champions()), median(&a.champions()));
    let (fp, fa) = (feas(p), feas(a));
    outcome(
        mp > ma && fp >= fa,
        format!("median U {mp:.3} vs {ma:.3}, feasible {:.0}% vs {:.0}%", 100.0 * fp, 100.0 * fa),
    )
}

fn tsp_direction(runs: &[MethodRuns]) -> Outcome {
    let (p, x) = (find(runs, "pwr3").champions(), find(runs, "pmx").champions());
    let (mp, mx, sp, sx) = (median(&p), median(&x), sample_std(&p), sample_std(&x));
    outcome(
        mp <= mx && sp <= sx,
        format!("median {mp:.4} vs {mx:.4}, std {sp:.4} vs {sx:.4}"),
    )
}

fn ablation_shape() -> Outcome {
    let rows = run_ablation(Axis::Parents, &seeds(), |t| Ok(TaskConfig::defaults(t))).unwrap();
    let mut good = 0;
    let mut parts = Vec::new();
    for task in Task::BENCHMARKS {
        let mean = |m: &str| {
            let v: Vec<f64> = rows
                .iter()
                .filter(|r| r.task == task.name() && r.axis_value == m)
                .map(|r| r.score)
                .collect();
            v.iter().sum::<f64>() / v.len() as f64
        };
        let (s2, s3, s7) = (mean("2"), mean("3"), mean("7"));
        let ok = s3 <= s2 && s3 <= s7;
        good += usize::from(ok);
        parts.push(format!("{task} m2 {s2:.3} m3 {s3:.3} m7 {s7:.3}{}", if ok { "" } else { " ✗" }));
    }
    outcome(good >= 3, format!("{good}/4 tasks: {}", parts.join("; ")))
}

fn statistics() -> Outcome {
    let matrix = ScoreMatrix {
        tasks: (0..4).map(|i| format!("t{i}")).collect(),
        methods: vec!["a".into(), "b".into(), "c".into()],
        directions: vec![Direction::Minimize; 4],
        scores: [[1.0, 2.0, 3.0], [2.0, 1.0, 3.0], [1.0, 3.0, 2.0], [1.0, 2.0, 2.0]]
            .iter()
            .map(|r| r.iter().map(|&x| Some(x)).collect())
            .collect(),
    };
    // Hand value: ranks (1,2,3)(2,1,3)(1,3,2)(1,2.5,2.5) → R̄ = 1.25, 2.125, 2.625,
    // χ² = 12·4/(3·4)·(12.96875 − 12) = 3.875.
    let chi = friedman_nemenyi(&matrix).unwrap().friedman_statistic;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let n = rng.gen_range(2..12);
        let k = rng.gen_range(2..=10);
        let m = ScoreMatrix {
            tasks: (0..n).map(|i| i.to_string()).collect(),
            methods: (0..k).map(|i| i.to_string()).collect(),
            directions: (0..n)
                .map(|_| if rng.gen() { Direction::Minimize } else { Direction::Maximize })
                .collect(),
            scores: (0..n)
                .map(|_| (0..k).map(|_| Some(rng.gen_range(0..4) as f64)).collect())
                .collect(),
        };
        let r = friedman_nemenyi(&m).unwrap();
        let total: f64 = r.mean_ranks.iter().map(|x| x * n as f64).sum();
        let expected = (n * k * (k + 1)) as f64 / 2.0;
        worst = worst.max((total - expected).abs());
    }
    outcome(
        (chi - 3.875).abs() <= 1e-10 && worst < 1e-9,
        format!("χ²_F {chi} vs 3.875; worst rank-sum error {worst:.1e} over 500 matrices"),
    )
}

fn determinism(first: &Path, second: &Path) -> Outcome {
    let mut differing = Vec::new();
    for task in Task::BENCHMARKS {
        suite(task, second);
        for file in [format!("{task}_suite.csv"), format!("{task}_scores.csv")] {
            let a = std::fs::read(first.join(&file)).unwrap();
            let b = std::fs::read(second.join(&file)).unwrap();
            if a != b {
                differing.push(file);
            }
        }
    }
    outcome(
        differing.is_empty(),
        if differing.is_empty() {
            "8 suite CSVs byte-identical across reruns".to_string()
        } else {
            format!("differing: {}", differing.join(", "))
        },
    )
}

fn main() {
    let first = tempfile::tempdir().unwrap();
    let second = tempfile::tempdir().unwrap();
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    let mut record = |id, name, o: Outcome| {
        println!("{} [{id:>2}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        results.push((id, name, o));
    };

    record(1, "weight identities", weight_identities());
    record(2, "empirical variance law", variance_law());
    record(3, "convex hull", convex_hull());
    record(4, "permutation validity and repair retention", permutation_validity());
    record(5, "Fibonacci diagonal", fibonacci());
    record(6, "TSP brute-force oracle", tsp_oracle());
    record(7, "PID zero-gain sanity", pid_sanity());

    let start = Instant::now();
    let pid = suite(Task::Pid, first.path());
    let pid_secs = start.elapsed().as_secs_f64();
    record(8, "PID direction", pid_direction(&pid, pid_secs));
    record(9, "FIR direction", fir_direction(&suite(Task::Fir, first.path())));
    record(10, "wireless direction", wireless_direction(&suite(Task::Wireless, first.path())));
    record(11, "TSP direction", tsp_direction(&suite(Task::Tsp, first.path())));
    record(12, "ablation shape over m", ablation_shape());
    record(13, "statistics engine", statistics());
    record(14, "determinism", determinism(first.path(), second.path()));

    let failed: Vec<u32> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    println!(
        "acceptance: {}/{} passed{}",
        results.len() - failed.len(),
        results.len(),
        if failed.is_empty() { String::new() } else { format!(", failed {failed:?}") }
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}

#[allow(dead_code)]
fn _weights_type_check(w: &WeightVector) -> usize {
    w.m()
}
