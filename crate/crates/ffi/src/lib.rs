//! C ABI over `pascal_ga`.
//!
//! Every fallible call returns a [`PgaStatus`]. On failure the message is kept
//! per thread and read back with [`pga_last_error_message`]. Handles are
//! opaque, owned by the caller, and released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use pascal_ga::bench::{Method, Task, TaskConfig};
use pascal_ga::{engine, pascal, Error, Genome, Modulation, Problem, RunTrace};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Domain = 4,
    Evaluation = 5,
    Io = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// A benchmark task with its configuration and generated instance.
pub struct PgaTask {
    config: TaskConfig,
    problem: Box<dyn Problem>,
}

/// The result of one GA run.
pub struct PgaRun {
    trace: RunTrace,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

struct Fail {
    status: PgaStatus,
    message: String,
}

impl Fail {
    fn new(status: PgaStatus, message: impl Into<String>) -> Self {
        Fail {
            status,
            message: message.into(),
        }
    }

    fn null(what: &str) -> Self {
        Fail::new(PgaStatus::NullPointer, format!("{what} is null"))
    }
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Config(_) => PgaStatus::Config,
            Error::Domain(_) => PgaStatus::Domain,
            Error::Evaluation { .. } => PgaStatus::Evaluation,
            Error::Io { .. } | Error::Csv { .. } | Error::Json { .. } => PgaStatus::Io,
            _ => PgaStatus::InvalidArgument,
        };
        Fail::new(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> PgaStatus {
    let fail = match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| e.borrow_mut().clear());
            return PgaStatus::Ok;
        }
        Ok(Err(fail)) => fail,
        Err(_) => Fail::new(PgaStatus::Panic, "internal panic"),
    };
    LAST_ERROR.with(|e| *e.borrow_mut() = fail.message);
    fail.status
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail::new(PgaStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if p.is_null() {
        return Err(Fail::null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn out_slice<'a, T>(p: *mut T, len: usize, need: usize, what: &str) -> Result<&'a mut [T], Fail> {
    if p.is_null() {
        return Err(Fail::null(what));
    }
    if len < need {
        return Err(Fail::new(
            PgaStatus::BufferTooSmall,
            format!("{what} holds {len} values, {need} needed"),
        ));
    }
    Ok(slice::from_raw_parts_mut(p, need))
}

unsafe fn write<T>(p: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if p.is_null() {
        return Err(Fail::null(what));
    }
    p.write(value);
    Ok(())
}

/// Copies `text` plus a NUL into `buf`, truncating when `len` is short.
unsafe fn copy_c_string(text: &str, buf: *mut c_char, len: usize) -> Result<(), Fail> {
    if buf.is_null() {
        return Err(Fail::null("buf"));
    }
    if len == 0 {
        return Err(Fail::new(PgaStatus::BufferTooSmall, "buffer length is 0"));
    }
    let n = text.len().min(len - 1);
    ptr::copy_nonoverlapping(text.as_ptr().cast::<c_char>(), buf, n);
    buf.add(n).write(0);
    if n < text.len() {
        return Err(Fail::new(
            PgaStatus::BufferTooSmall,
            format!("{} bytes needed, buffer holds {len}", text.len() + 1),
        ));
    }
    Ok(())
}

/// Byte length of the calling thread's last error message, without the NUL.
#[no_mangle]
pub extern "C" fn pga_last_error_length() -> usize {
    LAST_ERROR.with(|e| e.borrow().len())
}

/// Copies the calling thread's last error message into `buf` as a C string.
/// Does not overwrite the stored message.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn pga_last_error_message(buf: *mut c_char, len: usize) -> PgaStatus {
    let text = LAST_ERROR.with(|e| e.borrow().clone());
    match copy_c_string(&text, buf, len) {
        Ok(()) => PgaStatus::Ok,
        Err(f) => f.status,
    }
}

/// Writes the `m` Pascal weights into `out`.
///
/// # Safety
/// `out` must be null or point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn pga_pascal_weights(m: usize, out: *mut f64, len: usize) -> PgaStatus {
    guard(|| {
        let w = pascal::pascal_weights(m)?;
        out_slice(out, len, m, "out")?.copy_from_slice(w.weights());
        Ok(())
    })
}

/// Variance of a Pascal-weighted offspring relative to one parent.
///
/// # Safety
/// `out` must be null or point to a writable double.
#[no_mangle]
pub unsafe extern "C" fn pga_variance_ratio(m: usize, out: *mut f64) -> PgaStatus {
    guard(|| write(out, pascal::variance_ratio(m)?, "out"))
}

/// Sum of the n-th shallow diagonal of Pascal's triangle, F(n+1).
///
/// # Safety
/// `out` must be null or point to a writable u64.
#[no_mangle]
pub unsafe extern "C" fn pga_fibonacci_diagonal(n: u32, out: *mut u64) -> PgaStatus {
    guard(|| write(out, pascal::fibonacci_diagonal(n)?, "out"))
}

/// Builds a task (`pid`, `fir`, `wireless`, `tsp` or `sphere`) with default
/// settings, then applies `config_json`, a flat object of dotted keys such as
/// `{"generations": 20, "tsp.cities": 12}`. `config_json` may be null.
///
/// # Safety
/// String arguments must be null or NUL-terminated; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn pga_task_new(
    name: *const c_char,
    config_json: *const c_char,
    out: *mut *mut PgaTask,
) -> PgaStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail::null("out"));
        }
        let task: Task = str_arg(name, "name")?.parse()?;
        let mut config = TaskConfig::defaults(task);
        if !config_json.is_null() {
            let text = str_arg(config_json, "config_json")?;
            let value: serde_json::Value = serde_json::from_str(text)
                .map_err(|e| Fail::new(PgaStatus::InvalidArgument, format!("config_json: {e}")))?;
            config.apply_json(&value)?;
        }
        let problem = config.problem(None)?;
        out.write(Box::into_raw(Box::new(PgaTask { config, problem })));
        Ok(())
    })
}

/// # Safety
/// `task` must be null or a handle from [`pga_task_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pga_task_free(task: *mut PgaTask) {
    if !task.is_null() {
        drop(Box::from_raw(task));
    }
}

unsafe fn task_ref<'a>(task: *const PgaTask) -> Result<&'a PgaTask, Fail> {
    task.as_ref().ok_or_else(|| Fail::null("task"))
}

unsafe fn evaluate(task: *const PgaTask, genome: Genome, out: *mut f64) -> Result<(), Fail> {
    let fitness = task_ref(task)?.problem.evaluate(&genome)?;
    write(out, fitness, "out")
}

/// Fitness of a real-coded genome (pid, fir, sphere).
///
/// # Safety
/// `genes` must point to `len` doubles; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn pga_task_evaluate_real(
    task: *const PgaTask,
    genes: *const f64,
    len: usize,
    out: *mut f64,
) -> PgaStatus {
    guard(|| {
        let genes = slice_arg(genes, len, "genes")?.to_vec();
        evaluate(task, Genome::Real(genes), out)
    })
}

/// Length of a tour (tsp).
///
/// # Safety
/// `tour` must point to `len` city indices; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn pga_task_evaluate_tour(
    task: *const PgaTask,
    tour: *const usize,
    len: usize,
    out: *mut f64,
) -> PgaStatus {
    guard(|| {
        let tour = slice_arg(tour, len, "tour")?.to_vec();
        evaluate(task, Genome::Permutation(tour), out)
    })
}

/// Utility of a power allocation with per-link modulation orders 2, 4, 16 or 64 (wireless).
///
/// # Safety
/// `powers` and `orders` must each point to `len` values; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn pga_task_evaluate_wireless(
    task: *const PgaTask,
    powers: *const f64,
    orders: *const u32,
    len: usize,
    out: *mut f64,
) -> PgaStatus {
    guard(|| {
        let powers = slice_arg(powers, len, "powers")?.to_vec();
        let modulations = slice_arg(orders, len, "orders")?
            .iter()
            .map(|&o| Modulation::from_order(o))
            .collect::<Result<Vec<_>, _>>()?;
        evaluate(task, Genome::PowerModulation { powers, modulations }, out)
    })
}

/// Runs the GA once with `method` (e.g. `pwr3`, `arith`, `pmx`) and `seed`.
///
/// # Safety
/// `task` must be a live handle; `method` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pga_run(
    task: *const PgaTask,
    method: *const c_char,
    seed: u64,
    out: *mut *mut PgaRun,
) -> PgaStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail::null("out"));
        }
        let task = task_ref(task)?;
        let method = Method::parse(str_arg(method, "method")?, task.config.boosted_mutation_factor)?;
        let trace = engine::run(task.problem.as_ref(), &task.config.engine(&method, seed))?;
        out.write(Box::into_raw(Box::new(PgaRun { trace })));
        Ok(())
    })
}

/// # Safety
/// `run` must be null or a handle from [`pga_run`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pga_run_free(run: *mut PgaRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Champion fitness, or NaN for a null handle.
///
/// # Safety
/// `run` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pga_run_champion_fitness(run: *const PgaRun) -> f64 {
    run.as_ref().map_or(f64::NAN, |r| r.trace.champion_fitness)
}

/// Number of recorded generations, 0 for a null handle.
///
/// # Safety
/// `run` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pga_run_generations(run: *const PgaRun) -> usize {
    run.as_ref().map_or(0, |r| r.trace.per_generation.len())
}

/// Best-so-far fitness per generation.
///
/// # Safety
/// `run` must be a live handle; `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn pga_run_best_trace(run: *const PgaRun, out: *mut f64, len: usize) -> PgaStatus {
    guard(|| {
        let run = run.as_ref().ok_or_else(|| Fail::null("run"))?;
        let gens = &run.trace.per_generation;
        let out = out_slice(out, len, gens.len(), "out")?;
        for (o, g) in out.iter_mut().zip(gens) {
            *o = g.best;
        }
        Ok(())
    })
}

/// Champion genome as JSON, e.g. `{"kind":"real","genes":[...]}`.
///
/// # Safety
/// `run` must be a live handle; `buf` must point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn pga_run_champion_json(run: *const PgaRun, buf: *mut c_char, len: usize) -> PgaStatus {
    guard(|| {
        let run = run.as_ref().ok_or_else(|| Fail::null("run"))?;
        copy_c_string(&run.trace.champion.to_string(), buf, len)
    })
}
