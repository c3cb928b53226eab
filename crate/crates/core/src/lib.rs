//! Pascal-weighted multi-parent recombination for genetic algorithms, with
//! the benchmark problems and rank statistics used to evaluate it.

pub mod analytics;
pub mod bench;
pub mod cli;
pub mod engine;
pub mod error;
pub mod genome;
pub mod operators;
pub mod pascal;
pub mod problems;

pub use engine::{run, run_seeds, EngineConfig, GenerationStats, RunTrace};
pub use error::{Error, Result};
pub use genome::{Bounds, Genome, Modulation};
pub use operators::{MutationSpec, OperatorKind, OperatorSpec};
pub use pascal::{pascal_weights, variance_ratio, WeightShape, WeightVector};
pub use problems::{Direction, Problem};
