//! Experiment harness for the Bergman-space decomposition library: a JSON
//! configured runner that compares the adaptive decomposition against a
//! Fourier (normalized monomial) baseline and writes CSV, JSON and gnuplot
//! artifacts for inspection.

pub mod config;
pub mod error;
pub mod experiment;
pub mod fourier;

pub use config::{Method, RunConfig, SelectionOverride};
pub use error::{CliError, CliResult};
pub use experiment::{run_experiment, MatrixRow, MethodSummary, Summary};
pub use fourier::{fourier_baseline, FourierRun};
