//! Seeded problem generation, success metrics and Monte-Carlo experiments.

mod config;
mod generate;
pub mod io;
mod metrics;
mod rng;
mod suite;
mod sweep;

pub use config::{AlgorithmSpec, SuiteConfig};
pub use generate::{gaussian_dictionary, gen_problem, gen_signal, CoeffDist};
pub use metrics::{judge, snr_db, support_detected, DEFAULT_SNR_THRESHOLD_DB, SNR_INFINITE_RATIO};
pub use rng::{derive_seed, SampleRng};
pub use suite::{
    run_algorithm, run_suite, run_suite_with_workers, with_workers, AlgorithmSummary, Certificate, SuiteReport,
    SuiteRun, TrialRecord, CERTIFICATE_TOL,
};
pub use sweep::{run_phase, run_sweep, PhaseGrid, PhaseSpec, SweepRow, SweepTable};
