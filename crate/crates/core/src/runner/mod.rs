//! Configuration, run orchestration and the files a run leaves behind.

mod config;
mod output;
mod selftest;
mod simulate;
mod studies;

pub use config::{parse_config, SimConfig};
pub use output::{fmt_f64, timeseries_header, timeseries_row, TIMESERIES_COLUMNS};
pub use selftest::{random_field, selftest, SelftestReport, FIELDS_PER_LENGTH, KERNEL_SAMPLES, MARGIN_TOL};
pub use simulate::{run_simulation, SimulationOutput, SnapshotInfo};
pub use studies::{
    perturbation_profile, perturbation_study, refinement_study, study_pool, LevelCheckpoint, PerturbationReport,
    PerturbationRow, RefinementLevel, RefinementReport, AGREEMENT_RTOL, STUDY_CHECKPOINTS,
};
