mod calibrate;
mod experiment;
mod generators;

pub use calibrate::{
    calibrate, calibration_rows, default_corpus, log2_ceil, oracle_corpus, Calibration, CalibrationOutcome, Ratios,
    HEADROOM, ORACLE_BITS,
};
pub use experiment::{read_csv, run_experiment, write_csv, ExperimentOptions, ExperimentRow, CSV_COLUMNS};
pub use generators::{generate, Family, FamilySpec, Instance};
