//! Matrix files, configuration and JSON reports.

mod config;
mod matrix_file;
mod report;

pub use config::{load_config, RunConfig};
pub use matrix_file::{
    decode_bin, encode_bin, format_csv, parse_csv, read_matrix, write_matrix, MatrixFile,
    MatrixFormat, BIN_HEADER_LEN, BIN_MAGIC, BIN_VERSION,
};
pub use report::{
    errors_from_trace, phase_csv, read_json, write_json, zetas_from_trace, BenchFile, MuSource,
    PhaseFile, SolveReport, SynthFiles, SynthMetadata, Versioned, SCHEMA_VERSION,
};
