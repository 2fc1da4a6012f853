//! Command-line layer: configuration, dispatch and emission.

mod commands;
mod config;
mod output;

pub use commands::{
    run_command, verify, CliError, Command, VerifySummary, LATTICE_BLOCH_TOLERANCE, MAGNUS_RK4_TOLERANCE,
    VERIFY_KD_POINTS, VERIFY_RING_SIZES,
};
pub use config::{fmt_float, parse_number, ConfigError, Format, MetaValue, RawValue, RunConfig, TqRule, PARAM_KEYS};
pub use output::{emit, emit_to_string, OutputTable, TOOL};
