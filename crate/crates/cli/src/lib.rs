//! Seeded experiment runner over the `san-core` cost models.
//!
//! Every command is a plain function returning the files it wrote, so the
//! binary, the tests and other tools share one code path.

pub mod commands;
pub mod config;
pub mod output;
pub mod scenario;

pub use commands::{
    cmd_entropy, cmd_export_net, cmd_gen_trace, cmd_ratio, cmd_run, resolve_workers, RunOptions,
    SummaryRow,
};
pub use config::ScenarioConfig;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;
pub const EXIT_IO: i32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("invariant breach: {0}")]
    Invariant(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Invariant(_) => EXIT_INVARIANT,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl From<san_core::Error> for CliError {
    fn from(e: san_core::Error) -> Self {
        use san_core::Error as E;
        match e {
            E::ConstraintBreach(_) | E::Disconnected { .. } => CliError::Invariant(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}
