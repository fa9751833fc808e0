//! Network files, report and table serialization, and command orchestration.

mod network_file;
mod output;
mod run;

pub use network_file::{
    load_network, load_network_sizes, parse_network, read_network_source, serialize_network, EdgeEntry, NetworkFile,
    NetworkSource, NodeEntry, FORMAT_VERSION,
};
pub use output::{fmt_f64, path_csv, to_json, trajectory_csv, write_artifact};
pub use run::{
    parse_operator, parse_property, parse_vector, read_system, run_command, stabilization, Command, GridSpec,
    RunConfig, RunOutcome, Stabilization, SystemFile, EXIT_FAILED, EXIT_OK, EXIT_USAGE,
};
