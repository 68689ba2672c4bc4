//! Configuration, orchestration and file output for the `curveflow` binary.

pub mod config;
pub mod run;
pub mod svg;
pub mod sweep;

pub use config::{parse_config, ConfigError, InitialSource, Outputs, RunConfig};
pub use run::{run, simulate};
pub use sweep::{sweep, write_summary_csv, Axis, AxisValue, SweepRow};
