//! System files, report emission and the `binoether` command line.

pub mod report;
pub mod sysfile;

pub use report::{from_json, render_text, to_json};
pub use sysfile::{load_system, parse_system, write_system, LoadError};
