//! Library backing the `fbnoma` command line: figure presets, the sweep
//! runner with CSV and SVG output, and the solver-vs-oracle check.

pub mod config;
pub mod oracle_check;
pub mod plot;
pub mod presets;
pub mod report;
pub mod sweep;
