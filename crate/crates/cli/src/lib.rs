//! Library surface of the command-line tool: scenario files, the published
//! verification report, and CSV emission.

pub mod config;
pub mod output;
pub mod report;
