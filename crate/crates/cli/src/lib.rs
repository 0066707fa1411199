//! Problem files, JSON reports and the subcommands of the `bbsolve` binary.

pub mod commands;
pub mod problem;
pub mod report;
