//! Verification suites and the report format behind the `bk` command.

pub mod cli;
pub mod report;
pub mod suites;
