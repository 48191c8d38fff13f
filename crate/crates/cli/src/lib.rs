//! Command-line front end for `ctlz-core`: file formats, the `ctlz`
//! subcommands and the acceptance self-test.

pub mod commands;
pub mod format;
pub mod selftest;

pub use commands::run;
