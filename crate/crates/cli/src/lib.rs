//! Library side of the `e3lab` command-line tool.

pub mod commands;
pub mod config;
pub mod report;
