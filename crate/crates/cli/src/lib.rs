//! Library side of the `lindyn` command: configuration, the example
//! registry and the subcommands.

pub mod commands;
pub mod config;
pub mod registry;
