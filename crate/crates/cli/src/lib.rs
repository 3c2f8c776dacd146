//! Library side of the `geopath` command-line tool: manifest parsing,
//! CSV output and the command implementations.

pub mod commands;
pub mod manifest;
pub mod output;
