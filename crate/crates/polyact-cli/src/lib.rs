//! Scenario loading, law sweeps and report assembly behind the polyact
//! binary, kept as a library so scenario documents can be produced and
//! consumed programmatically.

pub mod cli;
pub mod commands;
pub mod report;
pub mod scenario;
