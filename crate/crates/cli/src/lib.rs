//! Library surface of the CLI: problem ingestion, pipeline orchestration and
//! report assembly, kept separate from the binary for testability.

pub mod pipeline;
pub mod problem;
pub mod report;
