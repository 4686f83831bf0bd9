//! Problem-file and report formats of the `strad` command-line tool,
//! exposed as a library so tooling and tests can reuse the parsers.

pub mod format;
pub mod report;
