//! Security-game harness, randomized suites and benchmarks for the
//! credential protocol.

pub mod bench;
pub mod oracle;
pub mod scenario;
pub mod suites;
