//! Reference semantics for signatures: enumerate the execution paths of a
//! region, compute requests and responses along each path, and union them.
//! Property tests compare the static analyses against this ground truth.

mod generator;
mod paths;
mod verify;

pub use generator::{random_program, random_program_text};
pub use paths::{enumerate_paths, oracle_signature, ExecutionPath, OracleResult, PathRecord};
pub use verify::{check_program, seed_shape, verify_seeds, Violation, VerifyReport};
