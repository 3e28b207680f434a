//! Static analysis for exposing COBOL code blocks as APIs.
//!
//! The crate is `no_std` (with `alloc`) and performs no IO: sources, copybooks
//! and screen maps come in as text, results go out as plain data. The `apify`
//! crate layers file loading, JSON and the command line on top.
//!
//! Pipeline:
//!
//! 1. [`frontend`] parses a MiniCOBOL program into a [`frontend::SourceUnit`]
//!    with a byte-accurate data dictionary and per-statement read/write sets.
//! 2. [`graphs`] builds the statement-level control-flow graph and the
//!    inter-program call graph.
//! 3. [`discovery`] enumerates candidate APIs (transactions, dispatch arms,
//!    data-access runs, standalone paragraphs, screens, call boundaries).
//! 4. [`signature`] computes request/response fields for a region under the
//!    flow-insensitive, flow-sensitive and path-sensitive variants, with or
//!    without call-chain analysis.
//! 5. [`refactor`] reports terminal-command guards, SQL narrowing, copybook
//!    slices and caller mappings.
//! 6. [`oracle`] is the path-enumerating reference used to check the static
//!    analyses for soundness and precision.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod discovery;
mod error;
pub mod frontend;
pub mod graphs;
pub mod oracle;
pub mod refactor;
pub mod signature;
mod workspace;

pub use error::{Error, Result};
pub use workspace::Workspace;
