//! Refactoring outputs for an exposed region: suggestions about terminal
//! I/O, SQL narrowing and sanity checks, request/response copybook slices,
//! and caller-side argument mappings. Nothing here edits source code.

mod mapping;
mod report;
mod slice;

use alloc::string::String;
use alloc::vec::Vec;

pub use mapping::caller_mapping_report;
pub use report::refactor_report;
pub use slice::{slice_copybook, CopybookSlices};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SuggestionKind {
    GuardTerminalCommand,
    RemoveSanityCheckCandidate,
    NarrowSql,
    SliceCopybook,
    CallerMapping,
}

impl SuggestionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SuggestionKind::GuardTerminalCommand => "guard_terminal_command",
            SuggestionKind::RemoveSanityCheckCandidate => "remove_sanity_check_candidate",
            SuggestionKind::NarrowSql => "narrow_sql",
            SuggestionKind::SliceCopybook => "slice_copybook",
            SuggestionKind::CallerMapping => "caller_mapping",
        }
    }
}

/// One caller item bound to one callee field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldPair {
    /// Qualified name in the caller.
    pub caller: String,
    /// Field name in the callee signature.
    pub field: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Detail {
    Terminal {
        /// Statement kind, e.g. `cics_send_map`.
        statement: String,
        text: String,
    },
    SanityCheck {
        text: String,
    },
    NarrowSql {
        /// Host variables (qualified) the API never returns.
        droppable: Vec<String>,
        /// Select-list columns feeding them.
        columns: Vec<String>,
    },
    SliceCopybook {
        role: String,
        text: String,
    },
    CallerMapping {
        /// Caller argument item feeding each request field.
        requests: Vec<FieldPair>,
        /// Caller argument item receiving each response field.
        responses: Vec<FieldPair>,
        method: String,
        path: String,
        body_fields: Vec<String>,
        response_fields: Vec<String>,
        degraded: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefactorSuggestion {
    pub kind: SuggestionKind,
    pub program: String,
    pub line: u32,
    pub detail: Detail,
    pub rationale: String,
}
