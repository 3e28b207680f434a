//! Line-range code regions.

use alloc::string::String;
use alloc::vec::Vec;

use crate::frontend::{SourceUnit, StmtId};
use crate::{Error, Result};

/// The statements of one program whose first line lies in `[start_line, end_line]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CodeRegion {
    pub program: String,
    pub start_line: u32,
    pub end_line: u32,
    pub statements: Vec<StmtId>,
}

impl CodeRegion {
    pub fn new(unit: &SourceUnit, start_line: u32, end_line: u32) -> Result<CodeRegion> {
        let invalid = |reason| Error::InvalidRegion { program: unit.program_id.clone(), start: start_line, end: end_line, reason };
        if start_line == 0 || start_line > end_line {
            return Err(invalid("start line must be positive and not after the end line"));
        }
        let statements: Vec<StmtId> =
            unit.statements.iter().filter(|s| (start_line..=end_line).contains(&s.line)).map(|s| s.id).collect();
        if statements.is_empty() {
            return Err(invalid("no statements in range"));
        }
        Ok(CodeRegion { program: unit.program_id.clone(), start_line, end_line, statements })
    }

    /// The region spanning every statement of the unit.
    pub fn whole(unit: &SourceUnit) -> Result<CodeRegion> {
        let (Some(first), Some(last)) = (unit.first_line(), unit.last_line()) else {
            return Err(Error::InvalidRegion { program: unit.program_id.clone(), start: 0, end: 0, reason: "program has no statements" });
        };
        CodeRegion::new(unit, first, last)
    }

    pub fn contains(&self, s: StmtId) -> bool {
        self.statements.binary_search(&s).is_ok()
    }

    pub fn entry(&self) -> StmtId {
        self.statements[0]
    }
}
