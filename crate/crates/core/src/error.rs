use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("line {line}: syntax error: {message}")]
    Syntax { line: u32, message: String },
    #[error("copybook {0} not found")]
    MissingCopybook(String),
    #[error("copybook nesting: {0}")]
    CopybookNesting(String),
    #[error("duplicate data item {name} in {path}")]
    DuplicateDataItem { name: String, path: String },
    #[error("line {line}: unresolved name {name}")]
    UnresolvedName { name: String, line: u32 },
    #[error("line {line}: ambiguous name {name}")]
    AmbiguousName { name: String, line: u32 },
    #[error("line {line}: screen map syntax error: {message}")]
    MapSyntax { line: u32, message: String },
    #[error("line {line}: unknown paragraph {name}")]
    UnknownParagraph { name: String, line: u32 },
    #[error("duplicate program {0}")]
    DuplicateProgram(String),
    #[error("duplicate paragraph {0}")]
    DuplicateParagraph(String),
    #[error("unknown program {0}")]
    UnknownProgram(String),
    #[error("invalid region {program}:{start}-{end}: {reason}")]
    InvalidRegion { program: String, start: u32, end: u32, reason: &'static str },
    #[error("fixpoint did not converge within {0} iterations")]
    NonTerminatingFixpoint(usize),
    #[error("path budget exceeded after {0} paths")]
    PathBudgetExceeded(usize),
    #[error("callee {0} is not in the workspace")]
    MissingCallee(String),
    #[error("transaction {txn} names unknown program {program}")]
    UnknownTransactionProgram { txn: String, program: String },
    #[error("program {0} performs no data access")]
    NoDataAccess(String),
    #[error("no signature field lies in the copybook")]
    EmptySlice,
    #[error("argument binding mismatch: {0}")]
    BindingMismatch(String),
}

impl Error {
    pub(crate) fn syntax(line: u32, message: impl Into<String>) -> Self {
        Error::Syntax { line, message: message.into() }
    }
}
