use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use super::data::{DataDictionary, ItemId};

/// Index of a statement within its unit, in source (pre-)order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StmtId(pub u32);

impl StmtId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Literal {
    Str(String),
    Num(String),
    /// ZERO, SPACE, HIGH-VALUE, ...; stored in canonical singular form.
    Figurative(String),
}

impl Literal {
    fn as_number(&self) -> Option<f64> {
        match self {
            Literal::Num(n) => n.parse().ok(),
            Literal::Figurative(f) if f == "ZERO" => Some(0.0),
            Literal::Str(s) => {
                let t = s.trim();
                if !t.is_empty() && t.chars().all(|c| c.is_ascii_digit() || c == '.' || c == '-') {
                    t.parse().ok()
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// Compares two literals when the outcome is certain.
    pub fn compare(&self, other: &Literal) -> Option<core::cmp::Ordering> {
        if let (Some(a), Some(b)) = (self.as_number(), other.as_number()) {
            return a.partial_cmp(&b);
        }
        match (self, other) {
            (Literal::Str(a), Literal::Str(b)) => Some(a.trim_end().cmp(b.trim_end())),
            (Literal::Figurative(a), Literal::Figurative(b)) if a == b => Some(core::cmp::Ordering::Equal),
            (Literal::Figurative(f), Literal::Str(s)) | (Literal::Str(s), Literal::Figurative(f)) if f == "SPACE" => {
                let eq = s.trim().is_empty();
                if eq {
                    Some(core::cmp::Ordering::Equal)
                } else {
                    None
                }
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Operand {
    Item(ItemId),
    Lit(Literal),
    /// Anything else (arithmetic expression, function call).
    Opaque,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl RelOp {
    pub fn holds(self, ord: core::cmp::Ordering) -> bool {
        use core::cmp::Ordering::*;
        match self {
            RelOp::Eq => ord == Equal,
            RelOp::Ne => ord != Equal,
            RelOp::Lt => ord == Less,
            RelOp::Le => ord != Greater,
            RelOp::Gt => ord == Greater,
            RelOp::Ge => ord != Less,
        }
    }
}

/// Branch condition, kept only as precisely as constant folding needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cond {
    Rel { lhs: Operand, op: RelOp, rhs: Operand },
    /// Level-88 condition name test: parent item and its condition values.
    Condition { item: ItemId, values: Vec<Literal> },
    And(alloc::boxed::Box<Cond>, alloc::boxed::Box<Cond>),
    Or(alloc::boxed::Box<Cond>, alloc::boxed::Box<Cond>),
    Not(alloc::boxed::Box<Cond>),
    Opaque,
}

impl Cond {
    /// Three-valued evaluation given the statically known values.
    pub fn eval(&self, value: &dyn Fn(ItemId) -> Option<Literal>) -> Option<bool> {
        let operand = |o: &Operand| match o {
            Operand::Item(i) => value(*i),
            Operand::Lit(l) => Some(l.clone()),
            Operand::Opaque => None,
        };
        match self {
            Cond::Rel { lhs, op, rhs } => {
                let (a, b) = (operand(lhs)?, operand(rhs)?);
                Some(op.holds(a.compare(&b)?))
            }
            Cond::Condition { item, values } => {
                let v = value(*item)?;
                let mut any_unknown = false;
                for c in values {
                    match v.compare(c) {
                        Some(core::cmp::Ordering::Equal) => return Some(true),
                        Some(_) => {}
                        None => any_unknown = true,
                    }
                }
                if any_unknown {
                    None
                } else {
                    Some(false)
                }
            }
            Cond::And(a, b) => match (a.eval(value), b.eval(value)) {
                (Some(false), _) | (_, Some(false)) => Some(false),
                (Some(true), Some(true)) => Some(true),
                _ => None,
            },
            Cond::Or(a, b) => match (a.eval(value), b.eval(value)) {
                (Some(true), _) | (_, Some(true)) => Some(true),
                (Some(false), Some(false)) => Some(false),
                _ => None,
            },
            Cond::Not(a) => a.eval(value).map(|b| !b),
            Cond::Opaque => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StmtKind {
    Move,
    Arithmetic,
    If,
    EvaluateWhen,
    Perform,
    GoTo,
    Call,
    CicsReceiveMap,
    CicsSendMap,
    CicsLink,
    CicsReturn,
    SqlSelect,
    SqlInsert,
    SqlUpdate,
    SqlDelete,
    FileRead,
    FileWrite,
    Display,
    Accept,
    Initialize,
    GoBack,
    StopRun,
    Exit,
    Other,
}

impl StmtKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StmtKind::Move => "move",
            StmtKind::Arithmetic => "arithmetic",
            StmtKind::If => "if",
            StmtKind::EvaluateWhen => "evaluate_when",
            StmtKind::Perform => "perform",
            StmtKind::GoTo => "goto",
            StmtKind::Call => "call",
            StmtKind::CicsReceiveMap => "cics_receive_map",
            StmtKind::CicsSendMap => "cics_send_map",
            StmtKind::CicsLink => "cics_link",
            StmtKind::CicsReturn => "cics_return",
            StmtKind::SqlSelect => "sql_select",
            StmtKind::SqlInsert => "sql_insert",
            StmtKind::SqlUpdate => "sql_update",
            StmtKind::SqlDelete => "sql_delete",
            StmtKind::FileRead => "file_read",
            StmtKind::FileWrite => "file_write",
            StmtKind::Display => "display",
            StmtKind::Accept => "accept",
            StmtKind::Initialize => "initialize",
            StmtKind::GoBack => "goback",
            StmtKind::StopRun => "stop_run",
            StmtKind::Exit => "exit",
            StmtKind::Other => "other",
        }
    }

    pub fn is_call(self) -> bool {
        matches!(self, StmtKind::Call | StmtKind::CicsLink)
    }

    pub fn is_sql(self) -> bool {
        matches!(self, StmtKind::SqlSelect | StmtKind::SqlInsert | StmtKind::SqlUpdate | StmtKind::SqlDelete)
    }

    pub fn is_data_access(self) -> bool {
        self.is_sql() || matches!(self, StmtKind::FileRead | StmtKind::FileWrite)
    }

    pub fn is_terminal_io(self) -> bool {
        matches!(self, StmtKind::CicsReceiveMap | StmtKind::CicsSendMap | StmtKind::Display | StmtKind::Accept)
    }

    /// Statements that end the program (no control-flow successor).
    pub fn terminates(self) -> bool {
        matches!(self, StmtKind::GoBack | StmtKind::StopRun | StmtKind::CicsReturn)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SqlInfo {
    /// Select-list column texts, positionally matching `into`.
    pub columns: Vec<String>,
    pub into: Vec<ItemId>,
    pub tables: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WhenValue {
    Lit(Literal),
    Item(ItemId),
    Cond(Cond),
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WhenArm {
    pub line: u32,
    /// Source text of each stacked `WHEN` clause (without the keyword).
    pub texts: Vec<String>,
    pub values: Vec<WhenValue>,
    pub body: Vec<StmtId>,
}

impl WhenArm {
    pub fn is_other(&self) -> bool {
        self.values.iter().any(|v| matches!(v, WhenValue::Other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalSubject {
    True,
    Operand(Operand),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerformTarget {
    pub from: String,
    pub thru: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Form {
    Simple,
    Move { source: Operand, targets: Vec<ItemId> },
    If { cond: Cond, then_branch: Vec<StmtId>, else_branch: Option<Vec<StmtId>> },
    Evaluate { subject: EvalSubject, arms: Vec<WhenArm> },
    /// `until` is `Some` for looping forms (UNTIL, VARYING, TIMES).
    Perform { target: Option<PerformTarget>, until: Option<Cond>, body: Vec<StmtId> },
    GoTo { target: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Statement {
    pub id: StmtId,
    pub line: u32,
    /// Line of the statement's last token, including nested statements.
    pub end_line: u32,
    pub kind: StmtKind,
    pub reads: BTreeSet<ItemId>,
    pub writes: BTreeSet<ItemId>,
    /// Program (CALL / LINK) or paragraph (PERFORM / GO TO) target.
    pub call_target: Option<String>,
    /// CALL through an identifier: target unknown statically.
    pub dynamic_call: bool,
    pub call_arguments: Vec<ItemId>,
    pub form: Form,
    pub sql: Option<SqlInfo>,
    pub map_name: Option<String>,
    /// REWRITE (update in place) rather than WRITE.
    pub rewrite: bool,
    pub paragraph: usize,
    /// Source text of a leaf statement, or the header of a compound one.
    pub text: String,
}

impl Statement {
    /// Directly nested statements, in source order.
    pub fn children(&self) -> Vec<StmtId> {
        match &self.form {
            Form::If { then_branch, else_branch, .. } => {
                let mut v = then_branch.clone();
                if let Some(e) = else_branch {
                    v.extend(e.iter().copied());
                }
                v
            }
            Form::Evaluate { arms, .. } => arms.iter().flat_map(|a| a.body.iter().copied()).collect(),
            Form::Perform { body, .. } => body.clone(),
            _ => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Paragraph {
    pub name: String,
    pub line: u32,
    /// Top-level statements of the paragraph.
    pub body: Vec<StmtId>,
    /// All statements of the paragraph including nested ones, contiguous.
    pub first: StmtId,
    pub len: u32,
}

impl Paragraph {
    pub fn statement_ids(&self) -> impl Iterator<Item = StmtId> {
        (self.first.0..self.first.0 + self.len).map(StmtId)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceUnit {
    pub program_id: String,
    pub data: DataDictionary,
    pub using: Vec<ItemId>,
    pub paragraphs: Vec<Paragraph>,
    pub statements: Vec<Statement>,
    pub copybooks_used: Vec<String>,
    pub source_lines: Vec<(u32, String)>,
}

impl SourceUnit {
    pub fn stmt(&self, id: StmtId) -> &Statement {
        &self.statements[id.index()]
    }

    pub fn paragraph_index(&self, name: &str) -> Option<usize> {
        self.paragraphs.iter().position(|p| p.name.eq_ignore_ascii_case(name))
    }

    /// Linkage parameters: the USING list, or `DFHCOMMAREA` when a CICS
    /// program declares one without USING.
    pub fn parameters(&self) -> Vec<ItemId> {
        if !self.using.is_empty() {
            return self.using.clone();
        }
        self.data
            .roots()
            .filter(|&r| {
                let d = self.data.get(r);
                d.name == "DFHCOMMAREA" && d.section == super::data::Section::Linkage
            })
            .collect()
    }

    /// Copy with all line information dropped, for structural comparison.
    pub fn shape(&self) -> SourceUnit {
        let mut u = self.clone();
        u.source_lines.clear();
        u.copybooks_used.clear();
        for p in &mut u.paragraphs {
            p.line = 0;
        }
        for s in &mut u.statements {
            s.line = 0;
            s.end_line = 0;
            if let Form::Evaluate { arms, .. } = &mut s.form {
                for a in arms {
                    a.line = 0;
                }
            }
        }
        u
    }

    pub fn first_line(&self) -> Option<u32> {
        self.statements.first().map(|s| s.line)
    }

    pub fn last_line(&self) -> Option<u32> {
        self.statements.iter().map(|s| s.end_line).max()
    }
}
