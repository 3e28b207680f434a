use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{Detail, RefactorSuggestion, SuggestionKind};
use crate::frontend::{Form, ItemId, SourceUnit, StmtId, StmtKind};
use crate::graphs::CodeRegion;
use crate::signature::{ApiSignature, Scope};

/// Every statement nested in `s`, depth first.
fn descendants(unit: &SourceUnit, s: StmtId, out: &mut Vec<StmtId>) {
    for c in unit.stmt(s).children() {
        out.push(c);
        descendants(unit, c, out);
    }
}

/// Suggestions for the statements of `region`, sorted by line and kind.
pub fn refactor_report(unit: &SourceUnit, region: &CodeRegion, signature: &ApiSignature) -> Vec<RefactorSuggestion> {
    let responses = signature.response_items();
    let read_in_region: BTreeSet<ItemId> = Scope::of_region(unit, region).nodes().iter().flat_map(|&n| unit.stmt(n).reads.iter().copied()).collect();
    let mut out = Vec::new();
    let program = &region.program;
    for &id in &region.statements {
        let s = unit.stmt(id);
        match s.kind {
            StmtKind::CicsSendMap | StmtKind::CicsReceiveMap | StmtKind::Display | StmtKind::Accept => out.push(RefactorSuggestion {
                kind: SuggestionKind::GuardTerminalCommand,
                program: program.clone(),
                line: s.line,
                detail: Detail::Terminal { statement: s.kind.as_str().to_string(), text: s.text.clone() },
                rationale: String::from("terminal I/O has no caller once the code runs as an API; remove it or guard it with a mode flag"),
            }),
            StmtKind::SqlSelect => {
                let Some(sql) = &s.sql else { continue };
                let mut droppable = Vec::new();
                let mut columns = Vec::new();
                for (i, &h) in sql.into.iter().enumerate() {
                    if unit.data.closure(h).iter().any(|x| responses.contains(x) || read_in_region.contains(x)) {
                        continue;
                    }
                    droppable.push(unit.data.qualified_name(h));
                    if let Some(c) = sql.columns.get(i) {
                        columns.push(c.clone());
                    }
                }
                if !droppable.is_empty() {
                    out.push(RefactorSuggestion {
                        kind: SuggestionKind::NarrowSql,
                        program: program.clone(),
                        line: s.line,
                        detail: Detail::NarrowSql { droppable, columns },
                        rationale: String::from("the API neither returns nor uses these host variables; fetch only the columns it needs"),
                    });
                }
            }
            StmtKind::If => {
                let mut inner = Vec::new();
                descendants(unit, id, &mut inner);
                let only_terminal = !inner.is_empty()
                    && inner.iter().all(|&c| matches!(unit.stmt(c).kind, StmtKind::Display | StmtKind::Accept) || matches!(unit.stmt(c).form, Form::If { .. }));
                let has_io = inner.iter().any(|&c| matches!(unit.stmt(c).kind, StmtKind::Display | StmtKind::Accept));
                if only_terminal && has_io {
                    out.push(RefactorSuggestion {
                        kind: SuggestionKind::RemoveSanityCheckCandidate,
                        program: program.clone(),
                        line: s.line,
                        detail: Detail::SanityCheck { text: s.text.clone() },
                        rationale: String::from("candidate only: this check reports to the terminal and changes no data; review whether the API still needs it"),
                    });
                }
            }
            _ => {}
        }
    }
    out.sort_by_key(|s| (s.line, s.kind));
    out
}
