use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use super::{HttpMethod, Scope};
use crate::frontend::{SourceUnit, StmtKind};
use crate::graphs::CodeRegion;
use crate::Workspace;

fn method_of(kind: StmtKind, rewrite: bool) -> HttpMethod {
    match kind {
        StmtKind::SqlDelete => HttpMethod::Delete,
        StmtKind::SqlUpdate => HttpMethod::Put,
        StmtKind::FileWrite if rewrite => HttpMethod::Put,
        StmtKind::SqlInsert | StmtKind::FileWrite => HttpMethod::Post,
        _ => HttpMethod::Get,
    }
}

/// HTTP method from the data-store operations of the region, its performed
/// paragraphs and, when a workspace is given, every program it transitively
/// calls: delete over put over post over get.
pub fn classify_http_method(unit: &SourceUnit, region: &CodeRegion, workspace: Option<&Workspace>) -> HttpMethod {
    let scope = Scope::of_region(unit, region);
    let mut method = HttpMethod::Get;
    let mut pending: Vec<String> = Vec::new();
    for &n in scope.nodes() {
        let s = unit.stmt(n);
        method = method.max(method_of(s.kind, s.rewrite));
        if s.kind.is_call() {
            pending.extend(s.call_target.iter().cloned());
        }
    }
    let Some(ws) = workspace else {
        return method;
    };
    let mut seen = BTreeSet::new();
    while let Some(p) = pending.pop() {
        if !seen.insert(p.clone()) {
            continue;
        }
        let Some(callee) = ws.get(&p) else { continue };
        for s in &callee.statements {
            method = method.max(method_of(s.kind, s.rewrite));
            if s.kind.is_call() {
                pending.extend(s.call_target.iter().cloned());
            }
        }
    }
    method
}
