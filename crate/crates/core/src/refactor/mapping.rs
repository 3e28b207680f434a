use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{Detail, FieldPair, RefactorSuggestion, SuggestionKind};
use crate::frontend::{DataDictionary, ItemId, StmtId};
use crate::signature::{ApiSignature, FieldRole};
use crate::{Error, Result, Workspace};

/// Caller items occupying the bytes `[start, end)` of `arg`'s storage:
/// an item with exactly that extent if there is one, otherwise the
/// elementary items overlapping it.
fn caller_items(data: &DataDictionary, arg: ItemId, start: u32, end: u32) -> Vec<ItemId> {
    let root = data.get(arg).storage_root;
    let in_arg: Vec<ItemId> = data.closure(arg).into_iter().filter(|&i| data.get(i).storage_root == root).collect();
    let exact: Vec<ItemId> = in_arg.iter().copied().filter(|&i| data.get(i).byte_offset == start && data.get(i).byte_offset + data.get(i).byte_size == end).collect();
    if let Some(&deepest) = exact.iter().max_by_key(|&&i| data.ancestors(i).count()) {
        return alloc::vec![deepest];
    }
    in_arg
        .into_iter()
        .filter(|&i| {
            let d = data.get(i);
            d.is_elementary() && d.byte_offset < end && start < d.byte_offset + d.byte_size
        })
        .collect()
}

/// Maps a caller's CALL / LINK arguments onto the request and response
/// fields of the API exposing the callee, by position and byte offset.
pub fn caller_mapping_report(workspace: &Workspace, caller: &str, site: StmtId, callee_signature: &ApiSignature, api_name: &str) -> Result<RefactorSuggestion> {
    let unit = workspace.unit(caller)?;
    let stmt = unit.statements.get(site.index()).ok_or_else(|| Error::BindingMismatch(format!("{caller} has no statement {}", site.0)))?;
    if !stmt.kind.is_call() {
        return Err(Error::BindingMismatch(format!("{caller} line {} is not a call", stmt.line)));
    }
    let callee = workspace.unit(&callee_signature.region.program)?;
    let params = callee.parameters();
    if stmt.call_arguments.len() > params.len() {
        let extra = unit.data.qualified_name(stmt.call_arguments[params.len()]);
        return Err(Error::BindingMismatch(format!("argument {extra} has no matching parameter in {}", callee.program_id)));
    }
    let mut degraded = stmt.call_arguments.len() != params.len();
    let mut bind = |fields: &[FieldRole]| -> Vec<FieldPair> {
        let mut pairs = Vec::new();
        for f in fields {
            let fd = callee.data.get(f.item);
            for (&a, &q) in stmt.call_arguments.iter().zip(&params) {
                let qd = callee.data.get(q);
                let ad = unit.data.get(a);
                if fd.storage_root != qd.storage_root || fd.byte_offset < qd.byte_offset || fd.byte_offset + fd.byte_size > qd.byte_offset + qd.byte_size {
                    continue;
                }
                if ad.byte_size != qd.byte_size {
                    degraded = true;
                }
                let rel = fd.byte_offset - qd.byte_offset;
                let end = (rel + fd.byte_size).min(ad.byte_size);
                if rel >= end {
                    continue;
                }
                for c in caller_items(&unit.data, a, ad.byte_offset + rel, ad.byte_offset + end) {
                    pairs.push(FieldPair { caller: unit.data.qualified_name(c), field: f.name.clone() });
                }
            }
        }
        pairs
    };
    let requests = bind(&callee_signature.requests);
    let responses = bind(&callee_signature.responses);
    let rationale = if degraded {
        String::from("arguments and parameters differ in size or count; only the overlapping prefix is mapped")
    } else {
        String::from("replace the call with a request to the API, passing the mapped argument items")
    };
    Ok(RefactorSuggestion {
        kind: SuggestionKind::CallerMapping,
        program: caller.into(),
        line: stmt.line,
        detail: Detail::CallerMapping {
            requests,
            responses,
            method: String::from(callee_signature.http_method.as_str()),
            path: format!("/apis/{api_name}"),
            body_fields: callee_signature.requests.iter().map(|f| f.name.clone()).collect(),
            response_fields: callee_signature.responses.iter().map(|f| f.name.clone()).collect(),
            degraded,
        },
        rationale,
    })
}
