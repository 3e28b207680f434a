use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::frontend::{DataDictionary, ItemId, Usage};
use crate::signature::{ApiSignature, FieldRole};
use crate::{Error, Result};

/// Request and response copybook texts cut from one copybook.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CopybookSlices {
    /// `None` when no request field belongs to the copybook.
    pub request: Option<String>,
    pub response: Option<String>,
    /// Qualified names of signature fields not found in the copybook.
    pub skipped: Vec<String>,
}

fn level_for(depth: usize) -> u32 {
    if depth == 0 {
        1
    } else {
        5 * depth as u32
    }
}

/// The copybook item naming `qualified`: equal to it, or equal to a
/// trailing part of it when the copybook is included under an enclosing
/// group. The longest match wins.
fn locate(copybook: &DataDictionary, qualified: &str) -> Option<ItemId> {
    copybook
        .ids()
        .filter_map(|i| {
            let q = copybook.qualified_name(i);
            let hit = qualified == q || qualified.strip_suffix(q.as_str()).is_some_and(|rest| rest.ends_with('.'));
            hit.then_some((q.len(), i))
        })
        .max()
        .map(|(_, i)| i)
}

fn slice(copybook: &DataDictionary, fields: &[FieldRole], skipped: &mut BTreeSet<String>) -> Option<String> {
    let mut keep = BTreeSet::new();
    for f in fields {
        let Some(id) = locate(copybook, &f.qualified_name) else {
            skipped.insert(f.qualified_name.clone());
            continue;
        };
        // a group field carries all of its storage
        keep.extend(copybook.closure(id));
        keep.extend(copybook.ancestors(id));
    }
    if keep.is_empty() {
        return None;
    }
    let mut text = String::new();
    for id in keep {
        let d = copybook.get(id);
        let depth = copybook.ancestors(id).count();
        text.push_str(&" ".repeat(4 * depth));
        text.push_str(&format!("{:02} {}", level_for(depth), d.name));
        if let Some(n) = d.occurs {
            text.push_str(&format!(" OCCURS {n}"));
        }
        if let Some(p) = &d.picture {
            text.push_str(&format!(" PIC {}", p.text));
            match d.usage {
                Usage::Display => {}
                Usage::Binary => text.push_str(" COMP"),
                Usage::Packed => text.push_str(" COMP-3"),
            }
        }
        text.push_str(".\n");
    }
    Some(text)
}

/// Minimal copybooks holding the signature's request fields and its
/// response fields (each with its ancestor groups), levels renumbered
/// 01, 05, 10, ... by depth. REDEFINES and VALUE clauses are dropped.
pub fn slice_copybook(copybook: &DataDictionary, signature: &ApiSignature) -> Result<CopybookSlices> {
    let mut skipped = BTreeSet::new();
    let request = slice(copybook, &signature.requests, &mut skipped);
    let response = slice(copybook, &signature.responses, &mut skipped);
    if request.is_none() && response.is_none() {
        return Err(Error::EmptySlice);
    }
    Ok(CopybookSlices { request, response, skipped: skipped.into_iter().collect() })
}
