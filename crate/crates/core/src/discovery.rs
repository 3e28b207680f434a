//! Candidate API discovery from transactions, dispatch blocks, data-access
//! points, standalone paragraphs, screens, partition-crossing calls and
//! user-supplied regions.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::frontend::{Form, ScreenMap, SourceUnit, StmtId};
use crate::graphs::{CallGraph, CodeRegion};
use crate::signature::{classify_http_method, HttpMethod};
use crate::{Error, Result, Workspace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SeedKind {
    Transaction,
    ControlFlowBlock,
    DataAccess,
    Procedure,
    Screen,
    InterProgramCall,
    UserRegion,
}

impl SeedKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SeedKind::Transaction => "transaction",
            SeedKind::ControlFlowBlock => "control_flow_block",
            SeedKind::DataAccess => "data_access",
            SeedKind::Procedure => "procedure",
            SeedKind::Screen => "screen",
            SeedKind::InterProgramCall => "inter_program_call",
            SeedKind::UserRegion => "user_region",
        }
    }

    pub fn parse(s: &str) -> Option<SeedKind> {
        [
            SeedKind::Transaction,
            SeedKind::ControlFlowBlock,
            SeedKind::DataAccess,
            SeedKind::Procedure,
            SeedKind::Screen,
            SeedKind::InterProgramCall,
            SeedKind::UserRegion,
        ]
        .into_iter()
        .find(|k| k.as_str() == s)
    }
}

/// A signature fixed by convention rather than computed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedSignature {
    /// (field name, picture) pairs.
    pub requests: Vec<(String, String)>,
    pub responses: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiCandidate {
    pub seed_kind: SeedKind,
    pub region: CodeRegion,
    pub suggested_name: String,
    pub evidence: String,
    pub http_method: HttpMethod,
    pub fixed_signature: Option<FixedSignature>,
}

/// Optional discovery inputs.
#[derive(Debug, Clone, Default)]
pub struct DiscoveryInputs {
    pub screen_maps: Vec<ScreenMap>,
    /// Transaction id to entry program.
    pub transactions: BTreeMap<String, String>,
    /// Program id to partition name.
    pub partitions: BTreeMap<String, String>,
    pub user_regions: Vec<CodeRegion>,
}

/// Region covering the statements `first..=last` including nested ones.
fn span(unit: &SourceUnit, first: StmtId, last: StmtId) -> Result<CodeRegion> {
    let start = unit.stmt(first).line;
    let end = (first.0..=last.0).map(|i| unit.stmt(StmtId(i)).end_line).max().unwrap_or(start);
    CodeRegion::new(unit, start, end)
}

/// First EVALUATE written directly in a paragraph body.
fn dispatch(unit: &SourceUnit) -> Option<StmtId> {
    unit.paragraphs.iter().flat_map(|p| p.body.iter().copied()).find(|&s| matches!(unit.stmt(s).form, Form::Evaluate { .. }))
}

/// Whether `s` or a statement nested in it touches a data store.
fn accesses_data(unit: &SourceUnit, s: StmtId) -> bool {
    let st = unit.stmt(s);
    st.kind.is_data_access() || st.children().into_iter().any(|c| accesses_data(unit, c))
}

fn is_load(unit: &SourceUnit, s: StmtId) -> bool {
    use crate::frontend::StmtKind::*;
    matches!(unit.stmt(s).kind, Move | Initialize | Arithmetic)
}

struct Raw {
    kind: SeedKind,
    region: CodeRegion,
    subject: String,
    evidence: String,
}

fn subject_of(s: &str) -> String {
    let mut out = String::new();
    for c in s.chars() {
        if c.is_ascii_alphanumeric() {
            out.push(c.to_ascii_lowercase());
        } else if !out.ends_with('-') && !out.is_empty() {
            out.push('-');
        }
    }
    out.trim_end_matches('-').to_string()
}

fn verb(m: HttpMethod) -> &'static str {
    match m {
        HttpMethod::Get => "get",
        HttpMethod::Post => "create",
        HttpMethod::Put => "update",
        HttpMethod::Delete => "delete",
    }
}

fn transaction_seeds(workspace: &Workspace, inputs: &DiscoveryInputs, out: &mut Vec<Raw>) -> Result<()> {
    let mut dispatched = BTreeSet::new();
    for (txn, program) in &inputs.transactions {
        let unit = workspace.get(program).ok_or_else(|| Error::UnknownTransactionProgram { txn: txn.clone(), program: program.clone() })?;
        let Some(d) = dispatch(unit) else {
            out.push(Raw { kind: SeedKind::Transaction, region: CodeRegion::whole(unit)?, subject: txn.clone(), evidence: format!("transaction {txn} starts {program}") });
            continue;
        };
        let stmt = unit.stmt(d);
        let region = CodeRegion::new(unit, stmt.line, stmt.end_line)?;
        out.push(Raw { kind: SeedKind::Transaction, region, subject: txn.clone(), evidence: format!("transaction {txn} starts {program}, dispatch at line {}", stmt.line) });
        if !dispatched.insert(program.clone()) {
            continue;
        }
        let Form::Evaluate { arms, .. } = &stmt.form else { unreachable!() };
        for (i, arm) in arms.iter().enumerate() {
            let (Some(&first), Some(&last)) = (arm.body.first(), arm.body.last()) else { continue };
            let label = if arm.is_other() { String::from("other") } else { arm.texts.join("-") };
            out.push(Raw {
                kind: SeedKind::ControlFlowBlock,
                region: span(unit, first, last)?,
                subject: format!("{program}-when-{label}"),
                evidence: format!("arm {} (WHEN {}) of the dispatch at line {}", i + 1, arm.texts.join(" "), stmt.line),
            });
        }
    }
    Ok(())
}

fn data_access_seeds(unit: &SourceUnit, out: &mut Vec<Raw>) -> Result<()> {
    for p in &unit.paragraphs {
        let body = &p.body;
        let mut i = 0;
        while i < body.len() {
            if !accesses_data(unit, body[i]) {
                i += 1;
                continue;
            }
            let mut end = i;
            while end + 1 < body.len() && accesses_data(unit, body[end + 1]) {
                end += 1;
            }
            let mut start = i;
            while start > 0 && is_load(unit, body[start - 1]) && !accesses_data(unit, body[start - 1]) {
                start -= 1;
            }
            // top-level statements own the ids up to the next top-level one
            let subtree_end = |k: usize| body.get(k + 1).map_or(p.first.0 + p.len, |n| n.0);
            let mut written = BTreeSet::new();
            for (k, top) in body.iter().enumerate().take(end + 1).skip(i) {
                for id in top.0..subtree_end(k) {
                    written.extend(unit.stmt(StmtId(id)).writes.iter().copied());
                }
            }
            while end + 1 < body.len() {
                let next = unit.stmt(body[end + 1]);
                let is_check = matches!(next.form, Form::If { .. } | Form::Evaluate { .. }) && next.reads.iter().any(|r| written.contains(r)) && !accesses_data(unit, body[end + 1]);
                if !is_check {
                    break;
                }
                end += 1;
            }
            let mut tables: Vec<String> = Vec::new();
            for (k, top) in body.iter().enumerate().take(end + 1).skip(i) {
                for id in top.0..subtree_end(k) {
                    for t in unit.stmt(StmtId(id)).sql.iter().flat_map(|q| q.tables.iter()) {
                        if !tables.contains(t) {
                            tables.push(t.clone());
                        }
                    }
                }
            }
            let what = if tables.is_empty() { String::from("data access") } else { format!("SQL on {}", tables.join(", ")) };
            out.push(Raw {
                kind: SeedKind::DataAccess,
                region: span(unit, body[start], body[end])?,
                subject: p.name.clone(),
                evidence: format!("{what} in {} at line {}", p.name, unit.stmt(body[i]).line),
            });
            i = end + 1;
        }
    }
    Ok(())
}

fn procedure_seeds(unit: &SourceUnit, out: &mut Vec<Raw>) -> Result<()> {
    for p in &unit.paragraphs {
        if p.len == 0 {
            continue;
        }
        let performs = p.statement_ids().any(|s| matches!(unit.stmt(s).form, Form::Perform { target: Some(_), .. }));
        if performs {
            continue;
        }
        let last = StmtId(p.first.0 + p.len - 1);
        out.push(Raw { kind: SeedKind::Procedure, region: span(unit, p.first, last)?, subject: p.name.clone(), evidence: format!("paragraph {} performs no other paragraph", p.name) });
    }
    Ok(())
}

fn screen_seeds(workspace: &Workspace, maps: &[ScreenMap], out: &mut Vec<Raw>) -> Result<()> {
    for map in maps {
        let site = workspace.units().find_map(|u| {
            u.statements.iter().find(|s| s.kind == crate::frontend::StmtKind::CicsReceiveMap && s.map_name.as_deref().is_some_and(|m| m.eq_ignore_ascii_case(&map.name))).map(|s| (u, s))
        });
        let Some((unit, s)) = site else { continue };
        let p = &unit.paragraphs[s.paragraph];
        let last = StmtId(p.first.0 + p.len - 1);
        out.push(Raw {
            kind: SeedKind::Screen,
            region: span(unit, p.first, last)?,
            subject: map.name.clone(),
            evidence: format!("screen map {} received in {} at line {}", map.name, p.name, s.line),
        });
    }
    Ok(())
}

fn call_seeds(workspace: &Workspace, call_graph: &CallGraph, partitions: &BTreeMap<String, String>, out: &mut Vec<Raw>) -> Result<()> {
    for e in &call_graph.edges {
        let (Some(a), Some(b)) = (partitions.get(&e.caller), partitions.get(&e.callee)) else { continue };
        if a == b {
            continue;
        }
        let Some(callee) = workspace.get(&e.callee) else { continue };
        out.push(Raw {
            kind: SeedKind::InterProgramCall,
            region: CodeRegion::whole(callee)?,
            subject: e.callee.clone(),
            evidence: format!("{} ({a}) calls {} ({b}) at line {}", e.caller, e.callee, e.line),
        });
    }
    Ok(())
}

/// Candidate APIs of the workspace, sorted by program and start line, with
/// unique names.
pub fn discover_candidates(workspace: &Workspace, call_graph: &CallGraph, inputs: &DiscoveryInputs) -> Result<Vec<ApiCandidate>> {
    let mut raw = Vec::new();
    transaction_seeds(workspace, inputs, &mut raw)?;
    for unit in workspace.units() {
        data_access_seeds(unit, &mut raw)?;
        procedure_seeds(unit, &mut raw)?;
    }
    screen_seeds(workspace, &inputs.screen_maps, &mut raw)?;
    call_seeds(workspace, call_graph, &inputs.partitions, &mut raw)?;
    for r in &inputs.user_regions {
        raw.push(Raw {
            kind: SeedKind::UserRegion,
            region: r.clone(),
            subject: format!("{}-{}-{}", r.program, r.start_line, r.end_line),
            evidence: String::from("user-supplied region"),
        });
    }
    raw.sort_by(|a, b| {
        (&a.region.program, a.region.start_line, a.kind, a.region.end_line, &a.subject).cmp(&(&b.region.program, b.region.start_line, b.kind, b.region.end_line, &b.subject))
    });
    let mut seen = BTreeSet::new();
    raw.retain(|r| seen.insert((r.kind, r.region.program.clone(), r.region.start_line, r.region.end_line)));
    let mut names = BTreeSet::new();
    let mut out = Vec::with_capacity(raw.len());
    for r in raw {
        let unit = workspace.unit(&r.region.program)?;
        let method = classify_http_method(unit, &r.region, Some(workspace));
        out.push(ApiCandidate {
            seed_kind: r.kind,
            suggested_name: unique(&mut names, format!("{}-{}", verb(method), subject_of(&r.subject))),
            region: r.region,
            evidence: r.evidence,
            http_method: method,
            fixed_signature: None,
        });
    }
    Ok(out)
}

fn unique(names: &mut BTreeSet<String>, base: String) -> String {
    let mut name = base.clone();
    let mut n = 2;
    while !names.insert(name.clone()) {
        name = format!("{base}-{n}");
        n += 1;
    }
    name
}

/// A data-access candidate that runs any query sent by the client.
pub fn dynamic_query_candidate(workspace: &Workspace, program: &str) -> Result<ApiCandidate> {
    let unit = workspace.unit(program)?;
    if !unit.statements.iter().any(|s| s.kind.is_sql()) {
        return Err(Error::NoDataAccess(program.into()));
    }
    let field = |n: &str, p: &str| (String::from(n), String::from(p));
    Ok(ApiCandidate {
        seed_kind: SeedKind::DataAccess,
        region: CodeRegion::whole(unit)?,
        suggested_name: format!("{}-dynamic-query", program.to_ascii_lowercase()),
        evidence: String::from("dynamic query layer"),
        http_method: HttpMethod::Post,
        fixed_signature: Some(FixedSignature {
            requests: alloc::vec![field("QUERY-TEXT", "X(1024)")],
            responses: alloc::vec![field("RESULT-ROWS", "X(4096)"), field("SQLCODE", "S9(9)")],
        }),
    })
}
