//! JSON documents printed by the commands. Field order in each struct is
//! the order keys appear on the wire.

use apify_core::discovery::{ApiCandidate, FixedSignature};
use apify_core::frontend::SourceUnit;
use apify_core::graphs::Branch;
use apify_core::oracle::OracleResult;
use apify_core::refactor::{Detail, FieldPair, RefactorSuggestion};
use apify_core::signature::{ApiSignature, FieldRole, HttpMethod, Stats};
use serde::Serialize;
use serde_json::{json, Value};

use crate::project::Target;

#[derive(Debug, Serialize)]
pub struct CandidateDoc {
    pub name: String,
    pub seed_kind: &'static str,
    pub program: String,
    pub start_line: u32,
    pub end_line: u32,
    pub evidence: String,
}

impl From<&ApiCandidate> for CandidateDoc {
    fn from(c: &ApiCandidate) -> Self {
        CandidateDoc {
            name: c.suggested_name.clone(),
            seed_kind: c.seed_kind.as_str(),
            program: c.region.program.clone(),
            start_line: c.region.start_line,
            end_line: c.region.end_line,
            evidence: c.evidence.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RegionDoc {
    pub program: String,
    pub start_line: u32,
    pub end_line: u32,
}

#[derive(Debug, Serialize)]
pub struct ApiDoc {
    pub name: String,
    pub seed_kind: &'static str,
    pub method: &'static str,
    pub region: RegionDoc,
}

#[derive(Debug, Serialize)]
pub struct VariantDoc {
    pub flow: &'static str,
    pub call_chain: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FieldDoc {
    pub field: String,
    pub qualified: String,
    pub section: &'static str,
    pub picture: Option<String>,
    pub optional: bool,
}

impl From<&FieldRole> for FieldDoc {
    fn from(f: &FieldRole) -> Self {
        FieldDoc { field: f.name.clone(), qualified: f.qualified_name.clone(), section: f.section.as_str(), picture: f.picture.clone(), optional: f.optional }
    }
}

#[derive(Debug, Serialize)]
pub struct StatsDoc {
    pub passes: usize,
    pub summary_iterations: usize,
    pub paths: usize,
}

impl From<Stats> for StatsDoc {
    fn from(s: Stats) -> Self {
        StatsDoc { passes: s.passes, summary_iterations: s.summary_iterations, paths: s.paths }
    }
}

#[derive(Debug, Serialize)]
pub struct SignatureDoc {
    pub api: ApiDoc,
    pub variant: VariantDoc,
    pub degraded: bool,
    pub requests: Vec<FieldDoc>,
    pub responses: Vec<FieldDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stats: Option<StatsDoc>,
}

fn api_doc(target: &Target, method: HttpMethod) -> ApiDoc {
    ApiDoc {
        name: target.name.clone(),
        seed_kind: target.seed_kind.as_str(),
        method: method.as_str(),
        region: RegionDoc { program: target.region.program.clone(), start_line: target.region.start_line, end_line: target.region.end_line },
    }
}

impl SignatureDoc {
    pub fn new(target: &Target, sig: &ApiSignature, stats: bool) -> Self {
        SignatureDoc {
            api: api_doc(target, sig.http_method),
            variant: VariantDoc { flow: sig.variant.flow.as_str(), call_chain: sig.variant.call_chain },
            degraded: sig.degraded,
            requests: sig.requests.iter().map(FieldDoc::from).collect(),
            responses: sig.responses.iter().map(FieldDoc::from).collect(),
            stats: stats.then(|| sig.stats.into()),
        }
    }

    /// Document for a candidate whose signature is fixed by construction.
    pub fn fixed(target: &Target, fixed: &FixedSignature, method: HttpMethod, variant: VariantDoc) -> Self {
        let fields = |v: &[(String, String)]| -> Vec<FieldDoc> {
            let mut out: Vec<FieldDoc> =
                v.iter().map(|(n, p)| FieldDoc { field: n.clone(), qualified: n.clone(), section: "api", picture: Some(p.clone()), optional: false }).collect();
            out.sort_by(|a, b| a.qualified.cmp(&b.qualified));
            out
        };
        SignatureDoc {
            api: api_doc(target, method),
            variant,
            degraded: false,
            requests: fields(&fixed.requests),
            responses: fields(&fixed.responses),
            stats: None,
        }
    }
}

fn pairs(v: &[FieldPair]) -> Value {
    v.iter().map(|p| json!({"caller": p.caller, "field": p.field})).collect()
}

fn detail_json(d: &Detail) -> Value {
    match d {
        Detail::Terminal { statement, text } => json!({"statement": statement, "text": text}),
        Detail::SanityCheck { text } => json!({"text": text}),
        Detail::NarrowSql { droppable, columns } => json!({"droppable": droppable, "columns": columns}),
        Detail::SliceCopybook { role, text } => json!({"role": role, "text": text}),
        Detail::CallerMapping { requests, responses, method, path, body_fields, response_fields, degraded } => json!({
            "requests": pairs(requests),
            "responses": pairs(responses),
            "method": method,
            "path": path,
            "body_fields": body_fields,
            "response_fields": response_fields,
            "degraded": degraded,
        }),
    }
}

#[derive(Debug, Serialize)]
pub struct SuggestionDoc {
    pub kind: &'static str,
    pub program: String,
    pub line: u32,
    pub detail: Value,
    pub rationale: String,
}

impl From<&RefactorSuggestion> for SuggestionDoc {
    fn from(s: &RefactorSuggestion) -> Self {
        SuggestionDoc { kind: s.kind.as_str(), program: s.program.clone(), line: s.line, detail: detail_json(&s.detail), rationale: s.rationale.clone() }
    }
}

fn branch_name(b: Branch) -> String {
    match b {
        Branch::Seq => "seq".into(),
        Branch::Then => "then".into(),
        Branch::Else => "else".into(),
        Branch::Arm(i) => format!("arm{i}"),
        Branch::NoMatch => "no_match".into(),
        Branch::LoopBody => "loop_body".into(),
        Branch::LoopExit => "loop_exit".into(),
        Branch::Return => "return".into(),
    }
}

/// Oracle result with statements as line numbers and items as qualified names.
pub fn oracle_json(unit: &SourceUnit, result: &OracleResult, bound: usize) -> Value {
    let names = |set: &std::collections::BTreeSet<apify_core::frontend::ItemId>| -> Vec<String> {
        let mut v: Vec<String> = set.iter().map(|&i| unit.data.qualified_name(i)).collect();
        v.sort();
        v
    };
    let paths: Vec<Value> = result
        .per_path
        .iter()
        .map(|r| {
            json!({
                "lines": r.path.statements.iter().map(|&s| unit.stmt(s).line).collect::<Vec<_>>(),
                "decisions": r.path.decisions.iter().map(|&b| branch_name(b)).collect::<Vec<_>>(),
                "truncated": r.path.truncated,
                "req": names(&r.req),
                "resp": names(&r.resp),
            })
        })
        .collect();
    json!({
        "loop_unroll_bound": bound,
        "paths": paths,
        "union_req": names(&result.union_req),
        "union_resp": names(&result.union_resp),
    })
}

/// Pretty JSON with a trailing newline.
pub fn render<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents always serialize");
    s.push('\n');
    s
}
