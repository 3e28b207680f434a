//! API signatures: request and response fields of a code region.
//!
//! Requests are fields read before being written on some path through the
//! region (liveness at the region entry); responses are fields the region
//! writes. Three flow variants trade precision for cost, and each can run
//! with or without analyzing called programs.

mod interproc;
mod liveness;
mod method;
mod path;
mod scope;
mod sets;
mod surety;

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::frontend::{DataDictionary, ItemId, Section, SourceUnit};
use crate::graphs::{Cfg, CodeRegion};
use crate::Result;

pub use interproc::{interprocedural_signature, AnalysisOptions, CallSummary, SummaryTable};
pub use liveness::{liveness, LivenessState};
pub use method::classify_http_method;
pub use path::{PathBounds, PathOutcome};
pub use scope::Scope;
pub use sets::UseDefSets;
pub use surety::surety_annotate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Flow {
    Insensitive,
    Sensitive,
    PathSensitive,
}

impl Flow {
    pub fn as_str(self) -> &'static str {
        match self {
            Flow::Insensitive => "fi",
            Flow::Sensitive => "fs",
            Flow::PathSensitive => "ps",
        }
    }

    pub fn parse(s: &str) -> Option<Flow> {
        match s.to_ascii_lowercase().as_str() {
            "fi" => Some(Flow::Insensitive),
            "fs" => Some(Flow::Sensitive),
            "ps" => Some(Flow::PathSensitive),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variant {
    pub flow: Flow,
    pub call_chain: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Request,
    Response,
    Both,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Request => "request",
            Role::Response => "response",
            Role::Both => "both",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HttpMethod {
    Get,
    Post,
    Put,
    Delete,
}

impl HttpMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            HttpMethod::Get => "get",
            HttpMethod::Post => "post",
            HttpMethod::Put => "put",
            HttpMethod::Delete => "delete",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldRole {
    pub item: ItemId,
    pub name: String,
    pub qualified_name: String,
    pub picture: Option<String>,
    pub role: Role,
    pub optional: bool,
    pub section: Section,
}

/// Iteration counts reported by `--stats`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    /// Passes over the region (1 for flow-insensitive).
    pub passes: usize,
    /// Largest number of rounds any call-graph component needed.
    pub summary_iterations: usize,
    /// Feasible paths enumerated (path-sensitive only).
    pub paths: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiSignature {
    pub region: CodeRegion,
    pub variant: Variant,
    pub requests: Vec<FieldRole>,
    pub responses: Vec<FieldRole>,
    pub http_method: HttpMethod,
    pub degraded: bool,
    pub stats: Stats,
}

impl ApiSignature {
    /// Builds a signature from raw item sets; roles are derived from the two
    /// sets, every field starts out optional until surety annotation.
    pub fn from_sets(
        unit: &SourceUnit,
        region: &CodeRegion,
        variant: Variant,
        requests: &BTreeSet<ItemId>,
        responses: &BTreeSet<ItemId>,
    ) -> ApiSignature {
        let data = &unit.data;
        let field = |id: ItemId, own: Role| {
            let d = data.get(id);
            let both = requests.contains(&id) && responses.contains(&id);
            FieldRole {
                item: id,
                name: d.name.clone(),
                qualified_name: data.qualified_name(id),
                picture: d.picture.as_ref().map(|p| p.text.clone()),
                role: if both { Role::Both } else { own },
                optional: true,
                section: d.section,
            }
        };
        let listed = |set: &BTreeSet<ItemId>, role| -> Vec<FieldRole> {
            let mut v: Vec<FieldRole> = set.iter().filter(|&&i| !data.get(i).is_filler()).map(|&i| field(i, role)).collect();
            v.sort_by(|a, b| a.qualified_name.cmp(&b.qualified_name).then(a.item.cmp(&b.item)));
            v
        };
        ApiSignature {
            region: region.clone(),
            variant,
            requests: listed(requests, Role::Request),
            responses: listed(responses, Role::Response),
            http_method: classify_http_method(unit, region, None),
            degraded: false,
            stats: Stats::default(),
        }
    }

    pub fn request_items(&self) -> BTreeSet<ItemId> {
        self.requests.iter().map(|f| f.item).collect()
    }

    pub fn response_items(&self) -> BTreeSet<ItemId> {
        self.responses.iter().map(|f| f.item).collect()
    }

    /// Drops the SQL communication area (SQLCODE and friends).
    pub fn without_sqlca(mut self, data: &DataDictionary) -> ApiSignature {
        let keep = |f: &FieldRole| !is_sqlca(data, f.item);
        self.requests.retain(keep);
        self.responses.retain(keep);
        self
    }
}

/// Whether `id` belongs to the SQLCA structure.
pub fn is_sqlca(data: &DataDictionary, id: ItemId) -> bool {
    let root = data.get(id).storage_root;
    data.get(root).name == "SQLCA" || data.get(id).name == "SQLCODE"
}

/// Flow-insensitive signature: union of reads and writes over the region
/// (plus performed paragraphs), one pass.
pub fn flow_insensitive_signature(unit: &SourceUnit, cfg: &Cfg, region: &CodeRegion, sets: &UseDefSets) -> ApiSignature {
    let scope = Scope::of_region(unit, region);
    let mut req = BTreeSet::new();
    let mut resp = BTreeSet::new();
    for &n in scope.nodes() {
        req.extend(sets.req_gen(n).iter().copied());
        resp.extend(sets.resp_gen(n).iter().copied());
    }
    let variant = Variant { flow: Flow::Insensitive, call_chain: false };
    let mut sig = ApiSignature::from_sets(unit, region, variant, &req, &resp);
    sig.degraded = sets.degraded();
    sig.stats.passes = 1;
    surety_annotate(sig, unit, cfg, sets)
}

/// Flow-sensitive signature: requests are live at the region entry,
/// responses are the union of writes, optionally restricted to
/// `post_context` (fields read after the region).
pub fn flow_sensitive_signature(
    unit: &SourceUnit,
    cfg: &Cfg,
    region: &CodeRegion,
    sets: &UseDefSets,
    post_context: Option<&BTreeSet<ItemId>>,
) -> Result<ApiSignature> {
    let scope = Scope::of_region(unit, region);
    let state = liveness(cfg, &scope, sets)?;
    let req = state.req_in(scope.entry()).clone();
    let mut resp = BTreeSet::new();
    for &n in scope.nodes() {
        resp.extend(sets.resp_gen(n).iter().copied());
    }
    if let Some(ctx) = post_context {
        resp.retain(|i| ctx.contains(i));
    }
    let variant = Variant { flow: Flow::Sensitive, call_chain: false };
    let mut sig = ApiSignature::from_sets(unit, region, variant, &req, &resp);
    sig.degraded = sets.degraded();
    sig.stats.passes = state.passes;
    Ok(surety_annotate(sig, unit, cfg, sets))
}

/// Path-sensitive signature: union of per-path requests and responses over
/// the feasible paths of the region.
pub fn path_sensitive_signature(
    unit: &SourceUnit,
    cfg: &Cfg,
    region: &CodeRegion,
    sets: &UseDefSets,
    bounds: PathBounds,
) -> Result<ApiSignature> {
    let scope = Scope::of_region(unit, region);
    let outcome = path::enumerate(unit, cfg, &scope, sets, bounds)?;
    let variant = Variant { flow: Flow::PathSensitive, call_chain: false };
    let mut sig = ApiSignature::from_sets(unit, region, variant, &outcome.requests, &outcome.responses);
    sig.degraded = sets.degraded();
    sig.stats.paths = outcome.paths;
    sig.stats.passes = 1;
    Ok(surety_annotate(sig, unit, cfg, sets))
}
