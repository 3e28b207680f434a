use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use super::surety::must_written_at_exits;
use super::{
    classify_http_method, flow_insensitive_signature, flow_sensitive_signature, liveness, path_sensitive_signature, ApiSignature, Flow, PathBounds,
    Scope, UseDefSets,
};
use crate::frontend::{DataDictionary, ItemId, SourceUnit};
use crate::graphs::{build_cfg, CallGraph, CodeRegion};
use crate::{Error, Result, Workspace};

/// Settings shared by every variant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalysisOptions {
    pub flow: Flow,
    pub call_chain: bool,
    pub bounds: PathBounds,
    /// Fail on a literal call target missing from the workspace instead of
    /// degrading the call site.
    pub strict: bool,
    /// Items read after the region; restricts flow-sensitive responses.
    pub post_context: Option<BTreeSet<ItemId>>,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions { flow: Flow::Sensitive, call_chain: false, bounds: PathBounds::default(), strict: false, post_context: None }
    }
}

/// Effect of running a program, over the items of its parameters.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CallSummary {
    /// Parameter items read before being written on some path.
    pub req: BTreeSet<ItemId>,
    /// Parameter items written on some path.
    pub may_write: BTreeSet<ItemId>,
    /// Parameter items written on every path.
    pub must_write: BTreeSet<ItemId>,
}

/// Callee summaries keyed by program id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SummaryTable {
    summaries: BTreeMap<String, CallSummary>,
    /// Largest number of rounds any call-graph component needed.
    pub iterations: usize,
}

impl SummaryTable {
    pub fn get(&self, program: &str) -> Option<&CallSummary> {
        self.summaries.get(program)
    }

    pub fn programs(&self) -> impl Iterator<Item = &str> + '_ {
        self.summaries.keys().map(String::as_str)
    }

    /// Computes summaries for `programs` and everything they call,
    /// callees first, iterating recursive components to a fixpoint.
    pub fn compute(workspace: &Workspace, call_graph: &CallGraph, programs: &BTreeSet<String>, flow: Flow, strict: bool) -> Result<SummaryTable> {
        let mut needed = programs.clone();
        for p in programs {
            needed.extend(call_graph.transitive_callees(p));
        }
        let linkage_items: usize = workspace.units().map(|u| u.data.iter().filter(|(_, d)| d.section == crate::frontend::Section::Linkage).count()).sum();
        let cap = workspace.len() * linkage_items + 1;
        let mut table = SummaryTable::default();
        for scc in &call_graph.sccs {
            let members: Vec<&String> = scc.iter().filter(|p| needed.contains(*p) && workspace.get(p).is_some()).collect();
            if members.is_empty() {
                continue;
            }
            let component: BTreeSet<String> = members.iter().map(|p| (*p).clone()).collect();
            let cyclic = members.len() > 1 || call_graph.in_cycle(members[0]);
            for p in &members {
                table.summaries.insert((*p).clone(), CallSummary::default());
            }
            let mut rounds = 0;
            loop {
                rounds += 1;
                if rounds > cap {
                    return Err(Error::NonTerminatingFixpoint(rounds));
                }
                let mut changed = false;
                for p in &members {
                    let unit = workspace.unit(p)?;
                    let fresh = summarize(workspace, &table, unit, flow, strict, &component)?;
                    let cur = table.summaries.get_mut(*p).expect("initialized above");
                    let before = cur.clone();
                    cur.req.extend(fresh.req);
                    cur.may_write.extend(fresh.may_write);
                    cur.must_write.extend(fresh.must_write);
                    changed |= *cur != before;
                }
                if !cyclic || !changed {
                    break;
                }
            }
            table.iterations = table.iterations.max(rounds);
        }
        Ok(table)
    }
}

/// Items sharing storage with the program's parameters.
fn parameter_items(unit: &SourceUnit) -> BTreeSet<ItemId> {
    let mut out = BTreeSet::new();
    for q in unit.parameters() {
        out.extend(unit.data.closure(q));
        out.extend(unit.data.overlapping(q));
    }
    out
}

fn summarize(workspace: &Workspace, table: &SummaryTable, unit: &SourceUnit, flow: Flow, strict: bool, component: &BTreeSet<String>) -> Result<CallSummary> {
    let cfg = build_cfg(unit)?;
    let Some(scope) = Scope::whole_program(unit, &cfg) else {
        return Ok(CallSummary::default());
    };
    let sets = site_sets(workspace, table, unit, strict, component)?;
    let params = parameter_items(unit);
    let req: BTreeSet<ItemId> = match flow {
        Flow::Insensitive => scope.nodes().iter().flat_map(|&n| sets.req_gen(n).iter().copied()).collect(),
        Flow::Sensitive | Flow::PathSensitive => liveness(&cfg, &scope, &sets)?.req_in(scope.entry()).clone(),
    };
    let may: BTreeSet<ItemId> = scope.nodes().iter().flat_map(|&n| sets.resp_gen(n).iter().copied()).collect();
    let must = must_written_at_exits(&cfg, &scope, &sets);
    let keep = |s: BTreeSet<ItemId>| s.into_iter().filter(|i| params.contains(i)).collect();
    Ok(CallSummary { req: keep(req), may_write: keep(may), must_write: keep(must) })
}

/// A byte range `[start, end)` inside one storage root.
#[derive(Clone, Copy)]
struct Extent {
    root: ItemId,
    start: u32,
    end: u32,
}

fn items_overlapping(data: &DataDictionary, e: Extent) -> impl Iterator<Item = ItemId> + '_ {
    data.iter()
        .filter(move |(_, d)| {
            let (s, t) = (d.byte_offset, d.byte_offset + d.byte_size);
            let strictly_contains = s <= e.start && e.end <= t && (s, t) != (e.start, e.end);
            !d.is_condition() && d.storage_root == e.root && s < e.end && e.start < t && !(strictly_contains && !d.is_elementary())
        })
        .map(|(i, _)| i)
}

fn items_within(data: &DataDictionary, e: Extent) -> impl Iterator<Item = ItemId> + '_ {
    data.iter()
        .filter(move |(_, d)| !d.is_condition() && d.storage_root == e.root && e.start <= d.byte_offset && d.byte_offset + d.byte_size <= e.end)
        .map(|(i, _)| i)
}

/// Caller-side effects of one call through a callee summary.
struct Bound {
    gen: BTreeSet<ItemId>,
    may: BTreeSet<ItemId>,
    must: BTreeSet<ItemId>,
    degraded: bool,
}

fn bind(caller: &DataDictionary, callee: &SourceUnit, args: &[ItemId], summary: &CallSummary) -> Bound {
    let params = callee.parameters();
    let mut b = Bound { gen: BTreeSet::new(), may: BTreeSet::new(), must: BTreeSet::new(), degraded: args.len() != params.len() };
    for (i, &a) in args.iter().enumerate() {
        let Some(&q) = params.get(i) else {
            // extra argument: the callee may write it
            let c = caller.closure(a);
            b.may.extend(c.iter().copied());
            b.must.extend(c);
            continue;
        };
        let (ad, qd) = (caller.get(a), callee.data.get(q));
        if ad.byte_size != qd.byte_size {
            b.degraded = true;
        }
        let map = |x: ItemId| -> Option<Extent> {
            let xd = callee.data.get(x);
            if xd.storage_root != qd.storage_root {
                return None;
            }
            let rel_start = xd.byte_offset.max(qd.byte_offset) - qd.byte_offset;
            let rel_end = (xd.byte_offset + xd.byte_size).min(qd.byte_offset + qd.byte_size).saturating_sub(qd.byte_offset);
            let end = rel_end.min(ad.byte_size);
            (rel_start < end).then(|| Extent { root: ad.storage_root, start: ad.byte_offset + rel_start, end: ad.byte_offset + end })
        };
        for &x in &summary.req {
            if let Some(e) = map(x) {
                b.gen.extend(items_overlapping(caller, e));
            }
        }
        for &x in &summary.may_write {
            if let Some(e) = map(x) {
                b.may.extend(items_overlapping(caller, e));
            }
        }
        for &x in &summary.must_write {
            let xd = callee.data.get(x);
            let whole = xd.byte_offset >= qd.byte_offset && xd.byte_offset + xd.byte_size <= qd.byte_offset + qd.byte_size;
            if let (Some(e), true) = (map(x), whole) {
                b.must.extend(items_within(caller, e));
            }
        }
    }
    // keep the caller argument storage only
    let storage: BTreeSet<ItemId> = args.iter().map(|&a| caller.get(a).storage_root).collect();
    b.gen.retain(|&i| storage.contains(&caller.get(i).storage_root));
    b
}

/// Use/def sets of `unit` with every resolvable call site modeled by its
/// callee summary. Calls into `component` (the caller's own recursive
/// component) contribute no must-writes.
fn site_sets(workspace: &Workspace, table: &SummaryTable, unit: &SourceUnit, strict: bool, component: &BTreeSet<String>) -> Result<UseDefSets> {
    let mut sets = UseDefSets::new(unit);
    for s in &unit.statements {
        if !s.kind.is_call() {
            continue;
        }
        let target = s.call_target.as_deref().filter(|_| !s.dynamic_call);
        let callee = match target {
            Some(t) => match workspace.get(t) {
                Some(c) => Some(c),
                None if strict => return Err(Error::MissingCallee(t.into())),
                None => None,
            },
            None => None,
        };
        let Some((callee, summary)) = callee.and_then(|c| Some((c, table.get(&c.program_id)?))) else {
            sets.set_degraded();
            continue;
        };
        let mut bound = bind(&unit.data, callee, &s.call_arguments, summary);
        if component.contains(&callee.program_id) {
            bound.must.clear();
        }
        if bound.degraded {
            sets.set_degraded();
        }
        let mut gen = s.reads.clone();
        gen.extend(bound.gen);
        let mut kill = s.writes.clone();
        kill.extend(bound.must);
        let mut resp = s.writes.clone();
        resp.extend(bound.may);
        resp.extend(kill.iter().copied());
        sets.set_site(s.id, gen, kill, resp);
    }
    Ok(sets)
}

/// Signature of `region` under the requested variant. Without the call
/// chain, call sites write their argument closure; with it, they are
/// replaced by callee summaries.
pub fn interprocedural_signature(workspace: &Workspace, call_graph: &CallGraph, region: &CodeRegion, options: &AnalysisOptions) -> Result<ApiSignature> {
    let unit = workspace.unit(&region.program)?;
    let cfg = build_cfg(unit)?;
    let (sets, iterations) = if options.call_chain {
        let table = SummaryTable::compute(workspace, call_graph, &call_graph.transitive_callees(&unit.program_id), options.flow, options.strict)?;
        (site_sets(workspace, &table, unit, options.strict, &BTreeSet::new())?, table.iterations)
    } else {
        (UseDefSets::new(unit), 0)
    };
    let mut sig = match options.flow {
        Flow::Insensitive => flow_insensitive_signature(unit, &cfg, region, &sets),
        Flow::Sensitive => flow_sensitive_signature(unit, &cfg, region, &sets, options.post_context.as_ref())?,
        Flow::PathSensitive => path_sensitive_signature(unit, &cfg, region, &sets, options.bounds)?,
    };
    sig.variant.call_chain = options.call_chain;
    sig.stats.summary_iterations = iterations;
    sig.http_method = classify_http_method(unit, region, Some(workspace));
    Ok(sig)
}
