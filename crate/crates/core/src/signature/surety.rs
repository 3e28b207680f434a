use alloc::collections::{BTreeMap, BTreeSet};

use super::{ApiSignature, Role, Scope, UseDefSets};
use crate::frontend::{ItemId, SourceUnit, StmtId};
use crate::graphs::Cfg;

fn intersect_all<'a>(mut sets: impl Iterator<Item = &'a BTreeSet<ItemId>>) -> BTreeSet<ItemId> {
    let Some(first) = sets.next() else {
        return BTreeSet::new();
    };
    let mut acc = first.clone();
    for s in sets {
        acc.retain(|i| s.contains(i));
    }
    acc
}

/// Items read before any write on every path from the scope entry.
fn must_read_first(cfg: &Cfg, scope: &Scope, sets: &UseDefSets) -> BTreeSet<ItemId> {
    let order = scope.post_order(cfg);
    let top: BTreeSet<ItemId> = order.iter().flat_map(|&n| sets.req_gen(n).iter().copied()).collect();
    let mut mr_in: BTreeMap<StmtId, BTreeSet<ItemId>> = order.iter().map(|&n| (n, top.clone())).collect();
    loop {
        let mut changed = false;
        for &n in &order {
            let out = if scope.is_exit(cfg, n) {
                BTreeSet::new()
            } else {
                intersect_all(scope.successors(cfg, n).filter_map(|s| mr_in.get(&s)))
            };
            let kill = sets.req_kill(n);
            let mut inn: BTreeSet<ItemId> = out.into_iter().filter(|i| !kill.contains(i)).collect();
            inn.extend(sets.req_gen(n).iter().copied());
            if inn != mr_in[&n] {
                mr_in.insert(n, inn);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    mr_in.remove(&scope.entry()).unwrap_or_default()
}

/// Items written on every path from the scope entry to a scope exit.
pub(crate) fn must_written_at_exits(cfg: &Cfg, scope: &Scope, sets: &UseDefSets) -> BTreeSet<ItemId> {
    let mut order = scope.post_order(cfg);
    order.reverse();
    let reachable: BTreeSet<StmtId> = order.iter().copied().collect();
    let top: BTreeSet<ItemId> = order.iter().flat_map(|&n| sets.req_kill(n).iter().copied()).collect();
    let mut mw_out: BTreeMap<StmtId, BTreeSet<ItemId>> = order.iter().map(|&n| (n, top.clone())).collect();
    loop {
        let mut changed = false;
        for &n in &order {
            let inn = if n == scope.entry() {
                BTreeSet::new()
            } else {
                intersect_all(cfg.predecessors(n).iter().filter(|p| reachable.contains(p)).filter_map(|p| mw_out.get(p)))
            };
            let mut out = inn;
            out.extend(sets.req_kill(n).iter().copied());
            if out != mw_out[&n] {
                mw_out.insert(n, out);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    intersect_all(order.iter().filter(|&&n| scope.is_exit(cfg, n)).filter_map(|n| mw_out.get(n)))
}

/// Sets the `optional` flag: a request read before any write on every path
/// and never written, or a response written on every path and never read,
/// is certain; everything else stays optional.
pub fn surety_annotate(mut sig: ApiSignature, unit: &SourceUnit, cfg: &Cfg, sets: &UseDefSets) -> ApiSignature {
    let scope = Scope::of_region(unit, &sig.region);
    let mut read = BTreeSet::new();
    let mut written = BTreeSet::new();
    for &n in scope.nodes() {
        read.extend(sets.req_gen(n).iter().copied());
        written.extend(sets.resp_gen(n).iter().copied());
    }
    let must_read = must_read_first(cfg, &scope, sets);
    let must_written = must_written_at_exits(cfg, &scope, sets);
    for f in &mut sig.requests {
        f.optional = f.role == Role::Both || !(must_read.contains(&f.item) && !written.contains(&f.item));
    }
    for f in &mut sig.responses {
        f.optional = f.role == Role::Both || !(must_written.contains(&f.item) && !read.contains(&f.item));
    }
    sig
}
