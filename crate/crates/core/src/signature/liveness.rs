use alloc::collections::{BTreeMap, BTreeSet};

use super::{Scope, UseDefSets};
use crate::frontend::{ItemId, StmtId};
use crate::graphs::Cfg;
use crate::{Error, Result};

/// Fixpoint of the backward request equations over a scope:
/// `in(n) = gen(n) ∪ (out(n) − kill(n))`, `out(n) = ∪ in(s)` over in-scope
/// successors, empty at scope exits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LivenessState {
    req_in: BTreeMap<StmtId, BTreeSet<ItemId>>,
    req_out: BTreeMap<StmtId, BTreeSet<ItemId>>,
    /// Passes over the scope until nothing changed (the last pass included).
    pub passes: usize,
}

static EMPTY: BTreeSet<ItemId> = BTreeSet::new();

impl LivenessState {
    pub fn req_in(&self, n: StmtId) -> &BTreeSet<ItemId> {
        self.req_in.get(&n).unwrap_or(&EMPTY)
    }

    pub fn req_out(&self, n: StmtId) -> &BTreeSet<ItemId> {
        self.req_out.get(&n).unwrap_or(&EMPTY)
    }
}

pub fn liveness(cfg: &Cfg, scope: &Scope, sets: &UseDefSets) -> Result<LivenessState> {
    let order = scope.post_order(cfg);
    let items: BTreeSet<ItemId> = order.iter().flat_map(|&n| sets.req_gen(n).iter().copied()).collect();
    let cap = items.len() * order.len() + 1;
    let mut req_in: BTreeMap<StmtId, BTreeSet<ItemId>> = order.iter().map(|&n| (n, BTreeSet::new())).collect();
    let mut req_out = req_in.clone();
    let mut passes = 0;
    loop {
        passes += 1;
        if passes > cap {
            return Err(Error::NonTerminatingFixpoint(passes));
        }
        let mut changed = false;
        // post-order visits successors before predecessors
        for &n in &order {
            let mut out = BTreeSet::new();
            for s in scope.successors(cfg, n) {
                if let Some(i) = req_in.get(&s) {
                    out.extend(i.iter().copied());
                }
            }
            let kill = sets.req_kill(n);
            let mut inn: BTreeSet<ItemId> = out.iter().filter(|i| !kill.contains(i)).copied().collect();
            inn.extend(sets.req_gen(n).iter().copied());
            if inn != req_in[&n] {
                req_in.insert(n, inn);
                changed = true;
            }
            req_out.insert(n, out);
        }
        if !changed {
            break;
        }
    }
    Ok(LivenessState { req_in, req_out, passes })
}
