use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::frontend::{ItemId, SourceUnit, StmtId};

/// Per-statement generated and killed items.
///
/// Outside call sites `req_kill` and `resp_gen` are both the statement's
/// writes. At a call site analyzed through a callee summary, `req_kill`
/// holds only the writes the callee performs on every path while `resp_gen`
/// holds every write it may perform.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UseDefSets {
    gen: Vec<BTreeSet<ItemId>>,
    kill: Vec<BTreeSet<ItemId>>,
    resp: Vec<BTreeSet<ItemId>>,
    degraded: bool,
}

impl UseDefSets {
    /// Sets for the without-call-chain variant: a call site reads only its
    /// dynamic target and writes the closure of every argument.
    pub fn new(unit: &SourceUnit) -> UseDefSets {
        let mut gen = Vec::with_capacity(unit.statements.len());
        let mut kill = Vec::with_capacity(unit.statements.len());
        for s in &unit.statements {
            gen.push(s.reads.clone());
            let mut w = s.writes.clone();
            if s.kind.is_call() {
                for &a in &s.call_arguments {
                    w.extend(unit.data.closure(a));
                }
            }
            kill.push(w);
        }
        let resp = kill.clone();
        UseDefSets { gen, kill, resp, degraded: false }
    }

    pub fn req_gen(&self, n: StmtId) -> &BTreeSet<ItemId> {
        &self.gen[n.index()]
    }

    pub fn req_kill(&self, n: StmtId) -> &BTreeSet<ItemId> {
        &self.kill[n.index()]
    }

    pub fn resp_gen(&self, n: StmtId) -> &BTreeSet<ItemId> {
        &self.resp[n.index()]
    }

    /// True when some call site fell back to the without-call-chain model
    /// in a with-call-chain analysis.
    pub fn degraded(&self) -> bool {
        self.degraded
    }

    pub(crate) fn set_degraded(&mut self) {
        self.degraded = true;
    }

    pub(crate) fn set_site(&mut self, n: StmtId, gen: BTreeSet<ItemId>, kill: BTreeSet<ItemId>, resp: BTreeSet<ItemId>) {
        self.gen[n.index()] = gen;
        self.kill[n.index()] = kill;
        self.resp[n.index()] = resp;
    }

    /// Negative control for the property checker: every statement also
    /// kills every item read anywhere, which makes liveness unsound.
    #[doc(hidden)]
    pub fn corrupt_kills(&mut self) {
        let all: BTreeSet<ItemId> = self.gen.iter().flatten().copied().collect();
        for k in &mut self.kill {
            k.extend(all.iter().copied());
        }
    }
}
