//! Statement-level control-flow graph of one program.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::frontend::{Form, SourceUnit, StmtId};
use crate::{Error, Result};

/// Why an edge is taken; path-sensitive analyses use it to decide
/// feasibility.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Branch {
    Seq,
    Then,
    Else,
    /// Entry into the body of the i-th WHEN arm.
    Arm(usize),
    /// No WHEN arm matched and there is no WHEN OTHER.
    NoMatch,
    LoopBody,
    LoopExit,
    /// Return from a performed paragraph range.
    Return,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cfg {
    entry: Option<StmtId>,
    edges: Vec<Vec<(StmtId, Branch)>>,
    succ: Vec<Vec<StmtId>>,
    pred: Vec<Vec<StmtId>>,
    /// Statements after which the program may end (GOBACK, STOP RUN,
    /// CICS RETURN, or falling off the last paragraph).
    ends: BTreeSet<StmtId>,
    /// Branch labels under which execution ends after each statement.
    end_labels: Vec<Vec<Branch>>,
    reachable: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Target {
    Stmt(StmtId),
    ParaStart(usize),
    ParaEnd(usize),
    End,
}

impl Cfg {
    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }

    pub fn entry(&self) -> Option<StmtId> {
        self.entry
    }

    pub fn nodes(&self) -> impl Iterator<Item = StmtId> + '_ {
        (0..self.len() as u32).map(StmtId)
    }

    pub fn successors(&self, n: StmtId) -> &[StmtId] {
        &self.succ[n.index()]
    }

    pub fn predecessors(&self, n: StmtId) -> &[StmtId] {
        &self.pred[n.index()]
    }

    /// Outgoing edges with their branch labels (a target may repeat under
    /// different labels).
    pub fn edges_from(&self, n: StmtId) -> &[(StmtId, Branch)] {
        &self.edges[n.index()]
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    /// Nodes without successors.
    pub fn exits(&self) -> impl Iterator<Item = StmtId> + '_ {
        self.nodes().filter(|&n| self.succ[n.index()].is_empty())
    }

    /// Nodes after which execution of the program may end.
    pub fn may_end(&self, n: StmtId) -> bool {
        self.ends.contains(&n)
    }

    /// Labels of the branches out of `n` that end the program (a
    /// terminating statement ends under `Seq`).
    pub fn end_branches(&self, n: StmtId) -> &[Branch] {
        &self.end_labels[n.index()]
    }

    pub fn is_reachable(&self, n: StmtId) -> bool {
        self.reachable[n.index()]
    }

    pub fn unreachable(&self) -> impl Iterator<Item = StmtId> + '_ {
        self.nodes().filter(|&n| !self.reachable[n.index()])
    }
}

struct Builder<'u> {
    unit: &'u SourceUnit,
    next: Vec<Target>,
    /// Return targets registered per paragraph (range end).
    returns: Vec<Vec<Target>>,
    interior: Vec<bool>,
    free: Vec<bool>,
}

pub fn build_cfg(unit: &SourceUnit) -> Result<Cfg> {
    let n = unit.statements.len();
    let np = unit.paragraphs.len();
    let mut b = Builder { unit, next: vec![Target::End; n], returns: vec![Vec::new(); np], interior: vec![false; np], free: vec![false; np] };
    for (pi, p) in unit.paragraphs.iter().enumerate() {
        b.link_block(&p.body, Target::ParaEnd(pi));
    }
    // PERFORM ranges and GO TO targets
    let mut goto_targets = BTreeSet::new();
    for s in &unit.statements {
        match &s.form {
            Form::Perform { target: Some(t), until, .. } => {
                let from = b.paragraph(&t.from, s.line)?;
                let to = match &t.thru {
                    Some(th) => b.paragraph(th, s.line)?,
                    None => from,
                };
                if to < from {
                    return Err(Error::syntax(s.line, alloc::format!("PERFORM {} THRU {} runs backwards", t.from, t.thru.as_deref().unwrap_or(""))));
                }
                for i in from..to {
                    b.interior[i] = true;
                }
                let ret = if until.is_some() { Target::Stmt(s.id) } else { b.next[s.id.index()] };
                if !b.returns[to].contains(&ret) {
                    b.returns[to].push(ret);
                }
            }
            Form::GoTo { target } => {
                goto_targets.insert(b.paragraph(target, s.line)?);
            }
            _ => {}
        }
    }
    for i in 0..np {
        let completes = unit.paragraphs[i].body.last().is_none_or(|&l| {
            let s = unit.stmt(l);
            !s.kind.terminates() && !matches!(s.form, Form::GoTo { .. })
        });
        if i == 0 || goto_targets.contains(&i) {
            b.free[i] = true;
        }
        if b.free[i] && completes && i + 1 < np {
            b.free[i + 1] = true;
        }
    }

    let mut edges: Vec<Vec<(StmtId, Branch)>> = vec![Vec::new(); n];
    let mut ends = BTreeSet::new();
    let mut end_labels: Vec<Vec<Branch>> = vec![Vec::new(); n];
    for s in &unit.statements {
        let id = s.id;
        let next = b.next[id.index()];
        let first_or = |body: &[StmtId]| body.first().map_or(next, |&f| Target::Stmt(f));
        let mut out: Vec<(Target, Branch)> = Vec::new();
        if s.kind.terminates() {
            ends.insert(id);
            end_labels[id.index()].push(Branch::Seq);
        } else {
            match &s.form {
                Form::GoTo { target } => out.push((Target::ParaStart(b.paragraph(target, s.line)?), Branch::Seq)),
                Form::If { then_branch, else_branch, .. } => {
                    out.push((first_or(then_branch), Branch::Then));
                    out.push((else_branch.as_deref().map_or(next, first_or), Branch::Else));
                }
                Form::Evaluate { arms, .. } => {
                    for (i, a) in arms.iter().enumerate() {
                        out.push((first_or(&a.body), Branch::Arm(i)));
                    }
                    if !arms.iter().any(|a| a.is_other()) {
                        out.push((next, Branch::NoMatch));
                    }
                }
                Form::Perform { target: Some(t), until, .. } => {
                    let start = Target::ParaStart(b.paragraph(&t.from, s.line)?);
                    if until.is_some() {
                        out.push((start, Branch::LoopBody));
                        out.push((next, Branch::LoopExit));
                    } else {
                        out.push((start, Branch::Seq));
                    }
                }
                Form::Perform { target: None, until, body } => {
                    if until.is_some() {
                        out.push((body.first().map_or(Target::Stmt(id), |&f| Target::Stmt(f)), Branch::LoopBody));
                        out.push((next, Branch::LoopExit));
                    } else {
                        out.push((first_or(body), Branch::Seq));
                    }
                }
                _ => out.push((next, Branch::Seq)),
            }
        }
        for (t, br) in out {
            let mut seen = BTreeSet::new();
            let mut resolved = Vec::new();
            let mut ended = false;
            b.resolve(t, &mut seen, &mut resolved, &mut ended);
            if ended {
                ends.insert(id);
                if !end_labels[id.index()].contains(&br) {
                    end_labels[id.index()].push(br);
                }
            }
            for (r, via_return) in resolved {
                let label = if via_return && br == Branch::Seq { Branch::Return } else { br };
                if !edges[id.index()].contains(&(r, label)) {
                    edges[id.index()].push((r, label));
                }
            }
        }
    }
    let mut succ: Vec<Vec<StmtId>> = edges.iter().map(|e| e.iter().map(|&(t, _)| t).collect::<BTreeSet<_>>().into_iter().collect()).collect();
    let mut pred: Vec<Vec<StmtId>> = vec![Vec::new(); n];
    for (i, ss) in succ.iter_mut().enumerate() {
        for &t in ss.iter() {
            pred[t.index()].push(StmtId(i as u32));
        }
    }
    let entry = if np == 0 {
        None
    } else {
        let mut seen = BTreeSet::new();
        let mut resolved = Vec::new();
        let mut ended = false;
        b.resolve(Target::ParaStart(0), &mut seen, &mut resolved, &mut ended);
        resolved.first().map(|&(s, _)| s)
    };
    let mut reachable = vec![false; n];
    if let Some(e) = entry {
        let mut stack = vec![e];
        reachable[e.index()] = true;
        while let Some(x) = stack.pop() {
            for &y in &succ[x.index()] {
                if !reachable[y.index()] {
                    reachable[y.index()] = true;
                    stack.push(y);
                }
            }
        }
    }
    Ok(Cfg { entry, edges, succ, pred, ends, end_labels, reachable })
}

impl Builder<'_> {
    fn paragraph(&self, name: &str, line: u32) -> Result<usize> {
        self.unit.paragraph_index(name).ok_or_else(|| Error::UnknownParagraph { name: name.into(), line })
    }

    fn link_block(&mut self, block: &[StmtId], after: Target) {
        for (i, &s) in block.iter().enumerate() {
            self.next[s.index()] = block.get(i + 1).map_or(after, |&n| Target::Stmt(n));
        }
        for &s in block {
            let next = self.next[s.index()];
            match &self.unit.stmt(s).form {
                Form::If { then_branch, else_branch, .. } => {
                    self.link_block(then_branch, next);
                    if let Some(e) = else_branch {
                        self.link_block(e, next);
                    }
                }
                Form::Evaluate { arms, .. } => {
                    for a in arms {
                        self.link_block(&a.body, next);
                    }
                }
                Form::Perform { target: None, until, body } => {
                    let after = if until.is_some() { Target::Stmt(s) } else { next };
                    self.link_block(body, after);
                }
                _ => {}
            }
        }
    }

    /// Resolves a symbolic target to statements; the flag marks targets
    /// reached through a perform return.
    fn resolve(&self, t: Target, seen: &mut BTreeSet<usize>, out: &mut Vec<(StmtId, bool)>, ended: &mut bool) {
        self.resolve_inner(t, false, seen, out, ended)
    }

    fn resolve_inner(&self, t: Target, via_return: bool, seen: &mut BTreeSet<usize>, out: &mut Vec<(StmtId, bool)>, ended: &mut bool) {
        match t {
            Target::Stmt(s) => {
                if !out.iter().any(|&(x, _)| x == s) {
                    out.push((s, via_return));
                }
            }
            Target::End => *ended = true,
            Target::ParaStart(p) => match self.unit.paragraphs[p].body.first() {
                Some(&f) => self.resolve_inner(Target::Stmt(f), via_return, seen, out, ended),
                None => self.resolve_inner(Target::ParaEnd(p), via_return, seen, out, ended),
            },
            Target::ParaEnd(p) => {
                if !seen.insert(p) {
                    return;
                }
                let falls = self.free[p] || self.interior[p] || self.returns[p].is_empty();
                let np = self.unit.paragraphs.len();
                if falls {
                    let t = if p + 1 < np { Target::ParaStart(p + 1) } else { Target::End };
                    self.resolve_inner(t, via_return, seen, out, ended);
                }
                for &r in &self.returns[p] {
                    self.resolve_inner(r, true, seen, out, ended);
                }
            }
        }
    }
}

/// Depth-first post-order of the nodes reachable from the entry.
pub fn post_order(cfg: &Cfg) -> Vec<StmtId> {
    let mut order = Vec::new();
    let Some(entry) = cfg.entry() else {
        return order;
    };
    let mut visited = vec![false; cfg.len()];
    // (node, index of next successor to visit)
    let mut stack = vec![(entry, 0usize)];
    visited[entry.index()] = true;
    while let Some(&mut (n, ref mut i)) = stack.last_mut() {
        let succ = cfg.successors(n);
        if *i < succ.len() {
            let m = succ[*i];
            *i += 1;
            if !visited[m.index()] {
                visited[m.index()] = true;
                stack.push((m, 0));
            }
        } else {
            order.push(n);
            stack.pop();
        }
    }
    order
}
