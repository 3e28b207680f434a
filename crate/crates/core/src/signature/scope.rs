use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::frontend::{Form, SourceUnit, StmtId};
use crate::graphs::{Cfg, CodeRegion};

/// The statements an analysis of a region ranges over: the region itself
/// plus the paragraphs it PERFORMs, transitively. Edges leaving the scope
/// are region exits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scope {
    entry: StmtId,
    nodes: Vec<StmtId>,
    member: Vec<bool>,
}

impl Scope {
    pub fn of_region(unit: &SourceUnit, region: &CodeRegion) -> Scope {
        let mut member = vec![false; unit.statements.len()];
        let mut work: Vec<StmtId> = region.statements.clone();
        for &s in &work {
            member[s.index()] = true;
        }
        while let Some(s) = work.pop() {
            let Form::Perform { target: Some(t), .. } = &unit.stmt(s).form else { continue };
            let (Some(from), Some(to)) = (unit.paragraph_index(&t.from), unit.paragraph_index(t.thru.as_deref().unwrap_or(&t.from))) else {
                continue;
            };
            for p in &unit.paragraphs[from..=to.max(from)] {
                for id in p.statement_ids() {
                    if !member[id.index()] {
                        member[id.index()] = true;
                        work.push(id);
                    }
                }
            }
        }
        Scope::from_members(region.entry(), member)
    }

    /// Every statement of the unit, entered at the program entry.
    pub fn whole_program(unit: &SourceUnit, cfg: &Cfg) -> Option<Scope> {
        let entry = cfg.entry()?;
        Some(Scope::from_members(entry, vec![true; unit.statements.len()]))
    }

    fn from_members(entry: StmtId, member: Vec<bool>) -> Scope {
        let nodes = member.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| StmtId(i as u32)).collect();
        Scope { entry, nodes, member }
    }

    pub fn entry(&self) -> StmtId {
        self.entry
    }

    pub fn nodes(&self) -> &[StmtId] {
        &self.nodes
    }

    pub fn contains(&self, n: StmtId) -> bool {
        self.member.get(n.index()).copied().unwrap_or(false)
    }

    /// In-scope successors of `n`.
    pub fn successors<'a>(&'a self, cfg: &'a Cfg, n: StmtId) -> impl Iterator<Item = StmtId> + 'a {
        cfg.successors(n).iter().copied().filter(|&s| self.contains(s))
    }

    /// Whether execution may leave the scope right after `n`.
    pub fn is_exit(&self, cfg: &Cfg, n: StmtId) -> bool {
        cfg.may_end(n) || cfg.successors(n).is_empty() || cfg.successors(n).iter().any(|&s| !self.contains(s))
    }

    /// Scope nodes reachable from the entry, in depth-first post-order.
    pub fn post_order(&self, cfg: &Cfg) -> Vec<StmtId> {
        let mut order = Vec::new();
        let mut visited = vec![false; self.member.len()];
        let mut stack = vec![(self.entry, 0usize)];
        visited[self.entry.index()] = true;
        while let Some(&mut (n, ref mut i)) = stack.last_mut() {
            let succ = cfg.successors(n);
            let mut pushed = None;
            while *i < succ.len() {
                let m = succ[*i];
                *i += 1;
                if self.contains(m) && !visited[m.index()] {
                    visited[m.index()] = true;
                    pushed = Some(m);
                    break;
                }
            }
            match pushed {
                Some(m) => stack.push((m, 0)),
                None => {
                    order.push(n);
                    stack.pop();
                }
            }
        }
        order
    }

    /// Nodes reachable from the entry within the scope.
    pub fn reachable(&self, cfg: &Cfg) -> BTreeSet<StmtId> {
        self.post_order(cfg).into_iter().collect()
    }
}
