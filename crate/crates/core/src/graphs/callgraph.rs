//! Inter-program call graph over CALL and EXEC CICS LINK sites.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::frontend::StmtId;
use crate::Workspace;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CallEdge {
    pub caller: String,
    pub site: StmtId,
    pub line: u32,
    pub callee: String,
}

/// A call site whose target is not a program of the workspace.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct UnresolvedCall {
    pub caller: String,
    pub site: StmtId,
    pub line: u32,
    /// Literal name, or the identifier holding the name for dynamic calls.
    pub target: String,
    pub dynamic: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CallGraph {
    pub nodes: BTreeSet<String>,
    pub edges: Vec<CallEdge>,
    pub unresolved: Vec<UnresolvedCall>,
    /// Strongly connected components, callees before callers.
    pub sccs: Vec<Vec<String>>,
    /// Components with more than one program or a self-call.
    pub cycles: Vec<BTreeSet<String>>,
}

impl CallGraph {
    pub fn callees(&self, program: &str) -> BTreeSet<&str> {
        self.edges.iter().filter(|e| e.caller == program).map(|e| e.callee.as_str()).collect()
    }

    pub fn edge_at(&self, program: &str, site: StmtId) -> Option<&CallEdge> {
        self.edges.iter().find(|e| e.caller == program && e.site == site)
    }

    pub fn in_cycle(&self, program: &str) -> bool {
        self.cycles.iter().any(|c| c.contains(program))
    }

    /// Programs reachable from `program` through one or more calls.
    pub fn transitive_callees(&self, program: &str) -> BTreeSet<String> {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<&str> = vec![program];
        while let Some(p) = stack.pop() {
            for c in self.callees(p) {
                if seen.insert(String::from(c)) {
                    stack.push(c);
                }
            }
        }
        seen
    }
}

pub fn build_call_graph(workspace: &Workspace) -> CallGraph {
    let nodes: BTreeSet<String> = workspace.units().map(|u| u.program_id.clone()).collect();
    let mut edges = Vec::new();
    let mut unresolved = Vec::new();
    for u in workspace.units() {
        for s in u.statements.iter().filter(|s| s.kind.is_call()) {
            let Some(target) = &s.call_target else { continue };
            if !s.dynamic_call && nodes.contains(target) {
                edges.push(CallEdge { caller: u.program_id.clone(), site: s.id, line: s.line, callee: target.clone() });
            } else {
                unresolved.push(UnresolvedCall { caller: u.program_id.clone(), site: s.id, line: s.line, target: target.clone(), dynamic: s.dynamic_call });
            }
        }
    }
    let sccs = tarjan(&nodes, &edges);
    let cycles = sccs
        .iter()
        .filter(|c| c.len() > 1 || edges.iter().any(|e| e.caller == c[0] && e.callee == c[0]))
        .map(|c| c.iter().cloned().collect())
        .collect();
    CallGraph { nodes, edges, unresolved, sccs, cycles }
}

fn tarjan(nodes: &BTreeSet<String>, edges: &[CallEdge]) -> Vec<Vec<String>> {
    let names: Vec<&String> = nodes.iter().collect();
    let index_of: BTreeMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); names.len()];
    for e in edges {
        adj[index_of[e.caller.as_str()]].insert(index_of[e.callee.as_str()]);
    }
    struct State {
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        next: usize,
        out: Vec<Vec<usize>>,
    }
    fn visit(v: usize, adj: &[BTreeSet<usize>], st: &mut State) {
        st.index[v] = Some(st.next);
        st.low[v] = st.next;
        st.next += 1;
        st.stack.push(v);
        st.on_stack[v] = true;
        for &w in &adj[v] {
            match st.index[w] {
                None => {
                    visit(w, adj, st);
                    st.low[v] = st.low[v].min(st.low[w]);
                }
                Some(iw) if st.on_stack[w] => st.low[v] = st.low[v].min(iw),
                Some(_) => {}
            }
        }
        if Some(st.low[v]) == st.index[v] {
            let mut comp = Vec::new();
            while let Some(w) = st.stack.pop() {
                st.on_stack[w] = false;
                comp.push(w);
                if w == v {
                    break;
                }
            }
            comp.sort_unstable();
            st.out.push(comp);
        }
    }
    let n = names.len();
    let mut st = State { index: vec![None; n], low: vec![0; n], on_stack: vec![false; n], stack: Vec::new(), next: 0, out: Vec::new() };
    for v in 0..n {
        if st.index[v].is_none() {
            visit(v, &adj, &mut st);
        }
    }
    st.out.into_iter().map(|c| c.into_iter().map(|i| names[i].clone()).collect()).collect()
}
