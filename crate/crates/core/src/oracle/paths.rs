use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use crate::frontend::{Cond, EvalSubject, Form, ItemId, Literal, Operand, SourceUnit, StmtId, WhenValue};
use crate::graphs::{Branch, Cfg, CodeRegion};
use crate::signature::{PathBounds, Scope, UseDefSets};
use crate::{Error, Result};

/// One execution of the region: the statements run, in order, and the
/// branch taken after each of them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecutionPath {
    pub statements: Vec<StmtId>,
    /// Branch label of every edge taken; `decisions[i]` leaves `statements[i]`.
    pub decisions: Vec<Branch>,
    pub loop_unroll_bound: usize,
    /// The path stopped because every continuation exceeded the unroll bound.
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathRecord {
    pub path: ExecutionPath,
    pub req: BTreeSet<ItemId>,
    pub resp: BTreeSet<ItemId>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OracleResult {
    pub per_path: Vec<PathRecord>,
    pub union_req: BTreeSet<ItemId>,
    pub union_resp: BTreeSet<ItemId>,
}

/// Constant values known at a point of a path.
#[derive(Clone, Default)]
struct Known(BTreeMap<ItemId, Literal>);

impl Known {
    fn get(&self, i: ItemId) -> Option<Literal> {
        self.0.get(&i).cloned()
    }

    fn operand(&self, o: &Operand) -> Option<Literal> {
        match o {
            Operand::Lit(l) => Some(l.clone()),
            Operand::Item(i) => self.get(*i),
            Operand::Opaque => None,
        }
    }

    fn test(&self, c: &Cond) -> Option<bool> {
        c.eval(&|i| self.get(i))
    }

    /// Executes `n`: forgets every value sharing storage with a written
    /// item, then records the literal a MOVE stored.
    fn step(&mut self, unit: &SourceUnit, sets: &UseDefSets, n: StmtId) {
        let s = unit.stmt(n);
        let mut stores = Vec::new();
        if let Form::Move { source, targets } = &s.form {
            if let Some(v) = self.operand(source) {
                for &t in targets {
                    if fits(unit, t, &v) {
                        stores.push((t, v.clone()));
                    }
                }
            }
        }
        for &w in sets.resp_gen(n) {
            self.0.retain(|&k, _| !unit.data.overlaps(k, w));
        }
        self.0.extend(stores);
    }
}

fn fits(unit: &SourceUnit, t: ItemId, v: &Literal) -> bool {
    let Some(pic) = &unit.data.get(t).picture else { return false };
    let width = pic.positions as usize;
    match v {
        Literal::Str(s) => s.chars().count() <= width,
        Literal::Num(n) => !n.contains('.') && n.bytes().filter(u8::is_ascii_digit).count() <= width,
        Literal::Figurative(_) => true,
    }
}

/// Which WHEN arm values certainly (Some(true)) or certainly not
/// (Some(false)) select the arm.
fn selects(k: &Known, subject: &EvalSubject, values: &[WhenValue]) -> Option<bool> {
    let mut unknown = false;
    for v in values {
        let r = match (subject, v) {
            (_, WhenValue::Other) => Some(true),
            (EvalSubject::True, WhenValue::Cond(c)) => k.test(c),
            (EvalSubject::Operand(o), WhenValue::Lit(l)) => k.operand(o).and_then(|x| x.compare(l)).map(|c| c.is_eq()),
            (EvalSubject::Operand(o), WhenValue::Item(i)) => match (k.operand(o), k.get(*i)) {
                (Some(x), Some(y)) => x.compare(&y).map(|c| c.is_eq()),
                _ => None,
            },
            _ => None,
        };
        match r {
            Some(true) => return Some(true),
            Some(false) => {}
            None => unknown = true,
        }
    }
    if unknown {
        None
    } else {
        Some(false)
    }
}

fn can_take(unit: &SourceUnit, n: StmtId, b: Branch, k: &Known) -> bool {
    match &unit.stmt(n).form {
        Form::If { cond, .. } => match b {
            Branch::Then => k.test(cond) != Some(false),
            Branch::Else => k.test(cond) != Some(true),
            _ => true,
        },
        Form::Evaluate { subject, arms } => {
            let earlier_certain = |upto: usize| arms[..upto].iter().any(|a| selects(k, subject, &a.values) == Some(true));
            match b {
                Branch::Arm(i) => !earlier_certain(i) && selects(k, subject, &arms[i].values) != Some(false),
                Branch::NoMatch => !earlier_certain(arms.len()),
                _ => true,
            }
        }
        Form::Perform { until: Some(c), .. } => match b {
            Branch::LoopBody => k.test(c) != Some(true),
            Branch::LoopExit => k.test(c) != Some(false),
            _ => true,
        },
        _ => true,
    }
}

struct Partial {
    statements: Vec<StmtId>,
    decisions: Vec<Branch>,
    known: Known,
}

/// All paths of `region` from its entry, loops unrolled at most `bound`
/// times, branches forced by constants moved within the region followed one
/// way only.
pub fn enumerate_paths(unit: &SourceUnit, cfg: &Cfg, region: &CodeRegion, bound: usize) -> Result<Vec<ExecutionPath>> {
    let limits = PathBounds { unroll: bound, ..PathBounds::default() };
    let scope = Scope::of_region(unit, region);
    if scope.nodes().len() > limits.max_region_statements {
        return Err(Error::PathBudgetExceeded(0));
    }
    let sets = UseDefSets::new(unit);
    enumerate_with(unit, cfg, &scope, &sets, limits)
}

pub(crate) fn enumerate_with(unit: &SourceUnit, cfg: &Cfg, scope: &Scope, sets: &UseDefSets, limits: PathBounds) -> Result<Vec<ExecutionPath>> {
    let mut done = Vec::new();
    let mut work = vec![Partial { statements: vec![scope.entry()], decisions: Vec::new(), known: Known::default() }];
    while let Some(mut p) = work.pop() {
        let n = *p.statements.last().expect("paths are never empty");
        p.known.step(unit, sets, n);
        let mut stop = cfg.edges_from(n).is_empty() || cfg.end_branches(n).iter().any(|&b| can_take(unit, n, b, &p.known));
        let mut over_bound = false;
        let mut taken: Vec<(StmtId, Branch)> = Vec::new();
        for &(s, b) in cfg.edges_from(n) {
            if !can_take(unit, n, b, &p.known) {
                continue;
            }
            if !scope.contains(s) {
                stop = true;
                continue;
            }
            if p.statements.iter().filter(|&&x| x == s).count() > limits.unroll {
                over_bound = true;
                continue;
            }
            if !taken.iter().any(|&(t, _)| t == s) {
                taken.push((s, b));
            }
        }
        if stop || taken.is_empty() {
            done.push(ExecutionPath {
                statements: p.statements.clone(),
                decisions: p.decisions.clone(),
                loop_unroll_bound: limits.unroll,
                truncated: !stop && over_bound,
            });
            if done.len() > limits.max_paths {
                return Err(Error::PathBudgetExceeded(done.len()));
            }
        }
        // push in reverse so the first edge is explored first
        for &(s, b) in taken.iter().rev() {
            let mut q = Partial { statements: p.statements.clone(), decisions: p.decisions.clone(), known: p.known.clone() };
            q.decisions.push(b);
            q.statements.push(s);
            work.push(q);
        }
    }
    Ok(done)
}

/// Per-path requests (reads not preceded by a write on the path) and
/// responses (writes on the path), and their unions.
pub fn oracle_signature(paths: &[ExecutionPath], sets: &UseDefSets) -> OracleResult {
    let mut result = OracleResult::default();
    for path in paths {
        let mut written = BTreeSet::new();
        let mut req = BTreeSet::new();
        let mut resp = BTreeSet::new();
        for &n in &path.statements {
            req.extend(sets.req_gen(n).iter().filter(|i| !written.contains(*i)).copied());
            written.extend(sets.req_kill(n).iter().copied());
            resp.extend(sets.resp_gen(n).iter().copied());
        }
        result.union_req.extend(req.iter().copied());
        result.union_resp.extend(resp.iter().copied());
        result.per_path.push(PathRecord { path: path.clone(), req, resp });
    }
    result
}
