use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use super::{Scope, UseDefSets};
use crate::frontend::{Cond, DataDictionary, EvalSubject, Form, ItemId, Literal, Operand, SourceUnit, StmtId, WhenValue};
use crate::graphs::{Branch, Cfg};
use crate::{Error, Result};

/// Limits on path enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathBounds {
    /// Paths beyond this count abort the analysis.
    pub max_paths: usize,
    /// Extra visits of one statement allowed on a single path.
    pub unroll: usize,
    /// Regions (with performed paragraphs) larger than this are refused.
    pub max_region_statements: usize,
}

impl Default for PathBounds {
    fn default() -> Self {
        PathBounds { max_paths: 4096, unroll: 3, max_region_statements: 200 }
    }
}

/// Union of per-path requests and responses over the feasible paths.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PathOutcome {
    pub requests: BTreeSet<ItemId>,
    pub responses: BTreeSet<ItemId>,
    pub paths: usize,
}

/// Statically known values of items on the current path.
pub(crate) type Env = BTreeMap<ItemId, Literal>;

/// Value a literal takes once moved into `target`, if it is representable
/// without truncation or conversion.
fn stored(data: &DataDictionary, target: ItemId, lit: &Literal) -> Option<Literal> {
    let pic = data.get(target).picture.as_ref()?;
    match lit {
        Literal::Str(s) if s.chars().count() <= pic.positions as usize => Some(lit.clone()),
        Literal::Num(n) if n.chars().filter(char::is_ascii_digit).count() <= pic.positions as usize && !n.contains('.') => Some(lit.clone()),
        Literal::Figurative(_) => Some(lit.clone()),
        _ => None,
    }
}

/// Applies the effect of statement `n` to `env`.
pub(crate) fn transfer(unit: &SourceUnit, sets: &UseDefSets, n: StmtId, env: &mut Env) {
    let data = &unit.data;
    let stmt = unit.stmt(n);
    let assigned: Vec<(ItemId, Option<Literal>)> = match &stmt.form {
        Form::Move { source, targets } if !stmt.kind.is_call() => targets
            .iter()
            .map(|&t| {
                let v = match source {
                    Operand::Lit(l) => stored(data, t, l),
                    Operand::Item(i) => env.get(i).and_then(|l| stored(data, t, l)),
                    Operand::Opaque => None,
                };
                (t, v)
            })
            .collect(),
        _ => Vec::new(),
    };
    let written = sets.resp_gen(n);
    if !written.is_empty() {
        env.retain(|&k, _| !written.iter().any(|&w| data.overlaps(k, w)));
    }
    for (t, v) in assigned {
        if let Some(v) = v {
            env.insert(t, v);
        }
    }
}

fn value_of(env: &Env, o: &Operand) -> Option<Literal> {
    match o {
        Operand::Item(i) => env.get(i).cloned(),
        Operand::Lit(l) => Some(l.clone()),
        Operand::Opaque => None,
    }
}

fn eval(cond: &Cond, env: &Env) -> Option<bool> {
    cond.eval(&|i| env.get(&i).cloned())
}

fn or3(a: Option<bool>, b: Option<bool>) -> Option<bool> {
    match (a, b) {
        (Some(true), _) | (_, Some(true)) => Some(true),
        (Some(false), Some(false)) => Some(false),
        _ => None,
    }
}

/// Three-valued match of every WHEN arm against the subject.
fn arm_matches(subject: &EvalSubject, values: &[WhenValue], env: &Env) -> Option<bool> {
    let subject_value = match subject {
        EvalSubject::True => None,
        EvalSubject::Operand(o) => value_of(env, o),
    };
    let one = |v: &WhenValue| -> Option<bool> {
        match (subject, v) {
            (_, WhenValue::Other) => Some(true),
            (EvalSubject::True, WhenValue::Cond(c)) => eval(c, env),
            (EvalSubject::Operand(_), WhenValue::Lit(l)) => Some(subject_value.as_ref()?.compare(l)?.is_eq()),
            (EvalSubject::Operand(_), WhenValue::Item(i)) => Some(subject_value.as_ref()?.compare(env.get(i)?)?.is_eq()),
            _ => None,
        }
    };
    // three-valued OR: an unknown value must not stop the scan
    #[allow(clippy::manual_try_fold)]
    values.iter().fold(Some(false), |acc, v| or3(acc, one(v)))
}

/// Whether the edge labelled `branch` out of `n` can be taken under `env`
/// (the environment after `n` executed).
pub(crate) fn feasible(unit: &SourceUnit, n: StmtId, branch: Branch, env: &Env) -> bool {
    match (&unit.stmt(n).form, branch) {
        (Form::If { cond, .. }, Branch::Then) => eval(cond, env) != Some(false),
        (Form::If { cond, .. }, Branch::Else) => eval(cond, env) != Some(true),
        (Form::Evaluate { subject, arms }, Branch::Arm(i)) => {
            arms[..i].iter().all(|a| arm_matches(subject, &a.values, env) != Some(true)) && arm_matches(subject, &arms[i].values, env) != Some(false)
        }
        (Form::Evaluate { subject, arms }, Branch::NoMatch) => arms.iter().all(|a| arm_matches(subject, &a.values, env) != Some(true)),
        (Form::Perform { until: Some(c), .. }, Branch::LoopBody) => eval(c, env) != Some(true),
        (Form::Perform { until: Some(c), .. }, Branch::LoopExit) => eval(c, env) != Some(false),
        _ => true,
    }
}

/// Requests of one path: items read before being written along it.
fn path_requests(sets: &UseDefSets, path: &[StmtId]) -> BTreeSet<ItemId> {
    let mut live = BTreeSet::new();
    for &n in path.iter().rev() {
        let kill = sets.req_kill(n);
        live.retain(|i| !kill.contains(i));
        live.extend(sets.req_gen(n).iter().copied());
    }
    live
}

struct Walker<'a> {
    unit: &'a SourceUnit,
    cfg: &'a Cfg,
    scope: &'a Scope,
    sets: &'a UseDefSets,
    bounds: PathBounds,
    visits: Vec<usize>,
    path: Vec<StmtId>,
    outcome: PathOutcome,
}

impl Walker<'_> {
    fn finish_path(&mut self) -> Result<()> {
        self.outcome.paths += 1;
        if self.outcome.paths > self.bounds.max_paths {
            return Err(Error::PathBudgetExceeded(self.outcome.paths));
        }
        let req = path_requests(self.sets, &self.path);
        self.outcome.requests.extend(req);
        for &n in &self.path {
            self.outcome.responses.extend(self.sets.resp_gen(n).iter().copied());
        }
        Ok(())
    }

    fn walk(&mut self, n: StmtId, mut env: Env) -> Result<()> {
        self.visits[n.index()] += 1;
        self.path.push(n);
        transfer(self.unit, self.sets, n, &mut env);
        let mut ends = self.cfg.successors(n).is_empty() || self.cfg.end_branches(n).iter().any(|&b| feasible(self.unit, n, b, &env));
        let mut next: Vec<StmtId> = Vec::new();
        for &(s, branch) in self.cfg.edges_from(n) {
            if !feasible(self.unit, n, branch, &env) {
                continue;
            }
            if !self.scope.contains(s) {
                ends = true;
            } else if self.visits[s.index()] <= self.bounds.unroll && !next.contains(&s) {
                next.push(s);
            }
        }
        if next.is_empty() {
            ends = true;
        }
        let result = (|| {
            if ends {
                self.finish_path()?;
            }
            for s in next {
                self.walk(s, env.clone())?;
            }
            Ok(())
        })();
        self.path.pop();
        self.visits[n.index()] -= 1;
        result
    }
}

/// Enumerates feasible paths of `scope` from its entry, constant-folding
/// branch conditions over literals moved within the scope.
pub(crate) fn enumerate(unit: &SourceUnit, cfg: &Cfg, scope: &Scope, sets: &UseDefSets, bounds: PathBounds) -> Result<PathOutcome> {
    if scope.nodes().len() > bounds.max_region_statements {
        return Err(Error::PathBudgetExceeded(0));
    }
    let mut w = Walker { unit, cfg, scope, sets, bounds, visits: vec![0; unit.statements.len()], path: Vec::new(), outcome: PathOutcome::default() };
    w.walk(scope.entry(), Env::new())?;
    Ok(w.outcome)
}
