use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::ops::Range;

use super::generator::random_program_text;
use super::paths::{enumerate_with, oracle_signature};
use crate::frontend::{parse_source, Form, ItemId, NoCopybooks, Operand, SourceUnit};
use crate::graphs::{build_cfg, CodeRegion};
use crate::signature::{flow_insensitive_signature, flow_sensitive_signature, path_sensitive_signature, PathBounds, Scope, UseDefSets};
use crate::{Error, Result};

/// A property that failed on some region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub property: &'static str,
    pub region: (u32, u32),
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub passed: usize,
    pub failed: usize,
    /// Seed, program text and violation of the first failure.
    pub first_failure: Option<(u64, String, Violation)>,
}

fn names(unit: &SourceUnit, s: &BTreeSet<ItemId>) -> String {
    let v: Vec<&str> = s.iter().map(|&i| unit.data.get(i).name.as_str()).collect();
    format!("{{{}}}", v.join(", "))
}

/// Regions checked per program: the whole program and the suffix starting
/// at its middle statement.
fn regions(unit: &SourceUnit) -> Result<Vec<CodeRegion>> {
    let whole = CodeRegion::whole(unit)?;
    let mut out = alloc::vec![whole.clone()];
    let lines: BTreeSet<u32> = unit.statements.iter().map(|s| s.line).collect();
    let lines: Vec<u32> = lines.into_iter().collect();
    if lines.len() > 2 {
        out.push(CodeRegion::new(unit, lines[lines.len() / 2], whole.end_line)?);
    }
    Ok(out)
}

/// Checks soundness and precision of the static analyses against the
/// path oracle on every checked region of `unit`. With `corrupt_kills` the
/// analyses run on deliberately wrong kill sets (negative control).
pub fn check_program(unit: &SourceUnit, corrupt_kills: bool) -> Result<core::result::Result<(), Violation>> {
    let cfg = build_cfg(unit)?;
    let truth = UseDefSets::new(unit);
    let mut sets = truth.clone();
    if corrupt_kills {
        sets.corrupt_kills();
    }
    for region in regions(unit)? {
        let span = (region.start_line, region.end_line);
        let fail = |property, detail| Err(Violation { property, region: span, detail });
        let scope = Scope::of_region(unit, &region);
        let mut paths = None;
        for unroll in [3, 1] {
            let limits = PathBounds { max_paths: 100_000, unroll, max_region_statements: 200 };
            match enumerate_with(unit, &cfg, &scope, &truth, limits) {
                Ok(p) => {
                    paths = Some(p);
                    break;
                }
                Err(Error::PathBudgetExceeded(_)) => continue,
                Err(e) => return Err(e),
            }
        }
        let Some(paths) = paths else { continue };
        let oracle = oracle_signature(&paths, &truth);
        let fi = flow_insensitive_signature(unit, &cfg, &region, &sets);
        let fs = flow_sensitive_signature(unit, &cfg, &region, &sets, None)?;
        let (fi_req, fi_resp) = (fi.request_items(), fi.response_items());
        let (fs_req, fs_resp) = (fs.request_items(), fs.response_items());
        let show = |s: &BTreeSet<ItemId>| names(unit, s);
        if !fs_req.is_superset(&oracle.union_req) {
            return Ok(fail("fs requests cover oracle", format!("fs {} oracle {}", show(&fs_req), show(&oracle.union_req))));
        }
        if !fi_req.is_superset(&oracle.union_req) {
            return Ok(fail("fi requests cover oracle", format!("fi {} oracle {}", show(&fi_req), show(&oracle.union_req))));
        }
        if fs_resp != fi_resp || !fs_resp.is_superset(&oracle.union_resp) {
            return Ok(fail("responses agree and cover oracle", format!("fs {} fi {} oracle {}", show(&fs_resp), show(&fi_resp), show(&oracle.union_resp))));
        }
        if !fs_req.is_subset(&fi_req) {
            return Ok(fail("fs requests within fi", format!("fs {} fi {}", show(&fs_req), show(&fi_req))));
        }
        match path_sensitive_signature(unit, &cfg, &region, &sets, PathBounds::default()) {
            Ok(ps) => {
                let (ps_req, ps_resp) = (ps.request_items(), ps.response_items());
                if !ps_req.is_subset(&fs_req) || !ps_resp.is_subset(&fs_resp) {
                    return Ok(fail("ps within fs", format!("ps {} / {} fs {} / {}", show(&ps_req), show(&ps_resp), show(&fs_req), show(&fs_resp))));
                }
                if !ps_req.is_superset(&oracle.union_req) || !ps_resp.is_superset(&oracle.union_resp) {
                    return Ok(fail("ps covers oracle", format!("ps {} / {} oracle {} / {}", show(&ps_req), show(&ps_resp), show(&oracle.union_req), show(&oracle.union_resp))));
                }
            }
            Err(Error::PathBudgetExceeded(_)) => {}
            Err(e) => return Err(e),
        }
        let loop_free = scope.nodes().iter().all(|&n| !matches!(unit.stmt(n).form, Form::Perform { until: Some(_), .. }));
        let no_constants = scope.nodes().iter().all(|&n| !matches!(unit.stmt(n).form, Form::Move { source: Operand::Lit(_), .. }));
        if loop_free && no_constants && fs_req != oracle.union_req {
            return Ok(fail("fs exact on loop-free input-dependent regions", format!("fs {} oracle {}", show(&fs_req), show(&oracle.union_req))));
        }
        if flow_sensitive_signature(unit, &cfg, &region, &sets, None)? != fs {
            return Ok(fail("deterministic", String::from("two flow-sensitive runs differ")));
        }
    }
    Ok(Ok(()))
}

/// Generator parameters for `seed`: sizes cycle through 1..=30 and
/// variable counts through 2..=10.
pub fn seed_shape(seed: u64) -> (usize, usize) {
    ((seed % 30) as usize + 1, ((seed / 30) % 9) as usize + 2)
}

/// Runs [`check_program`] on the generated program of every seed.
pub fn verify_seeds(seeds: Range<u64>, corrupt_kills: bool) -> Result<VerifyReport> {
    let mut report = VerifyReport::default();
    for seed in seeds {
        let (size, vars) = seed_shape(seed);
        let text = random_program_text(seed, size, vars);
        let unit = parse_source(&text, &NoCopybooks)?;
        match check_program(&unit, corrupt_kills)? {
            Ok(()) => report.passed += 1,
            Err(v) => {
                report.failed += 1;
                if report.first_failure.is_none() {
                    report.first_failure = Some((seed, text, v));
                }
            }
        }
    }
    Ok(report)
}
