//! The subcommands, each returning the text to print on success.

use std::collections::BTreeMap;
use std::fs;
use std::ops::Range;
use std::path::Path;

use apify_core::frontend::parse_copybook;
use apify_core::graphs::{build_cfg, call_graph_to_dot, cfg_to_dot};
use apify_core::oracle::{enumerate_paths, oracle_signature, verify_seeds};
use apify_core::refactor::{caller_mapping_report, refactor_report, slice_copybook, Detail, RefactorSuggestion, SuggestionKind};
use apify_core::signature::{ApiSignature, HttpMethod, UseDefSets};
use apify_core::Error;

use crate::analysis::{compute_signature, SignatureOptions};
use crate::openapi::{self, Operation};
use crate::output::{oracle_json, render, CandidateDoc, SignatureDoc, SuggestionDoc, VariantDoc};
use crate::project::{Project, Target};
use crate::CliError;

pub fn identify(project: &Project, dynamic: &[String]) -> Result<String, CliError> {
    let docs: Vec<CandidateDoc> = project.candidates(dynamic)?.iter().map(CandidateDoc::from).collect();
    Ok(render(&docs))
}

/// Signature document of a target, fixed or computed.
pub fn signature_doc(project: &Project, target: &Target, opts: &SignatureOptions, stats: bool) -> Result<(SignatureDoc, Option<ApiSignature>), CliError> {
    if let Some(fixed) = &target.fixed_signature {
        let variant = VariantDoc { flow: opts.flow.as_str(), call_chain: opts.call_chain };
        return Ok((SignatureDoc::fixed(target, fixed, HttpMethod::Post, variant), None));
    }
    let sig = compute_signature(project, target, opts)?;
    Ok((SignatureDoc::new(target, &sig, stats), Some(sig)))
}

pub fn signature(project: &Project, selector: &str, opts: &SignatureOptions, stats: bool, dot_dir: Option<&Path>) -> Result<String, CliError> {
    let target = project.resolve(selector)?;
    if let Some(dir) = dot_dir {
        write_dot(project, &target, dir)?;
    }
    let (doc, _) = signature_doc(project, &target, opts, stats)?;
    Ok(render(&doc))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write_dot(project: &Project, target: &Target, dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let unit = project.workspace.unit(&target.region.program).map_err(CliError::Analysis)?;
    let cfg = build_cfg(unit).map_err(CliError::Analysis)?;
    write_file(&dir.join(format!("{}.cfg.dot", unit.program_id)), &cfg_to_dot(unit, &cfg))?;
    write_file(&dir.join("callgraph.dot"), &call_graph_to_dot(&project.call_graph))
}

/// Request and response slices of every copybook the program includes,
/// concatenated per role.
pub fn copybook_slices(project: &Project, sig: &ApiSignature) -> Result<(Option<String>, Option<String>), CliError> {
    let unit = project.workspace.unit(&sig.region.program).map_err(CliError::Analysis)?;
    let mut names: Vec<&String> = unit.copybooks_used.iter().collect();
    names.sort();
    names.dedup();
    let (mut req, mut resp) = (None::<String>, None::<String>);
    for name in names {
        let Some(text) = project.copybooks.get(&name.to_ascii_uppercase()) else { continue };
        let dict = parse_copybook(text, &project.copybooks).map_err(|source| CliError::Parse { file: name.clone(), source })?;
        match slice_copybook(&dict, sig) {
            Ok(s) => {
                for (acc, part) in [(&mut req, s.request), (&mut resp, s.response)] {
                    if let Some(p) = part {
                        acc.get_or_insert_with(String::new).push_str(&p);
                    }
                }
            }
            Err(Error::EmptySlice) => {}
            Err(e) => return Err(CliError::Analysis(e)),
        }
    }
    Ok((req, resp))
}

/// Full refactoring report for a target; slices are also written to
/// `out_dir` when given.
pub fn refactor(project: &Project, selector: &str, opts: &SignatureOptions, out_dir: Option<&Path>) -> Result<String, CliError> {
    let target = project.resolve(selector)?;
    if target.fixed_signature.is_some() {
        return Ok(render(&Vec::<SuggestionDoc>::new()));
    }
    let opts = SignatureOptions { post_context: true, ..*opts };
    let sig = compute_signature(project, &target, &opts)?;
    let unit = project.workspace.unit(&target.region.program).map_err(CliError::Analysis)?;
    let mut report = refactor_report(unit, &target.region, &sig);
    let (req, resp) = copybook_slices(project, &sig)?;
    for (role, suffix, text) in [("request", "REQ", &req), ("response", "RESP", &resp)] {
        let Some(text) = text else { continue };
        if let Some(dir) = out_dir {
            fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
            write_file(&dir.join(format!("{}-{suffix}.cpy", target.name)), text)?;
        }
        report.push(RefactorSuggestion {
            kind: SuggestionKind::SliceCopybook,
            program: target.region.program.clone(),
            line: target.region.start_line,
            detail: Detail::SliceCopybook { role: role.into(), text: text.clone() },
            rationale: format!("minimal {role} structure for the API, cut from the shared copybooks"),
        });
    }
    let covers_entry = build_cfg(unit).map_err(CliError::Analysis)?.entry().is_some_and(|e| target.region.contains(e));
    if covers_entry {
        for edge in project.call_graph.edges.iter().filter(|e| e.callee == target.region.program) {
            match caller_mapping_report(&project.workspace, &edge.caller, edge.site, &sig, &target.name) {
                Ok(s) => report.push(s),
                Err(Error::BindingMismatch(m)) => eprintln!("warning: {} line {}: {m}", edge.caller, edge.line),
                Err(e) => return Err(CliError::Analysis(e)),
            }
        }
    }
    report.sort_by(|a, b| (&a.program, a.line, a.kind).cmp(&(&b.program, b.line, b.kind)));
    let docs: Vec<SuggestionDoc> = report.iter().map(SuggestionDoc::from).collect();
    Ok(render(&docs))
}

/// OpenAPI document for the selected candidates, or for all of them.
pub fn export(project: &Project, selectors: &[String], opts: &SignatureOptions) -> Result<String, CliError> {
    let targets: Vec<(Target, String)> = if selectors.is_empty() {
        project.candidates(&[])?.into_iter().map(|c| (c.evidence.clone(), c)).map(|(evidence, c)| (Target::from(c), evidence)).collect()
    } else {
        let all = project.candidates(&[])?;
        let mut out = Vec::new();
        for s in selectors {
            let t = project.resolve(s)?;
            let evidence = all.iter().find(|c| c.suggested_name == t.name).map_or_else(|| format!("{} region", t.seed_kind.as_str()), |c| c.evidence.clone());
            out.push((t, evidence));
        }
        out
    };
    let mut docs = Vec::new();
    for (t, evidence) in &targets {
        let (doc, sig) = signature_doc(project, t, opts, false)?;
        let mut sizes = BTreeMap::new();
        if let Some(sig) = &sig {
            let unit = project.workspace.unit(&sig.region.program).map_err(CliError::Analysis)?;
            for f in sig.requests.iter().chain(&sig.responses).filter(|f| f.picture.is_none()) {
                sizes.insert(f.qualified_name.clone(), unit.data.get(f.item).byte_size);
            }
        }
        docs.push((doc, evidence.clone(), sizes));
    }
    let ops: Vec<Operation<'_>> = docs.iter().map(|(doc, description, group_sizes)| Operation { doc, description: description.clone(), group_sizes: group_sizes.clone() }).collect();
    Ok(render(&openapi::document(&ops)))
}

pub fn oracle(project: &Project, selector: &str, bound: usize) -> Result<String, CliError> {
    let target = project.resolve(selector)?;
    if target.fixed_signature.is_some() {
        return Err(CliError::Selector(format!("{selector}: fixed-signature candidates have no region to enumerate")));
    }
    let unit = project.workspace.unit(&target.region.program).map_err(CliError::Analysis)?;
    let cfg = build_cfg(unit).map_err(CliError::Analysis)?;
    let paths = enumerate_paths(unit, &cfg, &target.region, bound).map_err(CliError::from_analysis)?;
    let result = oracle_signature(&paths, &UseDefSets::new(unit));
    Ok(render(&oracle_json(unit, &result, bound)))
}

/// Parses `A..B` (exclusive) or `A..=B`.
pub fn parse_seeds(text: &str) -> Result<Range<u64>, String> {
    let bad = || format!("invalid seed range {text:?}, expected A..B");
    if let Some((a, b)) = text.split_once("..=") {
        let (a, b): (u64, u64) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
        return Ok(a..b.saturating_add(1));
    }
    let (a, b) = text.split_once("..").ok_or_else(bad)?;
    Ok(a.parse().map_err(|_| bad())?..b.parse().map_err(|_| bad())?)
}

pub fn verify(seeds: Range<u64>, corrupt_kills: bool) -> Result<String, CliError> {
    let report = verify_seeds(seeds, corrupt_kills).map_err(CliError::Analysis)?;
    let mut out = format!("{} passed, {} failed\n", report.passed, report.failed);
    match report.first_failure {
        None => Ok(out),
        Some((seed, text, v)) => {
            out.push_str(&format!(
                "first counterexample: seed {seed}, property {}, region lines {}-{}\n{}\n--- program ---\n{text}",
                v.property, v.region.0, v.region.1, v.detail
            ));
            Err(CliError::Verify(out))
        }
    }
}
