//! Acceptance criteria, one pass/fail line each.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use apify::analysis::SignatureOptions;
use apify::commands;
use apify::project::Project;
use apify_core::frontend::{parse_copybook, parse_source, DataDictionary, ItemId, NoCopybooks, SourceUnit, StmtKind};
use apify_core::graphs::{build_cfg, CodeRegion};
use apify_core::oracle::{enumerate_paths, oracle_signature, random_program, seed_shape, verify_seeds};
use apify_core::signature::{flow_insensitive_signature, flow_sensitive_signature, Flow, Scope, UseDefSets};
use apify_core::Error;
use serde_json::Value;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn FnOnce() -> Outcome + 'a>);

const SEEDS: std::ops::Range<u64> = 0..1000;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn load(name: &str) -> Project {
    Project::load(&fixture(name).join("apify.json")).unwrap()
}

fn opts(project: &Project, flow: Flow, call_chain: bool) -> SignatureOptions {
    SignatureOptions { flow, call_chain, ..SignatureOptions::from(&project.config.defaults) }
}

fn signature(project: &Project, selector: &str, o: &SignatureOptions) -> Value {
    serde_json::from_str(&commands::signature(project, selector, o, true, None).unwrap()).unwrap()
}

fn field_names(doc: &Value, role: &str) -> Vec<String> {
    doc[role].as_array().unwrap().iter().map(|f| f["field"].as_str().unwrap().to_string()).collect()
}

fn optional_flags(doc: &Value, role: &str) -> BTreeMap<String, bool> {
    doc[role].as_array().unwrap().iter().map(|f| (f["field"].as_str().unwrap().to_string(), f["optional"].as_bool().unwrap())).collect()
}

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

/// Regions checked on each generated program: the whole program and its
/// second half.
fn generated_regions(unit: &SourceUnit) -> Vec<CodeRegion> {
    let Ok(whole) = CodeRegion::whole(unit) else { return Vec::new() };
    let lines: BTreeSet<u32> = unit.statements.iter().map(|s| s.line).collect();
    let lines: Vec<u32> = lines.into_iter().collect();
    let mut out = vec![whole.clone()];
    if lines.len() > 2 {
        out.push(CodeRegion::new(unit, lines[lines.len() / 2], whole.end_line).unwrap());
    }
    out
}

struct Generated {
    unit: SourceUnit,
    region: CodeRegion,
    oracle_req: BTreeSet<ItemId>,
    oracle_resp: BTreeSet<ItemId>,
}

/// Every generated program and region with its oracle sets; regions whose
/// paths exceed the budget even at unroll bound 1 are left out.
fn generated_corpus() -> (Vec<Generated>, usize) {
    let mut out = Vec::new();
    let mut skipped = 0;
    for seed in SEEDS {
        let (size, vars) = seed_shape(seed);
        let unit = random_program(seed, size, vars);
        let cfg = build_cfg(&unit).unwrap();
        let sets = UseDefSets::new(&unit);
        for region in generated_regions(&unit) {
            let paths = [3, 1].into_iter().find_map(|b| match enumerate_paths(&unit, &cfg, &region, b) {
                Ok(p) => Some(p),
                Err(Error::PathBudgetExceeded(_)) => None,
                Err(e) => panic!("seed {seed}: {e}"),
            });
            let Some(paths) = paths else {
                skipped += 1;
                continue;
            };
            let oracle = oracle_signature(&paths, &sets);
            out.push(Generated { unit: unit.clone(), region, oracle_req: oracle.union_req, oracle_resp: oracle.union_resp });
        }
    }
    (out, skipped)
}

fn soundness(corpus: &[Generated], elapsed: Duration) -> Outcome {
    let start = Instant::now();
    let report = verify_seeds(SEEDS, false).map_err(|e| e.to_string())?;
    check(report.failed == 0, || format!("verify: {} failed, first {:?}", report.failed, report.first_failure.as_ref().map(|f| f.0)))?;
    for g in corpus {
        let cfg = build_cfg(&g.unit).unwrap();
        let sets = UseDefSets::new(&g.unit);
        let fi = flow_insensitive_signature(&g.unit, &cfg, &g.region, &sets);
        let fs = flow_sensitive_signature(&g.unit, &cfg, &g.region, &sets, None).unwrap();
        for (name, sig) in [("fi", &fi), ("fs", &fs)] {
            check(sig.request_items().is_superset(&g.oracle_req) && sig.response_items().is_superset(&g.oracle_resp), || {
                format!("{name} misses oracle fields in {} lines {}-{}", g.unit.program_id, g.region.start_line, g.region.end_line)
            })?;
        }
    }
    let total = elapsed + start.elapsed();
    check(total < Duration::from_secs(120), || format!("took {total:?}"))?;
    Ok(format!("{} programs, {} regions, 0 violations, {:.1}s", SEEDS.end - SEEDS.start, corpus.len(), total.as_secs_f64()))
}

fn precision(corpus: &[Generated]) -> Outcome {
    for g in corpus {
        let cfg = build_cfg(&g.unit).unwrap();
        let sets = UseDefSets::new(&g.unit);
        let fi = flow_insensitive_signature(&g.unit, &cfg, &g.region, &sets);
        let fs = flow_sensitive_signature(&g.unit, &cfg, &g.region, &sets, None).unwrap();
        check(fs.request_items().is_subset(&fi.request_items()) && fs.response_items() == fi.response_items(), || {
            format!("{} lines {}-{}", g.unit.program_id, g.region.start_line, g.region.end_line)
        })?;
    }
    Ok(format!("{} regions, 0 violations", corpus.len()))
}

fn worked_examples() -> Outcome {
    let demo = load("demo");
    let fi = signature(&demo, "DEMO1:10-11", &opts(&demo, Flow::Insensitive, false));
    check(field_names(&fi, "requests") == ["A", "B"] && field_names(&fi, "responses") == ["B", "C"], || format!("fi {fi}"))?;
    let fs = signature(&demo, "DEMO1:10-11", &opts(&demo, Flow::Sensitive, false));
    check(field_names(&fs, "requests") == ["A"] && field_names(&fs, "responses") == ["B", "C"], || format!("fs {fs}"))?;

    let text = std::fs::read_to_string(fixture("demo").join("src/DEMO1.cbl")).unwrap();
    let unit = parse_source(&text, &NoCopybooks).unwrap();
    let cfg = build_cfg(&unit).unwrap();
    let region = CodeRegion::new(&unit, 10, 11).unwrap();
    let c = unit.data.by_name("C").collect::<BTreeSet<_>>();
    let post = flow_sensitive_signature(&unit, &cfg, &region, &UseDefSets::new(&unit), Some(&c)).unwrap();
    let names = |ids: BTreeSet<ItemId>| ids.into_iter().map(|i| unit.data.get(i).name.clone()).collect::<Vec<_>>();
    check(names(post.request_items()) == ["A"] && names(post.response_items()) == ["C"], || "post-context {C}".into())?;

    let ps = signature(&demo, "DEMO2:12-21", &opts(&demo, Flow::PathSensitive, false));
    check(field_names(&ps, "requests") == ["A"], || format!("ps {ps}"))?;
    let fs = signature(&demo, "DEMO2:12-21", &opts(&demo, Flow::Sensitive, false));
    check(field_names(&fs, "requests").contains(&"B".to_string()), || format!("fs {fs}"))?;
    Ok("MOVE chain fi/fs/post-context and EVALUATE ps/fs".into())
}

fn surety() -> Outcome {
    let demo = load("demo");
    let o = opts(&demo, Flow::Sensitive, false);
    let single = signature(&demo, "DEMO1:10-10", &o);
    check(optional_flags(&single, "requests") == BTreeMap::from([("A".into(), false)]), || format!("{single}"))?;
    check(optional_flags(&single, "responses") == BTreeMap::from([("B".into(), false)]), || format!("{single}"))?;
    let chain = signature(&demo, "DEMO1:10-11", &o);
    check(optional_flags(&chain, "responses").get("B") == Some(&true), || format!("{chain}"))?;
    let fi_chain = signature(&demo, "DEMO1:10-11", &opts(&demo, Flow::Insensitive, false));
    check(optional_flags(&fi_chain, "requests").get("B") == Some(&true), || format!("{fi_chain}"))?;
    let branch = signature(&demo, "DEMO1:12-16", &o);
    for name in ["A", "Y"] {
        let flags: Vec<bool> = ["requests", "responses"].iter().filter_map(|r| optional_flags(&branch, r).get(name).copied()).collect();
        check(flags.len() == 2 && flags.iter().all(|&f| f), || format!("{name} in {branch}"))?;
    }
    Ok("single move, move chain, if/else".into())
}

fn manifest() -> Value {
    serde_json::from_str(&std::fs::read_to_string(fixture("minicorpus").join("manifest.json")).unwrap()).unwrap()
}

fn inquiry_and_call_free() -> Outcome {
    let corpus = load("minicorpus");
    let m = manifest();
    let inquiry = m["inquiry_api"].as_str().unwrap();
    let sig = signature(&corpus, inquiry, &opts(&corpus, Flow::Insensitive, false));
    let sections: Vec<&str> = sig["requests"].as_array().unwrap().iter().map(|f| f["section"].as_str().unwrap()).collect();
    check(sections == ["linkage", "linkage"], || format!("inquiry requests {sections:?}"))?;

    let names: Vec<&str> = m["call_free_data_access"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    for name in &names {
        let target = corpus.resolve(name).unwrap();
        let unit = corpus.workspace.unit(&target.region.program).unwrap();
        let calls = Scope::of_region(unit, &target.region).nodes().iter().any(|&n| matches!(unit.stmt(n).kind, StmtKind::Call | StmtKind::CicsLink));
        check(!calls, || format!("{name} contains a call"))?;
        for flow in [Flow::Insensitive, Flow::Sensitive, Flow::PathSensitive] {
            let without = signature(&corpus, name, &opts(&corpus, flow, false));
            let with = signature(&corpus, name, &opts(&corpus, flow, true));
            check(without["requests"] == with["requests"] && without["responses"] == with["responses"], || format!("{name} {}", flow.as_str()))?;
        }
    }
    Ok(format!("inquiry 0+2 requests, {} call-free data-access APIs unchanged by call chain", names.len()))
}

fn discovery() -> Outcome {
    let corpus = load("minicorpus");
    let found: Value = serde_json::from_str(&commands::identify(&corpus, &[]).unwrap()).unwrap();
    let key = |v: &Value| (v["seed_kind"].as_str().unwrap().to_string(), v["program"].as_str().unwrap().to_string(), v["start_line"].as_u64().unwrap(), v["end_line"].as_u64().unwrap());
    let found: BTreeSet<_> = found.as_array().unwrap().iter().map(key).collect();
    let planted: BTreeSet<_> = manifest()["planted"].as_array().unwrap().iter().map(key).collect();
    let count = |kind: &str| planted.iter().filter(|k| k.0 == kind).count();
    check(count("transaction") >= 4 && count("data_access") >= 3 && count("procedure") >= 2 && count("screen") >= 1, || "manifest plants too few seeds".into())?;
    let missed: Vec<_> = planted.difference(&found).collect();
    let extra: Vec<_> = found.difference(&planted).collect();
    check(missed.is_empty() && extra.is_empty(), || format!("missed {missed:?}, extra {extra:?}"))?;
    Ok(format!("{} planted, recall 100%, precision 100%", planted.len()))
}

/// Every JSON output of the pipeline over the mini-corpus, concatenated.
fn pipeline_outputs(out_dir: &Path) -> String {
    let corpus = load("minicorpus");
    let o = SignatureOptions::from(&corpus.config.defaults);
    let mut all = commands::identify(&corpus, &[]).unwrap();
    for c in corpus.candidates(&[]).unwrap() {
        all.push_str(&commands::signature(&corpus, &c.suggested_name, &o, true, None).unwrap());
        all.push_str(&commands::refactor(&corpus, &c.suggested_name, &o, Some(out_dir)).unwrap());
    }
    all.push_str(&commands::export(&corpus, &[], &o).unwrap());
    all
}

fn determinism() -> Outcome {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let first = pipeline_outputs(a.path());
    let second = pipeline_outputs(b.path());
    check(first == second, || "outputs differ".into())?;
    let files = |d: &Path| {
        let mut v: Vec<(String, Vec<u8>)> = std::fs::read_dir(d).unwrap().map(|e| e.unwrap()).map(|e| (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())).collect();
        v.sort();
        v
    };
    check(files(a.path()) == files(b.path()), || "slice files differ".into())?;
    Ok(format!("{} bytes identical across runs", first.len()))
}

fn fixpoints() -> Outcome {
    let mut checked = 0;
    for name in ["demo", "minicorpus", "cyclic"] {
        let project = load(name);
        let mut selectors: Vec<String> = project.candidates(&[]).unwrap().into_iter().filter(|c| c.fixed_signature.is_none()).map(|c| c.suggested_name).collect();
        for unit in project.workspace.units() {
            let whole = CodeRegion::whole(unit).unwrap();
            selectors.push(format!("{}:{}-{}", unit.program_id, whole.start_line, whole.end_line));
        }
        for sel in &selectors {
            let target = project.resolve(sel).unwrap();
            let unit = project.workspace.unit(&target.region.program).unwrap();
            let bound = unit.data.len() * unit.statements.len() + 1;
            for call_chain in [false, true] {
                let fi = signature(&project, sel, &opts(&project, Flow::Insensitive, call_chain));
                check(fi["stats"]["passes"] == 1, || format!("{name} {sel}: fi passes {}", fi["stats"]["passes"]))?;
                let fs = signature(&project, sel, &opts(&project, Flow::Sensitive, call_chain));
                let passes = fs["stats"]["passes"].as_u64().unwrap() as usize;
                check((1..=bound).contains(&passes), || format!("{name} {sel}: fs passes {passes} over bound {bound}"))?;
                checked += 1;
            }
        }
    }
    let cyclic = load("cyclic");
    let mut iterations = Vec::new();
    for unit in cyclic.workspace.units() {
        let whole = CodeRegion::whole(unit).unwrap();
        let sel = format!("{}:{}-{}", unit.program_id, whole.start_line, whole.end_line);
        let sig = signature(&cyclic, &sel, &opts(&cyclic, Flow::Sensitive, true));
        let n = sig["stats"]["summary_iterations"].as_u64().unwrap();
        check((1..=3).contains(&n), || format!("{sel}: {n} summary iterations"))?;
        let req: BTreeSet<String> = field_names(&sig, "requests").into_iter().collect();
        check(req.contains("LK-PING") && req.contains("LK-PONG"), || format!("{sel}: requests {req:?}"))?;
        iterations.push(n);
    }
    Ok(format!("{checked} fi/fs runs within bounds, cyclic summaries converge in {iterations:?} iterations"))
}

/// Qualified names, within `copybook`, of the signature fields it holds,
/// their ancestors and the subtrees of group fields.
fn expected_slice(copybook: &DataDictionary, fields: &[&str]) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for q in fields {
        let hit = copybook.ids().filter(|&i| {
            let name = copybook.qualified_name(i);
            *q == name || q.ends_with(&format!(".{name}"))
        });
        let Some(id) = hit.max_by_key(|&i| copybook.qualified_name(i).len()) else { continue };
        out.extend(copybook.closure(id).into_iter().chain(copybook.ancestors(id)).map(|i| copybook.qualified_name(i)));
    }
    out
}

fn slices() -> Outcome {
    let corpus = load("minicorpus");
    let o = SignatureOptions { post_context: true, ..SignatureOptions::from(&corpus.config.defaults) };
    let mut checked = 0;
    for c in corpus.candidates(&[]).unwrap() {
        let dir = tempfile::tempdir().unwrap();
        commands::refactor(&corpus, &c.suggested_name, &o, Some(dir.path())).map_err(|e| e.to_string())?;
        let sig = signature(&corpus, &c.suggested_name, &o);
        let unit = corpus.workspace.unit(&c.region.program).unwrap();
        for (role, suffix) in [("requests", "REQ"), ("responses", "RESP")] {
            let fields: Vec<&str> = sig[role].as_array().unwrap().iter().map(|f| f["qualified"].as_str().unwrap()).collect();
            let mut expected = BTreeSet::new();
            let used: BTreeSet<&String> = unit.copybooks_used.iter().collect();
            for book in used {
                let Some(text) = corpus.copybooks.get(&book.to_ascii_uppercase()) else { continue };
                expected.extend(expected_slice(&parse_copybook(text, &corpus.copybooks).unwrap(), &fields));
            }
            let path = dir.path().join(format!("{}-{suffix}.cpy", c.suggested_name));
            let actual: BTreeSet<String> = match std::fs::read_to_string(&path) {
                Ok(text) => {
                    let back = parse_copybook(&text, &NoCopybooks).map_err(|e| format!("{}: {e}", path.display()))?;
                    back.ids().map(|i| back.qualified_name(i)).collect()
                }
                Err(_) => BTreeSet::new(),
            };
            check(actual == expected, || format!("{} {role}: slice {actual:?}, expected {expected:?}", c.suggested_name))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} request/response slices re-parse to fields plus ancestors"))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let (corpus, skipped) = generated_corpus();
    let generated = start.elapsed();
    let criteria: Vec<Criterion<'_>> = vec![
        ("1 soundness", Box::new(|| soundness(&corpus, generated))),
        ("2 precision", Box::new(|| precision(&corpus))),
        ("3 worked examples", Box::new(worked_examples)),
        ("4 surety", Box::new(surety)),
        ("5 inquiry shape and call-free APIs", Box::new(inquiry_and_call_free)),
        ("6 discovery against manifest", Box::new(discovery)),
        ("7 determinism", Box::new(determinism)),
        ("8 fixpoint behavior", Box::new(fixpoints)),
        ("9 copybook slices", Box::new(slices)),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match std::panic::catch_unwind(std::panic::AssertUnwindSafe(run)) {
            Ok(Ok(detail)) => println!("PASS criterion {name}: {detail}"),
            Ok(Err(why)) => {
                failed += 1;
                println!("FAIL criterion {name}: {why}");
            }
            Err(_) => {
                failed += 1;
                println!("FAIL criterion {name}: panicked");
            }
        }
    }
    if skipped > 0 {
        println!("note: {skipped} generated regions exceeded the path budget and were left to verify_seeds");
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
