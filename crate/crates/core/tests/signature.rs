use std::collections::BTreeSet;

use apify_core::frontend::{parse_source, NoCopybooks, SourceUnit};
use apify_core::graphs::{build_call_graph, build_cfg, CodeRegion};
use apify_core::signature::*;
use apify_core::{Error, Workspace};
use proptest::prelude::*;

const HEADER: &str = "IDENTIFICATION DIVISION.\nPROGRAM-ID. T.\nDATA DIVISION.\nWORKING-STORAGE SECTION.\n01 A PIC 9.\n01 B PIC 9.\n01 C PIC 9.\n01 X PIC 9.\n01 Y PIC 9.\n01 WS-CODE PIC X.\nPROCEDURE DIVISION.\nMAIN.\n";

/// Procedure text starts on line 13.
fn unit(procedure: &str) -> SourceUnit {
    parse_source(&format!("{HEADER}{procedure}\n"), &NoCopybooks).unwrap()
}

fn names(unit: &SourceUnit, fields: &[FieldRole]) -> Vec<String> {
    let _ = unit;
    fields.iter().map(|f| f.name.clone()).collect()
}

fn whole(u: &SourceUnit) -> CodeRegion {
    CodeRegion::whole(u).unwrap()
}

fn fi(u: &SourceUnit) -> ApiSignature {
    flow_insensitive_signature(u, &build_cfg(u).unwrap(), &whole(u), &UseDefSets::new(u))
}

fn fs(u: &SourceUnit, ctx: Option<&BTreeSet<apify_core::frontend::ItemId>>) -> ApiSignature {
    flow_sensitive_signature(u, &build_cfg(u).unwrap(), &whole(u), &UseDefSets::new(u), ctx).unwrap()
}

fn ps(u: &SourceUnit) -> ApiSignature {
    path_sensitive_signature(u, &build_cfg(u).unwrap(), &whole(u), &UseDefSets::new(u), PathBounds::default()).unwrap()
}

fn item(u: &SourceUnit, name: &str) -> apify_core::frontend::ItemId {
    u.data.by_name(name).next().unwrap()
}

#[test]
fn flow_insensitive_examples() {
    let u = unit("MOVE A TO B.\nMOVE B TO C.");
    let s = fi(&u);
    assert_eq!(names(&u, &s.requests), ["A", "B"]);
    assert_eq!(names(&u, &s.responses), ["B", "C"]);
    assert_eq!(s.stats.passes, 1);
    let s = fi(&unit("GOBACK."));
    assert!(s.requests.is_empty() && s.responses.is_empty());
    let u = unit("ADD X TO Y.");
    let s = fi(&u);
    assert_eq!(names(&u, &s.requests), ["X", "Y"]);
    assert_eq!(names(&u, &s.responses), ["Y"]);
}

#[test]
fn flow_sensitive_examples() {
    let u = unit("MOVE A TO B.\nMOVE B TO C.");
    let s = fs(&u, None);
    assert_eq!(names(&u, &s.requests), ["A"]);
    assert_eq!(names(&u, &s.responses), ["B", "C"]);
    let ctx = BTreeSet::from([item(&u, "C")]);
    let s = fs(&u, Some(&ctx));
    assert_eq!(names(&u, &s.responses), ["C"]);
}

#[test]
fn flow_sensitive_loop_converges() {
    let u = unit("PERFORM UNTIL X > 3\nMOVE A TO B\nMOVE B TO C\nMOVE Y TO A\nEND-PERFORM.");
    let s = fs(&u, None);
    assert_eq!(names(&u, &s.requests), ["A", "X", "Y"]);
    let cap = u.data.len() * u.statements.len() + 1;
    assert!(s.stats.passes >= 1 && s.stats.passes <= cap);
}

const EVALUATE_FIXTURE: &str = "MOVE '1' TO WS-CODE.\nEVALUATE WS-CODE WHEN '1' MOVE A TO B END-EVALUATE.\nEVALUATE WS-CODE WHEN '2' DISPLAY X END-EVALUATE.\nEVALUATE WS-CODE WHEN '1' MOVE B TO C END-EVALUATE.";

#[test]
fn path_sensitive_worked_example() {
    let u = unit(EVALUATE_FIXTURE);
    let p = ps(&u);
    assert_eq!(names(&u, &p.requests), ["A"]);
    assert_eq!(names(&u, &p.responses), ["B", "C", "WS-CODE"]);
    assert_eq!(p.stats.paths, 1);
    let f = fs(&u, None);
    assert!(names(&u, &f.requests).contains(&"B".to_string()));
    assert_eq!(names(&u, &f.requests), ["A", "B", "X"]);
}

#[test]
fn path_sensitive_unknown_condition_matches_flow_sensitive() {
    let u = unit("IF X > 0\nMOVE A TO B\nELSE\nMOVE B TO C\nEND-IF.\nMOVE C TO Y.");
    let p = ps(&u);
    let f = fs(&u, None);
    assert_eq!(p.request_items(), f.request_items());
    assert_eq!(p.response_items(), f.response_items());
    assert_eq!(p.stats.paths, 2);
}

#[test]
fn path_budget_is_enforced() {
    let body: String = (0..14).map(|i| format!("IF X > {} MOVE A TO B END-IF.\n", i % 10)).collect();
    let u = unit(&body);
    let r = path_sensitive_signature(&u, &build_cfg(&u).unwrap(), &whole(&u), &UseDefSets::new(&u), PathBounds::default());
    assert!(matches!(r, Err(Error::PathBudgetExceeded(n)) if n > 4096));
}

fn optional(fields: &[FieldRole]) -> Vec<(String, bool)> {
    fields.iter().map(|f| (f.name.clone(), f.optional)).collect()
}

#[test]
fn surety_worked_cases() {
    let u = unit("MOVE A TO B.");
    let s = fs(&u, None);
    assert_eq!(optional(&s.requests), [("A".into(), false)]);
    assert_eq!(optional(&s.responses), [("B".into(), false)]);

    let u = unit("MOVE A TO B.\nMOVE B TO C.");
    let s = fi(&u);
    let b: Vec<&FieldRole> = s.requests.iter().chain(&s.responses).filter(|f| f.name == "B").collect();
    assert_eq!(b.len(), 2);
    assert!(b.iter().all(|f| f.optional && f.role == Role::Both));

    let u = unit("IF X > 0 MOVE A TO Y ELSE MOVE Y TO A END-IF.");
    let s = fi(&u);
    for f in s.requests.iter().chain(&s.responses).filter(|f| f.name == "A" || f.name == "Y") {
        assert!(f.optional, "{} should be optional", f.name);
    }
}

#[test]
fn surety_loop_may_skip_read() {
    let u = unit("PERFORM UNTIL X > 3\nDISPLAY A\nEND-PERFORM.");
    let s = fs(&u, None);
    assert_eq!(optional(&s.requests), [("A".into(), true), ("X".into(), false)]);
}

#[test]
fn http_method_precedence() {
    let sql = |stmts: &str| {
        let text = format!("IDENTIFICATION DIVISION.\nPROGRAM-ID. D.\nDATA DIVISION.\nWORKING-STORAGE SECTION.\n01 H1 PIC X(4).\n01 H2 PIC X(4).\nPROCEDURE DIVISION.\nMAIN.\n{stmts}\n");
        let u = parse_source(&text, &NoCopybooks).unwrap();
        classify_http_method(&u, &CodeRegion::whole(&u).unwrap(), None)
    };
    let select = "EXEC SQL SELECT C1 INTO :H1 FROM T WHERE C2 = :H2 END-EXEC.";
    assert_eq!(sql(select), HttpMethod::Get);
    assert_eq!(sql("EXEC SQL INSERT INTO T (C1) VALUES (:H1) END-EXEC."), HttpMethod::Post);
    assert_eq!(sql(&format!("{select}\nEXEC SQL UPDATE T SET C1 = :H1 WHERE C2 = :H2 END-EXEC.")), HttpMethod::Put);
    assert_eq!(sql("EXEC SQL UPDATE T SET C1 = :H1 END-EXEC.\nEXEC SQL DELETE FROM T WHERE C2 = :H2 END-EXEC."), HttpMethod::Delete);
}

fn program(name: &str, linkage: &str, procedure: &str) -> SourceUnit {
    let using = if linkage.is_empty() { String::new() } else { " USING LK".to_string() };
    let link = if linkage.is_empty() { String::new() } else { format!("LINKAGE SECTION.\n01 LK.\n{linkage}\n") };
    let text = format!(
        "IDENTIFICATION DIVISION.\nPROGRAM-ID. {name}.\nDATA DIVISION.\nWORKING-STORAGE SECTION.\n01 WS-AREA.\n05 WA PIC X(4).\n05 WB PIC X(4).\n01 WS-T PIC X(4).\n{link}PROCEDURE DIVISION{using}.\nMAIN.\n{procedure}\n"
    );
    parse_source(&text, &NoCopybooks).unwrap()
}

fn interproc(ws: &Workspace, program: &str, flow: Flow, call_chain: bool) -> ApiSignature {
    let unit = ws.unit(program).unwrap();
    let region = CodeRegion::whole(unit).unwrap();
    let options = AnalysisOptions { flow, call_chain, ..AnalysisOptions::default() };
    interprocedural_signature(ws, &build_call_graph(ws), &region, &options).unwrap()
}

#[test]
fn call_sites_with_and_without_chain() {
    // the callee reads LA and writes LB
    let callee = program("CALLEE", "05 LA PIC X(4).\n05 LB PIC X(4).", "MOVE LA TO LB.\nGOBACK.");
    let caller = program("CALLER", "", "MOVE WS-T TO WA.\nCALL 'CALLEE' USING WS-AREA.\nMOVE WB TO WS-T.\nGOBACK.");
    let ws = Workspace::from_units([callee, caller]).unwrap();
    let without = interproc(&ws, "CALLER", Flow::Sensitive, false);
    assert_eq!(names(ws.unit("CALLER").unwrap(), &without.requests), ["WS-T"]);
    assert_eq!(without.responses.iter().map(|f| f.name.as_str()).collect::<Vec<_>>(), ["WS-AREA", "WA", "WB", "WS-T"]);
    let with = interproc(&ws, "CALLER", Flow::Sensitive, true);
    assert_eq!(with.requests.iter().map(|f| f.name.as_str()).collect::<Vec<_>>(), ["WS-T"]);
    assert_eq!(with.responses.iter().map(|f| f.name.as_str()).collect::<Vec<_>>(), ["WA", "WB", "WS-T"]);
    assert!(!with.degraded);
    assert_eq!(with.stats.summary_iterations, 1);

    // without the write of WA before the call, the callee's read surfaces as a request
    let callee = program("CALLEE", "05 LA PIC X(4).\n05 LB PIC X(4).", "MOVE LA TO LB.\nGOBACK.");
    let caller = program("CALLER", "", "CALL 'CALLEE' USING WS-AREA.\nGOBACK.");
    let ws = Workspace::from_units([callee, caller]).unwrap();
    let with = interproc(&ws, "CALLER", Flow::Sensitive, true);
    assert_eq!(with.requests.iter().map(|f| f.name.as_str()).collect::<Vec<_>>(), ["WA"]);
    let without = interproc(&ws, "CALLER", Flow::Sensitive, false);
    assert!(without.requests.is_empty());
}

#[test]
fn mutual_recursion_reaches_fixpoint() {
    let a = program("PA", "05 FA PIC X(4).\n05 FB PIC X(4).", "DISPLAY FA.\nCALL 'PB' USING LK.\nGOBACK.");
    let b = program("PB", "05 FA PIC X(4).\n05 FB PIC X(4).", "DISPLAY FB.\nCALL 'PA' USING LK.\nGOBACK.");
    let top = program("TOP", "", "CALL 'PA' USING WS-AREA.\nGOBACK.");
    let ws = Workspace::from_units([a, b, top]).unwrap();
    let s = interproc(&ws, "TOP", Flow::Sensitive, true);
    assert_eq!(s.requests.iter().map(|f| f.name.as_str()).collect::<Vec<_>>(), ["WA", "WB"]);
    assert!(s.stats.summary_iterations >= 2 && s.stats.summary_iterations <= 3);
}

#[test]
fn unresolved_callees_degrade_or_fail_in_strict_mode() {
    let caller = program("CALLER", "", "CALL 'NOWHERE' USING WS-AREA.\nGOBACK.");
    let ws = Workspace::from_units([caller]).unwrap();
    let s = interproc(&ws, "CALLER", Flow::Insensitive, true);
    assert!(s.degraded);
    let region = CodeRegion::whole(ws.unit("CALLER").unwrap()).unwrap();
    let strict = AnalysisOptions { call_chain: true, strict: true, ..AnalysisOptions::default() };
    assert!(matches!(interprocedural_signature(&ws, &build_call_graph(&ws), &region, &strict), Err(Error::MissingCallee(n)) if n == "NOWHERE"));
}

#[test]
fn size_mismatch_binds_prefix() {
    let callee = program("CALLEE", "05 LA PIC X(4).\n05 LB PIC X(4).\n05 LC PIC X(4).", "DISPLAY LA LC.\nGOBACK.");
    let caller = program("CALLER", "", "CALL 'CALLEE' USING WS-AREA.\nGOBACK.");
    let ws = Workspace::from_units([callee, caller]).unwrap();
    let s = interproc(&ws, "CALLER", Flow::Sensitive, true);
    assert!(s.degraded);
    assert_eq!(s.requests.iter().map(|f| f.name.as_str()).collect::<Vec<_>>(), ["WA"]);
}

#[test]
fn call_free_regions_agree_across_call_chain_modes() {
    let u = program("P", "", "MOVE WA TO WB.\nIF WB = 'X' MOVE WS-T TO WA END-IF.\nGOBACK.");
    let ws = Workspace::from_units([u]).unwrap();
    for flow in [Flow::Insensitive, Flow::Sensitive, Flow::PathSensitive] {
        let mut a = interproc(&ws, "P", flow, false);
        let b = interproc(&ws, "P", flow, true);
        a.variant.call_chain = true;
        a.stats.summary_iterations = b.stats.summary_iterations;
        assert_eq!(a, b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn liveness_fixpoint_satisfies_equations(seed in 0u64..10_000, size in 1usize..=30, vars in 2usize..=10) {
        let u = apify_core::oracle::random_program(seed, size, vars);
        let cfg = build_cfg(&u).unwrap();
        let region = CodeRegion::whole(&u).unwrap();
        let scope = Scope::of_region(&u, &region);
        let sets = UseDefSets::new(&u);
        let state = liveness(&cfg, &scope, &sets).unwrap();
        for n in scope.post_order(&cfg) {
            let out: BTreeSet<_> = scope.successors(&cfg, n).flat_map(|s| state.req_in(s).iter().copied()).collect();
            prop_assert_eq!(state.req_out(n), &out);
            let mut inn: BTreeSet<_> = out.difference(sets.req_kill(n)).copied().collect();
            inn.extend(sets.req_gen(n).iter().copied());
            prop_assert_eq!(state.req_in(n), &inn);
        }
        prop_assert!(state.passes <= u.data.len() * u.statements.len() + 1);
    }

    #[test]
    fn signatures_have_no_duplicates(seed in 0u64..10_000, size in 1usize..=30) {
        let u = apify_core::oracle::random_program(seed, size, 6);
        let s = fs(&u, None);
        prop_assert_eq!(s.request_items().len(), s.requests.len());
        prop_assert_eq!(s.response_items().len(), s.responses.len());
        for f in s.requests.iter().chain(&s.responses) {
            prop_assert!(f.role != Role::Both || f.optional);
        }
    }
}
