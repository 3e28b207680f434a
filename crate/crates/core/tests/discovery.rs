use std::collections::{BTreeMap, BTreeSet};

use apify_core::discovery::*;
use apify_core::frontend::{parse_screen_map, parse_source_with_maps, NoCopybooks, ScreenMap, SourceUnit};
use apify_core::graphs::{build_call_graph, CodeRegion};
use apify_core::oracle::random_program;
use apify_core::signature::HttpMethod;
use apify_core::{Error, Workspace};
use proptest::prelude::*;

const DATA: &str = "DATA DIVISION.\nWORKING-STORAGE SECTION.\n01 A PIC 9(4).\n01 B PIC 9(4).\n01 K PIC X.\n01 MAP-IN.\n   05 FLDI PIC X(4).\nEXEC SQL INCLUDE SQLCA END-EXEC.\n";

/// Program whose procedure text starts on line 12.
fn program(name: &str, procedure: &str, maps: &[ScreenMap]) -> SourceUnit {
    let text = format!("IDENTIFICATION DIVISION.\nPROGRAM-ID. {name}.\n{DATA}PROCEDURE DIVISION.\n{procedure}\n");
    parse_source_with_maps(&text, &NoCopybooks, maps).unwrap()
}

fn run(units: Vec<SourceUnit>, inputs: &DiscoveryInputs) -> Result<Vec<ApiCandidate>, Error> {
    let ws = Workspace::from_units(units).unwrap();
    discover_candidates(&ws, &build_call_graph(&ws), inputs)
}

fn spans(cands: &[ApiCandidate], kind: SeedKind) -> Vec<(String, u32, u32)> {
    cands.iter().filter(|c| c.seed_kind == kind).map(|c| (c.region.program.clone(), c.region.start_line, c.region.end_line)).collect()
}

#[test]
fn empty_workspace_has_no_candidates() {
    assert!(run(Vec::new(), &DiscoveryInputs::default()).unwrap().is_empty());
}

#[test]
fn transaction_dispatch_arms() {
    let u = program(
        "MENU",
        "MAIN.\nEVALUATE K\nWHEN '1' MOVE A TO B\nWHEN '2' MOVE B TO A\n  DISPLAY A\nWHEN '3' CONTINUE\nEND-EVALUATE\nGOBACK.",
        &[],
    );
    let inputs = DiscoveryInputs { transactions: BTreeMap::from([("MN01".into(), "MENU".into())]), ..Default::default() };
    let c = run(vec![u], &inputs).unwrap();
    assert_eq!(spans(&c, SeedKind::Transaction), [("MENU".into(), 13, 18)]);
    // CONTINUE is a statement, so the third arm is a block too
    assert_eq!(spans(&c, SeedKind::ControlFlowBlock), [("MENU".into(), 14, 14), ("MENU".into(), 15, 16), ("MENU".into(), 17, 17)]);
    let names: Vec<&str> = c.iter().filter(|c| c.seed_kind == SeedKind::ControlFlowBlock).map(|c| c.suggested_name.as_str()).collect();
    assert_eq!(names, ["get-menu-when-1", "get-menu-when-2", "get-menu-when-3"]);
}

#[test]
fn transaction_without_dispatch_spans_program() {
    let u = program("TXN", "MAIN.\nMOVE A TO B.\nGOBACK.", &[]);
    let inputs = DiscoveryInputs { transactions: BTreeMap::from([("T1".into(), "TXN".into())]), ..Default::default() };
    let c = run(vec![u], &inputs).unwrap();
    assert_eq!(spans(&c, SeedKind::Transaction), [("TXN".into(), 13, 14)]);
}

#[test]
fn unknown_transaction_program_is_an_error() {
    let inputs = DiscoveryInputs { transactions: BTreeMap::from([("T1".into(), "NOPE".into())]), ..Default::default() };
    let err = run(vec![program("P", "MAIN.\nGOBACK.", &[])], &inputs).unwrap_err();
    assert!(matches!(err, Error::UnknownTransactionProgram { ref txn, ref program } if txn == "T1" && program == "NOPE"));
}

#[test]
fn data_access_run_with_loads_and_checks() {
    let u = program(
        "DB",
        "MAIN.\nDISPLAY 'START'.\nMOVE 1 TO A.\nEXEC SQL SELECT COL INTO :B FROM TAB WHERE KEY = :A END-EXEC.\nIF SQLCODE NOT = 0\n  DISPLAY 'ERR'\nEND-IF.\nIF K = 'Y' DISPLAY A END-IF.\nGOBACK.",
        &[],
    );
    let c = run(vec![u], &DiscoveryInputs::default()).unwrap();
    assert_eq!(spans(&c, SeedKind::DataAccess), [("DB".into(), 14, 18)]);
    let da = c.iter().find(|c| c.seed_kind == SeedKind::DataAccess).unwrap();
    assert_eq!(da.http_method, HttpMethod::Get);
    assert!(da.evidence.contains("TAB"), "{}", da.evidence);
}

#[test]
fn data_access_run_stops_at_paragraph_end() {
    let u = program("DB", "P1.\nMOVE 1 TO A.\nP2.\nEXEC SQL DELETE FROM TAB WHERE KEY = :A END-EXEC.\nGOBACK.", &[]);
    let c = run(vec![u], &DiscoveryInputs::default()).unwrap();
    assert_eq!(spans(&c, SeedKind::DataAccess), [("DB".into(), 15, 15)]);
    assert_eq!(c.iter().find(|c| c.seed_kind == SeedKind::DataAccess).unwrap().http_method, HttpMethod::Delete);
}

#[test]
fn standalone_paragraphs_are_procedures() {
    let u = program("PR", "MAIN.\nPERFORM WORK.\nGOBACK.\nWORK.\nMOVE A TO B.\nHELPER.\nMOVE B TO A.", &[]);
    let c = run(vec![u], &DiscoveryInputs::default()).unwrap();
    assert_eq!(spans(&c, SeedKind::Procedure), [("PR".into(), 16, 16), ("PR".into(), 18, 18)]);
}

#[test]
fn screen_candidate_is_receiving_paragraph() {
    let maps = vec![ScreenMap { name: "MAP".into(), fields: parse_screen_map("FLD ROW 1 COL 1 LEN 4 IN").unwrap() }];
    let u = program("SCR", "MAIN.\nPERFORM GET-INPUT.\nGOBACK.\nGET-INPUT.\nEXEC CICS RECEIVE MAP('MAP') INTO(MAP-IN) END-EXEC.\nMOVE FLDI TO A.", &maps);
    let inputs = DiscoveryInputs { screen_maps: maps, ..Default::default() };
    let c = run(vec![u], &inputs).unwrap();
    assert_eq!(spans(&c, SeedKind::Screen), [("SCR".into(), 16, 17)]);
}

#[test]
fn cross_partition_calls_only() {
    let a = program("FRONT", "MAIN.\nCALL 'BACK'.\nCALL 'SAME'.\nGOBACK.", &[]);
    let b = program("BACK", "MAIN.\nMOVE A TO B.\nGOBACK.", &[]);
    let s = program("SAME", "MAIN.\nMOVE B TO A.\nGOBACK.", &[]);
    let partitions = BTreeMap::from([("FRONT".into(), "ui".into()), ("BACK".into(), "data".into()), ("SAME".into(), "ui".into())]);
    let with = DiscoveryInputs { partitions, ..Default::default() };
    let c = run(vec![a.clone(), b.clone(), s.clone()], &with).unwrap();
    assert_eq!(spans(&c, SeedKind::InterProgramCall), [("BACK".into(), 13, 14)]);
    let c = run(vec![a, b, s], &DiscoveryInputs::default()).unwrap();
    assert!(spans(&c, SeedKind::InterProgramCall).is_empty());
}

#[test]
fn user_regions_pass_through_once() {
    let u = program("U", "MAIN.\nMOVE A TO B.\nMOVE B TO A.\nGOBACK.", &[]);
    let r = CodeRegion::new(&u, 13, 14).unwrap();
    let inputs = DiscoveryInputs { user_regions: vec![r.clone(), r], ..Default::default() };
    let c = run(vec![u], &inputs).unwrap();
    assert_eq!(spans(&c, SeedKind::UserRegion), [("U".into(), 13, 14)]);
}

#[test]
fn dynamic_query_layer() {
    let db = program("DB", "MAIN.\nEXEC SQL DELETE FROM TAB END-EXEC.\nGOBACK.", &[]);
    let plain = program("PLAIN", "MAIN.\nMOVE A TO B.\nGOBACK.", &[]);
    let ws = Workspace::from_units([db, plain]).unwrap();
    let c = dynamic_query_candidate(&ws, "DB").unwrap();
    assert_eq!(c.suggested_name, "db-dynamic-query");
    assert_eq!(c.http_method, HttpMethod::Post);
    let fixed = c.fixed_signature.unwrap();
    assert_eq!(fixed.requests, [("QUERY-TEXT".to_string(), "X(1024)".to_string())]);
    let resp: Vec<&str> = fixed.responses.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(resp, ["RESULT-ROWS", "SQLCODE"]);
    assert!(matches!(dynamic_query_candidate(&ws, "PLAIN"), Err(Error::NoDataAccess(p)) if p == "PLAIN"));
}

proptest! {
    #[test]
    fn candidates_are_unique_and_in_program(seed in 0u64..500) {
        let u = random_program(seed, 20, 5);
        let prog = u.program_id.clone();
        let whole = CodeRegion::whole(&u).unwrap();
        let inputs = DiscoveryInputs {
            transactions: BTreeMap::from([("TX".into(), prog.clone())]),
            user_regions: vec![whole.clone(), whole],
            ..Default::default()
        };
        let (first, last) = (u.first_line().unwrap(), u.last_line().unwrap());
        let c = run(vec![u], &inputs).unwrap();
        let mut keys = BTreeSet::new();
        let mut names = BTreeSet::new();
        for cand in &c {
            prop_assert_eq!(&cand.region.program, &prog);
            prop_assert!(first <= cand.region.start_line && cand.region.end_line <= last);
            prop_assert!(keys.insert((cand.seed_kind, cand.region.start_line, cand.region.end_line)));
            prop_assert!(names.insert(cand.suggested_name.clone()));
        }
        let order: Vec<u32> = c.iter().map(|c| c.region.start_line).collect();
        let mut sorted = order.clone();
        sorted.sort();
        prop_assert_eq!(order, sorted);
    }
}
