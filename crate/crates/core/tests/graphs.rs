use std::collections::BTreeSet;

use apify_core::frontend::{parse_source, NoCopybooks, SourceUnit, StmtId};
use apify_core::graphs::*;
use apify_core::{Error, Workspace};
use proptest::prelude::*;

fn unit(data: &str, procedure: &str) -> SourceUnit {
    let text = format!("IDENTIFICATION DIVISION.\nPROGRAM-ID. T.\nDATA DIVISION.\nWORKING-STORAGE SECTION.\n01 A PIC 9.\n01 B PIC 9.\n01 C PIC 9.\n01 X PIC 9.\n{data}\nPROCEDURE DIVISION.\n{procedure}\n");
    parse_source(&text, &NoCopybooks).unwrap()
}

fn edge_set(cfg: &Cfg) -> BTreeSet<(u32, u32)> {
    cfg.nodes().flat_map(|n| cfg.successors(n).iter().map(move |s| (n.0, s.0))).collect()
}

fn ids(v: &[u32]) -> Vec<StmtId> {
    v.iter().map(|&i| StmtId(i)).collect()
}

#[test]
fn straight_line_chain() {
    let u = unit("", "MAIN.\nMOVE A TO B.\nMOVE B TO C.\nGOBACK.");
    let cfg = build_cfg(&u).unwrap();
    assert_eq!(edge_set(&cfg), BTreeSet::from([(0, 1), (1, 2)]));
    assert_eq!(cfg.exits().collect::<Vec<_>>(), ids(&[2]));
    assert_eq!(post_order(&cfg), ids(&[2, 1, 0]));
}

#[test]
fn if_diamond_joins_at_follower() {
    let u = unit("", "MAIN.\nIF X > 0 MOVE A TO B ELSE MOVE B TO C END-IF.\nGOBACK.");
    let cfg = build_cfg(&u).unwrap();
    assert_eq!(cfg.successors(StmtId(0)), &ids(&[1, 2])[..]);
    assert_eq!(edge_set(&cfg), BTreeSet::from([(0, 1), (0, 2), (1, 3), (2, 3)]));
    let po = post_order(&cfg);
    let pos = |i: u32| po.iter().position(|&s| s == StmtId(i)).unwrap();
    assert!(pos(3) < pos(1) && pos(3) < pos(2));
    assert_eq!(*po.last().unwrap(), StmtId(0));
}

#[test]
fn perform_splices_paragraph() {
    // s0 MOVE, s1 PERFORM, s2 GOBACK, s3 MOVE A TO B (in PARA-B)
    let u = unit("", "MAIN.\nMOVE 1 TO A.\nPERFORM PARA-B.\nGOBACK.\nPARA-B.\nMOVE A TO B.");
    let cfg = build_cfg(&u).unwrap();
    assert_eq!(edge_set(&cfg), BTreeSet::from([(0, 1), (1, 3), (3, 2)]));
    assert_eq!(cfg.predecessors(StmtId(2)), &ids(&[3])[..]);
}

#[test]
fn perform_until_has_bypass_and_loop_back() {
    let u = unit("", "MAIN.\nPERFORM P UNTIL X > 3.\nGOBACK.\nP.\nADD 1 TO X.");
    let cfg = build_cfg(&u).unwrap();
    assert_eq!(edge_set(&cfg), BTreeSet::from([(0, 2), (0, 1), (2, 0)]));
    let po = post_order(&cfg);
    let mut sorted = po.clone();
    sorted.sort();
    assert_eq!(sorted, ids(&[0, 1, 2]));
}

#[test]
fn inline_loop_and_goto() {
    let u = unit("", "MAIN.\nPERFORM UNTIL X > 3 ADD 1 TO X END-PERFORM.\nGO TO FIN.\nMID.\nDISPLAY A.\nFIN.\nSTOP RUN.");
    let cfg = build_cfg(&u).unwrap();
    assert_eq!(edge_set(&cfg), BTreeSet::from([(0, 1), (1, 0), (0, 2), (2, 4), (3, 4)]));
    assert!(!cfg.is_reachable(StmtId(3)));
    assert_eq!(cfg.unreachable().collect::<Vec<_>>(), ids(&[3]));
}

#[test]
fn evaluate_without_other_has_no_match_edge() {
    let u = unit("", "MAIN.\nEVALUATE X WHEN 1 MOVE A TO B WHEN 2 MOVE B TO C END-EVALUATE.\nGOBACK.");
    let cfg = build_cfg(&u).unwrap();
    let labels: Vec<Branch> = cfg.edges_from(StmtId(0)).iter().map(|&(_, b)| b).collect();
    assert_eq!(labels, vec![Branch::Arm(0), Branch::Arm(1), Branch::NoMatch]);
}

#[test]
fn unknown_paragraph_is_reported() {
    let u = unit("", "MAIN.\nPERFORM NOWHERE.\nGOBACK.");
    assert!(matches!(build_cfg(&u), Err(Error::UnknownParagraph { ref name, line: 12 }) if name == "NOWHERE"));
}

#[test]
fn cfg_structural_invariants() {
    let u = unit("", "MAIN.\nIF X > 0 PERFORM P ELSE GO TO Q END-IF.\nDISPLAY A.\nGOBACK.\nP.\nMOVE A TO B.\nQ.\nEVALUATE TRUE WHEN A = 1 CONTINUE WHEN OTHER MOVE 1 TO C END-EVALUATE.\nSTOP RUN.");
    let cfg = build_cfg(&u).unwrap();
    assert_eq!(cfg.len(), u.statements.len());
    for n in cfg.nodes() {
        for &s in cfg.successors(n) {
            assert!(cfg.predecessors(s).contains(&n));
        }
        for &p in cfg.predecessors(n) {
            assert!(cfg.successors(p).contains(&n));
        }
    }
}

#[test]
fn straight_line_edge_count() {
    let u = unit("", "MAIN.\nMOVE A TO B.\nDISPLAY B.\nP2.\nADD 1 TO C.\nMOVE C TO X.");
    let cfg = build_cfg(&u).unwrap();
    assert_eq!(cfg.edge_count(), u.statements.len() - 1);
}

#[test]
fn region_selects_statements_by_line() {
    let u = unit("", "MAIN.\nMOVE A TO B.\nIF X > 0\nMOVE B TO C\nEND-IF.\nGOBACK.");
    let r = CodeRegion::new(&u, 13, 14).unwrap();
    assert_eq!(r.statements, ids(&[1, 2]));
    assert!(CodeRegion::new(&u, 15, 14).is_err());
    assert!(CodeRegion::new(&u, 100, 200).is_err());
}

fn prog(name: &str, calls: &[&str]) -> SourceUnit {
    let mut body = String::new();
    for c in calls {
        body.push_str(&format!("CALL '{c}'.\n"));
    }
    body.push_str("GOBACK.");
    parse_source(&format!("IDENTIFICATION DIVISION. PROGRAM-ID. {name}. PROCEDURE DIVISION. MAIN.\n{body}"), &NoCopybooks).unwrap()
}

#[test]
fn call_graph_chain_and_cycle() {
    let w = Workspace::from_units([prog("A", &["B"]), prog("B", &["C"]), prog("C", &[])]).unwrap();
    let g = build_call_graph(&w);
    assert_eq!(g.edges.len(), 2);
    assert!(g.cycles.is_empty());
    let w = Workspace::from_units([prog("A", &["B"]), prog("B", &["A", "EXTERNAL"])]).unwrap();
    let g = build_call_graph(&w);
    assert_eq!(g.cycles, vec![BTreeSet::from(["A".to_string(), "B".to_string()])]);
    assert_eq!(g.unresolved.len(), 1);
    assert_eq!(g.unresolved[0].target, "EXTERNAL");
}

fn reaches(adj: &[Vec<usize>], a: usize, b: usize) -> bool {
    let mut seen = vec![false; adj.len()];
    let mut stack = adj[a].clone();
    while let Some(x) = stack.pop() {
        if x == b {
            return true;
        }
        if !seen[x] {
            seen[x] = true;
            stack.extend(adj[x].iter().copied());
        }
    }
    false
}

proptest! {
    #[test]
    fn scc_matches_transitive_closure(n in 1usize..=10, raw in proptest::collection::vec((0usize..10, 0usize..10), 0..25)) {
        let edges: Vec<(usize, usize)> = raw.into_iter().map(|(a, b)| (a % n, b % n)).collect();
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &edges {
            adj[a].push(b);
        }
        let units: Vec<SourceUnit> = (0..n).map(|i| {
            let calls: Vec<String> = adj[i].iter().map(|j| format!("P{j}")).collect();
            let refs: Vec<&str> = calls.iter().map(String::as_str).collect();
            prog(&format!("P{i}"), &refs)
        }).collect();
        let g = build_call_graph(&Workspace::from_units(units).unwrap());
        let expected: BTreeSet<BTreeSet<String>> = (0..n)
            .filter(|&i| reaches(&adj, i, i))
            .map(|i| (0..n).filter(|&j| j == i || (reaches(&adj, i, j) && reaches(&adj, j, i))).map(|j| format!("P{j}")).collect())
            .collect();
        let got: BTreeSet<BTreeSet<String>> = g.cycles.into_iter().collect();
        prop_assert_eq!(got, expected);
        // every program appears in exactly one component, callees first
        let mut seen = BTreeSet::new();
        for c in &g.sccs {
            for p in c {
                prop_assert!(seen.insert(p.clone()));
            }
        }
        prop_assert_eq!(seen.len(), n);
    }
}
