use std::collections::BTreeSet;

use apify_core::frontend::{parse_source, NoCopybooks, SourceUnit};
use apify_core::graphs::{build_cfg, CodeRegion};
use apify_core::oracle::*;
use apify_core::signature::UseDefSets;
use proptest::prelude::*;

fn unit(procedure: &str) -> SourceUnit {
    let text = format!("IDENTIFICATION DIVISION.\nPROGRAM-ID. T.\nDATA DIVISION.\nWORKING-STORAGE SECTION.\n01 A PIC 9.\n01 B PIC 9.\n01 C PIC 9.\n01 X PIC 9.\nPROCEDURE DIVISION.\nMAIN.\n{procedure}\n");
    parse_source(&text, &NoCopybooks).unwrap()
}

fn run(u: &SourceUnit, bound: usize) -> (Vec<ExecutionPath>, OracleResult) {
    let cfg = build_cfg(u).unwrap();
    let paths = enumerate_paths(u, &cfg, &CodeRegion::whole(u).unwrap(), bound).unwrap();
    let result = oracle_signature(&paths, &UseDefSets::new(u));
    (paths, result)
}

fn names(u: &SourceUnit, s: &BTreeSet<apify_core::frontend::ItemId>) -> Vec<String> {
    let mut v: Vec<String> = s.iter().map(|&i| u.data.get(i).name.clone()).collect();
    v.sort();
    v
}

#[test]
fn path_counts() {
    assert_eq!(run(&unit("MOVE A TO B.\nMOVE B TO C.\nGOBACK."), 3).0.len(), 1);
    assert_eq!(run(&unit("IF X > 0 MOVE A TO B END-IF.\nGOBACK."), 3).0.len(), 2);
    let (paths, _) = run(&unit("PERFORM UNTIL X > 3\nADD 1 TO A\nEND-PERFORM.\nGOBACK."), 3);
    // zero to three iterations, plus the path cut off at the bound
    let exits: Vec<usize> = paths.iter().filter(|p| !p.truncated).map(|p| p.statements.iter().filter(|s| s.0 == 1).count()).collect();
    assert!(exits.len() <= 4);
    assert_eq!(exits.iter().copied().collect::<BTreeSet<_>>(), BTreeSet::from([0, 1, 2, 3]));
}

#[test]
fn per_path_sets() {
    let u = unit("MOVE A TO B.");
    let (_, r) = run(&u, 3);
    assert_eq!(names(&u, &r.per_path[0].req), ["A"]);
    assert_eq!(names(&u, &r.per_path[0].resp), ["B"]);

    let u = unit("MOVE A TO B.\nMOVE B TO C.");
    let (_, r) = run(&u, 3);
    assert_eq!(names(&u, &r.union_req), ["A"]);
    assert_eq!(names(&u, &r.union_resp), ["B", "C"]);

    let u = unit("IF X > 0 MOVE A TO B ELSE MOVE B TO C END-IF.");
    let (paths, r) = run(&u, 3);
    assert_eq!(paths.len(), 2);
    assert_eq!(names(&u, &r.union_req), ["A", "B", "X"]);
    assert_eq!(names(&u, &r.union_resp), ["B", "C"]);
    let reqs: BTreeSet<BTreeSet<_>> = r.per_path.iter().map(|p| p.req.clone()).collect();
    assert_eq!(r.union_req, reqs.into_iter().flatten().collect());
}

#[test]
fn constants_force_branches() {
    let (paths, _) = run(&unit("MOVE 1 TO X.\nIF X > 0 MOVE A TO B ELSE MOVE B TO C END-IF."), 3);
    assert_eq!(paths.len(), 1);
}

#[test]
fn generator_is_deterministic_and_pinned() {
    assert_eq!(random_program_text(0, 1, 2), include_str!("golden/seed0_size1.cbl"));
    let u = random_program(0, 1, 2);
    assert_eq!(u.statements.len(), 1);
    assert_eq!(u.statements[0].kind.as_str(), "move");
    assert_eq!(random_program_text(42, 20, 7), random_program_text(42, 20, 7));
}

#[test]
fn corrupted_kills_are_caught() {
    let report = verify_seeds(0..200, true).unwrap();
    assert!(report.failed > 0);
    let (_, text, violation) = report.first_failure.unwrap();
    assert!(text.contains("PROGRAM-ID. RANDOM."));
    assert!(!violation.property.is_empty());
    assert_eq!(verify_seeds(0..0, false).unwrap(), VerifyReport::default());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]
    #[test]
    fn generated_programs_satisfy_properties(seed in 0u64..1_000_000, size in 1usize..=30, vars in 2usize..=10) {
        let u = random_program(seed, size, vars);
        prop_assert!(u.statements.len() >= size);
        let r = check_program(&u, false).unwrap();
        prop_assert!(r.is_ok(), "{:?}\n{}", r, random_program_text(seed, size, vars));
    }

    #[test]
    fn consecutive_path_statements_are_adjacent(seed in 0u64..1_000_000, size in 1usize..=20) {
        let u = random_program(seed, size, 4);
        let cfg = build_cfg(&u).unwrap();
        let Ok(paths) = enumerate_paths(&u, &cfg, &CodeRegion::whole(&u).unwrap(), 2) else {
            return Ok(());
        };
        for p in &paths {
            prop_assert_eq!(p.decisions.len() + 1, p.statements.len());
            for w in p.statements.windows(2) {
                prop_assert!(cfg.successors(w[0]).contains(&w[1]));
            }
            for s in &p.statements {
                prop_assert!(p.statements.iter().filter(|x| *x == s).count() <= 3);
            }
        }
    }
}
