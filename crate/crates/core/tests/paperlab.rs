use fairmanna::paperlab::{
    fixture, run_chain_suite, run_theorem_suite, verify_paper_claims, Theorem, FIXTURE_IDS,
};
use fairmanna::paperlab::suites::DEFAULT_INSTANCES;
use fairmanna::{Limits, PropertyVariant};

#[test]
fn theorem_suites_have_no_failures() {
    for t in Theorem::ALL {
        let r = run_theorem_suite(t, DEFAULT_INSTANCES);
        assert!(r.passed(), "{}: {:?}", r.name, r.first_failure);
        assert_eq!(r.checks, DEFAULT_INSTANCES);
    }
}

#[test]
fn chain_suite_breaks_only_the_weak_link() {
    let r = run_chain_suite(500);
    assert!(r.pairs >= 10_000);
    for l in &r.links {
        let weak = (l.from, l.to) == (PropertyVariant::Jf1Zero, PropertyVariant::Jf1);
        assert_eq!(l.broken > 0, weak, "{:?}", l);
    }
}

#[test]
fn claims_report_in_order() {
    let reports = verify_paper_claims(&Limits::default());
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed).map(|r| r.claim_id).collect();
    assert_eq!(failed, ["thm4_reverse"]);
}

#[test]
fn fixtures_load() {
    for id in FIXTURE_IDS {
        assert_eq!(fixture(id).unwrap().id, id);
    }
    assert!(fixture("example9").is_err());
}
