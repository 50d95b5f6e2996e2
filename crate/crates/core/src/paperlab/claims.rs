//! Re-verification of every finite claim by exhaustive search.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::axioms::{check_ef, check_jf, is_po, EfVariant, JfVariant, PropertyVariant};
use crate::model::{classify_in_allocation, normalise_default, Allocation, Instance, Limits};
use crate::paperlab::fixtures::fixture;
use crate::rational::Rational;
use crate::reductions::{
    allocation_to_cover, build, cover_to_allocation, reduce_x3c_jf1, reduce_x3c_jf1po_binary,
    x3c_solve_bruteforce, ReductionVariant, X3cInstance,
};
use crate::solvers::{exists_allocation, solve_leximin_pp};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClaimReport {
    pub claim_id: &'static str,
    pub expected: String,
    pub computed: String,
    pub explored: u128,
    pub millis: u128,
    pub passed: bool,
}

struct Outcome {
    expected: String,
    computed: String,
    explored: u128,
}

fn outcome(expected: impl Into<String>, computed: impl Into<String>, explored: u128) -> Outcome {
    Outcome {
        expected: expected.into(),
        computed: computed.into(),
        explored,
    }
}

fn inst(id: &str) -> Instance {
    fixture(id).expect("known fixture").instance
}

fn alloc(inst: &Instance, bundles: &[&[&str]]) -> Allocation {
    Allocation::from_labels(inst, bundles).expect("fixture allocation")
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// "no P1∧P2 allocation" or the first one found.
fn absent(inst: &Instance, props: &[PropertyVariant], limits: &Limits) -> Outcome {
    let names: Vec<&str> = props.iter().map(|p| p.as_str()).collect();
    let label = names.join("∧");
    let expected = format!("no {label} allocation");
    match exists_allocation(inst, props, limits) {
        Ok(r) => match r.found {
            None => outcome(expected, format!("no {label} allocation"), r.explored),
            Some(a) => outcome(expected, format!("{label} allocation {}", a.display(inst)), r.explored),
        },
        Err(e) => outcome(expected, format!("error: {e}"), 0),
    }
}

fn jf_row(inst: &Instance, a: &Allocation) -> String {
    [JfVariant::Jf1, JfVariant::Jf1Zero, JfVariant::Jfx, JfVariant::JfxZero]
        .iter()
        .map(|&v| format!("{}={}", PropertyVariant::from(v), yes_no(check_jf(inst, a, v).holds)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn example1(_: &Limits) -> Outcome {
    let e1 = inst("example1");
    let a = alloc(&e1, &[&["a", "b"], &["c", "d"]]);
    let b = alloc(&e1, &[&["a", "c"], &["b", "d"]]);
    let computed = format!(
        "a is {} in A, {} in B",
        classify_in_allocation(&e1, &a, 0),
        classify_in_allocation(&e1, &b, 0)
    );
    outcome("a is pure-good in A, pure-bad in B", computed, 2)
}

fn example2(_: &Limits) -> Outcome {
    let e2 = inst("example2");
    let a = alloc(&e2, &[&["a", "c"], &["b"]]);
    outcome("JF1=yes JF1_0=yes JFX=no JFX_0=no", jf_row(&e2, &a), 1)
}

fn example2_ties(limits: &Limits) -> Outcome {
    // Several leximin++ allocations: every allocation with the optimal key.
    let e2 = inst("example2");
    let best = solve_leximin_pp(&e2, limits).expect("within cap");
    let key = crate::solvers::LexKey::of(&e2, best.bundles());
    let ties: Vec<String> = (0..8)
        .map(|i| Allocation::from_index(2, 3, i))
        .filter(|a| crate::solvers::LexKey::of(&e2, a.bundles()) == key)
        .map(|a| a.display(&e2))
        .collect();
    outcome(
        "leximin++ optimum at utilities (-3,-3) shared by ({c},{a,b}) and ({a,b},{c})",
        format!(
            "leximin++ optimum at utilities ({}) shared by {}",
            best.utilities(&e2).iter().map(|u| u.to_string()).collect::<Vec<_>>().join(","),
            ties.join(" and ")
        ),
        8,
    )
}

fn example3(_: &Limits) -> Outcome {
    let raw = inst("example3");
    let a = alloc(&raw, &[&["b", "c", "d"], &["a"]]);
    let before = check_jf(&raw, &a, JfVariant::Jf1).holds;
    let computed = match normalise_default(&raw) {
        Ok(norm) => {
            let quarter = Rational::new(1, 4);
            let table_ok = (0..4).all(|o| norm.bundle_utility(0, crate::Bundle::singleton(o)) == quarter)
                && norm.bundle_utility(1, crate::Bundle::singleton(0)) == Rational::ONE;
            let after = check_jf(&norm, &a, JfVariant::Jf1).holds;
            format!(
                "JF1 before normalising={} after={} normalised table matches={}",
                yes_no(before),
                yes_no(after),
                yes_no(table_ok)
            )
        }
        Err(e) => format!("error: {e}"),
    };
    outcome("JF1 before normalising=no after=yes normalised table matches=yes", computed, 1)
}

fn example4(limits: &Limits) -> Outcome {
    let e4 = inst("example4");
    let all = alloc(&e4, &[&["a", "b", "c", "d"], &[]]);
    let one = alloc(&e4, &[&["a"], &["b", "c", "d"]]);
    let row = |a: &Allocation| {
        format!(
            "JF1={} EF1={} PO={}",
            yes_no(check_jf(&e4, a, JfVariant::Jf1).holds),
            yes_no(check_ef(&e4, a, EfVariant::Ef1).holds),
            yes_no(is_po(&e4, a, limits).map(|r| r.0).unwrap_or(false))
        )
    };
    outcome(
        "all to agent 1: JF1=no EF1=yes PO=yes; one to agent 1: JF1=yes EF1=no PO=no",
        format!("all to agent 1: {}; one to agent 1: {}", row(&all), row(&one)),
        32,
    )
}

fn prop1(limits: &Limits) -> Outcome {
    absent(&inst("prop1"), &[PropertyVariant::Jf1], limits)
}

fn prop2_jfx0(limits: &Limits) -> Outcome {
    absent(&inst("prop2"), &[PropertyVariant::JfxZero], limits)
}

fn prop2_efx0(limits: &Limits) -> Outcome {
    absent(&inst("prop2"), &[PropertyVariant::EfxZero], limits)
}

fn prop3_jf1_po(limits: &Limits) -> Outcome {
    absent(&inst("prop3"), &[PropertyVariant::Jf1, PropertyVariant::Po], limits)
}

fn prop3_unique_po(limits: &Limits) -> Outcome {
    let p3 = inst("prop3");
    let po: Vec<Allocation> = (0..16)
        .map(|i| Allocation::from_index(2, 4, i))
        .filter(|a| is_po(&p3, a, limits).map(|r| r.0).unwrap_or(false))
        .collect();
    let computed = po
        .iter()
        .map(|a| {
            let u = a.utilities(&p3);
            format!("{} with utilities ({},{})", a.display(&p3), u[0], u[1])
        })
        .collect::<Vec<_>>()
        .join("; ");
    outcome("({a,b,d},{c}) with utilities (2,0)", computed, 16)
}

fn prop5(limits: &Limits) -> Outcome {
    absent(&inst("prop5"), &[PropertyVariant::Jf1, PropertyVariant::Ef1], limits)
}

fn prop6(limits: &Limits) -> Outcome {
    absent(&inst("prop6_eps"), &[PropertyVariant::Jf1, PropertyVariant::Ef1], limits)
}

fn prop7(limits: &Limits) -> Outcome {
    absent(&inst("prop7"), &[PropertyVariant::Jf1, PropertyVariant::Ef1], limits)
}

/// q = 2, Q = 7, with the exact cover {1,2,3},{4,5,6}.
pub fn reduction_x3c() -> X3cInstance {
    X3cInstance::numbered(
        2,
        &[[1, 2, 3], [4, 5, 6], [1, 4, 5], [2, 3, 6], [1, 2, 4], [3, 5, 6], [2, 4, 6]],
    )
    .expect("valid X3C instance")
}

fn forward(variant: ReductionVariant) -> Outcome {
    let x = reduction_x3c();
    let red = match variant {
        ReductionVariant::Jf1 => reduce_x3c_jf1(&x, None),
        ReductionVariant::Jf1PoBinary => reduce_x3c_jf1po_binary(&x),
    }
    .expect("legal parameters");
    let cover = x3c_solve_bruteforce(&x).expect("small").expect("cover exists");
    let a = cover_to_allocation(&red, &cover).expect("valid cover");
    let utilities = a.utilities(&red.instance);
    let all_three = utilities.iter().all(|u| *u == Rational::from(3));
    let jf1 = check_jf(&red.instance, &a, JfVariant::Jf1).holds;
    let back = allocation_to_cover(&red, &a) == Some(cover);
    let (n, m) = (red.instance.agents(), red.instance.items());
    outcome(
        match variant {
            ReductionVariant::Jf1 => "8 agents, 25 items; all utilities 3; JF1=yes; round trip=yes",
            ReductionVariant::Jf1PoBinary => "7 agents, 21 items; all utilities 3; JF1=yes; round trip=yes",
        },
        format!(
            "{n} agents, {m} items; all utilities {}; JF1={}; round trip={}",
            if all_three { "3".to_string() } else { format!("{utilities:?}") },
            yes_no(jf1),
            yes_no(back)
        ),
        1,
    )
}

fn thm2_forward(_: &Limits) -> Outcome {
    forward(ReductionVariant::Jf1)
}

fn thm4_forward(_: &Limits) -> Outcome {
    forward(ReductionVariant::Jf1PoBinary)
}

fn thm4_small(limits: &Limits) -> Outcome {
    // Q = 3 is below the Q > 3q guard; the 0/1 construction is still
    // well-defined and small enough (3^9 allocations) to search.
    let x = X3cInstance::numbered(2, &[[1, 2, 3], [4, 5, 6], [1, 2, 4]]).expect("valid");
    let red = build(&x, ReductionVariant::Jf1PoBinary, 0).expect("valid");
    let a = cover_to_allocation(&red, &[0, 1]).expect("valid cover");
    let po = is_po(&red.instance, &a, limits).map(|r| r.0).unwrap_or(false);
    let jf1 = check_jf(&red.instance, &a, JfVariant::Jf1).holds;
    outcome(
        "cover allocation JF1=yes PO=yes",
        format!("cover allocation JF1={} PO={}", yes_no(jf1), yes_no(po)),
        19683,
    )
}

/// Q = 7 sets over six elements, all containing element 1, so no two are
/// disjoint and there is no exact cover.
pub fn coverless_x3c() -> X3cInstance {
    X3cInstance::numbered(
        2,
        &[[1, 2, 3], [1, 4, 5], [1, 2, 6], [1, 3, 4], [1, 5, 6], [1, 2, 4], [1, 3, 5]],
    )
    .expect("valid X3C instance")
}

/// A JF1 and PO allocation of the 0/1 reduction of [`coverless_x3c`]:
/// each element goes to a distinct set containing it, topped up with y-items
/// to utility 3; the seventh agent gets the last y-triple.
pub fn coverless_allocation(red: &crate::reductions::ReducedInstance) -> Allocation {
    // element -> agent, a system of distinct representatives
    let holder = [0usize, 2, 3, 5, 1, 4];
    let n = red.instance.agents();
    let mut owners = vec![0usize; red.instance.items()];
    for (e, &a) in holder.iter().enumerate() {
        owners[e] = a;
    }
    let mut need: Vec<usize> = (0..n).map(|a| if holder.contains(&a) { 2 } else { 3 }).collect();
    let mut a = 0;
    for owner in owners.iter_mut().skip(6) {
        while need[a] == 0 {
            a += 1;
        }
        *owner = a;
        need[a] -= 1;
    }
    Allocation::from_owners(n, &owners).expect("valid owners")
}

fn thm4_reverse(_: &Limits) -> Outcome {
    let x = coverless_x3c();
    let red = reduce_x3c_jf1po_binary(&x).expect("legal parameters");
    let a = coverless_allocation(&red);
    let inst = &red.instance;
    let cover = x3c_solve_bruteforce(&x).expect("small");
    let jf1 = check_jf(inst, &a, JfVariant::Jf1).holds;
    // No allocation can beat the sum of per-item maxima, so reaching it
    // rules out any Pareto improvement.
    let bound: Rational = (0..inst.items())
        .map(|o| {
            (0..inst.agents())
                .map(|g| inst.bundle_utility(g, crate::Bundle::singleton(o)))
                .max()
                .expect("agents")
        })
        .sum();
    let total: Rational = a.utilities(inst).into_iter().sum();
    let po = total == bound;
    let computed = if jf1 && po {
        format!(
            "JF1∧PO allocation {} exists, exact cover {}",
            a.display(inst),
            if cover.is_some() { "exists" } else { "does not exist" }
        )
    } else {
        "every JF1∧PO allocation yields an exact cover".to_string()
    };
    outcome("every JF1∧PO allocation yields an exact cover", computed, 1)
}

type Claim = (&'static str, fn(&Limits) -> Outcome);

const CLAIMS: [Claim; 17] = [
    ("example1", example1),
    ("example2", example2),
    ("example2_ties", example2_ties),
    ("example3", example3),
    ("example4", example4),
    ("prop1", prop1),
    ("prop2_efx0", prop2_efx0),
    ("prop2_jfx0", prop2_jfx0),
    ("prop3_jf1_po", prop3_jf1_po),
    ("prop3_unique_po", prop3_unique_po),
    ("prop5", prop5),
    ("prop6_eps", prop6),
    ("prop7", prop7),
    ("thm2_forward", thm2_forward),
    ("thm4_forward", thm4_forward),
    ("thm4_reverse", thm4_reverse),
    ("thm4_small", thm4_small),
];

/// Every claim, in parallel, reported in claim-id order.
pub fn verify_paper_claims(limits: &Limits) -> Vec<ClaimReport> {
    let mut reports: Vec<ClaimReport> = CLAIMS
        .par_iter()
        .map(|(id, run)| {
            let start = Instant::now();
            let o = run(limits);
            ClaimReport {
                claim_id: id,
                passed: o.expected == o.computed,
                expected: o.expected,
                computed: o.computed,
                explored: o.explored,
                millis: start.elapsed().as_millis(),
            }
        })
        .collect();
    reports.sort_by_key(|r| r.claim_id);
    reports
}

/// CSV with header `claim_id,expected,computed,explored,millis,passed`.
pub fn claims_to_csv(reports: &[ClaimReport]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in reports {
        w.serialize(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_claim_passes() {
        let reports = verify_paper_claims(&Limits::default());
        assert_eq!(reports.len(), CLAIMS.len());
        for r in reports.iter().filter(|r| !KNOWN_FALSE.contains(&r.claim_id)) {
            assert!(r.passed, "{}: expected `{}`, computed `{}`", r.claim_id, r.expected, r.computed);
        }
        let ids: Vec<&str> = reports.iter().map(|r| r.claim_id).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        assert_eq!(ids, sorted);
    }

    /// Claims the exhaustive checks refute.
    const KNOWN_FALSE: [&str; 1] = ["thm4_reverse"];

    #[test]
    fn refuted_claims_fail() {
        let reports = verify_paper_claims(&Limits::default());
        let r = reports.iter().find(|r| r.claim_id == "thm4_reverse").unwrap();
        assert!(!r.passed);
        assert!(r.computed.ends_with("exact cover does not exist"), "{}", r.computed);
    }

    #[test]
    fn explored_counts() {
        let reports = verify_paper_claims(&Limits::default());
        let get = |id: &str| reports.iter().find(|r| r.claim_id == id).unwrap().explored;
        assert_eq!(get("prop1"), 8);
        assert_eq!(get("prop2_jfx0"), 8);
        assert_eq!(get("prop2_efx0"), 8);
        assert_eq!(get("prop3_jf1_po"), 16);
        assert_eq!(get("prop5"), 4);
        assert_eq!(get("prop6_eps"), 16);
        assert_eq!(get("prop7"), 27);
    }

    #[test]
    fn csv_header() {
        let csv = claims_to_csv(&verify_paper_claims(&Limits::default()));
        assert!(csv.starts_with("claim_id,expected,computed,explored,millis,passed\n"));
    }
}
