use fairmanna::axioms::satisfies_jf;
use fairmanna::paperlab::{gen_random_instance, GenClass, GenConfig};
use fairmanna::solvers::{jf1zero_greedy, jf1zero_greedy_trace, solve_leximin, solve_leximin_pp, sorted_utilities};
use fairmanna::{check_jf, is_po, Allocation, Instance, JfVariant, Limits, Rational};
use proptest::prelude::*;

fn general_instance() -> impl Strategy<Value = Instance> {
    (2usize..=3, 1usize..=4).prop_flat_map(|(n, m)| {
        prop::collection::vec(prop::collection::vec(-6i64..=6, 1 << m), n).prop_map(move |t| {
            let tables = t.iter().map(|r| r.iter().map(|&v| Rational::from(v)).collect()).collect();
            Instance::general((0..m).map(|o| format!("o{o}")), tables).unwrap()
        })
    })
}

/// Every allocation's utility vector, by brute force.
fn all_vectors(inst: &Instance) -> Vec<Vec<Rational>> {
    let (n, m) = (inst.agents(), inst.items());
    (0..(n as u128).pow(m as u32))
        .map(|i| Allocation::from_index(n, m, i).utilities(inst))
        .collect()
}

fn sorted(mut v: Vec<Rational>) -> Vec<Rational> {
    v.sort();
    v
}

fn no_mixed(n: usize, m: usize, seed: u64, general: bool) -> Instance {
    let class = [GenClass::GoodsAndBads, GenClass::PureGoodsAndBads, GenClass::Goods, GenClass::Bads][seed as usize % 4];
    let mut cfg = GenConfig::new(n, m, class, seed);
    if general {
        cfg = cfg.general();
    }
    gen_random_instance(&cfg).unwrap()
}

#[test]
fn greedy_trace_on_identical_bads() {
    let inst = Instance::additive_int(["a", "b", "c"], &[&[-1, -2, -3], &[-1, -2, -3]]).unwrap();
    let a = jf1zero_greedy(&inst).unwrap();
    assert_eq!(a.display(&inst), "({a,c},{b})");
    assert_eq!(a.utilities(&inst), vec![Rational::from(-4), Rational::from(-2)]);
    assert!(check_jf(&inst, &a, JfVariant::Jf1Zero).holds);
}

#[test]
fn greedy_trace_with_zero_marginal() {
    let inst = Instance::additive_int(["a", "b"], &[&[1, 1], &[2, 0]]).unwrap();
    let trace = jf1zero_greedy_trace(&inst.evaluator()).unwrap();
    let shown: Vec<String> = trace
        .iter()
        .map(|b| b.iter().map(|&x| inst.format_bundle(x)).collect::<Vec<_>>().join(","))
        .collect();
    assert_eq!(shown, ["{a},∅", "{a},{b}"]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn leximin_is_pareto_optimal_and_dominant(inst in general_instance()) {
        let lim = Limits::default();
        let a = solve_leximin(&inst, &lim).unwrap();
        let best = sorted_utilities(&inst.evaluator(), a.bundles());
        let vectors = all_vectors(&inst);
        for v in &vectors {
            prop_assert!(sorted(v.clone()) <= best);
        }
        // PO by brute force over the same vectors.
        let own = a.utilities(&inst);
        let dominated = vectors.iter().any(|v| {
            v.iter().zip(&own).all(|(x, y)| x >= y) && v.iter().zip(&own).any(|(x, y)| x > y)
        });
        prop_assert!(!dominated);
        prop_assert!(is_po(&inst, &a, &lim).unwrap().0);
    }

    #[test]
    fn leximin_pp_is_jfx_without_mixed_items(n in 2usize..=3, m in 1usize..=5, seed in any::<u64>()) {
        let inst = no_mixed(n, m, seed, false);
        let a = solve_leximin_pp(&inst, &Limits::default()).unwrap();
        prop_assert!(check_jf(&inst, &a, JfVariant::Jfx).holds);
    }

    #[test]
    fn leximin_pp_is_jfx_general(m in 1usize..=4, seed in any::<u64>()) {
        let inst = no_mixed(2, m, seed, true);
        let a = solve_leximin_pp(&inst, &Limits::default()).unwrap();
        prop_assert!(check_jf(&inst, &a, JfVariant::Jfx).holds);
    }

    #[test]
    fn greedy_prefixes_are_jf1_zero(n in 2usize..=4, m in 1usize..=8, seed in any::<u64>(), general in any::<bool>()) {
        let inst = no_mixed(n.min(if general { 2 } else { 4 }), if general { m.min(5) } else { m }, seed, general);
        let val = inst.evaluator();
        let trace = jf1zero_greedy_trace(&val).unwrap();
        prop_assert_eq!(trace.len(), inst.items());
        for bundles in &trace {
            prop_assert!(satisfies_jf(&val, bundles, JfVariant::Jf1Zero));
        }
    }
}
