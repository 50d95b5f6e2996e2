#![allow(clippy::needless_range_loop)]

use fairmanna::{
    classify_item_additive, classify_marginal, normalise, Bundle, Instance, ItemClass, Rational,
};
use proptest::prelude::*;

fn matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (2usize..=4, 1usize..=6)
        .prop_flat_map(|(n, m)| prop::collection::vec(prop::collection::vec(-5i64..=5, m), n))
}

fn instance(rows: &[Vec<i64>]) -> Instance {
    let m = rows[0].len();
    let labels: Vec<String> = (0..m).map(|o| format!("o{o}")).collect();
    Instance::additive_int(labels, &rows.iter().map(Vec::as_slice).collect::<Vec<_>>()).unwrap()
}

/// Class of a column, from the sign pattern alone.
fn column_class(col: &[i64]) -> ItemClass {
    let pos = col.iter().filter(|&&v| v > 0).count();
    let neg = col.iter().filter(|&&v| v < 0).count();
    let n = col.len();
    match (pos, neg) {
        (p, 0) if p == n => ItemClass::PureGood,
        (_, q) if q == n => ItemClass::PureBad,
        (0, 0) => ItemClass::Neutral,
        (_, 0) => ItemClass::Good,
        (0, _) => ItemClass::Bad,
        _ => ItemClass::Mixed,
    }
}

proptest! {
    #[test]
    fn additive_utility_splits_over_disjoint_bundles(rows in matrix(), split in any::<u64>(), keep in any::<u64>()) {
        let inst = instance(&rows);
        let m = inst.items();
        let full = inst.grand_bundle().mask();
        let s = Bundle::from_mask(split & keep & full);
        let t = Bundle::from_mask(!split & keep & full);
        for a in 0..inst.agents() {
            prop_assert_eq!(
                inst.bundle_utility(a, s.union(t)),
                inst.bundle_utility(a, s) + inst.bundle_utility(a, t)
            );
            let direct: i64 = (0..m).filter(|&o| s.contains(o)).map(|o| rows[a][o]).sum();
            prop_assert_eq!(inst.bundle_utility(a, s), Rational::from(direct));
        }
    }

    #[test]
    fn item_classes_follow_sign_patterns(rows in matrix()) {
        let inst = instance(&rows);
        for o in 0..inst.items() {
            let col: Vec<i64> = rows.iter().map(|r| r[o]).collect();
            prop_assert_eq!(classify_item_additive(&inst, o).unwrap(), column_class(&col));
        }
    }

    #[test]
    fn normalise_is_idempotent(rows in matrix(), num in 1i128..=9, den in 1i128..=9, negative in any::<bool>()) {
        let target = if negative { -Rational::new(num, den) } else { Rational::new(num, den) };
        let inst = instance(&rows);
        if let Ok(once) = normalise(&inst, target) {
            let twice = normalise(&once, target).unwrap();
            prop_assert_eq!(&once, &twice);
            for a in 0..once.agents() {
                prop_assert_eq!(once.bundle_utility(a, once.grand_bundle()), target);
            }
        }
    }

    #[test]
    fn additive_marginals_ignore_the_bundle(rows in matrix(), mask in any::<u64>()) {
        let inst = instance(&rows);
        let val = inst.evaluator();
        let full = inst.grand_bundle().mask();
        for a in 0..inst.agents() {
            for o in 0..inst.items() {
                let bundle = Bundle::from_mask(mask & full).without(o);
                let expect = match rows[a][o].signum() {
                    1 => ItemClass::PureGood,
                    -1 => ItemClass::PureBad,
                    _ => ItemClass::Neutral,
                };
                prop_assert_eq!(classify_marginal(&val, a, o, bundle).unwrap(), expect);
                prop_assert_eq!(classify_marginal(&val, a, o, Bundle::EMPTY).unwrap(), expect);
            }
        }
    }
}
