use fairmanna::reductions::{
    allocation_to_cover, cover_to_allocation, minimum_m, reduce_x3c_jf1, reduce_x3c_jf1po_binary,
    x3c_solve_bruteforce, X3cInstance,
};
use fairmanna::{check_jf, JfVariant, Rational};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

/// A collection over `1..=3q` with a planted exact cover, shuffled.
fn planted(q: usize, extra: usize, seed: u64) -> X3cInstance {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut elems: Vec<usize> = (1..=3 * q).collect();
    elems.shuffle(&mut rng);
    let mut sets: Vec<[usize; 3]> = elems.chunks(3).map(|c| [c[0], c[1], c[2]]).collect();
    for _ in 0..extra {
        let mut pick: Vec<usize> = (1..=3 * q).collect();
        pick.shuffle(&mut rng);
        sets.push([pick[0], pick[1], pick[2]]);
    }
    sets.shuffle(&mut rng);
    if rng.gen_bool(0.5) {
        // a duplicated set, as in padding
        let s = sets[0];
        sets.push(s);
    }
    X3cInstance::numbered(q, &sets).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn forward_direction_and_round_trip(q in 2usize..=3, more in 1usize..=3, seed in any::<u64>(), bump in 0i64..=5) {
        let x = planted(q, 2 * q + more, seed);
        let big_q = x.size();
        prop_assert!(big_q > 3 * q);
        let cover = x3c_solve_bruteforce(&x).unwrap().expect("planted cover");
        prop_assert!(x.is_exact_cover(&cover));

        let m_value = minimum_m(&x) + bump;
        let red = reduce_x3c_jf1(&x, Some(m_value)).unwrap();
        let inst = &red.instance;
        prop_assert_eq!(inst.agents(), big_q + 1);
        prop_assert_eq!(inst.items(), 3 * q + 3 * (big_q - q + 1) + 1);
        let m = Rational::from(m_value);
        let expected_total = -(Rational::from(3 * q as i64 - 3) * m) + Rational::from(3 + 3 * (big_q - q + 1) as i64);
        for a in 0..inst.agents() {
            prop_assert_eq!(inst.bundle_utility(a, inst.grand_bundle()), expected_total);
        }
        let alloc = cover_to_allocation(&red, &cover).unwrap();
        prop_assert!(alloc.utilities(inst).iter().all(|u| *u == Rational::from(3)));
        prop_assert!(check_jf(inst, &alloc, JfVariant::Jf1).holds);
        prop_assert_eq!(allocation_to_cover(&red, &alloc), Some(cover.clone()));

        let bin = reduce_x3c_jf1po_binary(&x).unwrap();
        let inst = &bin.instance;
        prop_assert_eq!((inst.agents(), inst.items()), (big_q, 3 * big_q));
        for a in 0..inst.agents() {
            prop_assert_eq!(inst.bundle_utility(a, inst.grand_bundle()), Rational::from(3 + 3 * (big_q - q) as i64));
            for o in 0..inst.items() {
                let v = inst.bundle_utility(a, fairmanna::Bundle::singleton(o));
                prop_assert!(v.is_zero() || v == Rational::ONE);
            }
        }
        let alloc = cover_to_allocation(&bin, &cover).unwrap();
        prop_assert!(alloc.utilities(inst).iter().all(|u| *u == Rational::from(3)));
        prop_assert!(check_jf(inst, &alloc, JfVariant::Jf1).holds);
        prop_assert_eq!(allocation_to_cover(&bin, &alloc), Some(cover));
    }

    #[test]
    fn m_below_minimum_is_rejected(q in 2usize..=3, seed in any::<u64>()) {
        let x = planted(q, 2 * q + 1, seed);
        prop_assert!(reduce_x3c_jf1(&x, Some(minimum_m(&x) - 1)).is_err());
    }
}
