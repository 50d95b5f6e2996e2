//! Named finite instances with known answers.

use serde::Serialize;

use crate::bundle::Bundle;
use crate::error::{Error, Result};
use crate::model::Instance;
use crate::rational::Rational;

pub const FIXTURE_IDS: [&str; 10] = [
    "example1", "example2", "example3", "example4", "prop1", "prop2", "prop3", "prop5", "prop6_eps",
    "prop7",
];

/// ε used by the general-utility fixture; any value in (0, 1/4) works.
pub fn prop6_epsilon() -> Rational {
    Rational::new(1, 5)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Fixture {
    pub id: &'static str,
    pub instance: Instance,
    pub notes: &'static str,
}

fn labels(m: usize) -> Vec<String> {
    (0..m).map(|o| ((b'a' + o as u8) as char).to_string()).collect()
}

fn additive(rows: &[&[i64]], notes: &'static str, id: &'static str) -> Fixture {
    let inst = Instance::additive_int(labels(rows[0].len()), rows).expect("fixture is valid");
    Fixture { id, instance: inst, notes }
}

fn example1() -> Instance {
    let l = labels(4);
    let mut table = vec![Rational::ZERO; 16];
    let mut set = |items: &[usize], v: Rational| table[Bundle::from_items(items.iter().copied()).mask() as usize] = v;
    let (a, b, c, d) = (0, 1, 2, 3);
    set(&[b], Rational::from(1));
    set(&[a, b], Rational::from(2));
    set(&[b, d], Rational::from(2));
    set(&[a, b, d], Rational::new(3, 2));
    set(&[c], Rational::from(3));
    set(&[a, c], Rational::from(2));
    set(&[c, d], Rational::from(2));
    set(&[a, c, d], Rational::from(4));
    Instance::general(l, vec![table.clone(), table]).expect("fixture is valid")
}

fn prop6() -> Instance {
    let m = 4;
    let eps = prop6_epsilon();
    let full = Bundle::full(m).mask() as usize;
    let u1: Vec<Rational> = (0..1usize << m).map(|s| Rational::from(s.count_ones() as i64)).collect();
    let u2: Vec<Rational> = (0..1usize << m)
        .map(|s| {
            if s == full {
                Rational::from(m as i64)
            } else {
                eps * Rational::from(s.count_ones() as i64)
            }
        })
        .collect();
    Instance::general(labels(m), vec![u1, u2]).expect("fixture is valid")
}

pub fn fixture(id: &str) -> Result<Fixture> {
    Ok(match id {
        "example1" => Fixture {
            id: "example1",
            instance: example1(),
            notes: "general utilities shared by both agents; bundles not listed in the table are 0",
        },
        "example2" => additive(&[&[-1, -2, -3], &[-1, -2, -3]], "three pure bads, identical utilities", "example2"),
        "example3" => additive(&[&[1, 1, 1, 1], &[1, 0, 0, 0]], "non-normalised goods; normalise for the second table", "example3"),
        "example4" => additive(&[&[1, 1, 1, 1], &[0, 0, 0, 0]], "0/1 goods, agent 2 values nothing", "example4"),
        "prop1" => additive(&[&[1, 1, -4], &[-1, -1, 0]], "two mixed items and a bad", "prop1"),
        "prop2" => additive(&[&[2, -1, 0], &[2, 0, -1]], "one pure good, two bads", "prop2"),
        "prop3" => additive(&[&[1, 1, -5, 0], &[0, 0, 0, -3]], "two goods, two bads", "prop3"),
        "prop5" => additive(&[&[-1, -1], &[-3, -3]], "two pure bads, not normalised", "prop5"),
        "prop6_eps" => Fixture {
            id: "prop6_eps",
            instance: prop6(),
            notes: "u_1(S) = |S|; u_2(S) = ε|S| for proper subsets, u_2([m]) = m; m = 4, ε = 1/5",
        },
        "prop7" => additive(
            &[&[-28, -1, -1], &[-24, -3, -3], &[-16, -7, -7]],
            "three agents, three pure bads, rows sum to -30",
            "prop7",
        ),
        other => return Err(Error::UnknownFixture(other.to_string())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(inst: &Instance, a: usize) -> Vec<Rational> {
        (0..inst.items()).map(|o| inst.bundle_utility(a, Bundle::singleton(o))).collect()
    }

    #[test]
    fn tables() {
        let p7 = fixture("prop7").unwrap().instance;
        assert_eq!(row(&p7, 2), [-16, -7, -7].map(Rational::from));
        for a in 0..3 {
            assert_eq!(p7.bundle_utility(a, p7.grand_bundle()), Rational::from(-30));
        }
        let p2 = fixture("prop2").unwrap().instance;
        assert_eq!(row(&p2, 0), [2, -1, 0].map(Rational::from));
        let eps = prop6_epsilon();
        assert!(eps.is_positive() && eps < Rational::new(1, 4));
        let p6 = fixture("prop6_eps").unwrap().instance;
        assert_eq!(p6.bundle_utility(1, p6.grand_bundle()), Rational::from(4));
        assert_eq!(p6.bundle_utility(1, Bundle::from_items([0, 1, 2])), Rational::new(3, 5));
        assert_eq!(p6.bundle_utility(0, p6.grand_bundle()), Rational::from(4));
    }

    #[test]
    fn every_id_resolves() {
        for id in FIXTURE_IDS {
            assert_eq!(fixture(id).unwrap().id, id);
        }
        assert_eq!(fixture("prop4"), Err(Error::UnknownFixture("prop4".into())));
    }

    #[test]
    fn example1_values() {
        let e1 = fixture("example1").unwrap().instance;
        let abd = e1.bundle_of(&["a", "b", "d"]).unwrap();
        assert_eq!(e1.bundle_utility(1, abd), Rational::new(3, 2));
        assert_eq!(e1.bundle_utility(0, e1.bundle_of(&["a", "c", "d"]).unwrap()), Rational::from(4));
        assert_eq!(e1.bundle_utility(0, e1.bundle_of(&["d"]).unwrap()), Rational::ZERO);
    }
}
