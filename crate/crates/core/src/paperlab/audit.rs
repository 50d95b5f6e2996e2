//! All nine verdicts for one allocation, and the two implication chains.

use serde::Serialize;

use crate::axioms::{check_property, satisfies_ef, satisfies_jf, PropertyVariant};
use crate::bundle::Bundle;
use crate::error::{Error, Result};
use crate::model::{Allocation, Instance, Limits, Valuation};

/// Strongest first: each entry is claimed to imply the next.
pub const JF_CHAIN: [PropertyVariant; 4] = [
    PropertyVariant::JfxZero,
    PropertyVariant::Jfx,
    PropertyVariant::Jf1Zero,
    PropertyVariant::Jf1,
];

pub const EF_CHAIN: [PropertyVariant; 3] = [PropertyVariant::EfxZero, PropertyVariant::Efx, PropertyVariant::Ef1];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ChainLink {
    pub from: PropertyVariant,
    pub to: PropertyVariant,
    /// `false` when `from` holds and `to` does not.
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditTable {
    pub verdicts: Vec<(PropertyVariant, bool)>,
    pub links: Vec<ChainLink>,
}

impl AuditTable {
    pub fn verdict(&self, p: PropertyVariant) -> bool {
        self.verdicts.iter().find(|v| v.0 == p).expect("all nine present").1
    }

    pub fn broken(&self) -> Vec<ChainLink> {
        self.links.iter().copied().filter(|l| !l.holds).collect()
    }
}

fn links_from(verdict: impl Fn(PropertyVariant) -> bool) -> Vec<ChainLink> {
    let mut links = Vec::new();
    for chain in [&JF_CHAIN[..], &EF_CHAIN[..]] {
        for pair in chain.windows(2) {
            links.push(ChainLink {
                from: pair[0],
                to: pair[1],
                holds: !verdict(pair[0]) || verdict(pair[1]),
            });
        }
    }
    links
}

/// Chain links only, for bulk use on raw bundles.
pub fn chain_links<V: Valuation + ?Sized>(val: &V, bundles: &[Bundle]) -> Vec<ChainLink> {
    links_from(|p| match (p.jf(), p.ef()) {
        (Some(v), _) => satisfies_jf(val, bundles, v),
        (_, Some(v)) => satisfies_ef(val, bundles, v),
        _ => unreachable!("chains hold JF and EF variants only"),
    })
}

/// Every verdict and every link, without judging the links.
pub fn audit_table(inst: &Instance, alloc: &Allocation, limits: &Limits) -> Result<AuditTable> {
    let verdicts = PropertyVariant::ALL
        .iter()
        .map(|&p| Ok((p, check_property(inst, alloc, p, limits)?.holds)))
        .collect::<Result<Vec<_>>>()?;
    let links = links_from(|p| verdicts.iter().find(|v| v.0 == p).expect("present").1);
    Ok(AuditTable { verdicts, links })
}

/// [`audit_table`], failing with `ChainViolation` when a link breaks.
pub fn implication_audit(inst: &Instance, alloc: &Allocation, limits: &Limits) -> Result<AuditTable> {
    let table = audit_table(inst, alloc, limits)?;
    if let Some(l) = table.broken().first() {
        return Err(Error::ChainViolation(format!(
            "{} holds but {} fails for {}",
            l.from,
            l.to,
            alloc.display(inst)
        )));
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paperlab::fixtures::fixture;

    #[test]
    fn example2_table() {
        let inst = fixture("example2").unwrap().instance;
        let a = Allocation::from_labels(&inst, &[&["a", "c"], &["b"]]).unwrap();
        let t = implication_audit(&inst, &a, &Limits::default()).unwrap();
        assert!(t.verdict(PropertyVariant::Jf1));
        assert!(t.verdict(PropertyVariant::Jf1Zero));
        assert!(!t.verdict(PropertyVariant::Jfx));
        assert!(!t.verdict(PropertyVariant::JfxZero));
        assert_eq!(t.verdicts.len(), 9);
        assert_eq!(t.links.len(), 5);
    }

    #[test]
    fn envy_free_equitable_allocation_is_all_true() {
        let inst = Instance::additive_int(["a", "b"], &[&[2, 1], &[1, 2]]).unwrap();
        let a = Allocation::from_labels(&inst, &[&["a"], &["b"]]).unwrap();
        let t = implication_audit(&inst, &a, &Limits::default()).unwrap();
        assert!(t.verdicts.iter().all(|v| v.1), "{:?}", t.verdicts);
    }

    #[test]
    fn prop2_chain_intact() {
        let inst = fixture("prop2").unwrap().instance;
        let a = Allocation::from_labels(&inst, &[&["a", "b"], &["c"]]).unwrap();
        let t = implication_audit(&inst, &a, &Limits::default()).unwrap();
        assert!(!t.verdict(PropertyVariant::EfxZero));
    }

    #[test]
    fn weak_variant_does_not_imply_jf1() {
        // Moving x to agent 2 restores jealousy-freeness, but x is worth 0 to
        // its holder, so no qualifying item exists for JF1.
        let inst = Instance::additive_int(["x", "y1", "y2"], &[&[0, 1, 1], &[-20, 5, 5]]).unwrap();
        let a = Allocation::from_labels(&inst, &[&["x"], &["y1", "y2"]]).unwrap();
        let t = audit_table(&inst, &a, &Limits::default()).unwrap();
        assert!(t.verdict(PropertyVariant::Jf1Zero));
        assert!(!t.verdict(PropertyVariant::Jf1));
        assert_eq!(
            t.broken(),
            vec![ChainLink { from: PropertyVariant::Jf1Zero, to: PropertyVariant::Jf1, holds: false }]
        );
        assert!(matches!(implication_audit(&inst, &a, &Limits::default()), Err(Error::ChainViolation(_))));
    }
}
