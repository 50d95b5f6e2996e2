//! Decision procedures for the jealousy-freeness and envy-freeness
//! relaxations, Pareto-optimality and equitability.
//!
//! Each pairwise test runs over ordered pairs `(a, b)` with `a ≠ b`. Every
//! qualifier ("the item is a strict bad for its holder", ...) is evaluated on
//! bundle marginals such as `u_a(A_a) < u_a(A_a ∖ {o})`, never on item
//! columns, so additive and general utilities share one code path.
//!
//! Jealousy tests compare `a`'s utility for `a`'s bundle with `b`'s utility
//! for `b`'s bundle. Envy tests compare `a`'s utilities for both bundles.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bundle::Bundle;
use crate::enumerate::par_find_first;
use crate::error::{Error, Result};
use crate::model::{Allocation, Instance, Limits, Valuation};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PropertyVariant {
    Jf1,
    Jf1Zero,
    Jfx,
    JfxZero,
    Ef1,
    Efx,
    EfxZero,
    Po,
    Equitable,
}

impl PropertyVariant {
    pub const ALL: [PropertyVariant; 9] = [
        PropertyVariant::Jf1,
        PropertyVariant::Jf1Zero,
        PropertyVariant::Jfx,
        PropertyVariant::JfxZero,
        PropertyVariant::Ef1,
        PropertyVariant::Efx,
        PropertyVariant::EfxZero,
        PropertyVariant::Po,
        PropertyVariant::Equitable,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PropertyVariant::Jf1 => "JF1",
            PropertyVariant::Jf1Zero => "JF1_0",
            PropertyVariant::Jfx => "JFX",
            PropertyVariant::JfxZero => "JFX_0",
            PropertyVariant::Ef1 => "EF1",
            PropertyVariant::Efx => "EFX",
            PropertyVariant::EfxZero => "EFX_0",
            PropertyVariant::Po => "PO",
            PropertyVariant::Equitable => "EQUITABLE",
        }
    }

    pub fn jf(self) -> Option<JfVariant> {
        match self {
            PropertyVariant::Jf1 => Some(JfVariant::Jf1),
            PropertyVariant::Jf1Zero => Some(JfVariant::Jf1Zero),
            PropertyVariant::Jfx => Some(JfVariant::Jfx),
            PropertyVariant::JfxZero => Some(JfVariant::JfxZero),
            _ => None,
        }
    }

    pub fn ef(self) -> Option<EfVariant> {
        match self {
            PropertyVariant::Ef1 => Some(EfVariant::Ef1),
            PropertyVariant::Efx => Some(EfVariant::Efx),
            PropertyVariant::EfxZero => Some(EfVariant::EfxZero),
            _ => None,
        }
    }
}

impl fmt::Display for PropertyVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PropertyVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_uppercase().replace('₀', "_0");
        PropertyVariant::ALL
            .into_iter()
            .find(|p| p.as_str() == key)
            .ok_or_else(|| Error::Parse(format!("unknown property `{s}`")))
    }
}

impl Serialize for PropertyVariant {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for PropertyVariant {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JfVariant {
    Jf1,
    Jf1Zero,
    Jfx,
    JfxZero,
}

impl From<JfVariant> for PropertyVariant {
    fn from(v: JfVariant) -> Self {
        match v {
            JfVariant::Jf1 => PropertyVariant::Jf1,
            JfVariant::Jf1Zero => PropertyVariant::Jf1Zero,
            JfVariant::Jfx => PropertyVariant::Jfx,
            JfVariant::JfxZero => PropertyVariant::JfxZero,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EfVariant {
    Ef1,
    Efx,
    EfxZero,
}

impl From<EfVariant> for PropertyVariant {
    fn from(v: EfVariant) -> Self {
        match v {
            EfVariant::Ef1 => PropertyVariant::Ef1,
            EfVariant::Efx => PropertyVariant::Efx,
            EfVariant::EfxZero => PropertyVariant::EfxZero,
        }
    }
}

/// One side of a failed inequality: `u_agent(bundle) = value`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Term {
    pub agent: usize,
    #[serde(serialize_with = "serialize_bundle")]
    pub bundle: Bundle,
    pub value: Rational,
}

fn serialize_bundle<S: serde::Serializer>(b: &Bundle, s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(b.iter())
}

/// A failed inequality `lhs.value < rhs.value`.
///
/// Agent indices and bundle items are 0-based; `detail` renders agents
/// 1-based with item labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub property: PropertyVariant,
    pub agent_a: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agent_b: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_item: Option<String>,
    pub lhs: Term,
    pub rhs: Term,
    pub detail: String,
}

impl Violation {
    /// Recomputes both sides and confirms the strict inequality.
    pub fn reconfirm<V: Valuation + ?Sized>(&self, val: &V) -> bool {
        let l = val.utility(self.lhs.agent, self.lhs.bundle);
        let r = val.utility(self.rhs.agent, self.rhs.bundle);
        l == self.lhs.value && r == self.rhs.value && l < r
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub property: PropertyVariant,
    pub holds: bool,
    pub violations: Vec<Violation>,
}

/// Failure found by a scan, before labels are attached.
#[derive(Debug, Clone)]
struct RawViolation {
    a: usize,
    b: Option<usize>,
    witness: Option<usize>,
    lhs: Term,
    rhs: Term,
}

fn term<V: Valuation + ?Sized>(val: &V, agent: usize, bundle: Bundle) -> Term {
    Term {
        agent,
        bundle,
        value: val.utility(agent, bundle),
    }
}

/// Runs `sink` on every violation; stops when it returns `false`.
/// Returns whether the property holds.
fn scan_jf<V: Valuation + ?Sized>(
    val: &V,
    bundles: &[Bundle],
    variant: JfVariant,
    sink: &mut dyn FnMut(RawViolation) -> bool,
) -> bool {
    let n = bundles.len();
    let own: Vec<Rational> = (0..n).map(|a| val.utility(a, bundles[a])).collect();
    let mut holds = true;
    for a in 0..n {
        for b in 0..n {
            if a == b || own[a] >= own[b] {
                continue;
            }
            let (ba, bb) = (bundles[a], bundles[b]);
            let (ua, ub) = (own[a], own[b]);
            match variant {
                JfVariant::Jf1 | JfVariant::Jf1Zero => {
                    let qualify = variant == JfVariant::Jf1;
                    let via_own = ba.iter().any(|o| {
                        (!qualify || ua < val.utility(a, ba.without(o)))
                            && ua >= val.utility(b, bb.with(o))
                    });
                    let via_other = via_own
                        || bb.iter().any(|o| {
                            let rest = val.utility(b, bb.without(o));
                            (!qualify || ub > rest) && ua >= rest
                        });
                    if !via_other {
                        holds = false;
                        let v = RawViolation {
                            a,
                            b: Some(b),
                            witness: None,
                            lhs: Term { agent: a, bundle: ba, value: ua },
                            rhs: Term { agent: b, bundle: bb, value: ub },
                        };
                        if !sink(v) {
                            return false;
                        }
                    }
                }
                JfVariant::Jfx | JfVariant::JfxZero => {
                    let weak = variant == JfVariant::JfxZero;
                    for o in ba.iter() {
                        let without = val.utility(a, ba.without(o));
                        let qualifies = if weak { ua <= without } else { ua < without };
                        if !qualifies {
                            continue;
                        }
                        let rhs = term(val, b, bb.with(o));
                        if ua < rhs.value {
                            holds = false;
                            let v = RawViolation {
                                a,
                                b: Some(b),
                                witness: Some(o),
                                lhs: Term { agent: a, bundle: ba, value: ua },
                                rhs,
                            };
                            if !sink(v) {
                                return false;
                            }
                        }
                    }
                    for o in bb.iter() {
                        let rhs = term(val, b, bb.without(o));
                        let qualifies = if weak { ub >= rhs.value } else { ub > rhs.value };
                        if qualifies && ua < rhs.value {
                            holds = false;
                            let v = RawViolation {
                                a,
                                b: Some(b),
                                witness: Some(o),
                                lhs: Term { agent: a, bundle: ba, value: ua },
                                rhs,
                            };
                            if !sink(v) {
                                return false;
                            }
                        }
                    }
                }
            }
        }
    }
    holds
}

fn scan_ef<V: Valuation + ?Sized>(
    val: &V,
    bundles: &[Bundle],
    variant: EfVariant,
    sink: &mut dyn FnMut(RawViolation) -> bool,
) -> bool {
    let n = bundles.len();
    let mut holds = true;
    for a in 0..n {
        let ba = bundles[a];
        let va = val.utility(a, ba);
        for b in 0..n {
            if a == b {
                continue;
            }
            let bb = bundles[b];
            let vb = val.utility(a, bb);
            match variant {
                EfVariant::Ef1 => {
                    if va >= vb {
                        continue;
                    }
                    let rescued = ba
                        .union(bb)
                        .iter()
                        .any(|o| val.utility(a, ba.without(o)) >= val.utility(a, bb.without(o)));
                    if !rescued {
                        holds = false;
                        let v = RawViolation {
                            a,
                            b: Some(b),
                            witness: None,
                            lhs: Term { agent: a, bundle: ba, value: va },
                            rhs: Term { agent: a, bundle: bb, value: vb },
                        };
                        if !sink(v) {
                            return false;
                        }
                    }
                }
                EfVariant::Efx | EfVariant::EfxZero => {
                    let weak = variant == EfVariant::EfxZero;
                    for o in ba.iter() {
                        let lhs = term(val, a, ba.without(o));
                        let qualifies = if weak { va <= lhs.value } else { va < lhs.value };
                        if qualifies && lhs.value < vb {
                            holds = false;
                            let v = RawViolation {
                                a,
                                b: Some(b),
                                witness: Some(o),
                                lhs,
                                rhs: Term { agent: a, bundle: bb, value: vb },
                            };
                            if !sink(v) {
                                return false;
                            }
                        }
                    }
                    for o in bb.iter() {
                        let rhs = term(val, a, bb.without(o));
                        let qualifies = if weak { vb >= rhs.value } else { vb > rhs.value };
                        if qualifies && va < rhs.value {
                            holds = false;
                            let v = RawViolation {
                                a,
                                b: Some(b),
                                witness: Some(o),
                                lhs: Term { agent: a, bundle: ba, value: va },
                                rhs,
                            };
                            if !sink(v) {
                                return false;
                            }
                        }
                    }
                }
            }
        }
    }
    holds
}

/// Fast yes/no test; `bundles` may be a partial allocation.
pub fn satisfies_jf<V: Valuation + ?Sized>(val: &V, bundles: &[Bundle], variant: JfVariant) -> bool {
    scan_jf(val, bundles, variant, &mut |_| false)
}

/// Fast yes/no test; `bundles` may be a partial allocation.
pub fn satisfies_ef<V: Valuation + ?Sized>(val: &V, bundles: &[Bundle], variant: EfVariant) -> bool {
    scan_ef(val, bundles, variant, &mut |_| false)
}

pub fn satisfies_equitable<V: Valuation + ?Sized>(val: &V, bundles: &[Bundle]) -> bool {
    let first = val.utility(0, bundles[0]);
    (1..bundles.len()).all(|a| val.utility(a, bundles[a]) == first)
}

fn render(inst: &Instance, t: &Term) -> String {
    format!("u_{}({})", t.agent + 1, inst.format_bundle(t.bundle))
}

fn label(inst: &Instance, property: PropertyVariant, raw: RawViolation) -> Violation {
    let detail = format!(
        "{} = {} < {} = {}",
        render(inst, &raw.lhs),
        raw.lhs.value,
        raw.rhs.value,
        render(inst, &raw.rhs)
    );
    Violation {
        property,
        agent_a: raw.a,
        agent_b: raw.b,
        witness_item: raw.witness.map(|o| inst.label(o).to_string()),
        lhs: raw.lhs,
        rhs: raw.rhs,
        detail,
    }
}

/// `u_a(A_a) < u_b(A_b)`.
pub fn is_jealous<V: Valuation + ?Sized>(val: &V, alloc: &Allocation, a: usize, b: usize) -> Result<bool> {
    if a == b {
        return Err(Error::SameAgent { agent: a + 1 });
    }
    Ok(val.utility(a, alloc.bundle(a)) < val.utility(b, alloc.bundle(b)))
}

/// JF1, JF1₀, JFX or JFX₀ with every violating pair (and item) listed.
pub fn check_jf(inst: &Instance, alloc: &Allocation, variant: JfVariant) -> Verdict {
    let mut raw = Vec::new();
    let holds = scan_jf(inst, alloc.bundles(), variant, &mut |v| {
        raw.push(v);
        true
    });
    Verdict {
        property: variant.into(),
        holds,
        violations: raw.into_iter().map(|v| label(inst, variant.into(), v)).collect(),
    }
}

/// EF1, EFX or EFX₀ with every violating pair (and item) listed.
pub fn check_ef(inst: &Instance, alloc: &Allocation, variant: EfVariant) -> Verdict {
    let mut raw = Vec::new();
    let holds = scan_ef(inst, alloc.bundles(), variant, &mut |v| {
        raw.push(v);
        true
    });
    Verdict {
        property: variant.into(),
        holds,
        violations: raw.into_iter().map(|v| label(inst, variant.into(), v)).collect(),
    }
}

/// Pareto-optimality by exhaustive search. On failure returns the
/// Pareto-improving allocation of smallest canonical index.
pub fn is_po<V: Valuation + ?Sized>(
    val: &V,
    alloc: &Allocation,
    limits: &Limits,
) -> Result<(bool, Option<Allocation>)> {
    let (n, m) = (val.num_agents(), val.num_items());
    let total = limits.allocation_count(n, m)?;
    let base = alloc.utilities(val);
    let found = par_find_first(n, m, total, |bundles| pareto_improves(val, bundles, &base));
    Ok(match found {
        Some(i) => (false, Some(Allocation::from_index(n, m, i))),
        None => (true, None),
    })
}

/// Whether `bundles` weakly improves every agent over `base` and strictly
/// improves one.
pub(crate) fn pareto_improves<V: Valuation + ?Sized>(val: &V, bundles: &[Bundle], base: &[Rational]) -> bool {
    let mut strict = false;
    for (a, &b) in bundles.iter().enumerate() {
        let u = val.utility(a, b);
        if u < base[a] {
            return false;
        }
        strict |= u > base[a];
    }
    strict
}

pub fn is_equitable<V: Valuation + ?Sized>(val: &V, alloc: &Allocation) -> bool {
    satisfies_equitable(val, alloc.bundles())
}

fn po_verdict(inst: &Instance, alloc: &Allocation, limits: &Limits) -> Result<Verdict> {
    let (holds, witness) = is_po(inst, alloc, limits)?;
    let mut violations = Vec::new();
    if let Some(better) = witness {
        let agent = (0..inst.agents())
            .find(|&a| {
                inst.bundle_utility(a, better.bundle(a)) > inst.bundle_utility(a, alloc.bundle(a))
            })
            .expect("strictly improved agent");
        let lhs = term(inst, agent, alloc.bundle(agent));
        let rhs = term(inst, agent, better.bundle(agent));
        let detail = format!(
            "Pareto-improved by {}: {} = {} < {} = {}",
            better.display(inst),
            render(inst, &lhs),
            lhs.value,
            rhs.value,
            render(inst, &rhs)
        );
        violations.push(Violation {
            property: PropertyVariant::Po,
            agent_a: agent,
            agent_b: None,
            witness_item: None,
            lhs,
            rhs,
            detail,
        });
    }
    Ok(Verdict {
        property: PropertyVariant::Po,
        holds,
        violations,
    })
}

fn equitable_verdict(inst: &Instance, alloc: &Allocation) -> Verdict {
    let utils = alloc.utilities(inst);
    let top = (0..utils.len())
        .max_by(|&x, &y| utils[x].cmp(&utils[y]).then(y.cmp(&x)))
        .expect("at least two agents");
    let violations = (0..utils.len())
        .filter(|&a| utils[a] < utils[top])
        .map(|a| {
            label(
                inst,
                PropertyVariant::Equitable,
                RawViolation {
                    a,
                    b: Some(top),
                    witness: None,
                    lhs: term(inst, a, alloc.bundle(a)),
                    rhs: term(inst, top, alloc.bundle(top)),
                },
            )
        })
        .collect::<Vec<_>>();
    Verdict {
        property: PropertyVariant::Equitable,
        holds: violations.is_empty(),
        violations,
    }
}

/// Any property, with its violations.
pub fn check_property(
    inst: &Instance,
    alloc: &Allocation,
    property: PropertyVariant,
    limits: &Limits,
) -> Result<Verdict> {
    if let Some(v) = property.jf() {
        return Ok(check_jf(inst, alloc, v));
    }
    if let Some(v) = property.ef() {
        return Ok(check_ef(inst, alloc, v));
    }
    match property {
        PropertyVariant::Po => po_verdict(inst, alloc, limits),
        PropertyVariant::Equitable => Ok(equitable_verdict(inst, alloc)),
        _ => unreachable!("jf/ef handled above"),
    }
}
