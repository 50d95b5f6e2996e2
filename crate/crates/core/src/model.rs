//! Instances, allocations and the item/problem taxonomy.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bundle::{Bundle, MAX_ITEMS};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Default bound on the number of allocations any exhaustive routine visits.
pub const DEFAULT_ENUM_CAP: u128 = 10_000_000;

/// Environment variable overriding [`DEFAULT_ENUM_CAP`].
pub const ENUM_CAP_ENV: &str = "FAIRMANNA_ENUM_CAP";

/// General utility tables hold `2^m` entries per agent; this bounds `m`.
pub const MAX_GENERAL_ITEMS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub enum_cap: u128,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            enum_cap: DEFAULT_ENUM_CAP,
        }
    }
}

impl Limits {
    pub fn with_cap(enum_cap: u128) -> Self {
        Limits { enum_cap }
    }

    /// Reads `FAIRMANNA_ENUM_CAP`, falling back to the default cap.
    pub fn from_env() -> Result<Self> {
        match std::env::var(ENUM_CAP_ENV) {
            Ok(v) => v
                .trim()
                .parse::<u128>()
                .map(Limits::with_cap)
                .map_err(|_| Error::Parse(format!("{ENUM_CAP_ENV}={v} is not a positive integer"))),
            Err(_) => Ok(Limits::default()),
        }
    }

    /// Number of allocations `n^m`, or `TooLarge` when above the cap.
    pub fn allocation_count(&self, agents: usize, items: usize) -> Result<u128> {
        match checked_pow(agents, items) {
            Some(total) if total <= self.enum_cap => Ok(total),
            _ => Err(Error::TooLarge {
                required: format!("{agents}^{items} allocations"),
                cap: self.enum_cap,
            }),
        }
    }
}

pub(crate) fn checked_pow(base: usize, exp: usize) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base as u128)?;
    }
    Some(acc)
}

/// Anything that can value a bundle for an agent.
///
/// Checkers and solvers are generic over this so they can run against an
/// [`Instance`] directly or against a precomputed [`UtilityTable`].
pub trait Valuation: Sync {
    fn num_agents(&self) -> usize;
    fn num_items(&self) -> usize;
    fn utility(&self, agent: usize, bundle: Bundle) -> Rational;

    /// `u_agent(bundle ∪ {item}) − u_agent(bundle)` for `item ∉ bundle`.
    fn marginal(&self, agent: usize, item: usize, bundle: Bundle) -> Rational {
        self.utility(agent, bundle.with(item)) - self.utility(agent, bundle)
    }
}

impl<V: Valuation + ?Sized> Valuation for &V {
    fn num_agents(&self) -> usize {
        (**self).num_agents()
    }
    fn num_items(&self) -> usize {
        (**self).num_items()
    }
    fn utility(&self, agent: usize, bundle: Bundle) -> Rational {
        (**self).utility(agent, bundle)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum UtilityModel {
    /// `matrix[a][o] = u_a(o)`.
    Additive { matrix: Vec<Vec<Rational>> },
    /// `tables[a][mask] = u_a(bundle with that mask)`.
    General { tables: Vec<Vec<Rational>> },
}

impl UtilityModel {
    pub fn is_additive(&self) -> bool {
        matches!(self, UtilityModel::Additive { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    agents: usize,
    items: Vec<String>,
    utilities: UtilityModel,
}

impl Instance {
    pub fn new(agents: usize, items: Vec<String>, utilities: UtilityModel) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidInstance(msg));
        if agents < 2 {
            return bad(format!("need at least 2 agents, got {agents}"));
        }
        let m = items.len();
        if m == 0 {
            return bad("need at least 1 item".into());
        }
        if m > MAX_ITEMS {
            return bad(format!("at most {MAX_ITEMS} items are supported, got {m}"));
        }
        let mut seen = HashSet::new();
        for label in &items {
            if !seen.insert(label.as_str()) {
                return bad(format!("duplicate item label `{label}`"));
            }
        }
        match &utilities {
            UtilityModel::Additive { matrix } => {
                if matrix.len() != agents {
                    return bad(format!("matrix has {} rows for {agents} agents", matrix.len()));
                }
                if let Some((a, row)) = matrix.iter().enumerate().find(|(_, r)| r.len() != m) {
                    return bad(format!("row {a} has {} entries for {m} items", row.len()));
                }
            }
            UtilityModel::General { tables } => {
                if m > MAX_GENERAL_ITEMS {
                    return bad(format!(
                        "general utilities support at most {MAX_GENERAL_ITEMS} items, got {m}"
                    ));
                }
                if tables.len() != agents {
                    return bad(format!("{} tables for {agents} agents", tables.len()));
                }
                let want = 1usize << m;
                if let Some((a, t)) = tables.iter().enumerate().find(|(_, t)| t.len() != want) {
                    return bad(format!("table {a} has {} entries, expected 2^{m} = {want}", t.len()));
                }
            }
        }
        Ok(Instance {
            agents,
            items,
            utilities,
        })
    }

    /// Additive instance from a utility matrix (`rows[a][o]`).
    pub fn additive<S: Into<String>>(
        items: impl IntoIterator<Item = S>,
        rows: Vec<Vec<Rational>>,
    ) -> Result<Self> {
        let items: Vec<String> = items.into_iter().map(Into::into).collect();
        Instance::new(rows.len(), items, UtilityModel::Additive { matrix: rows })
    }

    /// Additive instance from integer rows.
    pub fn additive_int<S: Into<String>>(
        items: impl IntoIterator<Item = S>,
        rows: &[&[i64]],
    ) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&v| Rational::from(v)).collect())
            .collect();
        Instance::additive(items, rows)
    }

    pub fn general<S: Into<String>>(
        items: impl IntoIterator<Item = S>,
        tables: Vec<Vec<Rational>>,
    ) -> Result<Self> {
        let items: Vec<String> = items.into_iter().map(Into::into).collect();
        Instance::new(tables.len(), items, UtilityModel::General { tables })
    }

    pub fn agents(&self) -> usize {
        self.agents
    }

    pub fn items(&self) -> usize {
        self.items.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.items
    }

    pub fn label(&self, item: usize) -> &str {
        &self.items[item]
    }

    pub fn item_index(&self, label: &str) -> Option<usize> {
        self.items.iter().position(|l| l == label)
    }

    pub fn utilities(&self) -> &UtilityModel {
        &self.utilities
    }

    pub fn is_additive(&self) -> bool {
        self.utilities.is_additive()
    }

    pub fn grand_bundle(&self) -> Bundle {
        Bundle::full(self.items())
    }

    /// Bundle from item labels.
    pub fn bundle_of(&self, labels: &[&str]) -> Result<Bundle> {
        labels
            .iter()
            .map(|l| {
                self.item_index(l)
                    .ok_or_else(|| Error::Parse(format!("unknown item `{l}`")))
            })
            .collect()
    }

    /// `u_agent(bundle)`.
    ///
    /// Additive models sum item utilities; general models look the bundle's
    /// mask up in the agent's table.
    pub fn bundle_utility(&self, agent: usize, bundle: Bundle) -> Rational {
        match &self.utilities {
            UtilityModel::Additive { matrix } => bundle.iter().map(|t| matrix[agent][t]).sum(),
            UtilityModel::General { tables } => tables[agent][bundle.mask() as usize],
        }
    }

    /// Item labels of a bundle, in item order.
    pub fn bundle_labels(&self, bundle: Bundle) -> Vec<String> {
        bundle.iter().map(|t| self.items[t].clone()).collect()
    }

    pub fn format_bundle(&self, bundle: Bundle) -> String {
        if bundle.is_empty() {
            return "∅".into();
        }
        format!("{{{}}}", self.bundle_labels(bundle).join(","))
    }

    /// Chooses a table-backed evaluator when it fits in memory.
    pub fn evaluator(&self) -> Evaluator<'_> {
        match UtilityTable::build(self) {
            Some(table) => Evaluator::Table(table),
            None => Evaluator::Direct(self),
        }
    }

    /// Same instance with each agent's utilities multiplied by `factors[a]`.
    pub(crate) fn scaled(&self, factors: &[Rational]) -> Instance {
        let scale_rows = |rows: &Vec<Vec<Rational>>| -> Vec<Vec<Rational>> {
            rows.iter()
                .zip(factors)
                .map(|(row, &f)| row.iter().map(|&v| v * f).collect())
                .collect()
        };
        let utilities = match &self.utilities {
            UtilityModel::Additive { matrix } => UtilityModel::Additive {
                matrix: scale_rows(matrix),
            },
            UtilityModel::General { tables } => UtilityModel::General {
                tables: scale_rows(tables),
            },
        };
        Instance {
            agents: self.agents,
            items: self.items.clone(),
            utilities,
        }
    }

    /// Equivalent general-model instance (full `2^m` tables).
    pub fn to_general(&self) -> Result<Instance> {
        let m = self.items();
        if m > MAX_GENERAL_ITEMS {
            return Err(Error::InvalidInstance(format!(
                "general utilities support at most {MAX_GENERAL_ITEMS} items, got {m}"
            )));
        }
        let tables = (0..self.agents)
            .map(|a| {
                (0..1u64 << m)
                    .map(|mask| self.bundle_utility(a, Bundle::from_mask(mask)))
                    .collect()
            })
            .collect();
        Instance::new(self.agents, self.items.clone(), UtilityModel::General { tables })
    }
}

impl Valuation for Instance {
    fn num_agents(&self) -> usize {
        self.agents
    }
    fn num_items(&self) -> usize {
        self.items.len()
    }
    fn utility(&self, agent: usize, bundle: Bundle) -> Rational {
        self.bundle_utility(agent, bundle)
    }
}

/// Every agent's utility for every bundle, precomputed.
#[derive(Debug, Clone)]
pub struct UtilityTable {
    agents: usize,
    items: usize,
    values: Vec<Rational>,
}

impl UtilityTable {
    /// Largest table built, in entries (`n · 2^m`).
    pub const MAX_ENTRIES: usize = 1 << 22;

    pub fn build(inst: &Instance) -> Option<UtilityTable> {
        let m = inst.items();
        let n = inst.agents();
        if m > 30 || n.checked_mul(1usize << m)? > Self::MAX_ENTRIES {
            return None;
        }
        let size = 1usize << m;
        let mut values = Vec::with_capacity(n * size);
        for a in 0..n {
            match inst.utilities() {
                UtilityModel::General { tables } => values.extend_from_slice(&tables[a]),
                UtilityModel::Additive { matrix } => {
                    // Subset-sum recurrence: drop the lowest set bit.
                    let start = values.len();
                    values.push(Rational::ZERO);
                    for mask in 1..size {
                        let low = mask.trailing_zeros() as usize;
                        let prev = values[start + (mask & (mask - 1))];
                        values.push(prev + matrix[a][low]);
                    }
                }
            }
        }
        Some(UtilityTable {
            agents: n,
            items: m,
            values,
        })
    }
}

impl Valuation for UtilityTable {
    fn num_agents(&self) -> usize {
        self.agents
    }
    fn num_items(&self) -> usize {
        self.items
    }
    fn utility(&self, agent: usize, bundle: Bundle) -> Rational {
        self.values[(agent << self.items) | bundle.mask() as usize]
    }
}

pub enum Evaluator<'a> {
    Table(UtilityTable),
    Direct(&'a Instance),
}

impl Valuation for Evaluator<'_> {
    fn num_agents(&self) -> usize {
        match self {
            Evaluator::Table(t) => t.num_agents(),
            Evaluator::Direct(i) => i.num_agents(),
        }
    }
    fn num_items(&self) -> usize {
        match self {
            Evaluator::Table(t) => t.num_items(),
            Evaluator::Direct(i) => i.num_items(),
        }
    }
    fn utility(&self, agent: usize, bundle: Bundle) -> Rational {
        match self {
            Evaluator::Table(t) => t.utility(agent, bundle),
            Evaluator::Direct(i) => i.bundle_utility(agent, bundle),
        }
    }
}

/// A complete allocation: `bundles[a]` is agent `a`'s set of items.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Allocation {
    items: usize,
    bundles: Vec<Bundle>,
}

impl Allocation {
    /// Validates that the bundles partition `0..items`.
    pub fn new(items: usize, bundles: Vec<Bundle>) -> Result<Self> {
        let mut seen = Bundle::EMPTY;
        for (a, &b) in bundles.iter().enumerate() {
            if !b.is_disjoint(seen) {
                return Err(Error::InvalidAllocation(format!(
                    "bundle of agent {} overlaps an earlier bundle",
                    a + 1
                )));
            }
            seen = seen.union(b);
        }
        if seen != Bundle::full(items) {
            return Err(Error::InvalidAllocation(
                "bundles do not cover every item exactly once".into(),
            ));
        }
        Ok(Allocation { items, bundles })
    }

    pub fn for_instance(inst: &Instance, bundles: Vec<Bundle>) -> Result<Self> {
        if bundles.len() != inst.agents() {
            return Err(Error::InvalidAllocation(format!(
                "{} bundles for {} agents",
                bundles.len(),
                inst.agents()
            )));
        }
        Allocation::new(inst.items(), bundles)
    }

    /// Allocation from bundles of item labels.
    pub fn from_labels(inst: &Instance, bundles: &[&[&str]]) -> Result<Self> {
        let bundles = bundles
            .iter()
            .map(|b| inst.bundle_of(b))
            .collect::<Result<Vec<_>>>()?;
        Allocation::for_instance(inst, bundles)
    }

    /// `owners[t]` is the agent receiving item `t`.
    pub fn from_owners(agents: usize, owners: &[usize]) -> Result<Self> {
        let mut bundles = vec![Bundle::EMPTY; agents];
        for (t, &a) in owners.iter().enumerate() {
            if a >= agents {
                return Err(Error::InvalidAllocation(format!(
                    "item {t} assigned to agent {} of {agents}",
                    a + 1
                )));
            }
            bundles[a] = bundles[a].with(t);
        }
        Ok(Allocation {
            items: owners.len(),
            bundles,
        })
    }

    /// Decodes a canonical index: base-`agents` digits, item 0 least significant.
    pub fn from_index(agents: usize, items: usize, index: u128) -> Self {
        let mut bundles = vec![Bundle::EMPTY; agents];
        let mut rest = index;
        for t in 0..items {
            let a = (rest % agents as u128) as usize;
            rest /= agents as u128;
            bundles[a] = bundles[a].with(t);
        }
        Allocation { items, bundles }
    }

    pub fn agents(&self) -> usize {
        self.bundles.len()
    }

    pub fn items(&self) -> usize {
        self.items
    }

    pub fn bundles(&self) -> &[Bundle] {
        &self.bundles
    }

    pub fn bundle(&self, agent: usize) -> Bundle {
        self.bundles[agent]
    }

    pub fn owner(&self, item: usize) -> usize {
        self.bundles
            .iter()
            .position(|b| b.contains(item))
            .expect("complete allocation")
    }

    pub fn owners(&self) -> Vec<usize> {
        (0..self.items).map(|t| self.owner(t)).collect()
    }

    /// Canonical index; `None` if it overflows `u128`.
    pub fn canonical_index(&self) -> Option<u128> {
        let n = self.agents() as u128;
        let mut index: u128 = 0;
        for t in (0..self.items).rev() {
            index = index.checked_mul(n)?.checked_add(self.owner(t) as u128)?;
        }
        Some(index)
    }

    pub fn utilities<V: Valuation + ?Sized>(&self, val: &V) -> Vec<Rational> {
        self.bundles
            .iter()
            .enumerate()
            .map(|(a, &b)| val.utility(a, b))
            .collect()
    }

    /// Same allocation with every bundle written as item labels.
    pub fn to_labels(&self, inst: &Instance) -> Vec<Vec<String>> {
        self.bundles.iter().map(|&b| inst.bundle_labels(b)).collect()
    }

    pub fn display(&self, inst: &Instance) -> String {
        let parts: Vec<String> = self.bundles.iter().map(|&b| inst.format_bundle(b)).collect();
        format!("({})", parts.join(","))
    }
}

impl fmt::Debug for Allocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.bundles.iter()).finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ItemClass {
    Mixed,
    Good,
    PureGood,
    Bad,
    PureBad,
    Neutral,
}

impl ItemClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ItemClass::Mixed => "mixed",
            ItemClass::Good => "good",
            ItemClass::PureGood => "pure-good",
            ItemClass::Bad => "bad",
            ItemClass::PureBad => "pure-bad",
            ItemClass::Neutral => "neutral",
        }
    }

    /// Class of an item from the signs of all agents' (marginal) utilities.
    pub fn from_values(values: impl IntoIterator<Item = Rational>) -> ItemClass {
        let (mut pos, mut neg, mut zero) = (0usize, 0usize, 0usize);
        for v in values {
            match v.signum() {
                1 => pos += 1,
                -1 => neg += 1,
                _ => zero += 1,
            }
        }
        match (pos > 0, neg > 0, zero > 0) {
            (true, true, _) => ItemClass::Mixed,
            (true, false, false) => ItemClass::PureGood,
            (true, false, true) => ItemClass::Good,
            (false, true, false) => ItemClass::PureBad,
            (false, true, true) => ItemClass::Bad,
            (false, false, _) => ItemClass::Neutral,
        }
    }
}

impl fmt::Display for ItemClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemClass {
    WithMixedItems,
    WithoutMixedItems,
    /// Marginals of every item in every allocation are all strictly positive
    /// or all weakly negative. A refinement of `WithoutMixedItems`.
    PureGoodsAndBads,
}

impl ProblemClass {
    pub fn is_without_mixed_items(self) -> bool {
        !matches!(self, ProblemClass::WithMixedItems)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ProblemClass::WithMixedItems => "with-mixed-items",
            ProblemClass::WithoutMixedItems => "without-mixed-items",
            ProblemClass::PureGoodsAndBads => "pure-goods-and-bads",
        }
    }
}

impl fmt::Display for ProblemClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Cardinal class of an item under additive utilities.
pub fn classify_item_additive(inst: &Instance, item: usize) -> Result<ItemClass> {
    match inst.utilities() {
        UtilityModel::Additive { matrix } => {
            Ok(ItemClass::from_values(matrix.iter().map(|row| row[item])))
        }
        UtilityModel::General { .. } => Err(Error::GeneralModel),
    }
}

/// Sign of `agent`'s marginal utility for `item` on top of `bundle`, as
/// `PureGood`, `Neutral` or `PureBad`.
pub fn classify_marginal<V: Valuation + ?Sized>(
    val: &V,
    agent: usize,
    item: usize,
    bundle: Bundle,
) -> Result<ItemClass> {
    if bundle.contains(item) {
        return Err(Error::ItemInBundle {
            item: item.to_string(),
        });
    }
    Ok(match val.marginal(agent, item, bundle).signum() {
        1 => ItemClass::PureGood,
        -1 => ItemClass::PureBad,
        _ => ItemClass::Neutral,
    })
}

/// Class of `item` within an allocation: every agent's marginal for it,
/// relative to their bundle without the item.
pub fn classify_in_allocation<V: Valuation + ?Sized>(
    val: &V,
    alloc: &Allocation,
    item: usize,
) -> ItemClass {
    ItemClass::from_values(
        alloc
            .bundles()
            .iter()
            .enumerate()
            .map(|(a, &b)| val.marginal(a, item, b.without(item))),
    )
}

fn class_from_marginals(marginals: &[Rational], mixed: &mut bool, impure: &mut bool) {
    let pos = marginals.iter().any(Rational::is_positive);
    let neg = marginals.iter().any(Rational::is_negative);
    if pos && neg {
        *mixed = true;
    }
    let all_pos = marginals.iter().all(Rational::is_positive);
    let all_nonpos = marginals.iter().all(|v| !v.is_positive());
    if !(all_pos || all_nonpos) {
        *impure = true;
    }
}

/// Decides which problem class an instance belongs to.
///
/// Additive models read the utility columns. General models enumerate, for
/// every item, every way of distributing the other items, and inspect all
/// agents' marginals for the item in that allocation.
pub fn detect_problem_class(inst: &Instance, limits: &Limits) -> Result<ProblemClass> {
    let (mut mixed, mut impure) = (false, false);
    match inst.utilities() {
        UtilityModel::Additive { matrix } => {
            for t in 0..inst.items() {
                let column: Vec<Rational> = matrix.iter().map(|row| row[t]).collect();
                class_from_marginals(&column, &mut mixed, &mut impure);
            }
        }
        UtilityModel::General { .. } => {
            let n = inst.agents();
            let m = inst.items();
            limits.allocation_count(n, m)?;
            let val = inst.evaluator();
            let mut marginals = vec![Rational::ZERO; n];
            for t in 0..m {
                let others: Vec<usize> = (0..m).filter(|&o| o != t).collect();
                let total = checked_pow(n, others.len()).expect("within cap");
                for index in 0..total {
                    let mut bundles = vec![Bundle::EMPTY; n];
                    let mut rest = index;
                    for &o in &others {
                        let a = (rest % n as u128) as usize;
                        rest /= n as u128;
                        bundles[a] = bundles[a].with(o);
                    }
                    for (a, &b) in bundles.iter().enumerate() {
                        marginals[a] = val.marginal(a, t, b);
                    }
                    class_from_marginals(&marginals, &mut mixed, &mut impure);
                    if mixed {
                        return Ok(ProblemClass::WithMixedItems);
                    }
                }
            }
        }
    }
    Ok(if mixed {
        ProblemClass::WithMixedItems
    } else if impure {
        ProblemClass::WithoutMixedItems
    } else {
        ProblemClass::PureGoodsAndBads
    })
}

/// Scales every agent so that `u_a([m]) = target`.
///
/// Scale factors are strictly positive, so each agent's preferences over
/// bundles are unchanged.
pub fn normalise(inst: &Instance, target: Rational) -> Result<Instance> {
    let grand = inst.grand_bundle();
    let mut factors = Vec::with_capacity(inst.agents());
    for a in 0..inst.agents() {
        let total = inst.bundle_utility(a, grand);
        if total.is_zero() {
            return Err(Error::ZeroTotal { agent: a + 1 });
        }
        if total.signum() != target.signum() {
            return Err(Error::SignMismatch { agent: a + 1 });
        }
        factors.push(target / total);
    }
    Ok(inst.scaled(&factors))
}

/// [`normalise`] with target 1 when every total is positive and -1 when
/// every total is negative.
pub fn normalise_default(inst: &Instance) -> Result<Instance> {
    let grand = inst.grand_bundle();
    let first = inst.bundle_utility(0, grand);
    if first.is_zero() {
        return Err(Error::ZeroTotal { agent: 1 });
    }
    let target = if first.is_positive() {
        Rational::ONE
    } else {
        -Rational::ONE
    };
    normalise(inst, target)
}
