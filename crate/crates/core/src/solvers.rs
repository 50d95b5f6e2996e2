//! Exhaustive leximin and leximin++ solvers, the greedy algorithm for the
//! weak one-item jealousy-freeness relaxation, existence search, and the
//! one-item-per-agent assignment.
//!
//! Every co-optimal choice resolves to the smallest canonical index.

use std::cmp::Ordering;
use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::axioms::{satisfies_ef, satisfies_equitable, satisfies_jf, PropertyVariant};
use crate::bundle::Bundle;
use crate::enumerate::{for_each_in_range, par_find_first, par_max_by_key};
use crate::error::{Error, Result};
use crate::model::{Allocation, Instance, Limits, UtilityModel, Valuation};
use crate::rational::Rational;

/// Agents' `(utility, bundle size)` pairs sorted ascending.
///
/// `Ord` is the leximin++ order. [`LexKey::leximin_cmp`] looks at utilities
/// only.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LexKey(pub Vec<(Rational, usize)>);

impl LexKey {
    pub fn of<V: Valuation + ?Sized>(val: &V, bundles: &[Bundle]) -> LexKey {
        let mut pairs: Vec<_> = bundles
            .iter()
            .enumerate()
            .map(|(a, &b)| (val.utility(a, b), b.len()))
            .collect();
        pairs.sort_unstable();
        LexKey(pairs)
    }

    pub fn utilities(&self) -> Vec<Rational> {
        self.0.iter().map(|p| p.0).collect()
    }

    pub fn leximin_cmp(&self, other: &LexKey) -> Ordering {
        self.0.iter().map(|p| p.0).cmp(other.0.iter().map(|p| p.0))
    }
}

impl Serialize for LexKey {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(|(u, size)| (u, size)))
    }
}

/// Agents' utilities sorted ascending.
pub fn sorted_utilities<V: Valuation + ?Sized>(val: &V, bundles: &[Bundle]) -> Vec<Rational> {
    let mut u: Vec<_> = bundles.iter().enumerate().map(|(a, &b)| val.utility(a, b)).collect();
    u.sort_unstable();
    u
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchReport {
    #[serde(skip)]
    pub found: Option<Allocation>,
    pub explored: u128,
    pub properties: Vec<PropertyVariant>,
    pub exhaustive: bool,
}

/// Leximin optimum over every allocation.
pub fn solve_leximin(inst: &Instance, limits: &Limits) -> Result<Allocation> {
    let total = limits.allocation_count(inst.agents(), inst.items())?;
    Ok(leximin_with(&inst.evaluator(), total))
}

/// Leximin++ optimum over every allocation.
pub fn solve_leximin_pp(inst: &Instance, limits: &Limits) -> Result<Allocation> {
    let total = limits.allocation_count(inst.agents(), inst.items())?;
    Ok(leximin_pp_with(&inst.evaluator(), total))
}

pub(crate) fn leximin_with<V: Valuation + ?Sized>(val: &V, total: u128) -> Allocation {
    let (n, m) = (val.num_agents(), val.num_items());
    let (_, index) = par_max_by_key(n, m, total, |b| sorted_utilities(val, b));
    Allocation::from_index(n, m, index)
}

pub(crate) fn leximin_pp_with<V: Valuation + ?Sized>(val: &V, total: u128) -> Allocation {
    let (n, m) = (val.num_agents(), val.num_items());
    let (_, index) = par_max_by_key(n, m, total, |b| LexKey::of(val, b));
    Allocation::from_index(n, m, index)
}

/// Distinct utility vectors not Pareto-dominated by any allocation.
pub fn pareto_frontier<V: Valuation + ?Sized>(val: &V, limits: &Limits) -> Result<Vec<Vec<Rational>>> {
    let (n, m) = (val.num_agents(), val.num_items());
    let total = limits.allocation_count(n, m)?;
    Ok(frontier_with(val, total))
}

fn insert_frontier(front: &mut Vec<Vec<Rational>>, u: Vec<Rational>) {
    if front.iter().any(|f| f == &u || pareto_improves_vec(f, &u)) {
        return;
    }
    front.retain(|f| !pareto_improves_vec(&u, f));
    front.push(u);
}

fn pareto_improves_vec(better: &[Rational], base: &[Rational]) -> bool {
    better.iter().zip(base).all(|(x, y)| x >= y) && better.iter().zip(base).any(|(x, y)| x > y)
}

fn frontier_with<V: Valuation + ?Sized>(val: &V, total: u128) -> Vec<Vec<Rational>> {
    let (n, m) = (val.num_agents(), val.num_items());
    let chunk = 1u128 << 12;
    let count = usize::try_from(total.div_ceil(chunk)).expect("chunk count fits usize");
    let mut front = (0..count)
        .into_par_iter()
        .map(|c| {
            let start = c as u128 * chunk;
            let mut local = Vec::new();
            let _ = for_each_in_range::<()>(n, m, start..(start + chunk).min(total), |_, b| {
                let u: Vec<Rational> = b.iter().enumerate().map(|(a, &x)| val.utility(a, x)).collect();
                insert_frontier(&mut local, u);
                std::ops::ControlFlow::Continue(())
            });
            local
        })
        .reduce(Vec::new, |mut acc, other| {
            for u in other {
                insert_frontier(&mut acc, u);
            }
            acc
        });
    front.sort();
    front
}

fn satisfies_all<V: Valuation + ?Sized>(
    val: &V,
    bundles: &[Bundle],
    props: &[PropertyVariant],
    frontier: Option<&HashSet<Vec<Rational>>>,
) -> bool {
    props.iter().all(|&p| {
        if let Some(v) = p.jf() {
            return satisfies_jf(val, bundles, v);
        }
        if let Some(v) = p.ef() {
            return satisfies_ef(val, bundles, v);
        }
        match p {
            PropertyVariant::Equitable => satisfies_equitable(val, bundles),
            PropertyVariant::Po => {
                let u: Vec<Rational> =
                    bundles.iter().enumerate().map(|(a, &b)| val.utility(a, b)).collect();
                frontier.expect("frontier computed").contains(&u)
            }
            _ => unreachable!(),
        }
    })
}

/// First allocation, by canonical index, satisfying every property in
/// `required`.
pub fn exists_allocation(
    inst: &Instance,
    required: &[PropertyVariant],
    limits: &Limits,
) -> Result<SearchReport> {
    let total = limits.allocation_count(inst.agents(), inst.items())?;
    Ok(exists_with(&inst.evaluator(), required, total))
}

pub(crate) fn exists_with<V: Valuation + ?Sized>(
    val: &V,
    required: &[PropertyVariant],
    total: u128,
) -> SearchReport {
    let (n, m) = (val.num_agents(), val.num_items());
    let mut props = required.to_vec();
    props.sort();
    props.dedup();
    // PO is decided against the frontier, which is checked last.
    let frontier: Option<HashSet<Vec<Rational>>> = props
        .contains(&PropertyVariant::Po)
        .then(|| frontier_with(val, total).into_iter().collect());
    let hit = par_find_first(n, m, total, |b| satisfies_all(val, b, &props, frontier.as_ref()));
    match hit {
        Some(i) => SearchReport {
            found: Some(Allocation::from_index(n, m, i)),
            explored: i + 1,
            properties: props,
            exhaustive: false,
        },
        None => SearchReport {
            found: None,
            explored: total,
            properties: props,
            exhaustive: true,
        },
    }
}

/// Whether `alloc` is Pareto-dominated by nothing, using a precomputed
/// frontier.
pub fn on_frontier<V: Valuation + ?Sized>(val: &V, alloc: &Allocation, frontier: &[Vec<Rational>]) -> bool {
    let u = alloc.utilities(val);
    !frontier.iter().any(|f| pareto_improves_vec(f, &u))
}

/// Runs the greedy algorithm one item at a time, in item order.
///
/// Deciding item `t` only looks at bundles made of items `0..=t`.
pub struct Greedy<'a, V: Valuation + ?Sized> {
    val: &'a V,
    bundles: Vec<Bundle>,
    next: usize,
}

impl<'a, V: Valuation + ?Sized> Greedy<'a, V> {
    pub fn new(val: &'a V) -> Self {
        Greedy {
            val,
            bundles: vec![Bundle::EMPTY; val.num_agents()],
            next: 0,
        }
    }

    pub fn bundles(&self) -> &[Bundle] {
        &self.bundles
    }

    pub fn is_done(&self) -> bool {
        self.next == self.val.num_items()
    }

    /// Allocates the next item and returns the receiving agent.
    /// On failure the error's `item` is the item index.
    pub fn step(&mut self) -> Result<usize> {
        let t = self.next;
        assert!(t < self.val.num_items(), "every item already allocated");
        let n = self.bundles.len();
        let val = self.val;
        let marginals: Vec<Rational> = (0..n).map(|b| val.marginal(b, t, self.bundles[b])).collect();
        let agent = if marginals.iter().all(Rational::is_positive) {
            argmin(n, |b| val.utility(b, self.bundles[b]))
        } else if marginals.iter().all(Rational::is_negative) {
            argmax(n, |b| val.utility(b, self.bundles[b].with(t)))
        } else if let Some(b) = marginals.iter().position(Rational::is_zero) {
            b
        } else {
            return Err(Error::MixedItemEncountered {
                round: t + 1,
                item: t.to_string(),
            });
        };
        self.bundles[agent] = self.bundles[agent].with(t);
        self.next += 1;
        Ok(agent)
    }
}

fn argmin(n: usize, f: impl Fn(usize) -> Rational) -> usize {
    let mut best = 0;
    let mut value = f(0);
    for b in 1..n {
        let v = f(b);
        if v < value {
            best = b;
            value = v;
        }
    }
    best
}

fn argmax(n: usize, f: impl Fn(usize) -> Rational) -> usize {
    let mut best = 0;
    let mut value = f(0);
    for b in 1..n {
        let v = f(b);
        if v > value {
            best = b;
            value = v;
        }
    }
    best
}

/// Greedy allocation plus the partial allocation after every round.
pub fn jf1zero_greedy_trace<V: Valuation + ?Sized>(val: &V) -> Result<Vec<Vec<Bundle>>> {
    let mut run = Greedy::new(val);
    let mut trace = Vec::with_capacity(val.num_items());
    while !run.is_done() {
        run.step()?;
        trace.push(run.bundles().to_vec());
    }
    Ok(trace)
}

pub fn jf1zero_greedy(inst: &Instance) -> Result<Allocation> {
    let mut run = Greedy::new(inst);
    while !run.is_done() {
        run.step().map_err(|e| match e {
            Error::MixedItemEncountered { round, .. } => Error::MixedItemEncountered {
                round,
                item: inst.label(round - 1).to_string(),
            },
            other => other,
        })?;
    }
    Allocation::for_instance(inst, run.bundles().to_vec())
}

/// Gives every item to a distinct agent, maximising the utility sum.
pub fn assign_one_each(inst: &Instance) -> Result<Allocation> {
    let UtilityModel::Additive { matrix } = inst.utilities() else {
        return Err(Error::GeneralModel);
    };
    let (n, m) = (inst.agents(), inst.items());
    if m > n {
        return Err(Error::TooManyItems { items: m, agents: n });
    }
    let weight = |o: usize, a: usize| matrix[a][o];
    let items: Vec<usize> = (0..m).collect();
    let agents: Vec<usize> = (0..n).collect();
    let optimum = max_assignment(&items, &agents, &weight);

    // Fix owners from the most significant digit down, each time taking the
    // lowest agent that keeps the optimum reachable.
    let mut owners = vec![usize::MAX; m];
    let mut free: Vec<usize> = agents;
    let mut fixed = Rational::ZERO;
    for t in (0..m).rev() {
        let rest: Vec<usize> = (0..t).collect();
        let pick = free
            .iter()
            .position(|&a| {
                let others: Vec<usize> = free.iter().copied().filter(|&x| x != a).collect();
                fixed + weight(t, a) + max_assignment(&rest, &others, &weight) == optimum
            })
            .expect("optimum is reachable");
        let a = free.remove(pick);
        fixed += weight(t, a);
        owners[t] = a;
    }
    Allocation::from_owners(n, &owners)
}

/// Maximum total weight of an injective map `rows → cols`
/// (`rows.len() ≤ cols.len()`), by the Hungarian method on exact rationals.
fn max_assignment(rows: &[usize], cols: &[usize], weight: &impl Fn(usize, usize) -> Rational) -> Rational {
    let (r, c) = (rows.len(), cols.len());
    debug_assert!(r <= c);
    if r == 0 {
        return Rational::ZERO;
    }
    // Minimise cost = -weight; 1-based with a virtual column 0.
    let cost = |i: usize, j: usize| -weight(rows[i - 1], cols[j - 1]);
    let mut u = vec![Rational::ZERO; r + 1];
    let mut v = vec![Rational::ZERO; c + 1];
    let mut p = vec![0usize; c + 1];
    let mut way = vec![0usize; c + 1];
    for i in 1..=r {
        p[0] = i;
        let mut j0 = 0;
        let mut minv: Vec<Option<Rational>> = vec![None; c + 1];
        let mut used = vec![false; c + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta: Option<Rational> = None;
            let mut j1 = 0;
            for j in 1..=c {
                if used[j] {
                    continue;
                }
                let cur = cost(i0, j) - u[i0] - v[j];
                if minv[j].is_none_or(|m| cur < m) {
                    minv[j] = Some(cur);
                    way[j] = j0;
                }
                if delta.is_none_or(|d| minv[j].unwrap() < d) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            let delta = delta.expect("a free column remains");
            for j in 0..=c {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else if let Some(m) = minv[j].as_mut() {
                    *m -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    (1..=c)
        .filter(|&j| p[j] != 0)
        .map(|j| weight(rows[p[j] - 1], cols[j - 1]))
        .sum()
}
