//! Enumeration of allocations in canonical index order.
//!
//! The canonical index of an allocation is the base-`n` number whose digit at
//! position `t` is the agent holding item `t` (item 0 is the least significant
//! digit). Parallel routines split the index range into fixed chunks and
//! reduce so that the answer never depends on the number of worker threads.

use std::ops::{ControlFlow, Range};

use rayon::prelude::*;

use crate::bundle::Bundle;
use crate::error::Result;
use crate::model::{Allocation, Instance, Limits};

const CHUNK: u128 = 1 << 12;

/// Walks `range` of canonical indices, handing each allocation's bundles to
/// `visit`. Stops early when `visit` breaks.
pub fn for_each_in_range<B>(
    agents: usize,
    items: usize,
    range: Range<u128>,
    mut visit: impl FnMut(u128, &[Bundle]) -> ControlFlow<B>,
) -> ControlFlow<B> {
    if range.is_empty() {
        return ControlFlow::Continue(());
    }
    let start = Allocation::from_index(agents, items, range.start);
    let mut owners = start.owners();
    let mut bundles = start.bundles().to_vec();
    let mut index = range.start;
    loop {
        visit(index, &bundles)?;
        index += 1;
        if index >= range.end {
            return ControlFlow::Continue(());
        }
        // Odometer step: item 0 is the fastest-moving digit.
        for (t, owner) in owners.iter_mut().enumerate() {
            bundles[*owner] = bundles[*owner].without(t);
            *owner += 1;
            if *owner == agents {
                *owner = 0;
                bundles[0] = bundles[0].with(t);
            } else {
                bundles[*owner] = bundles[*owner].with(t);
                break;
            }
        }
    }
}

fn chunks(total: u128) -> impl IndexedParallelIterator<Item = Range<u128>> {
    let count = total.div_ceil(CHUNK);
    let count = usize::try_from(count).expect("chunk count fits usize");
    (0..count).into_par_iter().map(move |c| {
        let start = c as u128 * CHUNK;
        start..(start + CHUNK).min(total)
    })
}

/// Smallest canonical index whose allocation satisfies `pred`.
pub fn par_find_first<F>(agents: usize, items: usize, total: u128, pred: F) -> Option<u128>
where
    F: Fn(&[Bundle]) -> bool + Sync,
{
    chunks(total).find_map_first(|range| {
        match for_each_in_range(agents, items, range, |i, b| {
            if pred(b) {
                ControlFlow::Break(i)
            } else {
                ControlFlow::Continue(())
            }
        }) {
            ControlFlow::Break(i) => Some(i),
            ControlFlow::Continue(()) => None,
        }
    })
}

/// Largest key over all allocations; ties go to the smallest index.
pub fn par_max_by_key<K, F>(agents: usize, items: usize, total: u128, key: F) -> (K, u128)
where
    K: Ord + Send,
    F: Fn(&[Bundle]) -> K + Sync,
{
    let better = |x: (K, u128), y: (K, u128)| -> (K, u128) {
        match x.0.cmp(&y.0) {
            std::cmp::Ordering::Greater => x,
            std::cmp::Ordering::Less => y,
            std::cmp::Ordering::Equal => {
                if x.1 <= y.1 {
                    x
                } else {
                    y
                }
            }
        }
    };
    chunks(total)
        .map(|range| {
            let mut best: Option<(K, u128)> = None;
            let _ = for_each_in_range::<()>(agents, items, range, |i, b| {
                let k = key(b);
                best = Some(match best.take() {
                    None => (k, i),
                    // Within a chunk indices ascend, so only a strict win replaces.
                    Some(cur) if k > cur.0 => (k, i),
                    Some(cur) => cur,
                });
                ControlFlow::Continue(())
            });
            best.expect("non-empty chunk")
        })
        .reduce_with(better)
        .expect("at least one allocation")
}

/// Every allocation of `inst` in ascending canonical index.
pub fn enumerate_allocations(inst: &Instance, limits: &Limits) -> Result<AllocationIter> {
    let total = limits.allocation_count(inst.agents(), inst.items())?;
    Ok(AllocationIter {
        agents: inst.agents(),
        items: inst.items(),
        next: 0,
        total,
    })
}

#[derive(Debug, Clone)]
pub struct AllocationIter {
    agents: usize,
    items: usize,
    next: u128,
    total: u128,
}

impl AllocationIter {
    pub fn total(&self) -> u128 {
        self.total
    }
}

impl Iterator for AllocationIter {
    type Item = Allocation;

    fn next(&mut self) -> Option<Allocation> {
        if self.next >= self.total {
            return None;
        }
        let alloc = Allocation::from_index(self.agents, self.items, self.next);
        self.next += 1;
        Some(alloc)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = usize::try_from(self.total - self.next).unwrap_or(usize::MAX);
        (left, Some(left))
    }
}
