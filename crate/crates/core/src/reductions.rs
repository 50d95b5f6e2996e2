//! Reductions from exact cover by 3-sets (X3C) to the existence of a JF1
//! allocation (mixed manna) and of a JF1 and PO allocation (0/1 goods).

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::bundle::Bundle;
use crate::error::{Error, Result};
use crate::model::{Allocation, Instance};
use crate::rational::Rational;

/// Largest number of q-subsets the brute-force X3C solver will try.
pub const X3C_SUBSET_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct X3cInstance {
    pub q: usize,
    pub ground_set: Vec<String>,
    pub collection: Vec<[String; 3]>,
}

impl X3cInstance {
    pub fn new<S: Into<String>>(
        q: usize,
        ground_set: impl IntoIterator<Item = S>,
        collection: impl IntoIterator<Item = [S; 3]>,
    ) -> Result<Self> {
        let x = X3cInstance {
            q,
            ground_set: ground_set.into_iter().map(Into::into).collect(),
            collection: collection.into_iter().map(|s| s.map(Into::into)).collect(),
        };
        x.validate()?;
        Ok(x)
    }

    /// Ground set `1..=3q` and sets given by element numbers.
    pub fn numbered(q: usize, collection: &[[usize; 3]]) -> Result<Self> {
        Self::new(
            q,
            (1..=3 * q).map(|i| i.to_string()),
            collection.iter().map(|s| s.map(|i| i.to_string())),
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let x: X3cInstance = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        x.validate()?;
        Ok(x)
    }

    pub fn validate(&self) -> Result<()> {
        if self.ground_set.len() != 3 * self.q {
            return Err(Error::BadParameters(format!(
                "ground set has {} elements, expected 3q = {}",
                self.ground_set.len(),
                3 * self.q
            )));
        }
        if self.ground_set.len() > 128 {
            return Err(Error::BadParameters("ground set larger than 128 elements".into()));
        }
        let unique: HashSet<&String> = self.ground_set.iter().collect();
        if unique.len() != self.ground_set.len() {
            return Err(Error::BadParameters("ground set labels repeat".into()));
        }
        for set in &self.collection {
            let mask = self.set_mask(set)?;
            if mask.count_ones() != 3 {
                return Err(Error::BadParameters(format!("{set:?} is not a 3-set")));
            }
        }
        Ok(())
    }

    /// `Q`, the number of 3-sets.
    pub fn size(&self) -> usize {
        self.collection.len()
    }

    fn element(&self, label: &str) -> Result<usize> {
        self.ground_set
            .iter()
            .position(|e| e == label)
            .ok_or_else(|| Error::BadParameters(format!("`{label}` is not in the ground set")))
    }

    fn set_mask(&self, set: &[String; 3]) -> Result<u128> {
        set.iter().try_fold(0u128, |acc, e| Ok(acc | (1u128 << self.element(e)?)))
    }

    fn masks(&self) -> Vec<u128> {
        self.collection
            .iter()
            .map(|s| self.set_mask(s).expect("validated"))
            .collect()
    }

    /// Whether `cover` (collection indices) partitions the ground set.
    pub fn is_exact_cover(&self, cover: &[usize]) -> bool {
        if cover.len() != self.q || cover.iter().any(|&i| i >= self.size()) {
            return false;
        }
        let masks = self.masks();
        let mut seen = 0u128;
        for &i in cover {
            if seen & masks[i] != 0 {
                return false;
            }
            seen |= masks[i];
        }
        seen.count_ones() as usize == self.ground_set.len()
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// First exact cover in lexicographic order of q-subsets of the
/// collection, as sorted collection indices.
pub fn x3c_solve_bruteforce(x3c: &X3cInstance) -> Result<Option<Vec<usize>>> {
    let (q, big_q) = (x3c.q, x3c.size());
    let count = binomial(big_q, q);
    if count > X3C_SUBSET_CAP {
        return Err(Error::TooLarge {
            required: format!("C({big_q},{q}) = {count} subsets"),
            cap: X3C_SUBSET_CAP,
        });
    }
    if q > big_q {
        return Ok(None);
    }
    let masks = x3c.masks();
    let full = if x3c.ground_set.len() == 128 {
        u128::MAX
    } else {
        (1u128 << x3c.ground_set.len()) - 1
    };
    let mut pick: Vec<usize> = (0..q).collect();
    loop {
        let mut seen = 0u128;
        let disjoint = pick.iter().all(|&i| {
            let ok = seen & masks[i] == 0;
            seen |= masks[i];
            ok
        });
        if disjoint && seen == full {
            return Ok(Some(pick));
        }
        // Next combination in lexicographic order.
        let Some(pos) = (0..q).rev().find(|&p| pick[p] < big_q - q + p) else {
            return Ok(None);
        };
        pick[pos] += 1;
        for p in pos + 1..q {
            pick[p] = pick[p - 1] + 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "lowercase")]
pub enum ItemRole {
    X { element: String },
    Y { triple: usize, copy: usize },
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReductionVariant {
    /// Mixed manna, Q+1 agents.
    Jf1,
    /// 0/1 goods, Q agents.
    Jf1PoBinary,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReducedInstance {
    pub instance: Instance,
    pub item_roles: BTreeMap<String, ItemRole>,
    #[serde(rename = "M")]
    pub m_value: Rational,
    pub variant: ReductionVariant,
    #[serde(skip)]
    pub x3c: X3cInstance,
}

fn check_parameters(x3c: &X3cInstance) -> Result<()> {
    x3c.validate()?;
    if x3c.q < 2 {
        return Err(Error::BadParameters(format!("q = {} but q ≥ 2 is required", x3c.q)));
    }
    if x3c.size() <= 3 * x3c.q {
        return Err(Error::BadParameters(format!(
            "Q = {} but Q > 3q = {} is required",
            x3c.size(),
            3 * x3c.q
        )));
    }
    Ok(())
}

/// Smallest `M` the mixed-manna construction allows: `3Q − 3q + 7`.
pub fn minimum_m(x3c: &X3cInstance) -> i64 {
    3 * x3c.size() as i64 - 3 * x3c.q as i64 + 7
}

fn y_label(triple: usize, copy: usize) -> String {
    format!("y{triple}_{copy}")
}

/// Mixed-manna construction. `m_override` defaults to [`minimum_m`].
pub fn reduce_x3c_jf1(x3c: &X3cInstance, m_override: Option<i64>) -> Result<ReducedInstance> {
    check_parameters(x3c)?;
    let floor = minimum_m(x3c);
    let m_value = m_override.unwrap_or(floor);
    if m_value < floor {
        return Err(Error::BadParameters(format!("M = {m_value} is below 3Q − 3q + 7 = {floor}")));
    }
    build(x3c, ReductionVariant::Jf1, m_value)
}

/// 0/1-goods construction.
pub fn reduce_x3c_jf1po_binary(x3c: &X3cInstance) -> Result<ReducedInstance> {
    check_parameters(x3c)?;
    build(x3c, ReductionVariant::Jf1PoBinary, 0)
}

/// The construction without the `q`/`Q` guards, for small-scale checks.
pub(crate) fn build(x3c: &X3cInstance, variant: ReductionVariant, m_value: i64) -> Result<ReducedInstance> {
    let (q, big_q) = (x3c.q, x3c.size());
    let mixed = variant == ReductionVariant::Jf1;
    let triples = if mixed { big_q - q + 1 } else { big_q - q };
    let agents = if mixed { big_q + 1 } else { big_q };
    let m = Rational::from(m_value);

    let mut labels = Vec::new();
    let mut roles = BTreeMap::new();
    for (i, e) in x3c.ground_set.iter().enumerate() {
        let label = format!("x{}", i + 1);
        roles.insert(label.clone(), ItemRole::X { element: e.clone() });
        labels.push(label);
    }
    for k in 1..=triples {
        for j in 1..=3 {
            let label = y_label(k, j);
            roles.insert(label.clone(), ItemRole::Y { triple: k, copy: j });
            labels.push(label);
        }
    }
    if mixed {
        labels.push("z".into());
        roles.insert("z".into(), ItemRole::Z);
    }

    let masks = x3c.masks();
    let mut matrix = Vec::with_capacity(agents);
    for a in 0..big_q {
        let mut row: Vec<Rational> = (0..3 * q)
            .map(|i| if masks[a] >> i & 1 == 1 { Rational::ONE } else { -m })
            .collect();
        row.extend(std::iter::repeat_n(Rational::ONE, 3 * triples));
        if mixed {
            row.push(Rational::ZERO);
        }
        matrix.push(row);
    }
    if mixed {
        let mut row = vec![Rational::ZERO; 3 * q];
        row.extend(std::iter::repeat_n(Rational::ONE, 3 * triples));
        row.push(-(Rational::from(3 * q as i64 - 3) * m) + Rational::from(3));
        matrix.push(row);
    }
    Ok(ReducedInstance {
        instance: Instance::additive(labels, matrix)?,
        item_roles: roles,
        m_value: m,
        variant,
        x3c: x3c.clone(),
    })
}

/// Cover agents get their 3-sets (the first also gets `z`); the others
/// get the y-triples in order.
pub fn cover_to_allocation(red: &ReducedInstance, cover: &[usize]) -> Result<Allocation> {
    let x3c = &red.x3c;
    if !x3c.is_exact_cover(cover) {
        return Err(Error::InvalidCover(format!("{cover:?} is not an exact cover")));
    }
    let mut cover: Vec<usize> = cover.to_vec();
    cover.sort_unstable();
    let inst = &red.instance;
    let mut bundles = vec![Bundle::EMPTY; inst.agents()];
    let masks = x3c.masks();
    for &a in &cover {
        bundles[a] = Bundle::from_mask(masks[a] as u64);
    }
    if red.variant == ReductionVariant::Jf1 {
        let z = inst.item_index("z").expect("z present");
        bundles[cover[0]] = bundles[cover[0]].with(z);
    }
    let covered: HashSet<usize> = cover.iter().copied().collect();
    let rest = (0..inst.agents()).filter(|a| !covered.contains(a));
    for (k, a) in rest.enumerate() {
        for j in 1..=3 {
            let y = inst.item_index(&y_label(k + 1, j)).expect("y present");
            bundles[a] = bundles[a].with(y);
        }
    }
    Allocation::for_instance(inst, bundles)
}

/// The cover induced by an allocation in which every agent has utility 3
/// and every agent holding x-items holds exactly its own 3-set.
pub fn allocation_to_cover(red: &ReducedInstance, alloc: &Allocation) -> Option<Vec<usize>> {
    let inst = &red.instance;
    let three = Rational::from(3);
    if alloc.utilities(inst).iter().any(|u| *u != three) {
        return None;
    }
    let x_mask = Bundle::full(3 * red.x3c.q);
    let masks = red.x3c.masks();
    let mut cover = Vec::new();
    for a in 0..alloc.agents() {
        let xs = alloc.bundle(a).intersection(x_mask);
        if xs.is_empty() {
            continue;
        }
        if a >= red.x3c.size() || xs.mask() as u128 != masks[a] {
            return None;
        }
        cover.push(a);
    }
    red.x3c.is_exact_cover(&cover).then_some(cover)
}
