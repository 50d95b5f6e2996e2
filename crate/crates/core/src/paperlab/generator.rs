//! Seeded random instances of a requested problem class.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{detect_problem_class, normalise_default, Instance, ItemClass, Limits, ProblemClass};
use crate::rational::Rational;

/// Samples drawn before giving up on a class.
pub const REJECTION_CAP: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenClass {
    Goods,
    Bads,
    Mixed,
    PureGoodsAndBads,
    GoodsAndBads,
}

impl GenClass {
    pub fn as_str(self) -> &'static str {
        match self {
            GenClass::Goods => "goods",
            GenClass::Bads => "bads",
            GenClass::Mixed => "mixed",
            GenClass::PureGoodsAndBads => "pure-goods-and-bads",
            GenClass::GoodsAndBads => "goods-and-bads",
        }
    }
}

impl fmt::Display for GenClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GenClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        [
            GenClass::Goods,
            GenClass::Bads,
            GenClass::Mixed,
            GenClass::PureGoodsAndBads,
            GenClass::GoodsAndBads,
        ]
        .into_iter()
        .find(|c| c.as_str() == s)
        .ok_or_else(|| Error::Parse(format!("unknown class `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GenModel {
    Additive,
    General,
}

impl FromStr for GenModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "additive" => Ok(GenModel::Additive),
            "general" => Ok(GenModel::General),
            _ => Err(Error::Parse(format!("unknown model `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenConfig {
    pub n: usize,
    pub m: usize,
    pub class: GenClass,
    /// Item utilities (and general-model synergies) lie in `[-max_abs, max_abs]`.
    pub max_abs: i64,
    pub normalise: bool,
    pub model: GenModel,
    pub seed: u64,
}

impl GenConfig {
    pub fn new(n: usize, m: usize, class: GenClass, seed: u64) -> Self {
        GenConfig {
            n,
            m,
            class,
            max_abs: 5,
            normalise: false,
            model: GenModel::Additive,
            seed,
        }
    }

    pub fn general(mut self) -> Self {
        self.model = GenModel::General;
        self
    }

    pub fn normalised(mut self) -> Self {
        self.normalise = true;
        self
    }
}

/// Sign kind of an item for one agent.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    PureGood,
    Good,
    Bad,
}

fn item_kinds(rng: &mut ChaCha8Rng, class: GenClass, n: usize) -> Vec<Kind> {
    let shared = |k: Kind| vec![k; n];
    match class {
        GenClass::Goods => shared(Kind::Good),
        GenClass::Bads => shared(Kind::Bad),
        GenClass::PureGoodsAndBads => shared(if rng.gen_bool(0.5) { Kind::PureGood } else { Kind::Bad }),
        GenClass::GoodsAndBads => shared(if rng.gen_bool(0.5) { Kind::Good } else { Kind::Bad }),
        GenClass::Mixed => (0..n)
            .map(|_| if rng.gen_bool(0.5) { Kind::Good } else { Kind::Bad })
            .collect(),
    }
}

fn weight(rng: &mut ChaCha8Rng, kind: Kind, max_abs: i64) -> i64 {
    match kind {
        Kind::PureGood => rng.gen_range(1..=max_abs.max(1)),
        Kind::Good => rng.gen_range(0..=max_abs),
        Kind::Bad => -rng.gen_range(0..=max_abs),
    }
}

/// Monotone non-decreasing, non-negative set function over `m` items that is
/// zero on bundles of size below 2.
fn synergy(rng: &mut ChaCha8Rng, m: usize, max_abs: i64) -> Vec<i64> {
    let size = 1usize << m;
    let mut s = vec![0i64; size];
    for mask in 0..size {
        let own = if mask.count_ones() >= 2 && rng.gen_bool(0.5) {
            rng.gen_range(0..=max_abs)
        } else {
            0
        };
        let below = (0..m)
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| s[mask & !(1 << i)])
            .max()
            .unwrap_or(0);
        s[mask] = own.max(below);
    }
    s
}

fn sample(rng: &mut ChaCha8Rng, cfg: &GenConfig) -> Result<Instance> {
    let (n, m) = (cfg.n, cfg.m);
    // kinds[o][a]
    let kinds: Vec<Vec<Kind>> = (0..m).map(|_| item_kinds(rng, cfg.class, n)).collect();
    let labels: Vec<String> = (0..m).map(|o| format!("o{}", o + 1)).collect();
    match cfg.model {
        GenModel::Additive => {
            let rows = (0..n)
                .map(|a| {
                    (0..m)
                        .map(|o| Rational::from(weight(rng, kinds[o][a], cfg.max_abs)))
                        .collect()
                })
                .collect();
            Instance::additive(labels, rows)
        }
        GenModel::General => {
            // u_a(S) = additive part + synergy(S ∩ goods) − synergy(S ∩ bads).
            // Each part is monotone in the item's direction, so goods stay
            // goods and bads stay bads in every context.
            let mut tables = Vec::with_capacity(n);
            for a in 0..n {
                let w: Vec<i64> = (0..m).map(|o| weight(rng, kinds[o][a], cfg.max_abs)).collect();
                let goods: usize = (0..m).filter(|&o| kinds[o][a] != Kind::Bad).map(|o| 1 << o).sum();
                let plus = synergy(rng, m, cfg.max_abs);
                let minus = synergy(rng, m, cfg.max_abs);
                let table = (0..1usize << m)
                    .map(|mask| {
                        let base: i64 = (0..m).filter(|&o| mask >> o & 1 == 1).map(|o| w[o]).sum();
                        Rational::from(base + plus[mask & goods] - minus[mask & !goods])
                    })
                    .collect();
                tables.push(table);
            }
            Instance::general(labels, tables)
        }
    }
}

fn conforms(inst: &Instance, class: GenClass, limits: &Limits) -> Result<bool> {
    let detected = detect_problem_class(inst, limits)?;
    Ok(match class {
        GenClass::Mixed => detected == ProblemClass::WithMixedItems,
        GenClass::PureGoodsAndBads => detected == ProblemClass::PureGoodsAndBads,
        GenClass::GoodsAndBads => detected.is_without_mixed_items(),
        GenClass::Goods | GenClass::Bads => {
            let want_good = class == GenClass::Goods;
            detected.is_without_mixed_items()
                && match inst.utilities() {
                    crate::model::UtilityModel::Additive { .. } => (0..inst.items()).all(|o| {
                        let c = crate::model::classify_item_additive(inst, o).expect("additive");
                        if want_good {
                            matches!(c, ItemClass::Good | ItemClass::PureGood)
                        } else {
                            matches!(c, ItemClass::Bad | ItemClass::PureBad)
                        }
                    }),
                    // The construction fixes every item's direction.
                    crate::model::UtilityModel::General { .. } => true,
                }
        }
    })
}

/// Deterministic for a fixed config. Samples until the instance belongs to
/// the requested class (and normalises, if asked, without a zero or
/// sign-mismatched total).
pub fn gen_random_instance(cfg: &GenConfig) -> Result<Instance> {
    if cfg.n < 2 || cfg.m < 1 || cfg.max_abs < 1 {
        return Err(Error::BadParameters("need n ≥ 2, m ≥ 1 and max_abs ≥ 1".into()));
    }
    if cfg.model == GenModel::General && cfg.m > 8 {
        return Err(Error::BadParameters("general instances are limited to 8 items".into()));
    }
    let limits = Limits::default();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..REJECTION_CAP {
        let inst = sample(&mut rng, cfg)?;
        if !conforms(&inst, cfg.class, &limits)? {
            continue;
        }
        if !cfg.normalise {
            return Ok(inst);
        }
        if let Ok(norm) = normalise_default(&inst) {
            return Ok(norm);
        }
    }
    Err(Error::RejectionCapExceeded { attempts: REJECTION_CAP })
}
