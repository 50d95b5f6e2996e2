//! Seeded randomized checks of the published results and of the implication
//! chains.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::axioms::{satisfies_ef, satisfies_jf, EfVariant, JfVariant};
use crate::model::{checked_pow, Allocation, Instance, Limits};
use crate::paperlab::audit::{chain_links, ChainLink, EF_CHAIN, JF_CHAIN};
use crate::paperlab::generator::{gen_random_instance, GenClass, GenConfig};
use crate::solvers::{jf1zero_greedy_trace, leximin_pp_with, leximin_with, on_frontier, pareto_frontier};

pub const DEFAULT_INSTANCES: usize = 200;

/// Random allocations drawn per instance by the chain suite.
pub const ALLOCATIONS_PER_INSTANCE: usize = 25;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub instances: usize,
    pub checks: usize,
    pub failures: usize,
    /// Description of the first failing case, by seed.
    pub first_failure: Option<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Theorem {
    /// Leximin is PO (any manna, general utilities).
    Remark1,
    /// Leximin++ is JFX without mixed items (general utilities).
    Theorem3,
    /// The greedy output and every prefix are JF1₀ without mixed items.
    Theorem5,
    /// Two agents, normalised additive: leximin is EFX and PO.
    Theorem6,
    /// Two agents, normalised additive, no mixed items: leximin++ is JFX and EFX.
    Theorem7,
    /// Pure goods and bads (general utilities): leximin is JFX and PO.
    Corollary1,
    /// Two agents, normalised additive, pure goods and bads: leximin is
    /// JFX, EFX and PO.
    Corollary2,
}

impl Theorem {
    pub const ALL: [Theorem; 7] = [
        Theorem::Remark1,
        Theorem::Theorem3,
        Theorem::Theorem5,
        Theorem::Theorem6,
        Theorem::Theorem7,
        Theorem::Corollary1,
        Theorem::Corollary2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Theorem::Remark1 => "remark1",
            Theorem::Theorem3 => "theorem3",
            Theorem::Theorem5 => "theorem5",
            Theorem::Theorem6 => "theorem6",
            Theorem::Theorem7 => "theorem7",
            Theorem::Corollary1 => "corollary1",
            Theorem::Corollary2 => "corollary2",
        }
    }

    fn seed_base(self) -> u64 {
        (self as u64 + 1) * 1_000_003
    }

    /// The `i`-th instance drawn for this theorem: additive with `n ≤ 3`,
    /// `m ≤ 7`, or general with `n = 2`, `m ≤ 4`.
    pub fn config(self, i: usize) -> GenConfig {
        let seed = self.seed_base() + i as u64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let general_allowed = matches!(
            self,
            Theorem::Remark1 | Theorem::Theorem3 | Theorem::Theorem5 | Theorem::Corollary1
        );
        let two_agents = matches!(self, Theorem::Theorem6 | Theorem::Theorem7 | Theorem::Corollary2);
        let general = general_allowed && i % 2 == 1;
        let class = match self {
            Theorem::Remark1 | Theorem::Theorem6 => [
                GenClass::Mixed,
                GenClass::GoodsAndBads,
                GenClass::Goods,
                GenClass::Bads,
            ][i / 2 % 4],
            Theorem::Theorem3 | Theorem::Theorem5 | Theorem::Theorem7 => {
                [GenClass::GoodsAndBads, GenClass::PureGoodsAndBads, GenClass::Goods, GenClass::Bads][i / 2 % 4]
            }
            Theorem::Corollary1 | Theorem::Corollary2 => GenClass::PureGoodsAndBads,
        };
        let (n, m) = if general {
            (2, rng.gen_range(1..=4))
        } else if two_agents {
            // A lone mixed item cannot be normalised: the two totals differ in sign.
            let low = if class == GenClass::Mixed { 2 } else { 1 };
            (2, rng.gen_range(low..=7))
        } else {
            let n = rng.gen_range(2..=3);
            (n, rng.gen_range(1..=if n == 2 { 7 } else { 6 }))
        };
        let mut cfg = GenConfig::new(n, m, class, seed);
        if general {
            cfg = cfg.general();
        }
        if two_agents {
            cfg = cfg.normalised();
        }
        cfg
    }
}

fn describe(inst: &Instance, alloc: &Allocation, what: &str) -> String {
    format!(
        "{what}: allocation {} on {}",
        alloc.display(inst),
        serde_json::to_string(inst).expect("instance serializes")
    )
}

/// `None` when the theorem's conclusion holds on this instance.
fn check_one(theorem: Theorem, inst: &Instance, limits: &Limits) -> Option<String> {
    let val = inst.evaluator();
    let total = checked_pow(inst.agents(), inst.items()).expect("small instance");
    let po = |a: &Allocation| {
        let front = pareto_frontier(&val, limits).expect("within cap");
        on_frontier(&val, a, &front)
    };
    let jfx = |a: &Allocation| satisfies_jf(&val, a.bundles(), JfVariant::Jfx);
    let efx = |a: &Allocation| satisfies_ef(&val, a.bundles(), EfVariant::Efx);
    let fail = |a: &Allocation, what: &str| Some(describe(inst, a, what));
    match theorem {
        Theorem::Remark1 => {
            let a = leximin_with(&val, total);
            (!po(&a)).then(|| describe(inst, &a, "leximin not PO"))
        }
        Theorem::Theorem3 => {
            let a = leximin_pp_with(&val, total);
            if !jfx(&a) {
                return fail(&a, "leximin++ not JFX");
            }
            None
        }
        Theorem::Theorem5 => match jf1zero_greedy_trace(&val) {
            Err(e) => Some(format!("greedy failed: {e} on {}", serde_json::to_string(inst).unwrap())),
            Ok(trace) => trace.iter().enumerate().find_map(|(t, bundles)| {
                (!satisfies_jf(&val, bundles, JfVariant::Jf1Zero)).then(|| {
                    format!(
                        "greedy prefix after round {} not JF1_0: {:?} on {}",
                        t + 1,
                        bundles,
                        serde_json::to_string(inst).unwrap()
                    )
                })
            }),
        },
        Theorem::Theorem6 => {
            let a = leximin_with(&val, total);
            if !efx(&a) {
                return fail(&a, "leximin not EFX");
            }
            if !po(&a) {
                return fail(&a, "leximin not PO");
            }
            None
        }
        Theorem::Theorem7 => {
            let a = leximin_pp_with(&val, total);
            if !jfx(&a) {
                return fail(&a, "leximin++ not JFX");
            }
            if !efx(&a) {
                return fail(&a, "leximin++ not EFX");
            }
            None
        }
        Theorem::Corollary1 | Theorem::Corollary2 => {
            let a = leximin_with(&val, total);
            if !jfx(&a) {
                return fail(&a, "leximin not JFX");
            }
            if theorem == Theorem::Corollary2 && !efx(&a) {
                return fail(&a, "leximin not EFX");
            }
            if !po(&a) {
                return fail(&a, "leximin not PO");
            }
            None
        }
    }
}

/// Runs `instances` seeded draws for one theorem.
pub fn run_theorem_suite(theorem: Theorem, instances: usize) -> SuiteReport {
    let limits = Limits::default();
    let outcomes: Vec<Option<String>> = (0..instances)
        .into_par_iter()
        .map(|i| {
            let cfg = theorem.config(i);
            match gen_random_instance(&cfg) {
                Ok(inst) => check_one(theorem, &inst, &limits),
                Err(e) => Some(format!("generator failed for {cfg:?}: {e}")),
            }
        })
        .collect();
    SuiteReport {
        name: theorem.name(),
        instances,
        checks: instances,
        failures: outcomes.iter().filter(|o| o.is_some()).count(),
        first_failure: outcomes.into_iter().flatten().next(),
    }
}

/// Per-link tallies over random (instance, allocation) pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainReport {
    pub pairs: usize,
    pub links: Vec<LinkTally>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinkTally {
    pub from: crate::axioms::PropertyVariant,
    pub to: crate::axioms::PropertyVariant,
    pub broken: usize,
    /// Broken on additive instances only.
    pub broken_additive: usize,
    pub example: Option<String>,
}

impl ChainReport {
    pub fn intact(&self) -> bool {
        self.links.iter().all(|l| l.broken == 0)
    }
}

fn chain_config(i: usize) -> GenConfig {
    let seed = 77_000_000 + i as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc4a1);
    let class = [GenClass::Mixed, GenClass::GoodsAndBads, GenClass::PureGoodsAndBads, GenClass::Goods, GenClass::Bads]
        [i % 5];
    if i % 4 == 3 {
        GenConfig::new(2, rng.gen_range(1..=4), class, seed).general()
    } else {
        let n = rng.gen_range(2..=3);
        let mut cfg = GenConfig::new(n, rng.gen_range(1..=7), class, seed);
        cfg.normalise = rng.gen_bool(0.5);
        cfg
    }
}

/// Checks both chains on `instances × ALLOCATIONS_PER_INSTANCE` pairs.
pub fn run_chain_suite(instances: usize) -> ChainReport {
    let per_instance: Vec<Vec<(ChainLink, bool, String)>> = (0..instances)
        .into_par_iter()
        .map(|i| {
            let cfg = chain_config(i);
            let Ok(inst) = gen_random_instance(&cfg) else {
                return Vec::new();
            };
            let val = inst.evaluator();
            let (n, m) = (inst.agents(), inst.items());
            let total = checked_pow(n, m).expect("small instance");
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xa110c);
            let mut out = Vec::new();
            for _ in 0..ALLOCATIONS_PER_INSTANCE {
                let alloc = Allocation::from_index(n, m, rng.gen_range(0..total));
                for link in chain_links(&val, alloc.bundles()) {
                    out.push((link, inst.is_additive(), describe(&inst, &alloc, "")));
                }
            }
            out
        })
        .collect();
    let pairs = per_instance.iter().map(|v| v.len()).sum::<usize>() / 5;
    let mut links: Vec<LinkTally> = JF_CHAIN
        .windows(2)
        .chain(EF_CHAIN.windows(2))
        .map(|w| LinkTally { from: w[0], to: w[1], broken: 0, broken_additive: 0, example: None })
        .collect();
    for (link, additive, text) in per_instance.into_iter().flatten() {
        if link.holds {
            continue;
        }
        let tally = links
            .iter_mut()
            .find(|t| t.from == link.from && t.to == link.to)
            .expect("known link");
        tally.broken += 1;
        if additive {
            tally.broken_additive += 1;
        }
        if tally.example.is_none() {
            tally.example = Some(text.trim_start_matches(": ").to_string());
        }
    }
    ChainReport { pairs, links }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axioms::PropertyVariant;

    #[test]
    fn configs_respect_caps() {
        for t in Theorem::ALL {
            for i in 0..40 {
                let c = t.config(i);
                match c.model {
                    crate::paperlab::generator::GenModel::General => assert!(c.n == 2 && c.m <= 4),
                    crate::paperlab::generator::GenModel::Additive => assert!(c.n <= 3 && c.m <= 7),
                }
            }
        }
    }

    #[test]
    fn small_suites_run() {
        for t in Theorem::ALL {
            let r = run_theorem_suite(t, 12);
            assert_eq!(r.instances, 12);
        }
    }

    #[test]
    fn additive_theorem_links_hold() {
        let r = run_chain_suite(60);
        for l in &r.links {
            let theorem = matches!(
                (l.from, l.to),
                (PropertyVariant::JfxZero, PropertyVariant::Jfx)
                    | (PropertyVariant::EfxZero, PropertyVariant::Efx)
                    | (PropertyVariant::Efx, PropertyVariant::Ef1)
                    | (PropertyVariant::Jfx, PropertyVariant::Jf1Zero)
            );
            if theorem {
                assert_eq!(l.broken_additive, 0, "{l:?}");
            }
        }
    }
}
