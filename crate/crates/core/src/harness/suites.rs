use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arrowlab::{
    check_identities, check_reduction_chain, composition, dist_tr3, dist_tr3_per_bit,
    gswf_from_scf, ngcw, nt, scf_from_gswf, GswfIia, ReductionChain, TrMember,
};
use crate::error::{Error, Result};
use crate::maniplab::{
    cauchy_schwarz_holds, column_stats, first_reduction_holds, manipulation_power,
    manipulation_power_total, mab, nab,
};
use crate::prefcore::{pair_index, pairs, profile_count, Profile, Voter};
use crate::report::{require_budget, substream, MetricReport, Mode};
use crate::scalar::Scalar;
use crate::scfzoo::{
    anonymity, dist_to_antidictatorship, dist_to_dictatorship, neutrality, range_min_prob,
    zoo_make, RuleSpec, Scf,
};
use crate::ternary::{
    check_border_inequality, check_harris, edge_border, edge_border_total, is_monotone,
    random_disjoint_pair, random_set, sets_ab, shift_monotone, TernarySet,
};
use crate::prefcore::PairwiseColumn;
use crate::Exact;

use super::{BoolSpec, GswfSpec, Instance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    FirstReduction,
    Border,
    Cauchy,
    ReductionChain,
    ArrowIdentity,
    Composition,
    Converse,
    Shifting,
    Harris,
    DistTr3,
    Condorcet,
}

impl Suite {
    pub const ALL: [Suite; 11] = [
        Suite::FirstReduction,
        Suite::Border,
        Suite::Cauchy,
        Suite::ReductionChain,
        Suite::ArrowIdentity,
        Suite::Composition,
        Suite::Converse,
        Suite::Shifting,
        Suite::Harris,
        Suite::DistTr3,
        Suite::Condorcet,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::FirstReduction => "first-reduction",
            Suite::Border => "border",
            Suite::Cauchy => "cauchy",
            Suite::ReductionChain => "reduction-chain",
            Suite::ArrowIdentity => "arrow-identity",
            Suite::Composition => "composition",
            Suite::Converse => "converse",
            Suite::Shifting => "shifting",
            Suite::Harris => "harris",
            Suite::DistTr3 => "dist-tr3",
            Suite::Condorcet => "condorcet",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_lowercase().replace('_', "-");
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Unknown(s.clone()))
    }
}

/// Corpus parameters. `n = None` selects each suite's default voter counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub trials: u64,
    pub seed: u64,
    pub n: Option<usize>,
    /// Monte Carlo samples for checks that cannot be enumerated.
    pub samples: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { trials: 200, seed: 7, n: None, samples: 1_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub instances: u64,
    pub passed: u64,
    /// First failing instance in corpus order.
    pub counterexample: Option<Instance>,
    pub wall_ms: u64,
}

impl SuiteReport {
    pub fn holds(&self) -> bool {
        self.passed == self.instances
    }
}

fn seeds(seed: u64, count: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.gen()).collect()
}

fn scf_corpus(ns: &[usize], cfg: &SuiteConfig, random_at: impl Fn(usize) -> u64) -> Vec<Instance> {
    let mut out = Vec::new();
    let mut master = ChaCha8Rng::seed_from_u64(cfg.seed);
    for &n in ns {
        out.extend(RuleSpec::zoo(n, 3).into_iter().map(|rule| Instance::Scf { rule, n, m: 3 }));
        let count = random_at(n);
        out.extend(
            seeds(master.gen(), count)
                .into_iter()
                .map(|s| Instance::Scf { rule: RuleSpec::RandomTable(s), n, m: 3 }),
        );
    }
    out
}

fn set_instance(s: &TernarySet) -> Vec<u64> {
    s.members().collect()
}

/// Voter count of random trial `t` when no single `n` is requested.
fn cycle_n(cfg: &SuiteConfig, t: u64) -> usize {
    cfg.n.unwrap_or(1 + (t % 6) as usize)
}

fn gswf(g: GswfSpec) -> Instance {
    Instance::Gswf { g }
}

fn three_alt_gswf_corpus(n: usize, cfg: &SuiteConfig) -> Vec<Instance> {
    let mut out = Vec::new();
    for rule in RuleSpec::zoo(n, 3) {
        out.push(gswf(GswfSpec::FromScf { rule, n, tie_voter: 0 }));
    }
    if n % 2 == 1 {
        out.push(gswf(GswfSpec::Neutral { g: BoolSpec::Majority { n }, m: 3 }));
    }
    out.push(gswf(GswfSpec::Dictator { m: 3, n, voter: 0 }));
    out.extend(
        seeds(cfg.seed, cfg.trials).into_iter().map(|seed| gswf(GswfSpec::Random { m: 3, n, seed })),
    );
    out
}

fn majority_table(n: usize) -> Result<GswfSpec> {
    let g = crate::arrowlab::BooleanFn::majority(n)?;
    let ones = (0..1u64 << n).filter(|&z| g.eval(z)).collect();
    Ok(GswfSpec::Tensor { g: BoolSpec::Table { n, ones }, m: 3 })
}

/// The instances a suite runs on.
pub fn corpus(suite: Suite, cfg: &SuiteConfig) -> Result<Vec<Instance>> {
    if cfg.trials == 0 {
        return Err(Error::domain("trials must be at least 1"));
    }
    Ok(match suite {
        Suite::FirstReduction | Suite::Cauchy => match cfg.n {
            Some(n) => scf_corpus(&[n], cfg, |_| cfg.trials),
            None => scf_corpus(&[2, 3, 4], cfg, |n| {
                if n >= 4 {
                    (cfg.trials / 10).max(1)
                } else {
                    cfg.trials
                }
            }),
        },
        Suite::ReductionChain => scf_corpus(&[cfg.n.unwrap_or(3)], cfg, |_| cfg.trials),
        Suite::Border => {
            let mut out: Vec<Instance> = (0..cfg.trials)
                .into_par_iter()
                .map(|t| {
                    let n = cycle_n(cfg, t);
                    let (a, b) = random_disjoint_pair(n, &mut substream(cfg.seed, t));
                    Instance::TernaryPair { n, a: set_instance(&a), b: set_instance(&b) }
                })
                .collect();
            let ns: Vec<usize> = match cfg.n {
                Some(n) if n <= 4 => vec![n],
                Some(_) => vec![],
                None => (1..=4).collect(),
            };
            for n in ns {
                for rule in RuleSpec::zoo(n, 3) {
                    let f = zoo_make(&rule, n, 3)?;
                    for (a, b) in pairs(3) {
                        for z in 0..1u64 << n {
                            let (sa, sb) = sets_ab(&f, a, b, &PairwiseColumn::new(n, z)?)?;
                            out.push(Instance::TernaryPair {
                                n,
                                a: set_instance(&sa),
                                b: set_instance(&sb),
                            });
                        }
                    }
                }
            }
            out
        }
        Suite::Shifting => (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let n = cycle_n(cfg, t);
                let s = random_set(n, &mut substream(cfg.seed, t));
                Instance::TernarySet { n, members: set_instance(&s) }
            })
            .collect(),
        Suite::Harris => (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let n = cycle_n(cfg, t);
                let mut rng = substream(cfg.seed, t);
                let a = shift_monotone(&random_set(n, &mut rng));
                let b = shift_monotone(&random_set(n, &mut rng));
                Instance::TernaryPair { n, a: set_instance(&a), b: set_instance(&b) }
            })
            .collect(),
        Suite::ArrowIdentity => {
            let n = cfg.n.unwrap_or(3);
            let mut out = Vec::new();
            if n % 2 == 1 {
                out.push(Instance::Odd {
                    g: BoolSpec::Majority { n },
                    samples: cfg.samples,
                    seed: cfg.seed,
                });
            }
            out.extend(seeds(cfg.seed, cfg.trials).into_iter().map(|s| Instance::Odd {
                g: BoolSpec::RandomOdd { n, seed: s },
                samples: cfg.samples,
                seed: cfg.seed,
            }));
            out
        }
        Suite::Composition => {
            let n = cfg.n.unwrap_or(2);
            let mut out = vec![
                gswf(GswfSpec::Dictator { m: 6, n, voter: 0 }),
                gswf(GswfSpec::AntiDictator { m: 6, n, voter: n - 1 }),
                gswf(GswfSpec::Neutral { g: BoolSpec::RandomOdd { n, seed: cfg.seed }, m: 6 }),
            ];
            out.extend(
                seeds(cfg.seed, cfg.trials)
                    .into_iter()
                    .map(|seed| gswf(GswfSpec::Random { m: 6, n, seed })),
            );
            out
        }
        Suite::Converse | Suite::Condorcet => three_alt_gswf_corpus(cfg.n.unwrap_or(3), cfg),
        Suite::DistTr3 => {
            let ns = cfg.n.map(|n| vec![n]).unwrap_or_else(|| vec![2, 3]);
            let mut out = Vec::new();
            for n in ns {
                out.push(gswf(majority_table(n)?));
                out.extend(
                    seeds(cfg.seed ^ n as u64, cfg.trials)
                        .into_iter()
                        .map(|seed| gswf(GswfSpec::Random { m: 3, n, seed })),
                );
            }
            out
        }
    })
}

fn exact(r: MetricReport) -> Exact {
    r.exact_value().cloned().expect("exact mode")
}

fn scf_of(inst: &Instance) -> Result<impl Scf> {
    match inst {
        Instance::Scf { rule, n, m } => zoo_make(rule, *n, *m),
        _ => Err(Error::domain("this suite takes SCF instances")),
    }
}

fn gswf_of(inst: &Instance) -> Result<GswfIia> {
    match inst {
        Instance::Gswf { g } => g.build(),
        _ => Err(Error::domain("this suite takes GSWF instances")),
    }
}

fn sets_of(inst: &Instance) -> Result<(TernarySet, TernarySet)> {
    match inst {
        Instance::TernaryPair { n, a, b } => Ok((
            TernarySet::from_members(*n, a.iter().copied())?,
            TernarySet::from_members(*n, b.iter().copied())?,
        )),
        _ => Err(Error::domain("this suite takes pairs of ternary sets")),
    }
}

/// Whether `inst` satisfies the property checked by `suite`.
pub fn check_instance(suite: Suite, inst: &Instance) -> Result<bool> {
    match suite {
        Suite::FirstReduction => {
            let f = scf_of(inst)?;
            let total = exact(manipulation_power_total(&f, Mode::Exact)?);
            for (a, b) in pairs(3) {
                if !first_reduction_holds(&exact(mab(&f, a, b, Mode::Exact)?), &total) {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Suite::Cauchy => {
            let f = scf_of(inst)?;
            for (a, b) in pairs(3) {
                let stats = column_stats(&f, a, b)?;
                if !cauchy_schwarz_holds(&stats.mab(), &stats.nab()) {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Suite::ReductionChain => Ok(check_reduction_chain(&scf_of(inst)?, 0)?.holds),
        Suite::Border => {
            let (a, b) = sets_of(inst)?;
            Ok(check_border_inequality(&a, &b)?.holds)
        }
        Suite::Harris => {
            let (a, b) = sets_of(inst)?;
            Ok(check_harris(&a, &b)?.holds)
        }
        Suite::Shifting => {
            let Instance::TernarySet { n, members } = inst else {
                return Err(Error::domain("this suite takes ternary sets"));
            };
            let s = TernarySet::from_members(*n, members.iter().copied())?;
            let t = shift_monotone(&s);
            let mut ok = t.len() == s.len() && is_monotone(&t);
            for i in 0..*n {
                ok &= edge_border(&t, i)? <= edge_border(&s, i)?;
            }
            ok &= t.difference_len(&s) <= edge_border_total(&s);
            Ok(ok)
        }
        Suite::ArrowIdentity => {
            let Instance::Odd { g, samples, seed } = inst else {
                return Err(Error::domain("this suite takes odd Boolean functions"));
            };
            let mode = if *samples == 0 {
                Mode::Exact
            } else {
                Mode::Sampled { samples: *samples, seed: *seed }
            };
            Ok(check_identities(&g.build()?, mode)?.holds)
        }
        Suite::Composition => {
            let g = gswf_of(inst)?;
            Ok(composition(&g, g.m() / 2, Mode::Exact)?.holds)
        }
        Suite::Converse => {
            let g = gswf_of(inst)?;
            let f = scf_from_gswf(&g, 0)?;
            let bound = Exact::from_u32(2) * exact(ngcw(&g, Mode::Exact)?);
            for (a, b) in pairs(g.m()) {
                if exact(mab(&f, a, b, Mode::Exact)?) > bound {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Suite::Condorcet => {
            let g = gswf_of(inst)?;
            let cyclic = exact(nt(&g, Mode::Exact)?);
            let mut ok = cyclic == exact(ngcw(&g, Mode::Exact)?);
            if let Instance::Gswf { g: GswfSpec::Neutral { g: BoolSpec::Majority { n }, .. } } = inst {
                ok &= cyclic == majority_cycle_fraction(*n)?;
            }
            Ok(ok)
        }
        Suite::DistTr3 => {
            let g = gswf_of(inst)?;
            let (d, witness) = dist_tr3(&g)?;
            let d = exact(d);
            Ok(d == tr3_exhaustive(&g)? && d == disagreement(&g, &witness.to_gswf(g.n())?)?)
        }
    }
}

/// Fraction of profiles on three alternatives whose head-to-head majority
/// counts form a cycle, counted from the voters' rankings directly.
fn majority_cycle_fraction(n: usize) -> Result<Exact> {
    require_budget(3, n)?;
    let total = profile_count(3, n).unwrap();
    let mut cyclic = 0u64;
    for idx in 0..total {
        let p = Profile::from_index(idx, n, 3)?;
        let beats = |a: usize, b: usize| {
            2 * p.voters().iter().filter(|o| o.prefers(a, b)).count() > n
        };
        if (beats(0, 1) && beats(1, 2) && beats(2, 0)) || (beats(1, 0) && beats(2, 1) && beats(0, 2))
        {
            cyclic += 1;
        }
    }
    Ok(Exact::from_ratio(cyclic as u128, total as u128))
}

/// Fraction of profiles where the output triples of `g` and `h` differ.
fn disagreement(g: &GswfIia, h: &GswfIia) -> Result<Exact> {
    let n = g.n();
    require_budget(3, n)?;
    let total = profile_count(3, n).unwrap();
    let mut ballots = vec![0; n];
    let mut diff = 0u64;
    for idx in 0..total {
        crate::prefcore::decode_profile(idx, 3, &mut ballots);
        diff += (g.outputs(&ballots) != h.outputs(&ballots)) as u64;
    }
    Ok(Exact::from_ratio(diff as u128, total as u128))
}

/// Distance to the always-transitive family by trying every member:
/// dictators, anti-dictators, and every alternative fixed at the top or
/// bottom with every table for the remaining pair. Needs `n <= 3`.
pub fn tr3_exhaustive(g: &GswfIia) -> Result<Exact> {
    let n = g.n();
    if g.m() != 3 || n > 3 {
        return Err(Error::UnsupportedDimension(format!(
            "exhaustive search needs 3 alternatives and at most 3 voters, got m={}, n={n}",
            g.m()
        )));
    }
    let total = profile_count(3, n).unwrap();
    let profiles: Vec<Vec<u16>> = (0..total)
        .map(|idx| {
            let mut b = vec![0; n];
            crate::prefcore::decode_profile(idx, 3, &mut b);
            b
        })
        .collect();
    let target: Vec<u64> = profiles.iter().map(|b| g.outputs(b)).collect();
    let mut members: Vec<TrMember> = Vec::new();
    for i in 0..n {
        members.push(TrMember::Dictator(i));
        members.push(TrMember::AntiDictator(i));
    }
    for code in 0..1u64 << (1u64 << n) {
        let h = crate::arrowlab::BooleanFn::from_fn(n, |z| code >> z & 1 == 1)?;
        for t in 0..3 {
            members.push(TrMember::TopFixed { top: t, h: h.clone() });
            members.push(TrMember::BottomFixed { bottom: t, h: h.clone() });
        }
    }
    let best = members
        .par_iter()
        .map(|member| {
            let h = member.to_gswf(n).expect("valid member");
            profiles.iter().zip(&target).filter(|(b, &t)| h.outputs(b) != t).count() as u64
        })
        .min()
        .unwrap();
    Ok(Exact::from_ratio(best as u128, total as u128))
}

/// Run a suite over its corpus. Instances are checked in parallel; the
/// reported counterexample is the first failure in corpus order.
pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<SuiteReport> {
    let start = Instant::now();
    let instances = corpus(suite, cfg)?;
    let results: Vec<Result<bool>> =
        instances.par_iter().map(|inst| check_instance(suite, inst)).collect();
    let mut passed = 0u64;
    let mut counterexample = None;
    for (inst, r) in instances.iter().zip(results) {
        if r? {
            passed += 1;
        } else if counterexample.is_none() {
            counterexample = Some(inst.clone());
        }
    }
    Ok(SuiteReport {
        suite: suite.name().to_string(),
        instances: instances.len() as u64,
        passed,
        counterexample,
        wall_ms: start.elapsed().as_millis() as u64,
    })
}

fn flag(metric: &str, value: bool) -> MetricReport {
    MetricReport::exact(metric, vec![], value as u128, 1)
}

/// Every per-SCF metric: `M_i` for each voter, their sum, `M^{a,b}` and
/// `N^{a,b}` for each pair (three alternatives only), the distances, and the
/// neutrality and anonymity flags.
pub fn metrics_report<F: Scf + ?Sized>(f: &F, mode: Mode) -> Result<Vec<MetricReport>> {
    let mut out = Vec::new();
    for i in 0..f.n() {
        out.push(manipulation_power(f, i, mode)?);
    }
    out.push(manipulation_power_total(f, mode)?);
    if f.m() == 3 {
        for (a, b) in pairs(3) {
            out.push(mab(f, a, b, mode)?);
        }
        for (a, b) in pairs(3) {
            out.push(nab(f, a, b, mode)?);
        }
    }
    out.push(dist_to_dictatorship(f, mode)?.0);
    out.push(dist_to_antidictatorship(f, mode)?.0);
    out.push(range_min_prob(f, mode)?.0);
    out.push(flag("neutral", neutrality(f, mode)?.holds));
    out.push(flag("anonymous", anonymity(f, mode)?.holds));
    Ok(out)
}

/// Everything reported for the SCF-to-GSWF reduction.
#[derive(Debug, Clone)]
pub struct ReduceOutput {
    pub gswf: GswfIia,
    pub chain: ReductionChain,
    pub records: Vec<MetricReport>,
}

pub fn reduce_report<F: Scf + ?Sized>(f: &F, tie_voter: Voter) -> Result<ReduceOutput> {
    let g = gswf_from_scf(f, tie_voter)?;
    let chain = check_reduction_chain(f, tie_voter)?;
    let mut records = vec![
        nt(&g, Mode::Exact)?,
        ngcw(&g, Mode::Exact)?,
        dist_tr3(&g)?.0,
        dist_tr3_per_bit(&g)?.0,
    ];
    let mut push = |metric: &str, indices: Vec<usize>, v: &Exact| {
        records.push(MetricReport::from_exact(metric, indices, v.clone()));
    };
    for (a, b) in pairs(3) {
        let t = g.table(a, b);
        push("table_ones", vec![a, b], &Exact::from_ratio(t.ones() as u128, 1u128 << g.n()));
    }
    for (a, b) in pairs(3) {
        push("mab", vec![a, b], &chain.mab[pair_index(3, a, b)]);
    }
    for (a, b) in pairs(3) {
        push("nab", vec![a, b], &chain.nab[pair_index(3, a, b)]);
    }
    push("eps1", vec![], &chain.eps1);
    push("eps2", vec![], &chain.eps2);
    push("minority", vec![], &chain.minority);
    push("sum_nab", vec![], &chain.sum_nab());
    records.push(flag("gswf_neutral", g.is_neutral()));
    records.push(flag("chain_holds", chain.holds));
    Ok(ReduceOutput { gswf: g, chain, records })
}
