//! Social choice functions: explicit tables, named rules, and the distance
//! diagnostics (to dictators, anti-dictators, and to a two-alternative
//! range).

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arrowlab::GswfIia;
use crate::error::{Error, Result};
use crate::prefcore::{
    factorial, fold_profiles, profile_count, profile_index, Alternative, OrderIndex, OrderSet,
    Profile, Voter, MAX_ALTERNATIVES,
};
use crate::report::{
    fold_samples, require_budget, MetricReport, Mode, EXACT_BUDGET,
};

/// A deterministic map from profiles to a winning alternative.
///
/// Profiles are passed as order indices (see [`OrderSet`]).
pub trait Scf: Sync {
    fn n(&self) -> usize;
    fn m(&self) -> usize;
    fn choose(&self, ballots: &[OrderIndex]) -> Alternative;

    fn choose_profile(&self, p: &Profile) -> Alternative {
        self.choose(&p.ballots())
    }
}

impl<T: Scf + ?Sized> Scf for &T {
    fn n(&self) -> usize {
        (**self).n()
    }
    fn m(&self) -> usize {
        (**self).m()
    }
    fn choose(&self, ballots: &[OrderIndex]) -> Alternative {
        (**self).choose(ballots)
    }
}

/// An SCF given by its full output table in profile-index order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScfTable {
    n: usize,
    m: usize,
    outputs: Vec<u8>,
}

const SCF_MAGIC: &[u8; 4] = b"SCF3";
const FORMAT_VERSION: u8 = 1;

impl ScfTable {
    pub fn new(n: usize, m: usize, outputs: Vec<u8>) -> Result<Self> {
        check_dims(n, m)?;
        let len = table_len(n, m)?;
        if outputs.len() as u64 != len {
            return Err(Error::domain(format!(
                "table has {} entries, expected ({m}!)^{n} = {len}",
                outputs.len()
            )));
        }
        if let Some(&bad) = outputs.iter().find(|&&a| a as usize >= m) {
            return Err(Error::domain(format!("output {bad} is not one of {m} alternatives")));
        }
        Ok(ScfTable { n, m, outputs })
    }

    /// Evaluate `f` at every profile.
    pub fn materialize<F: Scf + ?Sized>(f: &F) -> Result<Self> {
        let (n, m) = (f.n(), f.m());
        let len = table_len(n, m)?;
        let orders = OrderSet::get(m).len();
        let mut outputs = Vec::with_capacity(len as usize);
        let mut ballots = vec![0; n];
        for _ in 0..len {
            outputs.push(f.choose(&ballots) as u8);
            crate::prefcore::next_profile(&mut ballots, orders);
        }
        Ok(ScfTable { n, m, outputs })
    }

    /// Uniformly random outputs from a seeded generator, in profile-index
    /// order.
    pub fn random(n: usize, m: usize, seed: u64) -> Result<Self> {
        check_dims(n, m)?;
        let len = table_len(n, m)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let outputs = (0..len).map(|_| rng.gen_range(0..m as u8)).collect();
        Ok(ScfTable { n, m, outputs })
    }

    pub fn outputs(&self) -> &[u8] {
        &self.outputs
    }

    pub fn at_index(&self, index: u64) -> Alternative {
        self.outputs[index as usize] as usize
    }

    /// SCF3 encoding: magic, version, m, n (u16 LE), then one byte per
    /// profile.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 + self.outputs.len());
        out.extend_from_slice(SCF_MAGIC);
        out.push(FORMAT_VERSION);
        out.push(self.m as u8);
        out.extend_from_slice(&(self.n as u16).to_le_bytes());
        out.extend_from_slice(&self.outputs);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 8 || &bytes[..4] != SCF_MAGIC {
            return Err(Error::Format("missing SCF3 magic".into()));
        }
        if bytes[4] != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported SCF3 version {}", bytes[4])));
        }
        let m = bytes[5] as usize;
        let n = u16::from_le_bytes([bytes[6], bytes[7]]) as usize;
        ScfTable::new(n, m, bytes[8..].to_vec()).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        ScfTable::from_bytes(&std::fs::read(path)?)
    }
}

impl Scf for ScfTable {
    fn n(&self) -> usize {
        self.n
    }
    fn m(&self) -> usize {
        self.m
    }
    fn choose(&self, ballots: &[OrderIndex]) -> Alternative {
        let idx = profile_index(ballots, self.m).expect("table profiles fit u64");
        self.outputs[idx as usize] as usize
    }
}

fn check_dims(n: usize, m: usize) -> Result<()> {
    if n == 0 || n > u16::MAX as usize {
        return Err(Error::domain(format!("voter count {n} outside 1..=65535")));
    }
    if !(2..=MAX_ALTERNATIVES).contains(&m) {
        return Err(Error::UnsupportedDimension(format!(
            "{m} alternatives (supported: 2..={MAX_ALTERNATIVES})"
        )));
    }
    Ok(())
}

fn table_len(n: usize, m: usize) -> Result<u64> {
    match profile_count(m, n) {
        Some(len) if len as u128 <= EXACT_BUDGET => Ok(len),
        _ => Err(Error::BudgetExceeded {
            needed: crate::report::exact_cost(m, n) / factorial(m) as u128,
            budget: EXACT_BUDGET,
        }),
    }
}

/// Named zoo rules and their parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleSpec {
    Dictatorship(Voter),
    AntiDictatorship(Voter),
    Constant(Alternative),
    Plurality,
    Borda,
    PairwiseMajorityFallback,
    RandomTable(u64),
}

impl RuleSpec {
    /// Every deterministic zoo rule on `n` voters and `m` alternatives.
    pub fn zoo(n: usize, m: usize) -> Vec<RuleSpec> {
        let mut out = Vec::new();
        out.extend((0..n).map(RuleSpec::Dictatorship));
        out.extend((0..n).map(RuleSpec::AntiDictatorship));
        out.extend((0..m).map(RuleSpec::Constant));
        out.extend([RuleSpec::Plurality, RuleSpec::Borda, RuleSpec::PairwiseMajorityFallback]);
        out
    }
}

impl fmt::Display for RuleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleSpec::Dictatorship(i) => write!(f, "dictatorship({i})"),
            RuleSpec::AntiDictatorship(i) => write!(f, "anti_dictatorship({i})"),
            RuleSpec::Constant(a) => write!(f, "constant({a})"),
            RuleSpec::Plurality => write!(f, "plurality"),
            RuleSpec::Borda => write!(f, "borda"),
            RuleSpec::PairwiseMajorityFallback => write!(f, "pairwise_majority_fallback"),
            RuleSpec::RandomTable(s) => write!(f, "random_table({s})"),
        }
    }
}

/// Split `name(arg)` or `name:arg` into its parts.
pub(crate) fn split_call(s: &str) -> (String, Option<String>) {
    let s = s.trim();
    if let Some(open) = s.find('(') {
        if let Some(inner) = s[open + 1..].strip_suffix(')') {
            return (s[..open].trim().to_lowercase(), Some(inner.trim().to_string()));
        }
    }
    if let Some((name, arg)) = s.split_once(':') {
        return (name.trim().to_lowercase(), Some(arg.trim().to_string()));
    }
    (s.to_lowercase(), None)
}

impl FromStr for RuleSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = split_call(s);
        let name = name.replace('-', "_");
        let num = |what: &str| -> Result<u64> {
            arg.as_deref()
                .ok_or_else(|| Error::domain(format!("`{name}` needs a {what}")))?
                .parse::<u64>()
                .map_err(|_| Error::domain(format!("`{s}`: bad {what}")))
        };
        Ok(match name.as_str() {
            "dictatorship" | "dictator" => RuleSpec::Dictatorship(num("voter")? as usize),
            "anti_dictatorship" | "antidictatorship" => {
                RuleSpec::AntiDictatorship(num("voter")? as usize)
            }
            "constant" => RuleSpec::Constant(num("alternative")? as usize),
            "plurality" => RuleSpec::Plurality,
            "borda" => RuleSpec::Borda,
            "pairwise_majority_fallback" | "condorcet" => RuleSpec::PairwiseMajorityFallback,
            "random_table" | "random" => RuleSpec::RandomTable(num("seed")?),
            _ => return Err(Error::Unknown(s.to_string())),
        })
    }
}

#[derive(Debug, Clone)]
enum RuleKind {
    Dictatorship(Voter),
    AntiDictatorship(Voter),
    Constant(Alternative),
    Plurality,
    Borda,
    PairwiseMajorityFallback,
    Table(Arc<ScfTable>),
    GcwOrTop { gswf: Arc<GswfIia>, fallback: Voter },
}

/// A named rule, evaluated on demand.
#[derive(Debug, Clone)]
pub struct ScfRule {
    name: String,
    n: usize,
    m: usize,
    kind: RuleKind,
}

/// Build a zoo rule on `n` voters and `m` alternatives.
pub fn zoo_make(spec: &RuleSpec, n: usize, m: usize) -> Result<ScfRule> {
    check_dims(n, m)?;
    let kind = match *spec {
        RuleSpec::Dictatorship(i) | RuleSpec::AntiDictatorship(i) if i >= n => {
            return Err(Error::domain(format!("voter {i} out of range for {n} voters")));
        }
        RuleSpec::Dictatorship(i) => RuleKind::Dictatorship(i),
        RuleSpec::AntiDictatorship(i) => RuleKind::AntiDictatorship(i),
        RuleSpec::Constant(a) if a >= m => {
            return Err(Error::domain(format!("alternative {a} out of range for {m}")));
        }
        RuleSpec::Constant(a) => RuleKind::Constant(a),
        RuleSpec::Plurality => RuleKind::Plurality,
        RuleSpec::Borda => RuleKind::Borda,
        RuleSpec::PairwiseMajorityFallback => RuleKind::PairwiseMajorityFallback,
        RuleSpec::RandomTable(seed) => RuleKind::Table(Arc::new(ScfTable::random(n, m, seed)?)),
    };
    Ok(ScfRule { name: spec.to_string(), n, m, kind })
}

impl ScfRule {
    pub fn name(&self) -> &str {
        &self.name
    }

    /// GCW of `gswf` when one exists, otherwise the top of `fallback`.
    pub fn gcw_or_top(gswf: Arc<GswfIia>, fallback: Voter) -> Result<Self> {
        if fallback >= gswf.n() {
            return Err(Error::domain(format!(
                "fallback voter {fallback} out of range for {} voters",
                gswf.n()
            )));
        }
        Ok(ScfRule {
            name: format!("gcw_or_top({fallback})"),
            n: gswf.n(),
            m: gswf.m(),
            kind: RuleKind::GcwOrTop { gswf, fallback },
        })
    }

    pub fn from_table(table: ScfTable, name: &str) -> Self {
        ScfRule { name: name.to_string(), n: table.n, m: table.m, kind: RuleKind::Table(Arc::new(table)) }
    }
}

impl Scf for ScfRule {
    fn n(&self) -> usize {
        self.n
    }

    fn m(&self) -> usize {
        self.m
    }

    fn choose(&self, ballots: &[OrderIndex]) -> Alternative {
        let orders = OrderSet::get(self.m);
        match &self.kind {
            RuleKind::Dictatorship(i) => orders.top(ballots[*i]),
            RuleKind::AntiDictatorship(i) => orders.bottom(ballots[*i]),
            RuleKind::Constant(a) => *a,
            RuleKind::Plurality => {
                let mut counts = [0u32; MAX_ALTERNATIVES];
                for &b in ballots {
                    counts[orders.top(b)] += 1;
                }
                argmax_first(&counts[..self.m])
            }
            RuleKind::Borda => {
                let mut scores = [0u32; MAX_ALTERNATIVES];
                for &b in ballots {
                    for (r, &a) in orders.ranking(b).iter().enumerate() {
                        scores[a as usize] += (self.m - 1 - r) as u32;
                    }
                }
                argmax_first(&scores[..self.m])
            }
            RuleKind::PairwiseMajorityFallback => {
                let n = ballots.len();
                (0..self.m)
                    .find(|&a| {
                        (0..self.m).filter(|&b| b != a).all(|b| {
                            let support =
                                ballots.iter().filter(|&&k| orders.prefers(k, a, b)).count();
                            2 * support > n
                        })
                    })
                    .unwrap_or_else(|| orders.top(ballots[0]))
            }
            RuleKind::Table(t) => t.choose(ballots),
            RuleKind::GcwOrTop { gswf, fallback } => gswf
                .gcw_winner_ballots(ballots)
                .unwrap_or_else(|| orders.top(ballots[*fallback])),
        }
    }
}

/// Index of the first maximum.
fn argmax_first(xs: &[u32]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate() {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

/// Per-voter mismatch counts between `F(x)` and a voter-derived alternative,
/// minimized over voters.
fn min_voter_mismatch<F: Scf + ?Sized>(
    f: &F,
    mode: Mode,
    metric: &str,
    pick: fn(&OrderSet, OrderIndex) -> Alternative,
) -> Result<(MetricReport, Voter)> {
    mode.validate()?;
    let (n, m) = (f.n(), f.m());
    let orders = OrderSet::get(m);
    let tally = |acc: &mut Vec<u64>, ballots: &[OrderIndex]| {
        let w = f.choose(ballots);
        for (v, &b) in ballots.iter().enumerate() {
            if pick(orders, b) != w {
                acc[v] += 1;
            }
        }
    };
    let add = |mut x: Vec<u64>, y: Vec<u64>| {
        x.iter_mut().zip(y).for_each(|(a, b)| *a += b);
        x
    };
    let (counts, total) = match mode {
        Mode::Exact => {
            require_budget(m, n)?;
            let total = profile_count(m, n).unwrap();
            (fold_profiles(m, n, || vec![0u64; n], tally, add), total)
        }
        Mode::Sampled { samples, seed } => {
            let counts = fold_samples(
                samples,
                seed,
                || (vec![0u64; n], vec![0; n]),
                |(acc, ballots), rng| {
                    draw_profile(rng, orders.len(), ballots);
                    tally(acc, ballots);
                },
                |(x, b), (y, _)| (add(x, y), b),
            )
            .0;
            (counts, samples)
        }
    };
    let (voter, &hits) = counts.iter().enumerate().min_by_key(|&(_, c)| *c).unwrap();
    let report = match mode {
        Mode::Exact => MetricReport::exact(metric, vec![voter], hits as u128, total as u128),
        Mode::Sampled { seed, .. } => {
            MetricReport::bernoulli(metric, vec![voter], hits, total, seed, 1.0)
        }
    };
    Ok((report, voter))
}

pub(crate) fn draw_profile(rng: &mut ChaCha8Rng, orders: usize, ballots: &mut [OrderIndex]) {
    for b in ballots.iter_mut() {
        *b = rng.gen_range(0..orders) as OrderIndex;
    }
}

/// `min_i Pr[F(x) != top(x_i)]` and the minimizing voter.
pub fn dist_to_dictatorship<F: Scf + ?Sized>(f: &F, mode: Mode) -> Result<(MetricReport, Voter)> {
    min_voter_mismatch(f, mode, "dist_to_dictatorship", OrderSet::top)
}

/// `min_i Pr[F(x) != bottom(x_i)]` and the minimizing voter.
pub fn dist_to_antidictatorship<F: Scf + ?Sized>(
    f: &F,
    mode: Mode,
) -> Result<(MetricReport, Voter)> {
    min_voter_mismatch(f, mode, "dist_to_antidictatorship", OrderSet::bottom)
}

/// `min_a Pr[F(x) = a]` and the least-elected alternative.
pub fn range_min_prob<F: Scf + ?Sized>(f: &F, mode: Mode) -> Result<(MetricReport, Alternative)> {
    mode.validate()?;
    let (n, m) = (f.n(), f.m());
    let orders = OrderSet::get(m);
    let add = |mut x: Vec<u64>, y: Vec<u64>| {
        x.iter_mut().zip(y).for_each(|(a, b)| *a += b);
        x
    };
    let (counts, total) = match mode {
        Mode::Exact => {
            require_budget(m, n)?;
            let counts = fold_profiles(
                m,
                n,
                || vec![0u64; m],
                |acc, ballots| acc[f.choose(ballots)] += 1,
                add,
            );
            (counts, profile_count(m, n).unwrap())
        }
        Mode::Sampled { samples, seed } => {
            let counts = fold_samples(
                samples,
                seed,
                || (vec![0u64; m], vec![0; n]),
                |(acc, ballots), rng| {
                    draw_profile(rng, orders.len(), ballots);
                    acc[f.choose(ballots)] += 1;
                },
                |(x, b), (y, _)| (add(x, y), b),
            )
            .0;
            (counts, samples)
        }
    };
    let (alt, &hits) = counts.iter().enumerate().min_by_key(|&(_, c)| *c).unwrap();
    let report = match mode {
        Mode::Exact => MetricReport::exact("range_min_prob", vec![alt], hits as u128, total as u128),
        Mode::Sampled { seed, .. } => {
            MetricReport::bernoulli("range_min_prob", vec![alt], hits, total, seed, 1.0)
        }
    };
    Ok((report, alt))
}

/// Outcome of a symmetry check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetryCheck {
    pub holds: bool,
    /// True when every profile and every generator was checked.
    pub exhaustive: bool,
    /// Number of (profile, permutation) pairs checked.
    pub checked: u64,
    /// Profile index of the smallest violating profile, when exhaustive.
    pub witness: Option<u64>,
}

fn all_permutations(m: usize) -> Vec<Vec<u8>> {
    (0..factorial(m))
        .map(|k| crate::prefcore::order_from_index(k, m).unwrap().ranking().to_vec())
        .collect()
}

/// Check `F(pi x) = pi F(x)` for every relabelling `pi` of the alternatives.
pub fn neutrality<F: Scf + ?Sized>(f: &F, mode: Mode) -> Result<SymmetryCheck> {
    mode.validate()?;
    let (n, m) = (f.n(), f.m());
    let orders = OrderSet::get(m);
    let perms = all_permutations(m);
    let relabel: Vec<Vec<OrderIndex>> = perms
        .iter()
        .map(|p| (0..orders.len()).map(|k| orders.relabel(k as OrderIndex, p)).collect())
        .collect();
    let violates = |ballots: &[OrderIndex], pi: usize, buf: &mut Vec<OrderIndex>| {
        buf.clear();
        buf.extend(ballots.iter().map(|&b| relabel[pi][b as usize]));
        f.choose(buf) != perms[pi][f.choose(ballots)] as usize
    };
    match mode {
        Mode::Exact => {
            require_budget(m, n)?;
            let witness = fold_profiles(
                m,
                n,
                || (None::<u64>, Vec::with_capacity(n)),
                |(w, buf), ballots| {
                    if w.is_none() && (1..perms.len()).any(|pi| violates(ballots, pi, buf)) {
                        *w = Some(profile_index(ballots, m).unwrap());
                    }
                },
                |(a, buf), (b, _)| (a.or(b), buf),
            )
            .0;
            Ok(SymmetryCheck {
                holds: witness.is_none(),
                exhaustive: true,
                checked: profile_count(m, n).unwrap() * perms.len() as u64,
                witness,
            })
        }
        Mode::Sampled { samples, seed } => {
            let bad = fold_samples(
                samples,
                seed,
                || (0u64, vec![0; n], Vec::with_capacity(n)),
                |(bad, ballots, buf), rng| {
                    draw_profile(rng, orders.len(), ballots);
                    let pi = rng.gen_range(0..perms.len());
                    if violates(ballots, pi, buf) {
                        *bad += 1;
                    }
                },
                |(a, x, y), (b, _, _)| (a + b, x, y),
            )
            .0;
            Ok(SymmetryCheck { holds: bad == 0, exhaustive: false, checked: samples, witness: None })
        }
    }
}

/// Check invariance under every permutation of the voters (adjacent
/// transpositions generate them all).
pub fn anonymity<F: Scf + ?Sized>(f: &F, mode: Mode) -> Result<SymmetryCheck> {
    mode.validate()?;
    let (n, m) = (f.n(), f.m());
    let orders = OrderSet::get(m);
    let violates = |ballots: &[OrderIndex], i: usize, buf: &mut Vec<OrderIndex>| {
        buf.clear();
        buf.extend_from_slice(ballots);
        buf.swap(i, i + 1);
        f.choose(buf) != f.choose(ballots)
    };
    if n == 1 {
        return Ok(SymmetryCheck { holds: true, exhaustive: true, checked: 0, witness: None });
    }
    match mode {
        Mode::Exact => {
            require_budget(m, n)?;
            let witness = fold_profiles(
                m,
                n,
                || (None::<u64>, Vec::with_capacity(n)),
                |(w, buf), ballots| {
                    if w.is_none() && (0..n - 1).any(|i| violates(ballots, i, buf)) {
                        *w = Some(profile_index(ballots, m).unwrap());
                    }
                },
                |(a, buf), (b, _)| (a.or(b), buf),
            )
            .0;
            Ok(SymmetryCheck {
                holds: witness.is_none(),
                exhaustive: true,
                checked: profile_count(m, n).unwrap() * (n as u64 - 1),
                witness,
            })
        }
        Mode::Sampled { samples, seed } => {
            // Random full permutations rather than generators, so a single
            // sample can witness any asymmetry.
            let bad = fold_samples(
                samples,
                seed,
                || (0u64, vec![0; n], Vec::with_capacity(n)),
                |(bad, ballots, buf), rng| {
                    draw_profile(rng, orders.len(), ballots);
                    buf.clear();
                    buf.extend_from_slice(ballots);
                    for i in (1..n).rev() {
                        buf.swap(i, rng.gen_range(0..=i));
                    }
                    if f.choose(buf) != f.choose(ballots) {
                        *bad += 1;
                    }
                },
                |(a, x, y), (b, _, _)| (a + b, x, y),
            )
            .0;
            Ok(SymmetryCheck { holds: bad == 0, exhaustive: false, checked: samples, witness: None })
        }
    }
}

const SYMMETRY_SAMPLES: u64 = 100_000;

/// [`neutrality`] with exhaustive checking when the budget allows.
pub fn is_neutral<F: Scf + ?Sized>(f: &F) -> bool {
    let mode = Mode::auto(f.m(), f.n(), SYMMETRY_SAMPLES, 0);
    neutrality(f, mode).map(|c| c.holds).unwrap_or(false)
}

/// [`anonymity`] with exhaustive checking when the budget allows.
pub fn is_anonymous<F: Scf + ?Sized>(f: &F) -> bool {
    let mode = Mode::auto(f.m(), f.n(), SYMMETRY_SAMPLES, 0);
    anonymity(f, mode).map(|c| c.holds).unwrap_or(false)
}
