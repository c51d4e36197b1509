//! IIA generalized social welfare functions: representation, the reduction
//! from an SCF and back, paradox and Condorcet-winner probabilities, distance
//! to the always-transitive family, and the identities relating neutral
//! GSWFs on 3, 4, 5 and 6 alternatives.

mod gcw;
mod identities;
mod reduction;
mod tr3;

pub use gcw::{
    composition, gcw, gcw_winner_at, ngcw, nt, winner_loser_counts, CompositionReport,
    WinnerLoserCounts,
};
pub use identities::{check_identities, FiveSixCheck, IdentityReport, SampledIdentity};
pub use reduction::{
    check_reduction_chain, gswf_from_scf, minority_probability, scf_from_gswf, ReductionChain,
};
pub use tr3::{dist_dict2, dist_tr3, dist_tr3_per_bit, DictWitness, TrMember};

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::prefcore::{
    pair_count, pair_index, pairs, Alternative, OrderIndex, OrderSet, Profile, Voter,
    MAX_ALTERNATIVES,
};

/// Largest voter count for an explicit Boolean table.
pub const MAX_TABLE_VOTERS: usize = 24;

/// A Boolean function on `{0,1}^n`, stored as its truth table. Input `z` has
/// voter `v`'s bit at position `v`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BooleanFn {
    n: usize,
    bits: Vec<bool>,
}

impl BooleanFn {
    pub fn new(n: usize, bits: Vec<bool>) -> Result<Self> {
        if n == 0 || n > MAX_TABLE_VOTERS {
            return Err(Error::UnsupportedDimension(format!(
                "{n} inputs (supported: 1..={MAX_TABLE_VOTERS})"
            )));
        }
        if bits.len() != 1 << n {
            return Err(Error::domain(format!("table has {} entries, expected 2^{n}", bits.len())));
        }
        Ok(BooleanFn { n, bits })
    }

    pub fn from_fn(n: usize, f: impl FnMut(u64) -> bool) -> Result<Self> {
        if n == 0 || n > MAX_TABLE_VOTERS {
            return Err(Error::UnsupportedDimension(format!("{n} inputs")));
        }
        BooleanFn::new(n, (0..1u64 << n).map(f).collect())
    }

    pub fn dictator(n: usize, i: Voter) -> Result<Self> {
        if i >= n {
            return Err(Error::domain(format!("voter {i} out of range for {n} voters")));
        }
        BooleanFn::from_fn(n, |z| z >> i & 1 == 1)
    }

    /// Strict majority; ties (even `n`) go to 0.
    pub fn majority(n: usize) -> Result<Self> {
        BooleanFn::from_fn(n, |z| 2 * z.count_ones() as usize > n)
    }

    pub fn parity(n: usize) -> Result<Self> {
        BooleanFn::from_fn(n, |z| z.count_ones() % 2 == 1)
    }

    pub fn constant(n: usize, value: bool) -> Result<Self> {
        BooleanFn::from_fn(n, |_| value)
    }

    /// Uniformly random table.
    pub fn random(n: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        BooleanFn::from_fn(n, |_| rng.gen::<bool>())
    }

    /// Uniformly random odd function: free on inputs whose top bit is 0,
    /// forced on their complements.
    pub fn random_odd(n: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let half: Vec<bool> = (0..1u64 << (n.max(1) - 1)).map(|_| rng.gen()).collect();
        let mask = (1u64 << n) - 1;
        BooleanFn::from_fn(n, |z| {
            if z >> (n - 1) & 1 == 0 {
                half[z as usize]
            } else {
                !half[(!z & mask) as usize]
            }
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn eval(&self, z: u64) -> bool {
        self.bits[z as usize]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn ones(&self) -> u64 {
        self.bits.iter().filter(|&&b| b).count() as u64
    }

    fn mask(&self) -> u64 {
        (1u64 << self.n) - 1
    }

    /// `g(complement z) = 1 - g(z)` for every `z`.
    pub fn is_odd(&self) -> bool {
        (0..1u64 << self.n).all(|z| self.eval(z) != self.eval(!z & self.mask()))
    }

    pub fn is_constant(&self) -> bool {
        self.bits.iter().all(|&b| b == self.bits[0])
    }

    /// `z -> 1 - g(complement z)`: the same preference read for the reversed
    /// pair.
    pub fn dual(&self) -> Self {
        let mask = self.mask();
        BooleanFn { n: self.n, bits: (0..1u64 << self.n).map(|z| !self.eval(!z & mask)).collect() }
    }
}

/// An IIA GSWF: one Boolean table per pair `a < b`, in lexicographic pair
/// order. A table output of 1 means society prefers `a` to `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GswfIia {
    m: usize,
    n: usize,
    tables: Vec<BooleanFn>,
}

const GSWF_MAGIC: &[u8; 4] = b"GSWF";
const FORMAT_VERSION: u8 = 1;

impl GswfIia {
    pub fn new(m: usize, n: usize, tables: Vec<BooleanFn>) -> Result<Self> {
        if !(2..=MAX_ALTERNATIVES).contains(&m) {
            return Err(Error::UnsupportedDimension(format!(
                "{m} alternatives (supported: 2..={MAX_ALTERNATIVES})"
            )));
        }
        if tables.len() != pair_count(m) {
            return Err(Error::domain(format!(
                "{} pairwise tables for {m} alternatives, expected {}",
                tables.len(),
                pair_count(m)
            )));
        }
        if tables.iter().any(|t| t.n() != n) {
            return Err(Error::domain("pairwise tables disagree on voter count"));
        }
        Ok(GswfIia { m, n, tables })
    }

    /// Every pairwise table equal to voter `i`'s preference.
    pub fn dictator(m: usize, n: usize, i: Voter) -> Result<Self> {
        let t = BooleanFn::dictator(n, i)?;
        GswfIia::new(m, n, vec![t; pair_count(m)])
    }

    /// Every pairwise table the reverse of voter `i`'s preference.
    pub fn anti_dictator(m: usize, n: usize, i: Voter) -> Result<Self> {
        let t = BooleanFn::dictator(n, i)?;
        let anti = BooleanFn::from_fn(n, |z| !t.eval(z))?;
        GswfIia::new(m, n, vec![anti; pair_count(m)])
    }

    /// Independent uniformly random tables.
    pub fn random(m: usize, n: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tables = (0..pair_count(m))
            .map(|_| BooleanFn::random(n, rng.gen()))
            .collect::<Result<Vec<_>>>()?;
        GswfIia::new(m, n, tables)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Table for pair `a < b`.
    pub fn table(&self, a: Alternative, b: Alternative) -> &BooleanFn {
        &self.tables[pair_index(self.m, a, b)]
    }

    pub fn tables(&self) -> &[BooleanFn] {
        &self.tables
    }

    /// `G^{a,b}(z)` for any ordered pair, where `z` is the `(a, b)` column.
    pub fn pref(&self, a: Alternative, b: Alternative, z: u64) -> bool {
        if a < b {
            self.table(a, b).eval(z)
        } else {
            let mask = (1u64 << self.n) - 1;
            !self.table(b, a).eval(!z & mask)
        }
    }

    /// Packed pairwise outputs at a profile: bit `p` is the output for pair
    /// `p` in lexicographic order.
    pub fn outputs(&self, ballots: &[OrderIndex]) -> u64 {
        let orders = OrderSet::get(self.m);
        let mut out = 0u64;
        for (p, table) in self.tables.iter().enumerate() {
            let z = ballots
                .iter()
                .enumerate()
                .fold(0u64, |acc, (v, &k)| acc | ((orders.pair_mask(k) >> p & 1) << v));
            out |= (table.eval(z) as u64) << p;
        }
        out
    }

    /// GCW at a profile given as order indices.
    pub fn gcw_winner_ballots(&self, ballots: &[OrderIndex]) -> Option<Alternative> {
        let beats = beat_masks(self.m, self.outputs(ballots));
        gcw_among(&beats, full_mask(self.m))
    }

    /// Neutral when every table is the same odd function.
    pub fn is_neutral(&self) -> bool {
        self.tables.iter().all(|t| t == &self.tables[0]) && self.tables[0].is_odd()
    }

    /// GSWF encoding: magic, version, m, n (u16 LE), then each pairwise
    /// table as `2^n` bits, least significant bit first, padded to whole
    /// bytes.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(GSWF_MAGIC);
        out.push(FORMAT_VERSION);
        out.push(self.m as u8);
        out.extend_from_slice(&(self.n as u16).to_le_bytes());
        for t in &self.tables {
            let mut bytes = vec![0u8; t.bits.len().div_ceil(8)];
            for (z, &b) in t.bits.iter().enumerate() {
                if b {
                    bytes[z / 8] |= 1 << (z % 8);
                }
            }
            out.extend_from_slice(&bytes);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 8 || &bytes[..4] != GSWF_MAGIC {
            return Err(Error::Format("missing GSWF magic".into()));
        }
        if bytes[4] != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported GSWF version {}", bytes[4])));
        }
        let m = bytes[5] as usize;
        let n = u16::from_le_bytes([bytes[6], bytes[7]]) as usize;
        if n == 0 || n > MAX_TABLE_VOTERS || !(2..=MAX_ALTERNATIVES).contains(&m) {
            return Err(Error::Format(format!("unsupported dimensions m={m}, n={n}")));
        }
        let per_table = (1usize << n).div_ceil(8);
        let body = &bytes[8..];
        if body.len() != per_table * pair_count(m) {
            return Err(Error::Format(format!(
                "body has {} bytes, expected {}",
                body.len(),
                per_table * pair_count(m)
            )));
        }
        let tables = body
            .chunks(per_table)
            .map(|chunk| {
                let bits = (0..1usize << n).map(|z| chunk[z / 8] >> (z % 8) & 1 == 1).collect();
                BooleanFn::new(n, bits)
            })
            .collect::<Result<Vec<_>>>()?;
        GswfIia::new(m, n, tables)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        GswfIia::from_bytes(&std::fs::read(path)?)
    }
}

/// A neutral IIA GSWF: the same odd function `g` on every pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeutralGswf {
    g: BooleanFn,
    m: usize,
}

impl NeutralGswf {
    pub fn g(&self) -> &BooleanFn {
        &self.g
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn to_gswf(&self) -> GswfIia {
        GswfIia { m: self.m, n: self.g.n(), tables: vec![self.g.clone(); pair_count(self.m)] }
    }
}

/// `G = g` on every pair of `m` alternatives; `g` must be odd.
pub fn neutral_tensor(g: &BooleanFn, m: usize) -> Result<NeutralGswf> {
    if !g.is_odd() {
        return Err(Error::domain("a neutral GSWF needs an odd pairwise function"));
    }
    if !(2..=MAX_ALTERNATIVES).contains(&m) {
        return Err(Error::UnsupportedDimension(format!("{m} alternatives")));
    }
    Ok(NeutralGswf { g: g.clone(), m })
}

/// Keep the tables of pairs inside `subset`, relabelled `0..subset.len()` in
/// the given order.
pub fn restrict_gswf(g: &GswfIia, subset: &[Alternative]) -> Result<GswfIia> {
    if subset.len() < 2 {
        return Err(Error::domain("a restriction needs at least two alternatives"));
    }
    let mut seen = vec![false; g.m];
    for &a in subset {
        if a >= g.m || seen[a] {
            return Err(Error::domain(format!("bad alternative subset {subset:?}")));
        }
        seen[a] = true;
    }
    let k = subset.len();
    let tables = pairs(k)
        .into_iter()
        .map(|(i, j)| {
            let (a, b) = (subset[i], subset[j]);
            if a < b {
                g.table(a, b).clone()
            } else {
                g.table(b, a).dual()
            }
        })
        .collect();
    GswfIia::new(k, g.n, tables)
}

pub(crate) fn full_mask(m: usize) -> u8 {
    ((1u16 << m) - 1) as u8
}

/// `beats[a]` has bit `b` set iff society prefers `a` to `b`.
pub(crate) fn beat_masks(m: usize, outputs: u64) -> [u8; MAX_ALTERNATIVES] {
    let mut beats = [0u8; MAX_ALTERNATIVES];
    let mut p = 0;
    for a in 0..m {
        for b in a + 1..m {
            if outputs >> p & 1 == 1 {
                beats[a] |= 1 << b;
            } else {
                beats[b] |= 1 << a;
            }
            p += 1;
        }
    }
    beats
}

/// The alternative in `subset` beating every other member of `subset`.
pub(crate) fn gcw_among(beats: &[u8; MAX_ALTERNATIVES], subset: u8) -> Option<Alternative> {
    (0..MAX_ALTERNATIVES)
        .filter(|&a| subset >> a & 1 == 1)
        .find(|&a| beats[a] & subset == subset & !(1 << a))
}

/// The alternative in `subset` losing to every other member of `subset`.
pub(crate) fn gcl_among(beats: &[u8; MAX_ALTERNATIVES], subset: u8) -> Option<Alternative> {
    (0..MAX_ALTERNATIVES)
        .filter(|&a| subset >> a & 1 == 1)
        .find(|&a| beats[a] & subset == 0)
}

/// GCW at an explicit profile.
pub fn profile_gcw(g: &GswfIia, p: &Profile) -> Option<Alternative> {
    g.gcw_winner_ballots(&p.ballots())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boolean_function_basics() {
        let maj = BooleanFn::majority(3).unwrap();
        assert!(maj.is_odd());
        assert_eq!(maj.ones(), 4);
        assert!(!BooleanFn::constant(3, true).unwrap().is_odd());
        assert!(!BooleanFn::majority(2).unwrap().is_odd());
        assert!(BooleanFn::parity(3).unwrap().is_odd());
        assert!(!BooleanFn::parity(2).unwrap().is_odd());
        for seed in 0..20 {
            let g = BooleanFn::random_odd(4, seed).unwrap();
            assert!(g.is_odd());
            assert_eq!(g.ones(), 8);
        }
        assert!(BooleanFn::new(2, vec![true; 3]).is_err());
    }

    #[test]
    fn pref_orientation() {
        let g = GswfIia::random(3, 2, 4).unwrap();
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            for z in 0..4 {
                assert_eq!(g.pref(a, b, z), !g.pref(b, a, !z & 3));
            }
        }
    }

    #[test]
    fn neutral_tensor_rejects_non_odd() {
        assert!(neutral_tensor(&BooleanFn::constant(2, true).unwrap(), 3).is_err());
        let d = neutral_tensor(&BooleanFn::dictator(3, 1).unwrap(), 4).unwrap();
        assert_eq!(d.to_gswf(), GswfIia::dictator(4, 3, 1).unwrap());
        assert!(d.to_gswf().is_neutral());
    }

    #[test]
    fn restriction() {
        let g = GswfIia::random(4, 2, 9).unwrap();
        assert_eq!(restrict_gswf(&g, &[0, 1, 2, 3]).unwrap(), g);
        let r = restrict_gswf(&g, &[3, 1]).unwrap();
        for z in 0..4 {
            assert_eq!(r.pref(0, 1, z), g.pref(3, 1, z));
        }
        let t = neutral_tensor(&BooleanFn::majority(3).unwrap(), 4).unwrap().to_gswf();
        let t3 = neutral_tensor(&BooleanFn::majority(3).unwrap(), 3).unwrap().to_gswf();
        assert_eq!(restrict_gswf(&t, &[0, 2, 3]).unwrap(), t3);
        assert!(restrict_gswf(&g, &[1]).is_err());
        assert!(restrict_gswf(&g, &[1, 1]).is_err());
    }

    #[test]
    fn gswf_file_layout() {
        let g = GswfIia::dictator(3, 3, 0).unwrap();
        let bytes = g.to_bytes();
        assert_eq!(&bytes[..8], b"GSWF\x01\x03\x03\x00");
        // dictator 0 on 3 voters: z with bit 0 set -> 0b10101010
        assert_eq!(&bytes[8..], &[0xAA, 0xAA, 0xAA]);
        assert_eq!(GswfIia::from_bytes(&bytes).unwrap(), g);
        let g = GswfIia::random(4, 2, 1).unwrap();
        assert_eq!(g.to_bytes().len(), 8 + 6);
        assert_eq!(GswfIia::from_bytes(&g.to_bytes()).unwrap(), g);
        assert!(GswfIia::from_bytes(&bytes[..10]).is_err());
    }

    #[test]
    fn gcw_helpers() {
        // 0 beats 1, 0 beats 2, 1 beats 2
        let beats = beat_masks(3, 0b111);
        assert_eq!(gcw_among(&beats, 0b111), Some(0));
        assert_eq!(gcl_among(&beats, 0b111), Some(2));
        assert_eq!(gcw_among(&beats, 0b110), Some(1));
        // cycle: 0>1, 2>0, 1>2
        let beats = beat_masks(3, 0b101);
        assert_eq!(gcw_among(&beats, 0b111), None);
        assert_eq!(gcl_among(&beats, 0b111), None);
    }
}
