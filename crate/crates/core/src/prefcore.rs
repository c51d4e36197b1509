//! Linear orders, profiles, pairwise columns and the `{0,1,2}^n` view of a
//! three-alternative profile.
//!
//! Encodings are fixed because the table and GSWF file formats depend on
//! them:
//!
//! * an order is stored top-first and indexed by the lexicographic rank of
//!   its ranking sequence among all `m!` permutations;
//! * a profile index is `sum_v order_index(v) * (m!)^v`, voter 0 least
//!   significant;
//! * bit `v` of a pairwise column is voter `v`'s preference, so a column is
//!   also an index into a `2^n` table;
//! * ternary digit `v` locates the third alternative in voter `v`'s order:
//!   0 above the pair, 1 between, 2 below.

use std::sync::OnceLock;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Largest alternative count with a precomputed [`OrderSet`].
pub const MAX_ALTERNATIVES: usize = 8;

/// Largest voter count for which pairwise columns fit in a machine word.
pub const MAX_COLUMN_VOTERS: usize = 63;

pub type Alternative = usize;
pub type Voter = usize;

/// Index of an order within [`OrderSet::get`]`(m)`.
pub type OrderIndex = u16;

pub fn factorial(m: usize) -> u64 {
    (1..=m as u64).product()
}

/// `(m!)^n`, or `None` on overflow.
pub fn profile_count(m: usize, n: usize) -> Option<u64> {
    let f = factorial(m);
    (0..n).try_fold(1u64, |acc, _| acc.checked_mul(f))
}

/// `base^exp` as u64. Panics on overflow; callers bound `exp` first.
pub(crate) fn pow(base: u64, exp: usize) -> u64 {
    base.checked_pow(exp as u32).expect("power overflows u64")
}

/// Number of unordered pairs, `C(m, 2)`.
pub fn pair_count(m: usize) -> usize {
    m * m.saturating_sub(1) / 2
}

/// Position of `(a, b)`, `a < b`, in lexicographic pair order.
pub fn pair_index(m: usize, a: Alternative, b: Alternative) -> usize {
    debug_assert!(a < b && b < m);
    a * (2 * m - a - 1) / 2 + (b - a - 1)
}

/// All pairs `a < b` in lexicographic order.
pub fn pairs(m: usize) -> Vec<(Alternative, Alternative)> {
    (0..m)
        .flat_map(|a| (a + 1..m).map(move |b| (a, b)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearOrder {
    ranking: Vec<u8>,
}

impl LinearOrder {
    /// Build from a top-first ranking; rejects anything that is not a
    /// permutation of `0..m`.
    pub fn new(ranking: Vec<u8>) -> Result<Self> {
        let m = ranking.len();
        if m == 0 || m > MAX_ALTERNATIVES {
            return Err(Error::UnsupportedDimension(format!(
                "{m} alternatives (supported: 1..={MAX_ALTERNATIVES})"
            )));
        }
        let mut seen = vec![false; m];
        for &a in &ranking {
            let a = a as usize;
            if a >= m || seen[a] {
                return Err(Error::domain(format!("{ranking:?} is not a permutation")));
            }
            seen[a] = true;
        }
        Ok(LinearOrder { ranking })
    }

    pub fn from_index(k: u64, m: usize) -> Result<Self> {
        order_from_index(k, m)
    }

    pub fn m(&self) -> usize {
        self.ranking.len()
    }

    pub fn ranking(&self) -> &[u8] {
        &self.ranking
    }

    pub fn top(&self) -> Alternative {
        self.ranking[0] as usize
    }

    pub fn bottom(&self) -> Alternative {
        *self.ranking.last().unwrap() as usize
    }

    /// Rank of `a`, 0 = most preferred.
    pub fn position(&self, a: Alternative) -> usize {
        self.ranking.iter().position(|&x| x as usize == a).unwrap()
    }

    pub fn prefers(&self, a: Alternative, b: Alternative) -> bool {
        self.position(a) < self.position(b)
    }

    pub fn index(&self) -> u64 {
        order_to_index(self)
    }
}

/// The `k`-th order in lexicographic order of top-first rankings.
pub fn order_from_index(k: u64, m: usize) -> Result<LinearOrder> {
    if m == 0 || m > MAX_ALTERNATIVES {
        return Err(Error::UnsupportedDimension(format!("{m} alternatives")));
    }
    let total = factorial(m);
    if k >= total {
        return Err(Error::domain(format!("order index {k} out of range [0, {total})")));
    }
    let mut pool: Vec<u8> = (0..m as u8).collect();
    let mut rest = k;
    let mut ranking = Vec::with_capacity(m);
    for slot in (0..m).rev() {
        let block = factorial(slot);
        let pick = (rest / block) as usize;
        rest %= block;
        ranking.push(pool.remove(pick));
    }
    Ok(LinearOrder { ranking })
}

pub fn order_to_index(order: &LinearOrder) -> u64 {
    let m = order.m();
    let mut pool: Vec<u8> = (0..m as u8).collect();
    let mut k = 0;
    for (slot, &a) in order.ranking.iter().enumerate() {
        let pick = pool.iter().position(|&x| x == a).unwrap();
        pool.remove(pick);
        k += pick as u64 * factorial(m - 1 - slot);
    }
    k
}

/// Lookup tables over all orders on `m` alternatives.
#[derive(Debug)]
pub struct OrderSet {
    m: usize,
    count: usize,
    rankings: Vec<u8>,
    positions: Vec<u8>,
    pair_masks: Vec<u64>,
}

impl OrderSet {
    /// Shared tables for `m` in `2..=MAX_ALTERNATIVES`.
    pub fn get(m: usize) -> &'static OrderSet {
        static SETS: [OnceLock<OrderSet>; MAX_ALTERNATIVES + 1] =
            [const { OnceLock::new() }; MAX_ALTERNATIVES + 1];
        assert!(
            (2..=MAX_ALTERNATIVES).contains(&m),
            "order tables exist for 2..={MAX_ALTERNATIVES} alternatives, got {m}"
        );
        SETS[m].get_or_init(|| OrderSet::build(m))
    }

    fn build(m: usize) -> Self {
        let count = factorial(m) as usize;
        let mut rankings = Vec::with_capacity(count * m);
        let mut positions = vec![0u8; count * m];
        let mut pair_masks = Vec::with_capacity(count);
        for k in 0..count {
            let order = order_from_index(k as u64, m).unwrap();
            for (r, &a) in order.ranking.iter().enumerate() {
                positions[k * m + a as usize] = r as u8;
            }
            rankings.extend_from_slice(&order.ranking);
            let mut mask = 0u64;
            for (p, (a, b)) in pairs(m).into_iter().enumerate() {
                if positions[k * m + a] < positions[k * m + b] {
                    mask |= 1 << p;
                }
            }
            pair_masks.push(mask);
        }
        OrderSet { m, count, rankings, positions, pair_masks }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    #[inline]
    pub fn ranking(&self, k: OrderIndex) -> &[u8] {
        let k = k as usize;
        &self.rankings[k * self.m..(k + 1) * self.m]
    }

    #[inline]
    pub fn top(&self, k: OrderIndex) -> Alternative {
        self.rankings[k as usize * self.m] as usize
    }

    #[inline]
    pub fn bottom(&self, k: OrderIndex) -> Alternative {
        self.rankings[(k as usize + 1) * self.m - 1] as usize
    }

    /// Rank of `a` in order `k`, 0 = top.
    #[inline]
    pub fn position(&self, k: OrderIndex, a: Alternative) -> usize {
        self.positions[k as usize * self.m + a] as usize
    }

    #[inline]
    pub fn prefers(&self, k: OrderIndex, a: Alternative, b: Alternative) -> bool {
        self.position(k, a) < self.position(k, b)
    }

    /// Bit `p` set iff the order puts the smaller alternative of pair `p`
    /// first.
    #[inline]
    pub fn pair_mask(&self, k: OrderIndex) -> u64 {
        self.pair_masks[k as usize]
    }

    /// Index of the order whose ranking applies `perm` to order `k`'s
    /// ranking alternative-wise.
    pub fn relabel(&self, k: OrderIndex, perm: &[u8]) -> OrderIndex {
        let ranking: Vec<u8> = self.ranking(k).iter().map(|&a| perm[a as usize]).collect();
        order_to_index(&LinearOrder { ranking }) as OrderIndex
    }
}

/// A profile: one order per voter, all on the same alternatives.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Profile {
    voters: Vec<LinearOrder>,
}

impl Profile {
    pub fn new(voters: Vec<LinearOrder>) -> Result<Self> {
        let Some(first) = voters.first() else {
            return Err(Error::domain("a profile needs at least one voter"));
        };
        let m = first.m();
        if voters.iter().any(|v| v.m() != m) {
            return Err(Error::domain("voters rank different alternative sets"));
        }
        Ok(Profile { voters })
    }

    pub fn from_rankings(rankings: &[&[u8]]) -> Result<Self> {
        let voters = rankings
            .iter()
            .map(|r| LinearOrder::new(r.to_vec()))
            .collect::<Result<Vec<_>>>()?;
        Profile::new(voters)
    }

    pub fn n(&self) -> usize {
        self.voters.len()
    }

    pub fn m(&self) -> usize {
        self.voters[0].m()
    }

    pub fn voter(&self, v: Voter) -> &LinearOrder {
        &self.voters[v]
    }

    pub fn voters(&self) -> &[LinearOrder] {
        &self.voters
    }

    /// Order indices, one per voter.
    pub fn ballots(&self) -> Vec<OrderIndex> {
        self.voters.iter().map(|o| o.index() as OrderIndex).collect()
    }

    pub fn from_ballots(ballots: &[OrderIndex], m: usize) -> Result<Self> {
        let voters = ballots
            .iter()
            .map(|&k| order_from_index(k as u64, m))
            .collect::<Result<Vec<_>>>()?;
        Profile::new(voters)
    }

    /// `sum_v order_index(v) * (m!)^v`.
    pub fn index(&self) -> Result<u64> {
        profile_index(&self.ballots(), self.m())
    }

    pub fn from_index(index: u64, n: usize, m: usize) -> Result<Self> {
        let total = profile_count(m, n)
            .ok_or_else(|| Error::domain(format!("({m}!)^{n} profiles overflow u64")))?;
        if index >= total {
            return Err(Error::domain(format!("profile index {index} out of range [0, {total})")));
        }
        let mut ballots = vec![0; n];
        decode_profile(index, m, &mut ballots);
        Profile::from_ballots(&ballots, m)
    }
}

/// Profile index of a ballot vector.
pub fn profile_index(ballots: &[OrderIndex], m: usize) -> Result<u64> {
    let f = factorial(m);
    let mut idx = 0u64;
    for &k in ballots.iter().rev() {
        idx = idx
            .checked_mul(f)
            .and_then(|x| x.checked_add(k as u64))
            .ok_or_else(|| Error::domain("profile index overflows u64"))?;
    }
    Ok(idx)
}

/// Inverse of [`profile_index`] into a preallocated ballot buffer.
pub fn decode_profile(mut index: u64, m: usize, ballots: &mut [OrderIndex]) {
    let f = factorial(m);
    for b in ballots.iter_mut() {
        *b = (index % f) as OrderIndex;
        index /= f;
    }
}

/// Advance `ballots` to the next profile index. Returns false on wrap.
#[inline]
pub(crate) fn next_profile(ballots: &mut [OrderIndex], orders: usize) -> bool {
    for b in ballots.iter_mut() {
        *b += 1;
        if (*b as usize) < orders {
            return true;
        }
        *b = 0;
    }
    false
}

/// Preferences of every voter on one ordered pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PairwiseColumn {
    n: usize,
    bits: u64,
}

impl PairwiseColumn {
    pub fn new(n: usize, bits: u64) -> Result<Self> {
        if n == 0 || n > MAX_COLUMN_VOTERS {
            return Err(Error::UnsupportedDimension(format!(
                "{n} voters in a pairwise column (supported: 1..={MAX_COLUMN_VOTERS})"
            )));
        }
        if bits >> n != 0 {
            return Err(Error::domain(format!("column {bits:#b} wider than {n} voters")));
        }
        Ok(PairwiseColumn { n, bits })
    }

    pub fn from_bools(bits: &[bool]) -> Result<Self> {
        let packed = bits
            .iter()
            .enumerate()
            .fold(0u64, |acc, (v, &b)| acc | ((b as u64) << v));
        PairwiseColumn::new(bits.len(), packed)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Packed bits, voter 0 least significant. Doubles as a table index.
    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn bit(&self, v: Voter) -> bool {
        self.bits >> v & 1 == 1
    }

    pub fn complement(&self) -> Self {
        PairwiseColumn { n: self.n, bits: !self.bits & ((1u64 << self.n) - 1) }
    }
}

/// Voter `v` prefers `a` over `b` iff bit `v` is set.
pub fn pairwise_column(p: &Profile, a: Alternative, b: Alternative) -> Result<PairwiseColumn> {
    check_pair(p.m(), a, b)?;
    let bools: Vec<bool> = p.voters().iter().map(|o| o.prefers(a, b)).collect();
    PairwiseColumn::from_bools(&bools)
}

pub(crate) fn check_pair(m: usize, a: Alternative, b: Alternative) -> Result<()> {
    if a == b {
        return Err(Error::domain(format!("pair ({a}, {b}) needs two distinct alternatives")));
    }
    if a >= m || b >= m {
        return Err(Error::domain(format!("pair ({a}, {b}) outside {m} alternatives")));
    }
    Ok(())
}

/// Location of the third alternative relative to a pair, per voter.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TernaryVector {
    digits: Vec<u8>,
}

impl TernaryVector {
    pub fn new(digits: Vec<u8>) -> Result<Self> {
        if let Some(d) = digits.iter().find(|&&d| d > 2) {
            return Err(Error::domain(format!("ternary digit {d} outside {{0,1,2}}")));
        }
        Ok(TernaryVector { digits })
    }

    pub fn from_index(mut index: u64, n: usize) -> Self {
        let digits = (0..n)
            .map(|_| {
                let d = (index % 3) as u8;
                index /= 3;
                d
            })
            .collect();
        TernaryVector { digits }
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    /// `sum_i digit_i * 3^i`.
    pub fn index(&self) -> u64 {
        self.digits.iter().rev().fold(0, |acc, &d| acc * 3 + d as u64)
    }
}

/// The alternative other than `a` and `b` when `m = 3`.
#[inline]
pub fn third(a: Alternative, b: Alternative) -> Alternative {
    3 - a - b
}

/// Order index (m = 3) of the voter with pair bit `bit` for `(a, b)` and
/// third-alternative digit `digit`.
#[inline]
pub fn compose_ballot(a: Alternative, b: Alternative, bit: bool, digit: u8) -> OrderIndex {
    static TABLE: OnceLock<[[[[OrderIndex; 3]; 2]; 3]; 3]> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = [[[[0; 3]; 2]; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                if a == b {
                    continue;
                }
                let c = third(a, b) as u8;
                let (hi, lo) = (a as u8, b as u8);
                for (bit, (x, y)) in [(lo, hi), (hi, lo)].into_iter().enumerate() {
                    let rankings = [[c, x, y], [x, c, y], [x, y, c]];
                    for (d, r) in rankings.into_iter().enumerate() {
                        t[a][b][bit][d] =
                            order_to_index(&LinearOrder { ranking: r.to_vec() }) as OrderIndex;
                    }
                }
            }
        }
        t
    });
    table[a][b][bit as usize][digit as usize]
}

/// Split an m = 3 profile into its `(a, b)` column and the position of the
/// third alternative.
pub fn decompose(
    p: &Profile,
    a: Alternative,
    b: Alternative,
) -> Result<(PairwiseColumn, TernaryVector)> {
    if p.m() != 3 {
        return Err(Error::UnsupportedDimension(format!(
            "decomposition needs 3 alternatives, profile has {}",
            p.m()
        )));
    }
    let column = pairwise_column(p, a, b)?;
    let c = third(a, b);
    let digits = p
        .voters()
        .iter()
        .map(|o| {
            let pc = o.position(c);
            let lo = o.position(a).min(o.position(b));
            let hi = o.position(a).max(o.position(b));
            if pc < lo {
                0
            } else if pc < hi {
                1
            } else {
                2
            }
        })
        .collect();
    Ok((column, TernaryVector { digits }))
}

/// Inverse of [`decompose`].
pub fn compose(
    column: &PairwiseColumn,
    ternary: &TernaryVector,
    a: Alternative,
    b: Alternative,
) -> Result<Profile> {
    check_pair(3, a, b)?;
    if ternary.digits.len() != column.n() {
        return Err(Error::domain("column and ternary vector disagree on voter count"));
    }
    let ballots: Vec<OrderIndex> = ternary
        .digits
        .iter()
        .enumerate()
        .map(|(v, &d)| compose_ballot(a, b, column.bit(v), d))
        .collect();
    Profile::from_ballots(&ballots, 3)
}

/// Chunk size used by every deterministic parallel loop over an index range.
pub(crate) const ENUM_CHUNK: u64 = 1 << 12;

/// Fold over every profile in `(L_m)^n`. Chunks are reduced in index order,
/// so the result does not depend on the thread count.
pub(crate) fn fold_profiles<A, Id, F, R>(m: usize, n: usize, identity: Id, fold: F, reduce: R) -> A
where
    A: Send,
    Id: Fn() -> A + Sync,
    F: Fn(&mut A, &[OrderIndex]) + Sync,
    R: Fn(A, A) -> A,
{
    let total = profile_count(m, n).expect("caller checks the enumeration budget");
    let orders = factorial(m) as usize;
    let chunks = total.div_ceil(ENUM_CHUNK);
    let parts: Vec<A> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * ENUM_CHUNK;
            let end = (start + ENUM_CHUNK).min(total);
            let mut acc = identity();
            let mut ballots = vec![0; n];
            decode_profile(start, m, &mut ballots);
            for _ in start..end {
                fold(&mut acc, &ballots);
                next_profile(&mut ballots, orders);
            }
            acc
        })
        .collect();
    parts.into_iter().fold(identity(), reduce)
}

/// Deterministic parallel map-reduce over `0..total`.
pub(crate) fn fold_range<A, Id, F, R>(total: u64, identity: Id, fold: F, reduce: R) -> A
where
    A: Send,
    Id: Fn() -> A + Sync,
    F: Fn(&mut A, u64) + Sync,
    R: Fn(A, A) -> A,
{
    let chunks = total.div_ceil(ENUM_CHUNK);
    let parts: Vec<A> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = identity();
            for i in c * ENUM_CHUNK..((c + 1) * ENUM_CHUNK).min(total) {
                fold(&mut acc, i);
            }
            acc
        })
        .collect();
    parts.into_iter().fold(identity(), reduce)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexicographic_endpoints() {
        assert_eq!(order_from_index(0, 3).unwrap().ranking(), &[0, 1, 2]);
        assert_eq!(order_from_index(5, 3).unwrap().ranking(), &[2, 1, 0]);
        assert!(order_from_index(6, 3).is_err());
    }

    #[test]
    fn order_index_bijection_m6() {
        for k in 0..720 {
            let o = order_from_index(k, 6).unwrap();
            assert_eq!(order_to_index(&o), k);
        }
    }

    #[test]
    fn rejects_non_permutations() {
        assert!(LinearOrder::new(vec![0, 0, 1]).is_err());
        assert!(LinearOrder::new(vec![0, 3, 1]).is_err());
        let o = LinearOrder::new(vec![1, 2, 0]).unwrap();
        assert!(o.prefers(1, 0) && o.prefers(2, 0) && !o.prefers(0, 1));
    }

    #[test]
    fn profile_index_examples() {
        let all_first = Profile::from_rankings(&[&[0, 1, 2], &[0, 1, 2], &[0, 1, 2]]).unwrap();
        assert_eq!(all_first.index().unwrap(), 0);
        let single = Profile::from_rankings(&[&[2, 1, 0]]).unwrap();
        assert_eq!(single.index().unwrap(), 5);
        let last = Profile::from_index(216 - 1, 3, 3).unwrap();
        assert!(last.voters().iter().all(|o| o.ranking() == [2, 1, 0]));
        assert!(Profile::from_index(216, 3, 3).is_err());
    }

    #[test]
    fn voter_zero_is_least_significant() {
        let p = Profile::from_rankings(&[&[0, 2, 1], &[0, 1, 2]]).unwrap();
        assert_eq!(p.index().unwrap(), 1);
        let p = Profile::from_rankings(&[&[0, 1, 2], &[0, 2, 1]]).unwrap();
        assert_eq!(p.index().unwrap(), 6);
    }

    #[test]
    fn pairwise_columns() {
        // voter 0: a c b, voter 1: b a c with a=0, b=1, c=2
        let p = Profile::from_rankings(&[&[0, 2, 1], &[1, 0, 2]]).unwrap();
        let col = pairwise_column(&p, 0, 1).unwrap();
        assert_eq!(col.bits(), 0b01);
        assert_eq!(pairwise_column(&p, 1, 0).unwrap(), col.complement());
        assert!(pairwise_column(&p, 1, 1).is_err());
        let unanimous = Profile::from_rankings(&[&[0u8, 1, 2][..]; 4]).unwrap();
        assert_eq!(pairwise_column(&unanimous, 0, 2).unwrap().bits(), 0b1111);
    }

    #[test]
    fn decompose_examples() {
        let (a, b) = (0, 1);
        let p = Profile::from_rankings(&[&[2, 0, 1]]).unwrap();
        let (col, t) = decompose(&p, a, b).unwrap();
        assert!(col.bit(0));
        assert_eq!(t.digits(), &[0]);
        let p = Profile::from_rankings(&[&[0, 2, 1]]).unwrap();
        let (col, t) = decompose(&p, a, b).unwrap();
        assert!(col.bit(0));
        assert_eq!(t.digits(), &[1]);
        let four = Profile::from_rankings(&[&[0, 1, 2, 3]]).unwrap();
        assert!(matches!(decompose(&four, 0, 1), Err(Error::UnsupportedDimension(_))));
    }

    #[test]
    fn compose_inverts_decompose_all_pairs_n3() {
        for idx in 0..216 {
            let p = Profile::from_index(idx, 3, 3).unwrap();
            for a in 0..3 {
                for b in 0..3 {
                    if a == b {
                        continue;
                    }
                    let (col, t) = decompose(&p, a, b).unwrap();
                    let q = compose(&col, &t, a, b).unwrap();
                    assert_eq!(p, q);
                    for x in 0..3 {
                        for y in 0..3 {
                            if x != y {
                                assert_eq!(
                                    pairwise_column(&p, x, y).unwrap(),
                                    pairwise_column(&q, x, y).unwrap()
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn fibres_are_ternary_cubes() {
        // For fixed (a,b) and column z, the 3^n completions are distinct and
        // are exactly the profiles with that column.
        for n in 1..=4usize {
            let total = profile_count(3, n).unwrap();
            for (a, b) in [(0, 1), (2, 0), (1, 2)] {
                let mut hits = vec![0u32; total as usize];
                for z in 0..1u64 << n {
                    let col = PairwiseColumn::new(n, z).unwrap();
                    for v in 0..pow(3, n) {
                        let t = TernaryVector::from_index(v, n);
                        let p = compose(&col, &t, a, b).unwrap();
                        assert_eq!(pairwise_column(&p, a, b).unwrap(), col);
                        hits[p.index().unwrap() as usize] += 1;
                    }
                }
                assert!(hits.iter().all(|&h| h == 1));
            }
        }
    }

    #[test]
    fn pair_indexing_is_lexicographic() {
        let ps = pairs(4);
        assert_eq!(ps, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        for (i, &(a, b)) in ps.iter().enumerate() {
            assert_eq!(pair_index(4, a, b), i);
        }
    }

    #[test]
    fn fold_profiles_visits_each_index_once() {
        let sum = fold_profiles(
            3,
            4,
            || 0u64,
            |acc, ballots| *acc += profile_index(ballots, 3).unwrap(),
            |x, y| x + y,
        );
        let total = 1296u64;
        assert_eq!(sum, total * (total - 1) / 2);
    }
}
