use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prefcore::{fold_profiles, pair_index, profile_count, Alternative, OrderSet, Voter};
use crate::report::{require_budget, MetricReport};
use crate::Exact;

use super::gcw::ratio;
use super::{BooleanFn, GswfIia};

/// A member of the always-transitive family on three alternatives.
///
/// For the fixed-alternative variants, `h` is the table of the two remaining
/// alternatives `u < w` (1 means `u` above `w`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TrMember {
    Dictator(Voter),
    AntiDictator(Voter),
    TopFixed { top: Alternative, h: BooleanFn },
    BottomFixed { bottom: Alternative, h: BooleanFn },
}

impl TrMember {
    pub fn to_gswf(&self, n: usize) -> Result<GswfIia> {
        match self {
            TrMember::Dictator(i) => GswfIia::dictator(3, n, *i),
            TrMember::AntiDictator(i) => GswfIia::anti_dictator(3, n, *i),
            TrMember::TopFixed { top, h } => fixed(*top, h, true),
            TrMember::BottomFixed { bottom, h } => fixed(*bottom, h, false),
        }
    }

    pub fn label(&self) -> String {
        match self {
            TrMember::Dictator(i) => format!("dictator({i})"),
            TrMember::AntiDictator(i) => format!("anti_dictator({i})"),
            TrMember::TopFixed { top, .. } => format!("top_fixed({top})"),
            TrMember::BottomFixed { bottom, .. } => format!("bottom_fixed({bottom})"),
        }
    }
}

fn fixed(t: Alternative, h: &BooleanFn, top: bool) -> Result<GswfIia> {
    if t >= 3 {
        return Err(Error::domain(format!("alternative {t} out of range")));
    }
    let n = h.n();
    let mut tables = Vec::with_capacity(3);
    for (a, b) in [(0, 1), (0, 2), (1, 2)] {
        let t_wins = top;
        let table = if a == t {
            BooleanFn::constant(n, t_wins)?
        } else if b == t {
            BooleanFn::constant(n, !t_wins)?
        } else {
            h.clone()
        };
        tables.push(table);
    }
    GswfIia::new(3, n, tables)
}

/// Output bits of pair `(t, x)` oriented so that 1 means `t` wins; returns
/// the mask of pair positions and the bit values meaning "t beats both".
fn top_pattern(t: Alternative) -> (u64, u64) {
    let mut mask = 0;
    let mut want = 0;
    for x in (0..3).filter(|&x| x != t) {
        let p = pair_index(3, t.min(x), t.max(x));
        mask |= 1 << p;
        if t < x {
            want |= 1 << p;
        }
    }
    (mask, want)
}

/// Per-candidate agreement counts: `n` dictators, `n` anti-dictators,
/// 3 top-fixed, 3 bottom-fixed. `per_bit` counts matching bits instead of
/// matching triples.
fn agreements(g: &GswfIia, per_bit: bool) -> Result<(Vec<u64>, u64)> {
    if g.m() != 3 {
        return Err(Error::UnsupportedDimension(format!(
            "TR_3 distance needs 3 alternatives, got {}",
            g.m()
        )));
    }
    let n = g.n();
    require_budget(3, n)?;
    let orders = OrderSet::get(3);
    let patterns: Vec<(u64, u64)> = (0..3).map(top_pattern).collect();
    let score = move |mismatch: u64, width: u32| -> u64 {
        if per_bit {
            (width - mismatch.count_ones()) as u64
        } else {
            (mismatch == 0) as u64
        }
    };
    let counts = fold_profiles(
        3,
        n,
        || vec![0u64; 2 * n + 6],
        |acc, ballots| {
            let out = g.outputs(ballots);
            for (i, &k) in ballots.iter().enumerate() {
                let mask = orders.pair_mask(k);
                acc[i] += score(out ^ mask, 3);
                acc[n + i] += score(out ^ (!mask & 0b111), 3);
            }
            for (t, &(mask, want)) in patterns.iter().enumerate() {
                // the free pair always agrees with the pointwise-optimal h
                let free = if per_bit { 1 } else { 0 };
                acc[2 * n + t] += score((out ^ want) & mask, 2) + free;
                acc[2 * n + 3 + t] += score((out ^ !want) & mask, 2) + free;
            }
        },
        |mut x, y| {
            x.iter_mut().zip(y).for_each(|(a, b)| *a += b);
            x
        },
    );
    let profiles = profile_count(3, n).unwrap();
    Ok((counts, if per_bit { 3 * profiles } else { profiles }))
}

fn witness(g: &GswfIia, k: usize) -> TrMember {
    let n = g.n();
    let free_pair = |t: Alternative| {
        let (u, w) = match t {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        g.table(u, w).clone()
    };
    match k {
        k if k < n => TrMember::Dictator(k),
        k if k < 2 * n => TrMember::AntiDictator(k - n),
        k if k < 2 * n + 3 => TrMember::TopFixed { top: k - 2 * n, h: free_pair(k - 2 * n) },
        k => TrMember::BottomFixed { bottom: k - 2 * n - 3, h: free_pair(k - 2 * n - 3) },
    }
}

fn minimize(g: &GswfIia, per_bit: bool, metric: &str) -> Result<(MetricReport, TrMember)> {
    let (counts, total) = agreements(g, per_bit)?;
    // first candidate with the most agreement
    let (k, &best) = counts
        .iter()
        .enumerate()
        .fold((0, &counts[0]), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
    let member = witness(g, k);
    let report = MetricReport::exact(metric, vec![k], (total - best) as u128, total as u128);
    Ok((report, member))
}

/// Smallest probability, over uniform profiles, that the output triple of
/// `g` differs from that of a member of the always-transitive family, and a
/// minimizing member. Candidates are scanned as dictators, anti-dictators,
/// top-fixed, bottom-fixed; the first minimizer is returned.
pub fn dist_tr3(g: &GswfIia) -> Result<(MetricReport, TrMember)> {
    minimize(g, false, "dist_tr3")
}

/// As [`dist_tr3`], counting disagreeing pairwise bits out of three per
/// profile.
pub fn dist_tr3_per_bit(g: &GswfIia) -> Result<(MetricReport, TrMember)> {
    minimize(g, true, "dist_tr3_per_bit")
}

/// A dictator or anti-dictator on `{0,1}^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DictWitness {
    pub voter: Voter,
    pub anti: bool,
}

/// `min` over voters and polarity of `Pr_z[g(z) != z_i]` or
/// `Pr_z[g(z) != 1 - z_i]`.
pub fn dist_dict2(g: &BooleanFn) -> (Exact, DictWitness) {
    let n = g.n();
    let total = 1u64 << n;
    let mut best = (u64::MAX, DictWitness { voter: 0, anti: false });
    for voter in 0..n {
        let agree = (0..total).filter(|&z| g.eval(z) == (z >> voter & 1 == 1)).count() as u64;
        for (anti, miss) in [(false, total - agree), (true, agree)] {
            if miss < best.0 {
                best = (miss, DictWitness { voter, anti });
            }
        }
    }
    (ratio(best.0, total), best.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrowlab::neutral_tensor;

    #[test]
    fn dictator_is_in_the_family() {
        let g = GswfIia::dictator(3, 3, 0).unwrap();
        let (d, w) = dist_tr3(&g).unwrap();
        assert_eq!(d.mean(), 0.0);
        assert_eq!(w, TrMember::Dictator(0));
        let g = GswfIia::anti_dictator(3, 2, 1).unwrap();
        assert_eq!(dist_tr3(&g).unwrap().1, TrMember::AntiDictator(1));
    }

    #[test]
    fn fixed_members_round_trip() {
        for n in 1..=3 {
            for seed in 0..4 {
                let h = BooleanFn::random(n, seed).unwrap();
                for t in 0..3 {
                    for member in [
                        TrMember::TopFixed { top: t, h: h.clone() },
                        TrMember::BottomFixed { bottom: t, h: h.clone() },
                    ] {
                        let g = member.to_gswf(n).unwrap();
                        let (d, _) = dist_tr3(&g).unwrap();
                        assert_eq!(d.mean(), 0.0, "{}", member.label());
                        assert_eq!(dist_tr3_per_bit(&g).unwrap().0.mean(), 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn per_bit_never_exceeds_triple() {
        for seed in 0..10 {
            let g = GswfIia::random(3, 2, seed).unwrap();
            let t = dist_tr3(&g).unwrap().0;
            let b = dist_tr3_per_bit(&g).unwrap().0;
            assert!(b.exact_value().unwrap() <= t.exact_value().unwrap());
        }
    }

    #[test]
    fn majority_tensor_is_far_from_dictators() {
        let g = neutral_tensor(&BooleanFn::majority(3).unwrap(), 3).unwrap().to_gswf();
        let (d, _) = dist_tr3(&g).unwrap();
        assert!(d.mean() > 0.0);
        assert!(dist_tr3(&GswfIia::dictator(4, 2, 0).unwrap()).is_err());
    }

    #[test]
    fn boolean_dictator_distance() {
        let (d, w) = dist_dict2(&BooleanFn::dictator(3, 0).unwrap());
        assert_eq!(d, ratio(0, 1));
        assert_eq!(w, DictWitness { voter: 0, anti: false });
        assert_eq!(dist_dict2(&BooleanFn::majority(3).unwrap()).0, ratio(1, 4));
        assert_eq!(dist_dict2(&BooleanFn::parity(2).unwrap()).0, ratio(1, 2));
        let anti = BooleanFn::from_fn(2, |z| z >> 1 & 1 == 0).unwrap();
        assert_eq!(dist_dict2(&anti), (ratio(0, 1), DictWitness { voter: 1, anti: true }));
    }
}
