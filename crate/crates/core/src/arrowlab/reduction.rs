use std::sync::Arc;

use crate::error::{Error, Result};
use crate::maniplab::{column_stats, require_three};
use crate::prefcore::{fold_profiles, pair_index, pairs, profile_count, Voter};
use crate::report::{require_budget, Mode};
use crate::scalar::{le_scaled_sqrt, Scalar};
use crate::scfzoo::{
    dist_to_antidictatorship, dist_to_dictatorship, range_min_prob, Scf, ScfRule,
};
use crate::Exact;

use super::gcw::{nt, ngcw, ratio};
use super::tr3::{dist_tr3, TrMember};
use super::{beat_masks, full_mask, gcw_among, BooleanFn, GswfIia, MAX_TABLE_VOTERS};

/// IIA GSWF whose `(a, b)` table picks, per column, the alternative `F` elects
/// more often over the completions of that column; ties go to `tie_voter`.
pub fn gswf_from_scf<F: Scf + ?Sized>(f: &F, tie_voter: Voter) -> Result<GswfIia> {
    require_three(f.m())?;
    let n = f.n();
    if tie_voter >= n {
        return Err(Error::domain(format!("tie voter {tie_voter} out of range for {n} voters")));
    }
    if n > MAX_TABLE_VOTERS {
        return Err(Error::UnsupportedDimension(format!("{n} voters")));
    }
    let tables = pairs(3)
        .into_iter()
        .map(|(a, b)| {
            let stats = column_stats(f, a, b)?;
            BooleanFn::from_fn(n, |z| {
                let (ca, cb) = (stats.count_a(z), stats.count_b(z));
                if ca != cb {
                    ca > cb
                } else {
                    z >> tie_voter & 1 == 1
                }
            })
        })
        .collect::<Result<Vec<_>>>()?;
    GswfIia::new(3, n, tables)
}

/// The SCF electing the GCW of `g`, or `fallback`'s top when there is none.
pub fn scf_from_gswf(g: &GswfIia, fallback: Voter) -> Result<ScfRule> {
    ScfRule::gcw_or_top(Arc::new(g.clone()), fallback)
}

/// `Pr_x[F(x) is not the GCW of G(x)]`: the elected alternative loses some
/// pairwise comparison in `G`.
pub fn minority_probability<F: Scf + ?Sized>(f: &F, g: &GswfIia) -> Result<Exact> {
    if f.m() != g.m() || f.n() != g.n() {
        return Err(Error::domain("SCF and GSWF dimensions differ"));
    }
    let (m, n) = (g.m(), g.n());
    require_budget(m, n)?;
    let all = full_mask(m);
    let hits = fold_profiles(
        m,
        n,
        || 0u64,
        |acc, ballots| {
            let beats = beat_masks(m, g.outputs(ballots));
            *acc += (gcw_among(&beats, all) != Some(f.choose(ballots))) as u64;
        },
        |a, b| a + b,
    );
    Ok(ratio(hits, profile_count(m, n).unwrap()))
}

/// Every quantity of the SCF-to-GSWF reduction at three alternatives, with
/// the verdict of each inequality in the chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionChain {
    pub tie_voter: Voter,
    /// Indexed by lexicographic pair.
    pub mab: Vec<Exact>,
    pub nab: Vec<Exact>,
    pub eps1: Exact,
    pub eps2: Exact,
    pub nt: Exact,
    pub ngcw: Exact,
    pub minority: Exact,
    pub dist_tr3: Exact,
    pub tr3_witness: TrMember,
    pub gswf: GswfIia,
    /// `NT(G) <= Pr[minority] <= sum N^{a,b}`.
    pub nt_le_sum_nab: bool,
    /// `N^{a,b} <= sqrt(M^{a,b})` for every pair.
    pub nab_le_sqrt_mab: bool,
    /// `sum N^{a,b} <= 3 sqrt(eps1)`.
    pub sum_nab_le_bound: bool,
    /// `NT(G) <= 3 sqrt(eps1)`.
    pub nt_le_bound: bool,
    /// `dist_tr3(G) >= eps2 - 3 sqrt(eps1)`.
    pub dist_bound: bool,
    pub holds: bool,
}

impl ReductionChain {
    pub fn sum_nab(&self) -> Exact {
        self.nab.iter().cloned().fold(Exact::from_u32(0), |a, b| a + b)
    }
}

pub fn check_reduction_chain<F: Scf + ?Sized>(f: &F, tie_voter: Voter) -> Result<ReductionChain> {
    require_three(f.m())?;
    let g = gswf_from_scf(f, tie_voter)?;
    let mut mab = vec![Exact::from_u32(0); 3];
    let mut nab = vec![Exact::from_u32(0); 3];
    for (a, b) in pairs(3) {
        let stats = column_stats(f, a, b)?;
        mab[pair_index(3, a, b)] = stats.mab();
        nab[pair_index(3, a, b)] = stats.nab();
    }
    let exact = |r: crate::report::MetricReport| r.exact_value().cloned().expect("exact mode");
    let eps1 = mab.iter().max().cloned().unwrap();
    let eps2 = [
        exact(dist_to_dictatorship(f, Mode::Exact)?.0),
        exact(dist_to_antidictatorship(f, Mode::Exact)?.0),
        exact(range_min_prob(f, Mode::Exact)?.0),
    ]
    .into_iter()
    .min()
    .unwrap();
    let nt_value = exact(nt(&g, Mode::Exact)?);
    let ngcw_value = exact(ngcw(&g, Mode::Exact)?);
    let minority = minority_probability(f, &g)?;
    let (dist, witness) = dist_tr3(&g)?;
    let dist = exact(dist);
    let sum_nab = nab.iter().cloned().fold(Exact::from_u32(0), |a, b| a + b);
    let three = Exact::from_u32(3);
    let one = Exact::from_u32(1);

    let nt_le_sum_nab = nt_value <= minority && minority <= sum_nab;
    let nab_le_sqrt_mab = nab.iter().zip(&mab).all(|(n, m)| le_scaled_sqrt(n, &one, m));
    let sum_nab_le_bound = le_scaled_sqrt(&sum_nab, &three, &eps1);
    let nt_le_bound = le_scaled_sqrt(&nt_value, &three, &eps1);
    let dist_bound = le_scaled_sqrt(&(eps2.clone() - &dist), &three, &eps1);
    let holds = nt_le_sum_nab && nab_le_sqrt_mab && sum_nab_le_bound && nt_le_bound && dist_bound;
    Ok(ReductionChain {
        tie_voter,
        mab,
        nab,
        eps1,
        eps2,
        nt: nt_value,
        ngcw: ngcw_value,
        minority,
        dist_tr3: dist,
        tr3_witness: witness,
        gswf: g,
        nt_le_sum_nab,
        nab_le_sqrt_mab,
        sum_nab_le_bound,
        nt_le_bound,
        dist_bound,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prefcore::{Profile, OrderSet};
    use crate::scfzoo::{zoo_make, RuleSpec};

    fn rule(spec: RuleSpec, n: usize) -> ScfRule {
        zoo_make(&spec, n, 3).unwrap()
    }

    #[test]
    fn dictatorship_gives_dictator_swf() {
        for i in 0..3 {
            let g = gswf_from_scf(&rule(RuleSpec::Dictatorship(i), 3), 0).unwrap();
            assert_eq!(g, GswfIia::dictator(3, 3, i).unwrap());
        }
        assert!(gswf_from_scf(&rule(RuleSpec::Plurality, 3), 3).is_err());
        assert!(gswf_from_scf(&zoo_make(&RuleSpec::Plurality, 2, 4).unwrap(), 0).is_err());
    }

    #[test]
    fn constant_gives_top_fixed() {
        let g = gswf_from_scf(&rule(RuleSpec::Constant(1), 2), 1).unwrap();
        // pair (0,1): 1 always wins; pair (1,2): 1 always wins
        assert!(g.table(0, 1).bits().iter().all(|&b| !b));
        assert!(g.table(1, 2).bits().iter().all(|&b| b));
        assert_eq!(g.table(0, 2), &BooleanFn::dictator(2, 1).unwrap());
        let (d, w) = dist_tr3(&g).unwrap();
        assert_eq!(d.mean(), 0.0);
        assert!(matches!(w, TrMember::TopFixed { top: 1, .. }));
        assert_eq!(nt(&g, Mode::Exact).unwrap().mean(), 0.0);
    }

    #[test]
    fn irrelevant_alternative_moves_do_not_change_outputs() {
        let g = gswf_from_scf(&rule(RuleSpec::Borda, 3), 0).unwrap();
        let orders = OrderSet::get(3);
        for idx in 0..216u64 {
            let p = Profile::from_index(idx, 3, 3).unwrap();
            let ballots = p.ballots();
            for (a, b) in pairs(3) {
                // move c to every position in voter 0's ballot, keeping a vs b
                for k in 0..6u16 {
                    if orders.prefers(k, a, b) != orders.prefers(ballots[0], a, b) {
                        continue;
                    }
                    let mut moved = ballots.clone();
                    moved[0] = k;
                    let p1 = g.outputs(&ballots) >> pair_index(3, a, b) & 1;
                    let p2 = g.outputs(&moved) >> pair_index(3, a, b) & 1;
                    assert_eq!(p1, p2);
                }
            }
        }
    }

    #[test]
    fn converse_of_dictator() {
        let g = GswfIia::dictator(3, 3, 2).unwrap();
        let f = scf_from_gswf(&g, 0).unwrap();
        let d = rule(RuleSpec::Dictatorship(2), 3);
        for idx in 0..216u64 {
            let p = Profile::from_index(idx, 3, 3).unwrap();
            assert_eq!(f.choose_profile(&p), d.choose_profile(&p));
        }
        assert!(scf_from_gswf(&g, 3).is_err());
    }

    #[test]
    fn chain_on_small_rules() {
        let d = check_reduction_chain(&rule(RuleSpec::Dictatorship(0), 3), 0).unwrap();
        assert!(d.holds);
        assert_eq!(d.eps1, Exact::from_u32(0));
        assert_eq!(d.nt, Exact::from_u32(0));
        let p = check_reduction_chain(&rule(RuleSpec::Plurality, 3), 0).unwrap();
        assert!(p.holds);
        assert_eq!(p.eps1, Exact::from_ratio(4, 81));
        assert_eq!(p.nt, p.ngcw);
    }
}
