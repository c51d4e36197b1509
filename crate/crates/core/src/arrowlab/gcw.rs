use crate::error::{Error, Result};
use crate::prefcore::{fold_profiles, profile_count, Alternative, OrderIndex, OrderSet, Profile};
use crate::report::{fold_samples, require_budget, MetricReport, Mode};
use crate::scfzoo::draw_profile;
use crate::scalar::Scalar;
use crate::Exact;

use super::{beat_masks, full_mask, gcl_among, gcw_among, GswfIia};

/// Counts profiles satisfying `pred(outputs)`, exactly or by sampling.
/// Returns `(hits, total)`.
pub(crate) fn count_outputs(
    g: &GswfIia,
    mode: Mode,
    pred: impl Fn(u64) -> bool + Sync,
) -> Result<(u64, u64)> {
    mode.validate()?;
    let (m, n) = (g.m(), g.n());
    match mode {
        Mode::Exact => {
            require_budget(m, n)?;
            let hits = fold_profiles(
                m,
                n,
                || 0u64,
                |acc, ballots| *acc += pred(g.outputs(ballots)) as u64,
                |a, b| a + b,
            );
            Ok((hits, profile_count(m, n).unwrap()))
        }
        Mode::Sampled { samples, seed } => {
            let orders = OrderSet::get(m).len();
            let (hits, _) = fold_samples(
                samples,
                seed,
                || (0u64, vec![0 as OrderIndex; n]),
                |(acc, ballots), rng| {
                    draw_profile(rng, orders, ballots);
                    *acc += pred(g.outputs(ballots)) as u64;
                },
                |(a, buf), (b, _)| (a + b, buf),
            );
            Ok((hits, samples))
        }
    }
}

fn report(metric: &str, mode: Mode, hits: u64, total: u64) -> MetricReport {
    match mode {
        Mode::Exact => MetricReport::exact(metric, vec![], hits as u128, total as u128),
        Mode::Sampled { seed, .. } => MetricReport::bernoulli(metric, vec![], hits, total, seed, 1.0),
    }
}

/// Output triple for pairs (0,1), (0,2), (1,2) forms a cycle.
pub(crate) fn is_cyclic3(outputs: u64) -> bool {
    // 0>1, 1>2, 2>0  or  1>0, 2>1, 0>2
    outputs == 0b101 || outputs == 0b010
}

/// Probability that the output on three alternatives is cyclic.
pub fn nt(g: &GswfIia, mode: Mode) -> Result<MetricReport> {
    if g.m() != 3 {
        return Err(Error::UnsupportedDimension(format!(
            "nt is defined for 3 alternatives, got {}; use ngcw",
            g.m()
        )));
    }
    let (hits, total) = count_outputs(g, mode, is_cyclic3)?;
    Ok(report("nt", mode, hits, total))
}

/// Probability that no alternative beats every other one.
pub fn ngcw(g: &GswfIia, mode: Mode) -> Result<MetricReport> {
    let (m, all) = (g.m(), full_mask(g.m()));
    let (hits, total) =
        count_outputs(g, mode, |out| gcw_among(&beat_masks(m, out), all).is_none())?;
    Ok(report("ngcw", mode, hits, total))
}

/// `1 - ngcw`.
pub fn gcw(g: &GswfIia, mode: Mode) -> Result<MetricReport> {
    let (m, all) = (g.m(), full_mask(g.m()));
    let (hits, total) =
        count_outputs(g, mode, |out| gcw_among(&beat_masks(m, out), all).is_some())?;
    Ok(report("gcw", mode, hits, total))
}

pub fn gcw_winner_at(g: &GswfIia, p: &Profile) -> Result<Option<Alternative>> {
    if p.m() != g.m() || p.n() != g.n() {
        return Err(Error::domain(format!(
            "profile is {}x{}, GSWF expects {}x{}",
            p.n(),
            p.m(),
            g.n(),
            g.m()
        )));
    }
    Ok(g.gcw_winner_ballots(&p.ballots()))
}

/// How often each alternative is the GCW and the GCL, by full enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WinnerLoserCounts {
    pub winners: Vec<u64>,
    pub losers: Vec<u64>,
    pub total: u64,
}

pub fn winner_loser_counts(g: &GswfIia) -> Result<WinnerLoserCounts> {
    let (m, n) = (g.m(), g.n());
    require_budget(m, n)?;
    let all = full_mask(m);
    let (winners, losers) = fold_profiles(
        m,
        n,
        || (vec![0u64; m], vec![0u64; m]),
        |(w, l), ballots| {
            let beats = beat_masks(m, g.outputs(ballots));
            if let Some(a) = gcw_among(&beats, all) {
                w[a] += 1;
            }
            if let Some(a) = gcl_among(&beats, all) {
                l[a] += 1;
            }
        },
        |(mut w, mut l), (w2, l2)| {
            w.iter_mut().zip(w2).for_each(|(x, y)| *x += y);
            l.iter_mut().zip(l2).for_each(|(x, y)| *x += y);
            (w, l)
        },
    );
    Ok(WinnerLoserCounts { winners, losers, total: profile_count(m, n).unwrap() })
}

/// No-GCW events on the blocks `0..m1` and `m1..m` of one GSWF.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositionReport {
    pub m1: usize,
    pub m2: usize,
    pub exhaustive: bool,
    pub total: u64,
    pub no_first: u64,
    pub no_second: u64,
    pub no_both: u64,
    pub no_full: u64,
    /// Joint probability equals the product: exactly when exhaustive,
    /// within three standard errors otherwise.
    pub independent: bool,
    /// `ngcw(G) >= Pr[no GCW in either block]`.
    pub dominates: bool,
    pub holds: bool,
}

pub(crate) fn ratio(num: u64, den: u64) -> Exact {
    Exact::from_ratio(num as u128, den as u128)
}

impl CompositionReport {
    pub fn joint(&self) -> Exact {
        ratio(self.no_both, self.total)
    }

    pub fn product(&self) -> Exact {
        ratio(self.no_first, self.total)
            * ratio(self.no_second, self.total)
    }
}

/// Checks that the no-GCW events on the first `m1` alternatives and on the
/// remaining ones are independent under uniform profiles.
pub fn composition(g: &GswfIia, m1: usize, mode: Mode) -> Result<CompositionReport> {
    let m = g.m();
    if m1 < 2 || m < m1 + 2 {
        return Err(Error::domain(format!(
            "blocks of {m1} and {} alternatives; each needs at least 2",
            m.saturating_sub(m1)
        )));
    }
    mode.validate()?;
    let first = ((1u16 << m1) - 1) as u8;
    let all = full_mask(m);
    let second = all & !first;
    let classify = |out: u64| {
        let beats = beat_masks(m, out);
        let a = gcw_among(&beats, first).is_none();
        let b = gcw_among(&beats, second).is_none();
        let full = gcw_among(&beats, all).is_none();
        [a as u64, b as u64, (a && b) as u64, full as u64]
    };
    let add = |mut x: [u64; 4], y: [u64; 4]| {
        x.iter_mut().zip(y).for_each(|(a, b)| *a += b);
        x
    };
    let (counts, total, exhaustive) = match mode {
        Mode::Exact => {
            require_budget(m, g.n())?;
            let c = fold_profiles(
                m,
                g.n(),
                || [0u64; 4],
                |acc, ballots| *acc = add(*acc, classify(g.outputs(ballots))),
                add,
            );
            (c, profile_count(m, g.n()).unwrap(), true)
        }
        Mode::Sampled { samples, seed } => {
            let orders = OrderSet::get(m).len();
            let n = g.n();
            let (c, _) = fold_samples(
                samples,
                seed,
                || ([0u64; 4], vec![0 as OrderIndex; n]),
                |(acc, ballots), rng| {
                    draw_profile(rng, orders, ballots);
                    *acc = add(*acc, classify(g.outputs(ballots)));
                },
                |(x, buf), (y, _)| (add(x, y), buf),
            );
            (c, samples, false)
        }
    };
    let [no_first, no_second, no_both, no_full] = counts;
    let independent = if exhaustive {
        no_both as u128 * total as u128 == no_first as u128 * no_second as u128
    } else {
        let t = total as f64;
        let (p1, p2, p12) = (no_first as f64 / t, no_second as f64 / t, no_both as f64 / t);
        let se = (p1 * (1.0 - p1) * p2 * (1.0 - p2) / t).sqrt();
        (p12 - p1 * p2).abs() <= 3.0 * se + 1e-12
    };
    let dominates = no_full >= no_both;
    Ok(CompositionReport {
        m1,
        m2: m - m1,
        exhaustive,
        total,
        no_first,
        no_second,
        no_both,
        no_full,
        independent,
        dominates,
        holds: independent && dominates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrowlab::{neutral_tensor, restrict_gswf, BooleanFn};

    fn majority(m: usize, n: usize) -> GswfIia {
        neutral_tensor(&BooleanFn::majority(n).unwrap(), m).unwrap().to_gswf()
    }

    #[test]
    fn dictator_always_has_a_winner() {
        for m in 3..=4 {
            let g = GswfIia::dictator(m, 2, 1).unwrap();
            assert_eq!(ngcw(&g, Mode::Exact).unwrap().exact_value().unwrap(), &ratio(0, 1));
        }
        let g = GswfIia::dictator(3, 2, 1).unwrap();
        assert_eq!(nt(&g, Mode::Exact).unwrap().mean(), 0.0);
    }

    #[test]
    fn constant_cycle() {
        // 0 beats 1, 1 beats 2, 2 beats 0
        let one = BooleanFn::constant(2, true).unwrap();
        let zero = BooleanFn::constant(2, false).unwrap();
        let g = GswfIia::new(3, 2, vec![one.clone(), zero, one]).unwrap();
        assert_eq!(nt(&g, Mode::Exact).unwrap().mean(), 1.0);
        assert_eq!(ngcw(&g, Mode::Exact).unwrap().mean(), 1.0);
    }

    #[test]
    fn majority_values() {
        let g3 = majority(3, 3);
        assert_eq!(nt(&g3, Mode::Exact).unwrap().exact_value().unwrap(), &ratio(1, 18));
        let g4 = majority(4, 3);
        let v4 = ngcw(&g4, Mode::Exact).unwrap();
        assert_eq!(v4.exact_value().unwrap(), &ratio(1, 9));
        let r = restrict_gswf(&g4, &[0, 1, 2]).unwrap();
        assert_eq!(ngcw(&r, Mode::Exact).unwrap(), ngcw(&g3, Mode::Exact).unwrap());
        assert!(nt(&g4, Mode::Exact).is_err());
    }

    #[test]
    fn majority_winner_examples() {
        let g = majority(3, 3);
        let cycle = Profile::from_rankings(&[&[0, 1, 2], &[1, 2, 0], &[2, 0, 1]]).unwrap();
        assert_eq!(gcw_winner_at(&g, &cycle).unwrap(), None);
        let unanimous = Profile::from_rankings(&[&[2, 0, 1], &[2, 0, 1], &[2, 0, 1]]).unwrap();
        assert_eq!(gcw_winner_at(&g, &unanimous).unwrap(), Some(2));
        let small = Profile::from_rankings(&[&[2, 0, 1]]).unwrap();
        assert!(gcw_winner_at(&g, &small).is_err());
    }

    #[test]
    fn sampled_brackets_exact() {
        let g = majority(3, 3);
        let s = ngcw(&g, Mode::Sampled { samples: 100_000, seed: 5 }).unwrap();
        assert!(s.sampled().unwrap().contains(1.0 / 18.0));
        let c = gcw(&g, Mode::Exact).unwrap();
        assert_eq!(c.exact_value().unwrap(), &ratio(17, 18));
    }

    #[test]
    fn neutral_winner_loser_symmetry() {
        for (m, n) in [(3, 3), (4, 3), (4, 2)] {
            let g = if n == 2 {
                GswfIia::anti_dictator(m, n, 1).unwrap()
            } else {
                majority(m, n)
            };
            let c = winner_loser_counts(&g).unwrap();
            assert!(c.winners.iter().all(|&w| w == c.winners[0]));
            assert_eq!(c.winners, c.losers);
        }
    }

    #[test]
    fn composition_of_random_gswf() {
        let g = GswfIia::random(4, 2, 3).unwrap();
        let r = composition(&g, 2, Mode::Exact).unwrap();
        assert!(r.holds);
        assert_eq!(r.joint(), r.product());
        assert!(composition(&g, 3, Mode::Exact).is_err());
    }
}
