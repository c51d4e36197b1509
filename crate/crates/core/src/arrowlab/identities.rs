use crate::error::{Error, Result};
use crate::prefcore::{OrderIndex, OrderSet};
use crate::report::{fold_samples, within_budget, Mode};
use crate::scalar::Scalar;
use crate::scfzoo::draw_profile;
use crate::Exact;

use super::gcw::{composition, gcw, CompositionReport};
use super::{beat_masks, gcw_among, neutral_tensor, BooleanFn, GswfIia};

/// Monte Carlo check that a per-sample difference statistic has mean zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledIdentity {
    pub mean_diff: f64,
    pub std_err: f64,
    pub samples: u64,
    pub seed: u64,
    /// `|mean_diff| <= 3 * std_err`.
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FiveSixCheck {
    Exact { lhs: Exact, rhs: Exact, holds: bool },
    Sampled(SampledIdentity),
}

impl FiveSixCheck {
    pub fn holds(&self) -> bool {
        match self {
            FiveSixCheck::Exact { holds, .. } => *holds,
            FiveSixCheck::Sampled(s) => s.holds,
        }
    }
}

/// Checks of the neutral-tensor identities for one odd `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub n: usize,
    /// `GCW(G_4) = 2 GCW(G_3) - 1`.
    pub four_three: FiveSixCheck,
    /// `GCW(G_5) = GCW(G_6)/3 + 5 GCW(G_3)/3 - 1`.
    pub five_six: FiveSixCheck,
    /// Independence of the no-GCW events on alternatives `0..3` and `3..6`.
    pub composition: CompositionReport,
    pub holds: bool,
}

fn exact_gcw(g: &BooleanFn, m: usize) -> Result<Exact> {
    let t = neutral_tensor(g, m)?.to_gswf();
    Ok(gcw(&t, Mode::Exact)?.exact_value().cloned().expect("exact mode"))
}

/// Mean and standard error of `stat(has_gcw(prefix k) for k in 3..=m)` over
/// profiles on `m` alternatives.
fn sampled_statistic(
    g: &GswfIia,
    samples: u64,
    seed: u64,
    stat: impl Fn(&[bool; 4]) -> f64 + Sync,
) -> SampledIdentity {
    let (m, n) = (g.m(), g.n());
    let orders = OrderSet::get(m).len();
    let (sum, sum_sq, _) = fold_samples(
        samples,
        seed,
        || (0.0f64, 0.0f64, vec![0 as OrderIndex; n]),
        |(s, s2, ballots), rng| {
            draw_profile(rng, orders, ballots);
            let beats = beat_masks(m, g.outputs(ballots));
            let mut has = [false; 4];
            for (j, k) in (3..=6).enumerate().filter(|&(_, k)| k <= m) {
                has[j] = gcw_among(&beats, ((1u16 << k) - 1) as u8).is_some();
            }
            let d = stat(&has);
            *s += d;
            *s2 += d * d;
        },
        |(a, a2, buf), (b, b2, _)| (a + b, a2 + b2, buf),
    );
    let t = samples as f64;
    let mean = sum / t;
    let var = if samples > 1 { ((sum_sq - t * mean * mean) / (t - 1.0)).max(0.0) } else { 0.0 };
    let std_err = (var / t).sqrt();
    SampledIdentity {
        mean_diff: mean,
        std_err,
        samples,
        seed,
        holds: mean.abs() <= 3.0 * std_err + 1e-12,
    }
}

fn one(b: bool) -> f64 {
    b as u8 as f64
}

/// Checks the identities relating `GCW` of `g` tensored on 3, 4, 5 and 6
/// alternatives, and the independence of no-GCW events on disjoint blocks of
/// three.
///
/// With `Mode::Exact` every part is enumerated and an oversized instance is
/// an error. With `Mode::Sampled` each part is enumerated when within the
/// exact budget and sampled with the given seed otherwise.
pub fn check_identities(g: &BooleanFn, mode: Mode) -> Result<IdentityReport> {
    if !g.is_odd() {
        return Err(Error::domain("identities need an odd pairwise function"));
    }
    mode.validate()?;
    let n = g.n();
    let strict = mode.is_exact();
    let exact_for = |m: usize| strict || within_budget(m, n);
    let (samples, seed) = match mode {
        Mode::Sampled { samples, seed } => (samples, seed),
        Mode::Exact => (0, 0),
    };
    let two = Exact::from_u32(2);
    let three = Exact::from_u32(3);
    let five = Exact::from_u32(5);
    let unit = Exact::from_u32(1);

    let four_three = if exact_for(4) {
        let (g3, g4) = (exact_gcw(g, 3)?, exact_gcw(g, 4)?);
        let rhs = &two * &g3 - &unit;
        FiveSixCheck::Exact { holds: g4 == rhs, lhs: g4, rhs }
    } else {
        let t = neutral_tensor(g, 4)?.to_gswf();
        FiveSixCheck::Sampled(sampled_statistic(&t, samples, seed, |h| {
            one(h[1]) - 2.0 * one(h[0]) + 1.0
        }))
    };

    let five_six = if exact_for(6) {
        let (g3, g5, g6) = (exact_gcw(g, 3)?, exact_gcw(g, 5)?, exact_gcw(g, 6)?);
        let rhs = &g6 / &three + &five * &g3 / &three - &unit;
        FiveSixCheck::Exact { holds: g5 == rhs, lhs: g5, rhs }
    } else {
        let t = neutral_tensor(g, 6)?.to_gswf();
        FiveSixCheck::Sampled(sampled_statistic(&t, samples, seed, |h| {
            one(h[3]) / 3.0 + 5.0 * one(h[0]) / 3.0 - 1.0 - one(h[2])
        }))
    };

    let six = neutral_tensor(g, 6)?.to_gswf();
    let comp_mode = if exact_for(6) { Mode::Exact } else { mode };
    let composition = composition(&six, 3, comp_mode)?;

    let holds = four_three.holds() && five_six.holds() && composition.holds;
    Ok(IdentityReport { n, four_three, five_six, composition, holds })
}
