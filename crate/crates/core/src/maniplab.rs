//! Manipulation power `M_i`, inter-pair dependence `M^{a,b}` and
//! minority-preference probability `N^{a,b}`, exact and sampled.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::prefcore::{
    check_pair, compose_ballot, decode_profile, factorial, fold_range, pow, profile_count,
    Alternative, OrderIndex, OrderSet, Voter, MAX_COLUMN_VOTERS,
};
use crate::report::{fold_samples, require_budget, MetricReport, Mode};
use crate::scalar::Scalar;
use crate::scfzoo::{draw_profile, Scf};
use crate::Exact;

/// For every `(a, b)` column `z`, how many of the `3^n` completions elect
/// `a` and how many elect `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnStats {
    n: usize,
    a: Alternative,
    b: Alternative,
    count_a: Vec<u32>,
    count_b: Vec<u32>,
}

impl ColumnStats {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pair(&self) -> (Alternative, Alternative) {
        (self.a, self.b)
    }

    /// `3^n`, the number of completions of each column.
    pub fn completions(&self) -> u64 {
        pow(3, self.n)
    }

    pub fn count_a(&self, z: u64) -> u32 {
        self.count_a[z as usize]
    }

    pub fn count_b(&self, z: u64) -> u32 {
        self.count_b[z as usize]
    }

    pub fn p_a<T: Scalar>(&self, z: u64) -> T {
        T::from_ratio(self.count_a[z as usize] as u128, self.completions() as u128)
    }

    pub fn p_b<T: Scalar>(&self, z: u64) -> T {
        T::from_ratio(self.count_b[z as usize] as u128, self.completions() as u128)
    }

    pub fn columns(&self) -> u64 {
        1 << self.n
    }

    /// `sum_z |A(z)| |B(z)|`; divide by `2^n 9^n` for `M^{a,b}`.
    pub fn product_sum(&self) -> u128 {
        self.count_a
            .iter()
            .zip(&self.count_b)
            .map(|(&x, &y)| x as u128 * y as u128)
            .sum()
    }

    /// `sum_z min(|A(z)|, |B(z)|)`; divide by `2^n 3^n` for `N^{a,b}`.
    pub fn min_sum(&self) -> u128 {
        self.count_a.iter().zip(&self.count_b).map(|(&x, &y)| x.min(y) as u128).sum()
    }

    pub fn mab(&self) -> Exact {
        let den = (self.columns() as u128) * (self.completions() as u128).pow(2);
        Exact::from_ratio(self.product_sum(), den)
    }

    pub fn nab(&self) -> Exact {
        let den = self.columns() as u128 * self.completions() as u128;
        Exact::from_ratio(self.min_sum(), den)
    }
}

pub(crate) fn require_three(m: usize) -> Result<()> {
    if m != 3 {
        return Err(Error::UnsupportedDimension(format!(
            "this quantity is defined for 3 alternatives, got {m}"
        )));
    }
    Ok(())
}

/// Walk the `3^n` completions of column `z` for pair `(a, b)`, calling
/// `visit(ternary_index, ballots)`.
pub(crate) fn for_each_completion(
    n: usize,
    a: Alternative,
    b: Alternative,
    z: u64,
    mut visit: impl FnMut(u64, &[OrderIndex]),
) {
    let mut digits = vec![0u8; n];
    let mut ballots: Vec<OrderIndex> =
        (0..n).map(|v| compose_ballot(a, b, z >> v & 1 == 1, 0)).collect();
    for idx in 0..pow(3, n) {
        visit(idx, &ballots);
        for v in 0..n {
            digits[v] += 1;
            if digits[v] < 3 {
                ballots[v] = compose_ballot(a, b, z >> v & 1 == 1, digits[v]);
                break;
            }
            digits[v] = 0;
            ballots[v] = compose_ballot(a, b, z >> v & 1 == 1, 0);
        }
    }
}

/// Exact column statistics for the pair `(a, b)`; needs `m = 3`.
pub fn column_stats<F: Scf + ?Sized>(f: &F, a: Alternative, b: Alternative) -> Result<ColumnStats> {
    require_three(f.m())?;
    check_pair(3, a, b)?;
    let n = f.n();
    require_budget(3, n)?;
    let (count_a, count_b): (Vec<u32>, Vec<u32>) = (0..1u64 << n)
        .into_par_iter()
        .map(|z| {
            let (mut ca, mut cb) = (0u32, 0u32);
            for_each_completion(n, a, b, z, |_, ballots| {
                let w = f.choose(ballots);
                ca += (w == a) as u32;
                cb += (w == b) as u32;
            });
            (ca, cb)
        })
        .unzip();
    Ok(ColumnStats { n, a, b, count_a, count_b })
}

fn check_voter(n: usize, i: Voter) -> Result<()> {
    if i >= n {
        return Err(Error::domain(format!("voter {i} out of range for {n} voters")));
    }
    Ok(())
}

/// Number of `(x, x'_i)` pairs where `x'_i` is a profitable manipulation.
fn manipulation_count<F: Scf + ?Sized>(f: &F, i: Voter) -> u128 {
    let (n, m) = (f.n(), f.m());
    let orders = OrderSet::get(m);
    let k_count = orders.len();
    let others = profile_count(m, n - 1).unwrap();
    fold_range(
        others,
        || (0u128, vec![0 as OrderIndex; n], vec![0usize; k_count], vec![0 as OrderIndex; n - 1]),
        |(acc, ballots, outcome, rest), idx| {
            decode_profile(idx, m, rest);
            ballots[..i].copy_from_slice(&rest[..i]);
            ballots[i + 1..].copy_from_slice(&rest[i..]);
            for k in 0..k_count {
                ballots[i] = k as OrderIndex;
                outcome[k] = f.choose(ballots);
            }
            for truth in 0..k_count {
                let honest = orders.position(truth as OrderIndex, outcome[truth]);
                *acc += outcome
                    .iter()
                    .filter(|&&w| orders.position(truth as OrderIndex, w) < honest)
                    .count() as u128;
            }
        },
        |(x, b, o, r), (y, _, _, _)| (x + y, b, o, r),
    )
    .0
}

/// `M_i(F)`: probability that a uniformly drawn replacement ballot for voter
/// `i` elects an alternative that voter `i` truly prefers.
///
/// The replacement is drawn independently of the true ballot, so drawing the
/// true ballot again is allowed and never profitable.
pub fn manipulation_power<F: Scf + ?Sized>(f: &F, i: Voter, mode: Mode) -> Result<MetricReport> {
    mode.validate()?;
    let (n, m) = (f.n(), f.m());
    check_voter(n, i)?;
    match mode {
        Mode::Exact => {
            require_budget(m, n)?;
            let den = profile_count(m, n).unwrap() as u128 * factorial(m) as u128;
            Ok(MetricReport::exact("manipulation_power", vec![i], manipulation_count(f, i), den))
        }
        Mode::Sampled { samples, seed } => {
            let hits = sample_manipulations(f, Some(i), samples, seed);
            Ok(MetricReport::bernoulli("manipulation_power", vec![i], hits, samples, seed, 1.0))
        }
    }
}

fn sample_manipulations<F: Scf + ?Sized>(f: &F, voter: Option<Voter>, samples: u64, seed: u64) -> u64 {
    let (n, m) = (f.n(), f.m());
    let orders = OrderSet::get(m);
    fold_samples(
        samples,
        seed,
        || (0u64, vec![0 as OrderIndex; n]),
        |(hits, ballots), rng| {
            draw_profile(rng, orders.len(), ballots);
            let i = voter.unwrap_or_else(|| rng.gen_range(0..n));
            let lie = rng.gen_range(0..orders.len()) as OrderIndex;
            let truth = ballots[i];
            let honest = f.choose(ballots);
            ballots[i] = lie;
            let manipulated = f.choose(ballots);
            if orders.position(truth, manipulated) < orders.position(truth, honest) {
                *hits += 1;
            }
        },
        |(x, b), (y, _)| (x + y, b),
    )
    .0
}

/// `sum_i M_i(F)`.
pub fn manipulation_power_total<F: Scf + ?Sized>(f: &F, mode: Mode) -> Result<MetricReport> {
    mode.validate()?;
    let (n, m) = (f.n(), f.m());
    match mode {
        Mode::Exact => {
            require_budget(m, n)?;
            let den = profile_count(m, n).unwrap() as u128 * factorial(m) as u128;
            let num = (0..n).map(|i| manipulation_count(f, i)).sum();
            Ok(MetricReport::exact("manipulation_power_total", vec![], num, den))
        }
        Mode::Sampled { samples, seed } => {
            // n * Pr[a uniformly chosen voter manipulates]
            let hits = sample_manipulations(f, None, samples, seed);
            Ok(MetricReport::bernoulli(
                "manipulation_power_total",
                vec![],
                hits,
                samples,
                seed,
                n as f64,
            ))
        }
    }
}

fn redraw_digits(rng: &mut impl Rng, a: Alternative, b: Alternative, z: u64, out: &mut [OrderIndex]) {
    for (v, slot) in out.iter_mut().enumerate() {
        *slot = compose_ballot(a, b, z >> v & 1 == 1, rng.gen_range(0..3));
    }
}

/// `M^{a,b}(F) = Pr[F(x) = a, F(x') = b]` with `x, x'` uniform subject to a
/// common `(a, b)` column.
pub fn mab<F: Scf + ?Sized>(f: &F, a: Alternative, b: Alternative, mode: Mode) -> Result<MetricReport> {
    mode.validate()?;
    require_three(f.m())?;
    check_pair(3, a, b)?;
    let n = f.n();
    match mode {
        Mode::Exact => {
            let stats = column_stats(f, a, b)?;
            Ok(MetricReport::from_exact("mab", vec![a, b], stats.mab()))
        }
        Mode::Sampled { samples, seed } => {
            if n > MAX_COLUMN_VOTERS {
                return Err(Error::UnsupportedDimension(format!("{n} voters")));
            }
            let hits = fold_samples(
                samples,
                seed,
                || (0u64, vec![0 as OrderIndex; n], vec![0 as OrderIndex; n]),
                |(hits, x, y), rng| {
                    let z = rng.gen_range(0..1u64 << n);
                    redraw_digits(rng, a, b, z, x);
                    redraw_digits(rng, a, b, z, y);
                    if f.choose(x) == a && f.choose(y) == b {
                        *hits += 1;
                    }
                },
                |(p, x, y), (q, _, _)| (p + q, x, y),
            )
            .0;
            Ok(MetricReport::bernoulli("mab", vec![a, b], hits, samples, seed, 1.0))
        }
    }
}

/// Completions evaluated per sampled column when `3^n` exceeds
/// [`NAB_EXACT_COMPLETIONS`].
pub const NAB_INNER_SAMPLES: u64 = 256;

/// Largest `3^n` for which sampled `N^{a,b}` evaluates each drawn column
/// exactly.
pub const NAB_EXACT_COMPLETIONS: u64 = 59_049;

/// `N^{a,b}(F) = E_z[min(p_a(z), p_b(z))]`.
pub fn nab<F: Scf + ?Sized>(f: &F, a: Alternative, b: Alternative, mode: Mode) -> Result<MetricReport> {
    mode.validate()?;
    require_three(f.m())?;
    check_pair(3, a, b)?;
    let n = f.n();
    match mode {
        Mode::Exact => {
            let stats = column_stats(f, a, b)?;
            Ok(MetricReport::from_exact("nab", vec![a, b], stats.nab()))
        }
        Mode::Sampled { samples, seed } => {
            if n > MAX_COLUMN_VOTERS {
                return Err(Error::UnsupportedDimension(format!("{n} voters")));
            }
            let exact_inner = n <= 10 && pow(3, n) <= NAB_EXACT_COMPLETIONS;
            let (sum, sum_sq, _) = fold_samples(
                samples,
                seed,
                || (0.0f64, 0.0f64, vec![0 as OrderIndex; n]),
                |(s, s2, buf), rng| {
                    let z = rng.gen_range(0..1u64 << n);
                    let total = if exact_inner { pow(3, n) } else { NAB_INNER_SAMPLES };
                    let (mut ca, mut cb) = (0u64, 0u64);
                    if exact_inner {
                        for_each_completion(n, a, b, z, |_, ballots| {
                            let w = f.choose(ballots);
                            ca += (w == a) as u64;
                            cb += (w == b) as u64;
                        });
                    } else {
                        for _ in 0..total {
                            redraw_digits(rng, a, b, z, buf);
                            let w = f.choose(buf);
                            ca += (w == a) as u64;
                            cb += (w == b) as u64;
                        }
                    }
                    let v = ca.min(cb) as f64 / total as f64;
                    *s += v;
                    *s2 += v * v;
                },
                |(p, p2, buf), (q, q2, _)| (p + q, p2 + q2, buf),
            );
            Ok(MetricReport::mean_estimate("nab", vec![a, b], sum, sum_sq, samples, seed))
        }
    }
}

/// `M^{a,b} <= 6 * sum_i M_i`.
pub fn first_reduction_holds<T: Scalar>(mab: &T, total_power: &T) -> bool {
    *mab <= T::from_u32(6) * total_power.clone()
}

/// `M^{a,b} >= (N^{a,b})^2`.
pub fn cauchy_schwarz_holds<T: Scalar>(mab: &T, nab: &T) -> bool {
    nab.clone() * nab.clone() <= *mab
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scfzoo::{zoo_make, RuleSpec};

    fn rule(spec: RuleSpec, n: usize) -> crate::ScfRule {
        zoo_make(&spec, n, 3).unwrap()
    }

    #[test]
    fn strategy_proof_rules_have_zero_power() {
        for n in 1..=3 {
            for spec in [RuleSpec::Dictatorship(0), RuleSpec::Constant(1)] {
                let f = rule(spec.clone(), n);
                for i in 0..n {
                    let r = manipulation_power(&f, i, Mode::Exact).unwrap();
                    assert_eq!(r.exact_value().unwrap(), &Exact::from_ratio(0, 1), "{spec}");
                }
                let t = manipulation_power_total(&f, Mode::Exact).unwrap();
                assert_eq!(t.mean(), 0.0);
            }
        }
    }

    #[test]
    fn anti_dictator_is_manipulable() {
        let f = rule(RuleSpec::AntiDictatorship(0), 1);
        // truth t, lie l: profitable iff bottom(l) ranks above bottom(t) in t
        // i.e. bottom(l) != bottom(t): 4 of 6 lies, for every truth.
        let r = manipulation_power(&f, 0, Mode::Exact).unwrap();
        assert_eq!(r.exact_value().unwrap(), &Exact::from_ratio(4, 6));
    }

    #[test]
    fn mab_nab_vanish_on_trivial_rules() {
        for spec in [RuleSpec::Constant(0), RuleSpec::Dictatorship(1)] {
            let f = rule(spec, 3);
            for (a, b) in [(0, 1), (1, 2), (2, 0)] {
                assert_eq!(mab(&f, a, b, Mode::Exact).unwrap().mean(), 0.0);
                assert_eq!(nab(&f, a, b, Mode::Exact).unwrap().mean(), 0.0);
            }
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let f = rule(RuleSpec::Plurality, 2);
        assert!(manipulation_power(&f, 2, Mode::Exact).is_err());
        assert!(mab(&f, 1, 1, Mode::Exact).is_err());
        assert!(nab(&f, 0, 3, Mode::Exact).is_err());
        let g = zoo_make(&RuleSpec::Plurality, 2, 4).unwrap();
        assert!(matches!(mab(&g, 0, 1, Mode::Exact), Err(Error::UnsupportedDimension(_))));
        assert!(manipulation_power(&f, 0, Mode::Sampled { samples: 0, seed: 1 }).is_err());
    }

    #[test]
    fn pair_symmetry() {
        let f = rule(RuleSpec::RandomTable(5), 3);
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            assert_eq!(mab(&f, a, b, Mode::Exact).unwrap(), {
                let mut r = mab(&f, b, a, Mode::Exact).unwrap();
                r.indices = vec![a, b];
                r
            });
            assert_eq!(
                nab(&f, a, b, Mode::Exact).unwrap().exact_value(),
                nab(&f, b, a, Mode::Exact).unwrap().exact_value()
            );
        }
    }

    #[test]
    fn column_stats_are_bounded() {
        let f = rule(RuleSpec::Borda, 3);
        let s = column_stats(&f, 0, 2).unwrap();
        for z in 0..s.columns() {
            assert!(s.count_a(z) + s.count_b(z) <= 27);
            assert!(s.p_a::<f64>(z) + s.p_b::<f64>(z) <= 1.0);
        }
    }

    #[test]
    fn sampled_estimates_bracket_exact() {
        let f = rule(RuleSpec::Borda, 3);
        let mode = Mode::Sampled { samples: 200_000, seed: 3 };
        let exact = manipulation_power(&f, 1, Mode::Exact).unwrap().mean();
        let est = manipulation_power(&f, 1, mode).unwrap();
        assert!(est.sampled().unwrap().contains(exact), "{est:?} vs {exact}");
        let exact = mab(&f, 0, 1, Mode::Exact).unwrap().mean();
        let est = mab(&f, 0, 1, mode).unwrap();
        assert!(est.sampled().unwrap().contains(exact), "{est:?} vs {exact}");
        let exact = nab(&f, 0, 1, Mode::Exact).unwrap().mean();
        let est = nab(&f, 0, 1, mode).unwrap();
        assert!(est.sampled().unwrap().contains(exact), "{est:?} vs {exact}");
        let exact = manipulation_power_total(&f, Mode::Exact).unwrap().mean();
        let est = manipulation_power_total(&f, mode).unwrap();
        assert!(est.sampled().unwrap().contains(exact), "{est:?} vs {exact}");
    }

    #[test]
    fn generic_predicates() {
        assert!(first_reduction_holds(&0.06f64, &0.01));
        assert!(!first_reduction_holds(&0.07f64, &0.01));
        assert!(cauchy_schwarz_holds(&Exact::from_ratio(1, 4), &Exact::from_ratio(1, 2)));
        assert!(!cauchy_schwarz_holds(&Exact::from_ratio(1, 5), &Exact::from_ratio(1, 2)));
        assert!(cauchy_schwarz_holds(&0.25f32, &0.5f32));
    }
}
