//! Subsets of `{0,1,2}^n`, their upper edge borders, monotone shifting and
//! the correlation inequality for monotone sets.
//!
//! Point `v` has index `sum_i v_i 3^i`. In each direction every line
//! `{(v_{-i}, t) : t = 0,1,2}` carries three directed edges `0->1`, `1->2`,
//! `0->2`; a border edge has its tail inside the set and its head outside.
//! All comparisons here are exact integer arithmetic.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maniplab::{for_each_completion, require_three};
use crate::prefcore::{check_pair, pow, Alternative, PairwiseColumn, Voter};
use crate::report::require_budget;
use crate::scfzoo::Scf;
use crate::Exact;

/// Largest supported dimension.
pub const MAX_TERNARY_DIM: usize = 20;

const EDGES: [(usize, usize); 3] = [(0, 1), (1, 2), (0, 2)];

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TernarySet {
    n: usize,
    words: Vec<u64>,
}

impl TernarySet {
    pub fn empty(n: usize) -> Self {
        assert!(n <= MAX_TERNARY_DIM, "dimension {n} exceeds {MAX_TERNARY_DIM}");
        TernarySet { n, words: vec![0; (pow(3, n) as usize).div_ceil(64)] }
    }

    pub fn full(n: usize) -> Self {
        let mut s = TernarySet::empty(n);
        for v in 0..s.points() {
            s.insert(v);
        }
        s
    }

    pub fn from_members(n: usize, members: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut s = TernarySet::empty(n);
        for v in members {
            if v >= s.points() {
                return Err(Error::domain(format!("point {v} outside {{0,1,2}}^{n}")));
            }
            s.insert(v);
        }
        Ok(s)
    }

    /// Each point independently with probability `p`.
    pub fn random(n: usize, p: f64, rng: &mut impl Rng) -> Self {
        let mut s = TernarySet::empty(n);
        for v in 0..s.points() {
            if rng.gen_bool(p) {
                s.insert(v);
            }
        }
        s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `3^n`.
    pub fn points(&self) -> u64 {
        pow(3, self.n)
    }

    #[inline]
    pub fn contains(&self, v: u64) -> bool {
        self.words[(v >> 6) as usize] >> (v & 63) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, v: u64) {
        self.words[(v >> 6) as usize] |= 1 << (v & 63);
    }

    #[inline]
    pub fn remove(&mut self, v: u64) {
        self.words[(v >> 6) as usize] &= !(1 << (v & 63));
    }

    pub fn len(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn members(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.points()).filter(|&v| self.contains(v))
    }

    pub fn intersection_len(&self, other: &TernarySet) -> u64 {
        self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones() as u64).sum()
    }

    pub fn difference_len(&self, other: &TernarySet) -> u64 {
        self.words.iter().zip(&other.words).map(|(a, b)| (a & !b).count_ones() as u64).sum()
    }

    pub fn is_disjoint(&self, other: &TernarySet) -> bool {
        self.intersection_len(other) == 0
    }

    fn check_direction(&self, i: usize) -> Result<()> {
        if i >= self.n {
            return Err(Error::domain(format!("direction {i} out of range for dimension {}", self.n)));
        }
        Ok(())
    }

    /// Base points (digit `i` = 0) of every line in direction `i`.
    fn line_bases(&self, i: usize) -> impl Iterator<Item = u64> {
        let stride = pow(3, i);
        (0..self.points()).filter(move |v| (v / stride) % 3 == 0)
    }
}

/// A single border edge: the tail point, its direction, and the head's digit
/// in that direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub tail: u64,
    pub direction: usize,
    pub head_digit: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeBorder {
    pub per_direction: Vec<u64>,
    pub edges: Option<Vec<Edge>>,
}

impl EdgeBorder {
    pub fn total(&self) -> u64 {
        self.per_direction.iter().sum()
    }
}

/// `|∂_i S|`.
pub fn edge_border(s: &TernarySet, i: usize) -> Result<u64> {
    s.check_direction(i)?;
    let stride = pow(3, i);
    Ok(s.line_bases(i)
        .map(|base| {
            let inside = [0, 1, 2].map(|t| s.contains(base + t * stride));
            EDGES.iter().filter(|&&(t, h)| inside[t] && !inside[h]).count() as u64
        })
        .sum())
}

/// `|∂S| = sum_i |∂_i S|`.
pub fn edge_border_total(s: &TernarySet) -> u64 {
    (0..s.n).map(|i| edge_border(s, i).unwrap()).sum()
}

/// Per-direction border counts, optionally with the explicit edge list.
pub fn edge_border_detail(s: &TernarySet, with_edges: bool) -> EdgeBorder {
    let mut edges = with_edges.then(Vec::new);
    let mut per_direction = Vec::with_capacity(s.n);
    for i in 0..s.n {
        let stride = pow(3, i);
        let mut count = 0;
        for base in s.line_bases(i) {
            for &(t, h) in &EDGES {
                if s.contains(base + t as u64 * stride) && !s.contains(base + h as u64 * stride) {
                    count += 1;
                    if let Some(list) = edges.as_mut() {
                        list.push(Edge {
                            tail: base + t as u64 * stride,
                            direction: i,
                            head_digit: h as u8,
                        });
                    }
                }
            }
        }
        per_direction.push(count);
    }
    EdgeBorder { per_direction, edges }
}

/// One shifting step in direction `i`: on each line, move members up to
/// digit 2 when it is vacant, then remaining digit-0 members up to 1 when it
/// is vacant. Every line ends up holding the top `k` positions, where `k` is
/// its original member count.
pub fn shift_step(s: &TernarySet, i: usize) -> Result<TernarySet> {
    s.check_direction(i)?;
    let stride = pow(3, i);
    let mut out = s.clone();
    for base in s.line_bases(i) {
        let k = (0..3).filter(|&t| s.contains(base + t * stride)).count() as u64;
        for t in 0..3 {
            let v = base + t * stride;
            if t >= 3 - k {
                out.insert(v);
            } else {
                out.remove(v);
            }
        }
    }
    Ok(out)
}

/// Apply [`shift_step`] in directions `0, 1, ..., n-1`.
pub fn shift_monotone(s: &TernarySet) -> TernarySet {
    (0..s.n).fold(s.clone(), |acc, i| shift_step(&acc, i).unwrap())
}

/// Up-closed in every coordinate, i.e. no border edges at all.
pub fn is_monotone(s: &TernarySet) -> bool {
    (0..s.n).all(|i| edge_border(s, i).unwrap() == 0)
}

/// Sizes and borders for a disjoint pair, and whether
/// `3^n (|∂A| + |∂B|) >= |A| |B|`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BorderReport {
    pub n: usize,
    pub border_a: u64,
    pub border_b: u64,
    pub size_a: u64,
    pub size_b: u64,
    pub holds: bool,
}

pub fn check_border_inequality(a: &TernarySet, b: &TernarySet) -> Result<BorderReport> {
    if a.n != b.n {
        return Err(Error::domain("sets live in different dimensions"));
    }
    if !a.is_disjoint(b) {
        return Err(Error::domain("border inequality needs disjoint sets"));
    }
    let (border_a, border_b) = (edge_border_total(a), edge_border_total(b));
    let (size_a, size_b) = (a.len(), b.len());
    let lhs = a.points() as u128 * (border_a + border_b) as u128;
    let holds = lhs >= size_a as u128 * size_b as u128;
    Ok(BorderReport { n: a.n, border_a, border_b, size_a, size_b, holds })
}

/// Whether two monotone sets satisfy `3^n |A ∩ B| >= |A| |B|`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HarrisReport {
    pub n: usize,
    pub intersection: u64,
    pub size_a: u64,
    pub size_b: u64,
    pub holds: bool,
}

pub fn check_harris(a: &TernarySet, b: &TernarySet) -> Result<HarrisReport> {
    if a.n != b.n {
        return Err(Error::domain("sets live in different dimensions"));
    }
    if !is_monotone(a) || !is_monotone(b) {
        return Err(Error::domain("correlation check needs monotone sets"));
    }
    let intersection = a.intersection_len(b);
    let (size_a, size_b) = (a.len(), b.len());
    let holds = a.points() as u128 * intersection as u128 >= size_a as u128 * size_b as u128;
    Ok(HarrisReport { n: a.n, intersection, size_a, size_b, holds })
}

/// `A(z)` and `B(z)`: completions of column `z` electing `a`, resp. `b`.
pub fn sets_ab<F: Scf + ?Sized>(
    f: &F,
    a: Alternative,
    b: Alternative,
    column: &PairwiseColumn,
) -> Result<(TernarySet, TernarySet)> {
    require_three(f.m())?;
    check_pair(3, a, b)?;
    let n = f.n();
    if column.n() != n {
        return Err(Error::domain(format!("column has {} voters, rule has {n}", column.n())));
    }
    if n > MAX_TERNARY_DIM {
        return Err(Error::UnsupportedDimension(format!("{n} voters")));
    }
    let mut sa = TernarySet::empty(n);
    let mut sb = TernarySet::empty(n);
    for_each_completion(n, a, b, column.bits(), |v, ballots| {
        let w = f.choose(ballots);
        if w == a {
            sa.insert(v);
        } else if w == b {
            sb.insert(v);
        }
    });
    Ok((sa, sb))
}

/// `(1/6) 3^{-n} E_z[|∂_i A(z)| + |∂_i B(z)|]`, a lower bound on `M_i(F)`.
pub fn voter_border_bound<F: Scf + ?Sized>(
    f: &F,
    a: Alternative,
    b: Alternative,
    i: Voter,
) -> Result<Exact> {
    require_three(f.m())?;
    let n = f.n();
    if i >= n {
        return Err(Error::domain(format!("voter {i} out of range for {n} voters")));
    }
    require_budget(3, n)?;
    let mut edges = 0u128;
    for z in 0..1u64 << n {
        let (sa, sb) = sets_ab(f, a, b, &PairwiseColumn::new(n, z)?)?;
        edges += (edge_border(&sa, i)? + edge_border(&sb, i)?) as u128;
    }
    let den = 6 * pow(3, n) as u128 * (1u128 << n);
    Ok(Exact::new(edges.into(), den.into()))
}

/// Densities used by the seeded random-set generator.
pub const RANDOM_DENSITIES: [f64; 3] = [0.25, 0.5, 0.75];

/// A random set whose density is drawn from [`RANDOM_DENSITIES`].
pub fn random_set(n: usize, rng: &mut impl Rng) -> TernarySet {
    let p = RANDOM_DENSITIES[rng.gen_range(0..3)];
    TernarySet::random(n, p, rng)
}

/// A random disjoint pair: `A` as in [`random_set`], then `B` drawn the same
/// way inside the complement of `A`.
pub fn random_disjoint_pair(n: usize, rng: &mut impl Rng) -> (TernarySet, TernarySet) {
    let a = random_set(n, rng);
    let p = RANDOM_DENSITIES[rng.gen_range(0..3)];
    let mut b = TernarySet::empty(n);
    for v in 0..a.points() {
        if !a.contains(v) && rng.gen_bool(p) {
            b.insert(v);
        }
    }
    (a, b)
}
