//! Exhaustive enumeration over all `2^m` orientations of a graph.
//!
//! Orientation `o` is the integer whose bit `i` fixes the direction of
//! canonical edge `i = (u, v)`: 1 means `u -> v`, 0 means `v -> u`. The space
//! `0..2^m` is cut into fixed-size chunks counted with machine-word counters
//! and summed; the sum is associative, so results do not depend on how many
//! workers run or in which order the chunks finish.

use std::ops::Range;

use rayon::prelude::*;
use thiserror::Error;

use crate::correlation::TripleCorrelation;
use crate::dyadic::DyadicProb;
use crate::graph::{Graph, GraphError, Triple};

pub const DEFAULT_CAP: u32 = 30;
/// Largest cap accepted; counts are kept in `u64`.
pub const MAX_CAP: u32 = 62;
/// Orientations per work item: `2^CHUNK_BITS`.
pub const CHUNK_BITS: u32 = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumError {
    #[error("graph has {m} edges, above the enumeration cap of {cap}; use monte-carlo estimation instead (or raise --cap)")]
    OverCap { m: usize, cap: u32 },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Enumeration limits and scheduling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumConfig {
    /// Maximum edge count (orientation bits) to enumerate.
    pub cap: u32,
    /// Run on the calling thread only, without rayon.
    pub sequential: bool,
}

impl Default for EnumConfig {
    fn default() -> Self {
        EnumConfig { cap: DEFAULT_CAP, sequential: false }
    }
}

impl EnumConfig {
    pub fn with_cap(cap: u32) -> Self {
        EnumConfig { cap: cap.min(MAX_CAP), ..Self::default() }
    }

    pub fn sequential(self) -> Self {
        EnumConfig { sequential: true, ..self }
    }

    fn check(&self, g: &Graph) -> Result<(), EnumError> {
        if g.m() > self.cap.min(MAX_CAP) as usize {
            return Err(EnumError::OverCap { m: g.m(), cap: self.cap });
        }
        Ok(())
    }
}

/// One orientation of a graph's edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Orientation(pub u64);

impl Orientation {
    pub fn bits(self) -> u64 {
        self.0
    }

    /// True when edge `i = (u, v)` is directed `u -> v`.
    pub fn forward(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    /// Out-neighbour bitsets of the oriented graph.
    pub fn out_adjacency(self, g: &Graph) -> Vec<u64> {
        let mut out = vec![0u64; g.n()];
        fill_out_adjacency(g, self.0, &mut out);
        out
    }
}

fn fill_out_adjacency(g: &Graph, bits: u64, out: &mut [u64]) {
    out.fill(0);
    for (i, &(u, v)) in g.edges().iter().enumerate() {
        if bits >> i & 1 == 1 {
            out[u] |= 1 << v;
        } else {
            out[v] |= 1 << u;
        }
    }
}

/// Forward frontier expansion from `from`; stops early once `stop` is hit.
fn reach_from(out: &[u64], from: usize, stop: u64) -> u64 {
    let mut seen = 1u64 << from;
    let mut frontier = seen;
    while frontier != 0 && seen & stop == 0 {
        let mut next = 0u64;
        let mut f = frontier;
        while f != 0 {
            next |= out[f.trailing_zeros() as usize];
            f &= f - 1;
        }
        frontier = next & !seen;
        seen |= frontier;
    }
    seen
}

/// Whether a directed path `from -> to` exists under `o`; every vertex reaches itself.
pub fn reachable(g: &Graph, o: Orientation, from: usize, to: usize) -> bool {
    assert!(from < g.n() && to < g.n(), "vertex out of range");
    let out = o.out_adjacency(g);
    reach_from(&out, from, 1 << to) >> to & 1 == 1
}

/// Set of vertices reachable from each vertex under `o`.
pub fn reach_sets(g: &Graph, o: Orientation) -> Vec<u64> {
    let out = o.out_adjacency(g);
    (0..g.n()).map(|v| reach_from(&out, v, 0)).collect()
}

/// Orientation counts for the events `C = {a -> s}` and `D = {s -> b}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OrientationCounts {
    pub m: u32,
    pub n_c: u64,
    pub n_d: u64,
    pub n_cd: u64,
}

impl OrientationCounts {
    pub fn total(&self) -> u64 {
        1u64 << self.m
    }

    fn merge(self, other: Self) -> Self {
        OrientationCounts {
            m: self.m,
            n_c: self.n_c + other.n_c,
            n_d: self.n_d + other.n_d,
            n_cd: self.n_cd + other.n_cd,
        }
    }

    /// Exact probabilities and covariance; the covariance numerator is the
    /// integer `n_cd 2^m - n_c n_d` over `2^(2m)`.
    pub fn correlation(&self) -> TripleCorrelation {
        let prob = |k: u64| DyadicProb::from_count(k, self.m).expect("count within 2^m");
        let corr = TripleCorrelation::from_probabilities(prob(self.n_c), prob(self.n_d), prob(self.n_cd));
        debug_assert_eq!(corr.cov.sign(), crate::dyadic::Sign::of(&self.cov_numerator()));
        corr
    }

    /// `n_cd 2^m - n_c n_d`, the covariance scaled by `2^(2m)`.
    pub fn cov_numerator(&self) -> num_bigint::BigInt {
        use num_bigint::BigInt;
        (BigInt::from(self.n_cd) << self.m) - BigInt::from(self.n_c) * BigInt::from(self.n_d)
    }
}

fn chunks(m: u32, chunk_bits: u32) -> impl ParallelIterator<Item = Range<u64>> {
    let total = 1u64 << m;
    let size = 1u64 << chunk_bits.min(m);
    let n_chunks = total / size;
    (0..n_chunks).into_par_iter().map(move |c| c * size..(c + 1) * size)
}

/// Counts over the orientation sub-range `range`.
pub fn count_range(g: &Graph, t: Triple, range: Range<u64>) -> OrientationCounts {
    let mut out = vec![0u64; g.n()];
    let (s_bit, b_bit) = (1u64 << t.s, 1u64 << t.b);
    let mut counts = OrientationCounts { m: g.m() as u32, ..Default::default() };
    for bits in range {
        fill_out_adjacency(g, bits, &mut out);
        let c = reach_from(&out, t.a, s_bit) & s_bit != 0;
        let d = reach_from(&out, t.s, b_bit) & b_bit != 0;
        counts.n_c += c as u64;
        counts.n_d += d as u64;
        counts.n_cd += (c && d) as u64;
    }
    counts
}

/// Counts with an explicit chunk size, mainly for checking that the
/// partitioning never changes the result.
pub fn count_events_chunked(
    g: &Graph,
    t: Triple,
    chunk_bits: u32,
    cfg: EnumConfig,
) -> Result<OrientationCounts, EnumError> {
    g.check_triple(&t)?;
    cfg.check(g)?;
    let m = g.m() as u32;
    let zero = OrientationCounts { m, ..Default::default() };
    let counts = if cfg.sequential {
        let size = 1u64 << chunk_bits.min(m);
        (0..(1u64 << m) / size)
            .map(|c| count_range(g, t, c * size..(c + 1) * size))
            .fold(zero, OrientationCounts::merge)
    } else {
        chunks(m, chunk_bits)
            .map(|r| count_range(g, t, r))
            .reduce(|| zero, OrientationCounts::merge)
    };
    Ok(counts)
}

/// Exact counts of `C`, `D` and `C ∩ D` over all `2^m` orientations.
pub fn count_events(g: &Graph, t: Triple, cfg: EnumConfig) -> Result<OrientationCounts, EnumError> {
    count_events_chunked(g, t, CHUNK_BITS, cfg)
}

pub fn exact_correlation(g: &Graph, t: Triple, cfg: EnumConfig) -> Result<TripleCorrelation, EnumError> {
    Ok(count_events(g, t, cfg)?.correlation())
}

/// Event counts for every ordered triple from a single enumeration pass.
///
/// Each orientation's full reachability relation is computed once and then
/// credited to every `(a, s, b)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AllTripleCounts {
    n: usize,
    m: u32,
    /// `pair[a * n + s]`: orientations with `a -> s`.
    pair: Vec<u64>,
    /// `joint[(a * n + s) * n + b]`: orientations with `a -> s` and `s -> b`.
    joint: Vec<u64>,
}

impl AllTripleCounts {
    fn zero(n: usize, m: u32) -> Self {
        AllTripleCounts { n, m, pair: vec![0; n * n], joint: vec![0; n * n * n] }
    }

    fn merge(mut self, other: Self) -> Self {
        for (x, y) in self.pair.iter_mut().zip(other.pair) {
            *x += y;
        }
        for (x, y) in self.joint.iter_mut().zip(other.joint) {
            *x += y;
        }
        self
    }

    fn accumulate(&mut self, g: &Graph, range: Range<u64>) {
        let n = self.n;
        let mut out = vec![0u64; n];
        let mut reach = vec![0u64; n];
        for bits in range {
            fill_out_adjacency(g, bits, &mut out);
            for (v, r) in reach.iter_mut().enumerate() {
                *r = reach_from(&out, v, 0);
            }
            for a in 0..n {
                let mut targets = reach[a] & !(1 << a);
                while targets != 0 {
                    let s = targets.trailing_zeros() as usize;
                    targets &= targets - 1;
                    let row = a * n + s;
                    self.pair[row] += 1;
                    let mut ends = reach[s] & !(1 << s) & !(1 << a);
                    while ends != 0 {
                        let b = ends.trailing_zeros() as usize;
                        ends &= ends - 1;
                        self.joint[row * n + b] += 1;
                    }
                }
            }
        }
    }

    pub fn counts(&self, t: Triple) -> OrientationCounts {
        let n = self.n;
        OrientationCounts {
            m: self.m,
            n_c: self.pair[t.a * n + t.s],
            n_d: self.pair[t.s * n + t.b],
            n_cd: self.joint[(t.a * n + t.s) * n + t.b],
        }
    }
}

pub fn count_all_triples(g: &Graph, cfg: EnumConfig) -> Result<AllTripleCounts, EnumError> {
    cfg.check(g)?;
    let (n, m) = (g.n(), g.m() as u32);
    let run = |r: Range<u64>| {
        let mut acc = AllTripleCounts::zero(n, m);
        acc.accumulate(g, r);
        acc
    };
    let all = if cfg.sequential {
        run(0..1u64 << m)
    } else {
        chunks(m, CHUNK_BITS)
            .map(run)
            .reduce(|| AllTripleCounts::zero(n, m), AllTripleCounts::merge)
    };
    Ok(all)
}
