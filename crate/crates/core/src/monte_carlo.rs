//! Seeded Monte Carlo estimates of the triple correlation.
//!
//! # Randomness
//!
//! Sample `j` under seed `σ` uses the orientation word
//!
//! ```text
//! key  = mix(σ ^ 0x6f72_6965_6e74_6d63)        // per-seed key
//! bits = mix(key + (j + 1) * 0x9e37_79b9_7f4a_7c15) & (2^m - 1)
//! ```
//!
//! where `mix` is the SplitMix64 finalizer
//!
//! ```text
//! z = (z ^ (z >> 30)) * 0xbf58_476d_1ce4_e5b9
//! z = (z ^ (z >> 27)) * 0x94d0_49bb_1331_11eb
//! z ^ (z >> 31)
//! ```
//!
//! with wrapping 64-bit arithmetic. Edge `i` of the canonical order is
//! directed `u -> v` when bit `i` is set. Because `m <= 62` a single word
//! covers every edge, and because each sample depends only on `(σ, j)` the
//! split of sample indices across workers cannot change the estimate.
//!
//! The random graph generator uses the same construction with key
//! `mix(σ ^ 0x676e_705f_6772_6170)` and counter `i + 1` for candidate pair
//! `i` (pairs in canonical lexicographic order); the pair is kept when the
//! top 53 bits, read as a fraction in `[0, 1)`, are below `p`.
//!
//! # Standard errors
//!
//! Each sample falls in one of four cells `(C, D)`, `(C, ¬D)`, `(¬C, D)`,
//! `(¬C, ¬D)` with empirical frequencies `q11, q10, q01, q00`. The
//! covariance estimate is `h(q) = q11 - (q11 + q10)(q11 + q01)`; its
//! gradient is `w = (1 - p_c - p_d, -p_d, -p_c, 0)` and the delta-method
//! standard error is
//!
//! ```text
//! se_cov = sqrt((sum_k w_k^2 q_k - (sum_k w_k q_k)^2) / N)
//! ```
//!
//! Single-cell probabilities use the binomial `sqrt(q (1 - q) / N)`.

use std::ops::Range;

use rayon::prelude::*;

use crate::enumerate::Orientation;
use crate::graph::{low_bits, Graph, GraphError, Triple};

const SAMPLE_DOMAIN: u64 = 0x6f72_6965_6e74_6d63;
const GNP_DOMAIN: u64 = 0x676e_705f_6772_6170;
const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;
/// Samples per work item.
const BLOCK: u64 = 1 << 14;

/// SplitMix64 output finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Counter-based stream: word `counter` of the stream keyed by `seed` in `domain`.
fn counter_word(seed: u64, domain: u64, counter: u64) -> u64 {
    let key = mix64(seed ^ domain);
    mix64(key.wrapping_add(counter.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// The orientation used for sample `index` of a run with `seed`.
pub fn sample_orientation(g: &Graph, seed: u64, index: u64) -> Orientation {
    Orientation(counter_word(seed, SAMPLE_DOMAIN, index) & low_bits(g.m()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
struct CellCounts {
    both: u64,
    c_only: u64,
    d_only: u64,
    neither: u64,
}

impl CellCounts {
    fn merge(self, o: Self) -> Self {
        CellCounts {
            both: self.both + o.both,
            c_only: self.c_only + o.c_only,
            d_only: self.d_only + o.d_only,
            neither: self.neither + o.neither,
        }
    }
}

fn sample_range(g: &Graph, t: Triple, seed: u64, range: Range<u64>) -> CellCounts {
    let mut counts = CellCounts::default();
    let mut out = vec![0u64; g.n()];
    for j in range {
        let o = sample_orientation(g, seed, j);
        out.fill(0);
        for (i, &(u, v)) in g.edges().iter().enumerate() {
            if o.forward(i) {
                out[u] |= 1 << v;
            } else {
                out[v] |= 1 << u;
            }
        }
        let c = reaches(&out, t.a, t.s);
        let d = reaches(&out, t.s, t.b);
        match (c, d) {
            (true, true) => counts.both += 1,
            (true, false) => counts.c_only += 1,
            (false, true) => counts.d_only += 1,
            (false, false) => counts.neither += 1,
        }
    }
    counts
}

fn reaches(out: &[u64], from: usize, to: usize) -> bool {
    let target = 1u64 << to;
    let mut seen = 1u64 << from;
    let mut frontier = seen;
    while frontier != 0 && seen & target == 0 {
        let mut next = 0u64;
        let mut f = frontier;
        while f != 0 {
            next |= out[f.trailing_zeros() as usize];
            f &= f - 1;
        }
        frontier = next & !seen;
        seen |= frontier;
    }
    seen & target != 0
}

/// Monte Carlo estimate; all floats are derived from the integer cell counts.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct McEstimate {
    pub samples: u64,
    pub seed: u64,
    /// Samples with both `a -> s` and `s -> b`.
    pub count_cd: u64,
    pub count_c: u64,
    pub count_d: u64,
    /// Samples with neither event, i.e. in `A ∩ B`.
    pub count_ab: u64,
    pub p_c_hat: f64,
    pub p_d_hat: f64,
    pub p_cd_hat: f64,
    /// Estimate of `P(a -/-> s, s -/-> b)`.
    pub p_ab_hat: f64,
    pub cov_hat: f64,
    pub se_cov: f64,
    pub se_p_c: f64,
    pub se_p_d: f64,
    pub se_p_cd: f64,
    pub se_p_ab: f64,
}

impl McEstimate {
    fn from_cells(cells: CellCounts, samples: u64, seed: u64) -> Self {
        let n = samples as f64;
        let q11 = cells.both as f64 / n;
        let q10 = cells.c_only as f64 / n;
        let q01 = cells.d_only as f64 / n;
        let q00 = cells.neither as f64 / n;
        let p_c = q11 + q10;
        let p_d = q11 + q01;
        let w = [1.0 - p_c - p_d, -p_d, -p_c, 0.0];
        let q = [q11, q10, q01, q00];
        let second: f64 = w.iter().zip(&q).map(|(w, q)| w * w * q).sum();
        let first: f64 = w.iter().zip(&q).map(|(w, q)| w * q).sum();
        let binomial_se = |p: f64| (p * (1.0 - p) / n).sqrt();
        McEstimate {
            samples,
            seed,
            count_cd: cells.both,
            count_c: cells.both + cells.c_only,
            count_d: cells.both + cells.d_only,
            count_ab: cells.neither,
            p_c_hat: p_c,
            p_d_hat: p_d,
            p_cd_hat: q11,
            p_ab_hat: q00,
            cov_hat: q11 - p_c * p_d,
            se_cov: ((second - first * first).max(0.0) / n).sqrt(),
            se_p_c: binomial_se(p_c),
            se_p_d: binomial_se(p_d),
            se_p_cd: binomial_se(q11),
            se_p_ab: binomial_se(q00),
        }
    }
}

/// Estimates the correlation of `{a -> s}` and `{s -> b}` from `samples`
/// independent uniform orientations. `samples == 0` is treated as 1.
pub fn mc_estimate(g: &Graph, t: Triple, samples: u64, seed: u64) -> Result<McEstimate, GraphError> {
    g.check_triple(&t)?;
    let samples = samples.max(1);
    let blocks = samples.div_ceil(BLOCK);
    let cells = (0..blocks)
        .into_par_iter()
        .map(|b| sample_range(g, t, seed, b * BLOCK..((b + 1) * BLOCK).min(samples)))
        .reduce(CellCounts::default, CellCounts::merge);
    Ok(McEstimate::from_cells(cells, samples, seed))
}

/// Erdős–Rényi `G(n, p)`, deterministic in `seed`.
pub fn gnp_generate(n: usize, p: f64, seed: u64) -> Result<Graph, GraphError> {
    let p = p.clamp(0.0, 1.0);
    let mut edges = Vec::new();
    let mut i = 0u64;
    for u in 0..n {
        for v in u + 1..n {
            let x = (counter_word(seed, GNP_DOMAIN, i) >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            if x < p {
                edges.push((u, v));
            }
            i += 1;
        }
    }
    Graph::from_edges(n, edges)
}
