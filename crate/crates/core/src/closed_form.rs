//! Closed-form correlations for cycles and forests.

use thiserror::Error;

use crate::correlation::TripleCorrelation;
use crate::dyadic::{DyadicProb, SignedDyadic};
use crate::graph::{Graph, GraphError, Triple};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClosedFormError {
    #[error("cycle arcs must all be positive: n={n}, c={c}, d={d}")]
    InvalidCycleTriple { n: usize, c: usize, d: usize },
    #[error("graph contains a cycle; use exhaustive enumeration instead")]
    NotAForest,
    #[error("graph is not a cycle through all its vertices")]
    NotACycle,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Arc lengths of a triple on `C_n`: `c` from `a` to `s`, `d` from `s` to
/// `b`, and `n - c - d` from `b` back to `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CycleTriple {
    n: usize,
    c: usize,
    d: usize,
}

impl CycleTriple {
    pub fn new(n: usize, c: usize, d: usize) -> Result<Self, ClosedFormError> {
        if c == 0 || d == 0 || c + d >= n {
            return Err(ClosedFormError::InvalidCycleTriple { n, c, d });
        }
        Ok(CycleTriple { n, c, d })
    }

    /// Arc lengths for a labeled cycle. The cycle is walked from vertex 0
    /// towards its smaller neighbour; if `b` is not met between `s` and `a` in
    /// that rotation, the opposite rotation is used.
    pub fn from_labeled(g: &Graph, t: Triple) -> Result<Self, ClosedFormError> {
        g.check_triple(&t)?;
        let n = g.n();
        if n < 3 || g.m() != n || !g.is_connected() || (0..n).any(|v| g.degree(v) != 2) {
            return Err(ClosedFormError::NotACycle);
        }
        let mut position = vec![0usize; n];
        let (mut prev, mut cur) = (0usize, g.neighbors(0).trailing_zeros() as usize);
        for step in 1..n {
            position[cur] = step;
            let next = (g.neighbors(cur) & !(1u64 << prev)).trailing_zeros() as usize;
            (prev, cur) = (cur, next);
        }
        let arc = |x: usize, y: usize| (position[y] + n - position[x]) % n;
        let (c, d) = (arc(t.a, t.s), arc(t.s, t.b));
        if c + d < n {
            Self::new(n, c, d)
        } else {
            Self::new(n, n - c, n - d)
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn c(&self) -> usize {
        self.c
    }

    pub fn d(&self) -> usize {
        self.d
    }
}

fn half(e: usize) -> SignedDyadic {
    DyadicProb::half_pow(e as u32).into()
}

/// `P(C) = 2^-c + 2^-(n-c) - 2^-n`, `P(D)` likewise with `d`, and
/// `P(C ∩ D) = 2^-(c+d) + 2^-n`, the last term being the directed cycle
/// `s -> a -> b -> s`.
pub fn cycle_correlation(t: CycleTriple) -> TripleCorrelation {
    let CycleTriple { n, c, d } = t;
    let reach = |x: usize| half(x).add(&half(n - x)).sub(&half(n));
    let p_c = reach(c);
    let p_d = reach(d);
    let p_cd = half(c + d).add(&half(n));
    TripleCorrelation::from_probabilities(
        p_c.magnitude().clone(),
        p_d.magnitude().clone(),
        p_cd.magnitude().clone(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ForestKind {
    Independent,
    MutuallyExclusive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForestVerdict {
    pub kind: ForestKind,
    pub p_c: DyadicProb,
    pub p_d: DyadicProb,
    pub p_cd: DyadicProb,
    pub cov: SignedDyadic,
}

/// Breadth-first distances from `src`; `None` for other components.
fn distances(g: &Graph, src: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.n()];
    dist[src] = Some(0);
    let mut queue = std::collections::VecDeque::from([src]);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].expect("queued vertices have a distance");
        let mut nb = g.neighbors(u);
        while nb != 0 {
            let v = nb.trailing_zeros() as usize;
            nb &= nb - 1;
            if dist[v].is_none() {
                dist[v] = Some(du + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

/// In a forest each event needs its unique path to be directed, so it has
/// probability `2^-dist`, or 0 across components. Independence holds when
/// the `a`–`b` path runs through `s` (the two paths share no edge) or when
/// some pair lies in different trees; otherwise the paths overlap with
/// opposite directions and the events are disjoint.
pub fn forest_correlation(g: &Graph, t: Triple) -> Result<ForestVerdict, ClosedFormError> {
    g.check_triple(&t)?;
    if !g.is_forest() {
        return Err(ClosedFormError::NotAForest);
    }
    let from_s = distances(g, t.s);
    let d_as = from_s[t.a];
    let d_sb = from_s[t.b];
    let prob = |d: Option<usize>| d.map_or_else(DyadicProb::zero, |d| DyadicProb::half_pow(d as u32));
    let p_c = prob(d_as);
    let p_d = prob(d_sb);
    let (kind, p_cd) = match (d_as, d_sb) {
        (Some(x), Some(y)) => {
            let d_ab = distances(g, t.a)[t.b].expect("same tree as s");
            if x + y == d_ab {
                (ForestKind::Independent, p_c.mul(&p_d))
            } else {
                (ForestKind::MutuallyExclusive, DyadicProb::zero())
            }
        }
        _ => (ForestKind::Independent, DyadicProb::zero()),
    };
    let cov = p_cd.minus(&p_c.mul(&p_d));
    Ok(ForestVerdict { kind, p_c, p_d, p_cd, cov })
}
