//! Correlation classes of whole graphs and the outerplanarity probe.
//!
//! A connected graph is in
//! * Class I when no ordered triple is positively correlated,
//! * Class II when it has both a negative and a positive triple, or any
//!   independent triple,
//! * Class III when no ordered triple is negatively correlated.
//!
//! The classes overlap whenever an independent triple exists; raw sign counts
//! are always reported alongside the flags.

use std::io::BufRead;

use rayon::prelude::*;
use thiserror::Error;

use crate::dyadic::Sign;
use crate::enumerate::{count_all_triples, count_events, EnumConfig, EnumError};
use crate::graph::{parse_graph6, Graph};

/// Vertex limit for the brute-force minor search.
pub const MINOR_MAX_VERTICES: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("graph is disconnected; class membership is only defined for connected graphs")]
    Disconnected,
    #[error("graph has {0} vertices; classification needs at least 3")]
    TooFewVertices(usize),
    #[error("minor search is limited to {MINOR_MAX_VERTICES} vertices, graph has {0}")]
    MinorSearchTooLarge(usize),
    #[error(transparent)]
    Enum(#[from] EnumError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize)]
pub struct ClassFlags {
    pub class_i: bool,
    pub class_ii: bool,
    pub class_iii: bool,
    pub neg_triples: u64,
    pub zero_triples: u64,
    pub pos_triples: u64,
}

impl ClassFlags {
    pub fn from_counts(neg: u64, zero: u64, pos: u64) -> Self {
        ClassFlags {
            class_i: pos == 0,
            class_ii: (neg > 0 && pos > 0) || zero > 0,
            class_iii: neg == 0,
            neg_triples: neg,
            zero_triples: zero,
            pos_triples: pos,
        }
    }

    fn tally(signs: impl IntoIterator<Item = Sign>) -> Self {
        let (mut neg, mut zero, mut pos) = (0, 0, 0);
        for s in signs {
            match s {
                Sign::Negative => neg += 1,
                Sign::Zero => zero += 1,
                Sign::Positive => pos += 1,
            }
        }
        Self::from_counts(neg, zero, pos)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ClassifyOptions {
    pub enumeration: EnumConfig,
    /// Classify disconnected graphs instead of refusing them.
    pub allow_disconnected: bool,
    /// Use one counting pass per triple instead of the shared reachability pass.
    pub per_triple: bool,
}


/// Sign of the covariance for every ordered triple, in lexicographic order.
pub fn triple_signs(g: &Graph, opts: &ClassifyOptions) -> Result<Vec<(crate::graph::Triple, Sign)>, ClassifyError> {
    if opts.per_triple {
        g.ordered_triples()
            .map(|t| Ok((t, count_events(g, t, opts.enumeration)?.correlation().sign())))
            .collect()
    } else {
        let all = count_all_triples(g, opts.enumeration)?;
        Ok(g.ordered_triples()
            .map(|t| (t, Sign::of(&all.counts(t).cov_numerator())))
            .collect())
    }
}

pub fn classify(g: &Graph, opts: &ClassifyOptions) -> Result<ClassFlags, ClassifyError> {
    if g.n() < 3 {
        return Err(ClassifyError::TooFewVertices(g.n()));
    }
    if !opts.allow_disconnected && !g.is_connected() {
        return Err(ClassifyError::Disconnected);
    }
    let signs = triple_signs(g, opts)?;
    Ok(ClassFlags::tally(signs.into_iter().map(|(_, s)| s)))
}

/// Graphs whose minors can be searched for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinorPattern {
    K4,
    K23,
}

impl MinorPattern {
    /// Vertex count and edge list.
    fn shape(self) -> (usize, &'static [(usize, usize)]) {
        match self {
            MinorPattern::K4 => (4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]),
            // parts {0, 2} and {1, 3, 4}, ordered so each new vertex has an earlier neighbour
            MinorPattern::K23 => (5, &[(0, 1), (0, 3), (0, 4), (1, 2), (2, 3), (2, 4)]),
        }
    }
}

/// Branch-set search state over the vertex subsets of a small graph.
struct MinorSearch<'a> {
    connected_sets: Vec<u32>,
    /// Neighbourhood of each subset, indexed by mask.
    boundary: Vec<u32>,
    pattern_edges: &'a [(usize, usize)],
}

impl MinorSearch<'_> {
    /// Assigns branch sets to pattern vertices `next..` given those before.
    fn extend(&self, next: usize, k: usize, chosen: &mut Vec<u32>, used: u32) -> bool {
        if next == k {
            return true;
        }
        for &set in &self.connected_sets {
            if set & used != 0 {
                continue;
            }
            let touches_all = self
                .pattern_edges
                .iter()
                .filter(|&&(x, y)| y == next && x < next)
                .all(|&(x, _)| self.boundary[chosen[x] as usize] & set != 0);
            if !touches_all {
                continue;
            }
            chosen.push(set);
            if self.extend(next + 1, k, chosen, used | set) {
                return true;
            }
            chosen.pop();
        }
        false
    }
}

/// Whether `pattern` is a minor of `g`: some assignment of pattern vertices
/// to disjoint connected vertex sets of `g` has an edge of `g` between the
/// sets of every pattern edge.
pub fn has_minor(g: &Graph, pattern: MinorPattern) -> Result<bool, ClassifyError> {
    let n = g.n();
    if n > MINOR_MAX_VERTICES {
        return Err(ClassifyError::MinorSearchTooLarge(n));
    }
    let (k, pattern_edges) = pattern.shape();
    if n < k || g.m() < pattern_edges.len() {
        return Ok(false);
    }
    let full = 1u32 << n;
    let mut boundary = vec![0u32; full as usize];
    let mut connected_sets = Vec::new();
    for mask in 1..full {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        boundary[mask as usize] = boundary[rest as usize] | g.neighbors(low) as u32;
        // connected iff a search from the lowest vertex inside `mask` covers it
        let mut seen = 1u32 << low;
        loop {
            let mut grow = seen;
            let mut s = seen;
            while s != 0 {
                grow |= g.neighbors(s.trailing_zeros() as usize) as u32 & mask;
                s &= s - 1;
            }
            if grow == seen {
                break;
            }
            seen = grow;
        }
        if seen == mask {
            connected_sets.push(mask);
        }
    }
    let search = MinorSearch { connected_sets, boundary, pattern_edges };
    Ok(search.extend(0, k, &mut Vec::with_capacity(k), 0))
}

/// No `K4` minor and no `K2,3` minor.
pub fn is_outerplanar(g: &Graph) -> Result<bool, ClassifyError> {
    Ok(!has_minor(g, MinorPattern::K4)? && !has_minor(g, MinorPattern::K23)?)
}

/// Outcome for one line of a graph6 stream.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum StreamRecord {
    Classified {
        id: usize,
        graph6: String,
        n: usize,
        m: usize,
        #[serde(flatten)]
        flags: ClassFlags,
        #[serde(skip_serializing_if = "Option::is_none")]
        outerplanar: Option<bool>,
    },
    Skipped {
        id: usize,
        graph6: String,
        reason: String,
    },
    Error {
        id: usize,
        message: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize)]
pub struct StreamSummary {
    pub graphs: u64,
    pub classified: u64,
    pub class_i: u64,
    pub class_ii: u64,
    pub class_iii: u64,
    pub skipped_disconnected: u64,
    pub skipped_over_cap: u64,
    pub skipped_other: u64,
    pub errors: u64,
}

impl StreamSummary {
    pub fn record(&mut self, r: &StreamRecord) {
        match r {
            StreamRecord::Classified { flags, .. } => {
                self.graphs += 1;
                self.classified += 1;
                self.class_i += flags.class_i as u64;
                self.class_ii += flags.class_ii as u64;
                self.class_iii += flags.class_iii as u64;
            }
            StreamRecord::Skipped { reason, .. } => {
                self.graphs += 1;
                if reason.starts_with("disconnected") {
                    self.skipped_disconnected += 1;
                } else if reason.starts_with("over cap") {
                    self.skipped_over_cap += 1;
                } else {
                    self.skipped_other += 1;
                }
            }
            StreamRecord::Error { .. } => self.errors += 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StreamOptions {
    pub classify: ClassifyOptions,
    pub outerplanar: bool,
}

/// Classifies one graph6 record. `id` is the zero-based line number.
pub fn classify_line(id: usize, line: &str, opts: &StreamOptions) -> StreamRecord {
    let text = line.trim();
    let g = match parse_graph6(text) {
        Ok(g) => g,
        Err(e) => return StreamRecord::Error { id, message: e.to_string() },
    };
    let skipped = |reason: String| StreamRecord::Skipped { id, graph6: text.to_string(), reason };
    match classify(&g, &opts.classify) {
        Ok(flags) => {
            let outerplanar = if opts.outerplanar && g.n() <= MINOR_MAX_VERTICES {
                is_outerplanar(&g).ok()
            } else {
                None
            };
            StreamRecord::Classified { id, graph6: text.to_string(), n: g.n(), m: g.m(), flags, outerplanar }
        }
        Err(ClassifyError::Disconnected) => skipped("disconnected".into()),
        Err(ClassifyError::Enum(e @ EnumError::OverCap { .. })) => skipped(format!("over cap: {e}")),
        Err(e) => skipped(e.to_string()),
    }
}

/// Lines processed per parallel batch.
const STREAM_BATCH: usize = 256;

/// Classifies every non-blank line of `input`, handing records to `sink` in
/// input order. Lines are read and processed in parallel batches.
pub fn classify_stream<R, F>(input: R, opts: &StreamOptions, mut sink: F) -> std::io::Result<StreamSummary>
where
    R: BufRead,
    F: FnMut(&StreamRecord) -> std::io::Result<()>,
{
    let mut summary = StreamSummary::default();
    let mut batch: Vec<(usize, String)> = Vec::with_capacity(STREAM_BATCH);
    let mut flush = |batch: &mut Vec<(usize, String)>, summary: &mut StreamSummary| -> std::io::Result<()> {
        let records: Vec<StreamRecord> = batch
            .par_iter()
            .map(|(id, line)| classify_line(*id, line, opts))
            .collect();
        batch.clear();
        for r in &records {
            summary.record(r);
            sink(r)?;
        }
        Ok(())
    };
    for (id, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        batch.push((id, line));
        if batch.len() == STREAM_BATCH {
            flush(&mut batch, &mut summary)?;
        }
    }
    flush(&mut batch, &mut summary)?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_graph, cycle_graph, emit_graph6, path_graph, star_graph};

    fn k4_minus_edge() -> Graph {
        Graph::from_edges(4, [(0, 1), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn flag_definitions() {
        let f = ClassFlags::from_counts(3, 0, 0);
        assert!(f.class_i && !f.class_ii && !f.class_iii);
        let f = ClassFlags::from_counts(0, 2, 0);
        assert!(f.class_i && f.class_ii && f.class_iii);
        let f = ClassFlags::from_counts(1, 0, 1);
        assert!(!f.class_i && f.class_ii && !f.class_iii);
    }

    #[test]
    fn small_classifications() {
        let opts = ClassifyOptions::default();
        let k4 = classify(&complete_graph(4).unwrap(), &opts).unwrap();
        assert!(k4.class_i && k4.class_ii && k4.class_iii);
        assert_eq!(k4.zero_triples, 24);
        let c5 = classify(&cycle_graph(5).unwrap(), &opts).unwrap();
        assert!(c5.class_i && c5.pos_triples == 0);
        let d = classify(&k4_minus_edge(), &opts).unwrap();
        assert!(d.class_ii && !d.class_i && !d.class_iii);
    }

    #[test]
    fn refusals() {
        let opts = ClassifyOptions::default();
        let split = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(classify(&split, &opts), Err(ClassifyError::Disconnected));
        let lenient = ClassifyOptions { allow_disconnected: true, ..opts };
        assert!(classify(&split, &lenient).is_ok());
        assert_eq!(classify(&path_graph(2).unwrap(), &opts), Err(ClassifyError::TooFewVertices(2)));
        let capped = ClassifyOptions { enumeration: EnumConfig::with_cap(5), ..opts };
        assert!(matches!(classify(&complete_graph(4).unwrap(), &capped), Err(ClassifyError::Enum(_))));
    }

    #[test]
    fn minors() {
        assert!(has_minor(&complete_graph(4).unwrap(), MinorPattern::K4).unwrap());
        assert!(!has_minor(&cycle_graph(5).unwrap(), MinorPattern::K4).unwrap());
        assert!(!has_minor(&k4_minus_edge(), MinorPattern::K23).unwrap());
        assert!(has_minor(&complete_graph(5).unwrap(), MinorPattern::K23).unwrap());
        // K2,3 itself and a subdivision of it
        let k23 = Graph::from_edges(5, [(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)]).unwrap();
        assert!(has_minor(&k23, MinorPattern::K23).unwrap());
        assert!(!has_minor(&k23, MinorPattern::K4).unwrap());
        let sub = Graph::from_edges(6, [(0, 2), (0, 3), (0, 5), (5, 4), (1, 2), (1, 3), (1, 4)]).unwrap();
        assert!(has_minor(&sub, MinorPattern::K23).unwrap());
        // wheel W5 (hub 0, rim 1..=5) has a K4 minor
        let mut w = vec![(1, 2), (2, 3), (3, 4), (4, 5), (1, 5)];
        w.extend((1..=5).map(|v| (0, v)));
        assert!(has_minor(&Graph::from_edges(6, w).unwrap(), MinorPattern::K4).unwrap());
        assert!(has_minor(&complete_graph(11).unwrap(), MinorPattern::K4).is_err());
    }

    #[test]
    fn outerplanarity() {
        assert!(is_outerplanar(&star_graph(6).unwrap()).unwrap());
        assert!(is_outerplanar(&cycle_graph(7).unwrap()).unwrap());
        assert!(!is_outerplanar(&complete_graph(4).unwrap()).unwrap());
    }

    #[test]
    fn stream_with_bad_line() {
        let input = format!("{}\nnot-graph6!\n\n{}\n", emit_graph6(&complete_graph(4).unwrap()), "Bw");
        let mut records = Vec::new();
        let summary = classify_stream(input.as_bytes(), &StreamOptions::default(), |r| {
            records.push(r.clone());
            Ok(())
        })
        .unwrap();
        assert_eq!(records.len(), 3);
        assert!(matches!(records[1], StreamRecord::Error { id: 1, .. }));
        assert!(matches!(records[2], StreamRecord::Classified { id: 3, .. }));
        assert_eq!((summary.classified, summary.errors), (2, 1));
    }

    #[test]
    fn empty_stream() {
        let summary = classify_stream(&b""[..], &StreamOptions::default(), |_| Ok(())).unwrap();
        assert_eq!(summary, StreamSummary::default());
    }
}
