//! Labeled simple undirected graphs on at most 62 vertices.
//!
//! Every other module addresses edges through the canonical index: `edges()`
//! is sorted lexicographically on `(u, v)` with `u < v`, and edge `i` of a
//! graph is always `edges()[i]`. Orientation bit `i` refers to that edge.

use std::fmt;

use thiserror::Error;

/// Largest vertex count accepted anywhere in the crate.
pub const MAX_VERTICES: usize = 62;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph6 parse error at byte {offset}: {reason}")]
    Graph6 { offset: usize, reason: String },
    #[error("edge list parse error on line {line}: {reason}")]
    EdgeList { line: usize, reason: String },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("vertex count {0} outside 1..={MAX_VERTICES}")]
    VertexCount(usize),
    #[error("a cycle needs at least 3 vertices, got {0}")]
    CycleTooShort(usize),
    #[error("triple ({a}, {s}, {b}) must be pairwise distinct vertices below {n}")]
    InvalidTriple { a: usize, s: usize, b: usize, n: usize },
}

#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<u64>,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Builds a graph from an edge iterator, rejecting loops, duplicates (in
    /// either order) and out-of-range endpoints.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n == 0 || n > MAX_VERTICES {
            return Err(GraphError::VertexCount(n));
        }
        let mut adj = vec![0u64; n];
        let mut list = Vec::new();
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if adj[u] >> v & 1 == 1 {
                return Err(GraphError::DuplicateEdge(u.min(v), u.max(v)));
            }
            adj[u] |= 1 << v;
            adj[v] |= 1 << u;
            list.push((u.min(v), u.max(v)));
        }
        list.sort_unstable();
        Ok(Graph { n, adj, edges: list })
    }

    pub fn empty(n: usize) -> Result<Self, GraphError> {
        Self::from_edges(n, std::iter::empty())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of edges.
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Canonically ordered edge list.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Neighbour bitset of `v`.
    pub fn neighbors(&self, v: usize) -> u64 {
        self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.adj[u] >> v & 1 == 1
    }

    pub fn degree(&self, v: usize) -> u32 {
        self.adj[v].count_ones()
    }

    /// Bitset with the low `n` bits set.
    pub fn vertex_mask(&self) -> u64 {
        low_bits(self.n)
    }

    /// Position of edge `{u, v}` in the canonical order.
    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        let key = (u.min(v), u.max(v));
        self.edges.binary_search(&key).ok()
    }

    /// Vertices reachable from `v` through undirected edges (including `v`).
    pub fn component_of(&self, v: usize) -> u64 {
        let mut seen = 1u64 << v;
        let mut frontier = seen;
        while frontier != 0 {
            let mut next = 0u64;
            let mut f = frontier;
            while f != 0 {
                let u = f.trailing_zeros() as usize;
                f &= f - 1;
                next |= self.adj[u];
            }
            frontier = next & !seen;
            seen |= next;
        }
        seen
    }

    pub fn is_connected(&self) -> bool {
        self.component_of(0) == self.vertex_mask()
    }

    /// True iff the graph has no cycle.
    pub fn is_forest(&self) -> bool {
        let mut components = 0;
        let mut seen = 0u64;
        for v in 0..self.n {
            if seen >> v & 1 == 0 {
                seen |= self.component_of(v);
                components += 1;
            }
        }
        self.m() + components == self.n
    }

    pub fn triple(&self, a: usize, s: usize, b: usize) -> Result<Triple, GraphError> {
        let t = Triple { a, s, b };
        self.check_triple(&t)?;
        Ok(t)
    }

    pub fn check_triple(&self, t: &Triple) -> Result<(), GraphError> {
        let Triple { a, s, b } = *t;
        if a >= self.n || s >= self.n || b >= self.n || a == s || s == b || a == b {
            return Err(GraphError::InvalidTriple { a, s, b, n: self.n });
        }
        Ok(())
    }

    /// Every ordered triple of pairwise distinct vertices, in lexicographic
    /// `(a, s, b)` order.
    pub fn ordered_triples(&self) -> impl Iterator<Item = Triple> + '_ {
        let n = self.n;
        (0..n).flat_map(move |a| {
            (0..n).flat_map(move |s| {
                (0..n)
                    .filter(move |&b| a != s && s != b && a != b)
                    .map(move |b| Triple { a, s, b })
            })
        })
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n, self.edges)
    }
}

/// Ordered vertex triple `(a, s, b)` for the events `{a -> s}` and `{s -> b}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub a: usize,
    pub s: usize,
    pub b: usize,
}

impl Triple {
    /// The triple `(b, s, a)`; orientation reversal maps one onto the other.
    pub fn reversed(self) -> Triple {
        Triple { a: self.b, s: self.s, b: self.a }
    }
}

pub(crate) fn low_bits(k: usize) -> u64 {
    if k >= 64 {
        u64::MAX
    } else {
        (1u64 << k) - 1
    }
}

pub fn complete_graph(n: usize) -> Result<Graph, GraphError> {
    let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
    Graph::from_edges(n, edges)
}

pub fn cycle_graph(n: usize) -> Result<Graph, GraphError> {
    if n < 3 {
        return Err(GraphError::CycleTooShort(n));
    }
    Graph::from_edges(n, (0..n).map(|v| (v, (v + 1) % n)))
}

pub fn path_graph(n: usize) -> Result<Graph, GraphError> {
    Graph::from_edges(n, (1..n).map(|v| (v - 1, v)))
}

pub fn star_graph(n: usize) -> Result<Graph, GraphError> {
    Graph::from_edges(n, (1..n).map(|v| (0, v)))
}

pub fn is_connected(g: &Graph) -> bool {
    g.is_connected()
}

const GRAPH6_HEADER: &str = ">>graph6<<";

/// Decodes one graph6 record (optionally prefixed by `>>graph6<<`).
///
/// Only the single-byte size form (`n <= 62`) is accepted. Padding bits in the
/// final byte must be zero.
pub fn parse_graph6(text: &str) -> Result<Graph, GraphError> {
    let err = |offset: usize, reason: &str| GraphError::Graph6 { offset, reason: reason.to_string() };
    let line = text.strip_suffix('\n').unwrap_or(text);
    let line = line.strip_suffix('\r').unwrap_or(line);
    let (base, body) = match line.strip_prefix(GRAPH6_HEADER) {
        Some(rest) => (GRAPH6_HEADER.len(), rest.as_bytes()),
        None => (0, line.as_bytes()),
    };
    let Some(&head) = body.first() else {
        return Err(err(base, "empty record"));
    };
    if !(63..=126).contains(&head) {
        return Err(err(base, "header byte outside 63..=126"));
    }
    if head == 126 {
        return Err(err(base, "multi-byte vertex counts (n > 62) are not supported"));
    }
    let n = (head - 63) as usize;
    if n == 0 {
        return Err(err(base, "graph with zero vertices"));
    }
    let nbits = n * (n - 1) / 2;
    let nbytes = nbits.div_ceil(6);
    let data = &body[1..];
    for (i, &c) in data.iter().enumerate() {
        if !(63..=126).contains(&c) {
            return Err(err(base + 1 + i, "byte outside 63..=126"));
        }
    }
    if data.len() < nbytes {
        return Err(err(base + 1 + data.len(), "record truncated"));
    }
    if data.len() > nbytes {
        return Err(err(base + 1 + nbytes, "trailing garbage"));
    }
    let mut edges = Vec::new();
    let mut k = 0;
    for v in 1..n {
        for u in 0..v {
            let byte = data[k / 6] - 63;
            if byte >> (5 - k % 6) & 1 == 1 {
                edges.push((u, v));
            }
            k += 1;
        }
    }
    if !nbits.is_multiple_of(6) {
        let last = data[nbytes - 1] - 63;
        if last & ((1u8 << (6 - nbits % 6)) - 1) != 0 {
            return Err(err(base + nbytes, "nonzero padding bits"));
        }
    }
    Graph::from_edges(n, edges)
}

/// Encodes `g` as a graph6 record without header or newline.
pub fn emit_graph6(g: &Graph) -> String {
    let n = g.n();
    let mut out = vec![63 + n as u8];
    let mut cur = 0u8;
    let mut k = 0;
    for v in 1..n {
        for u in 0..v {
            cur = cur << 1 | g.has_edge(u, v) as u8;
            k += 1;
            if k % 6 == 0 {
                out.push(63 + cur);
                cur = 0;
            }
        }
    }
    if k % 6 != 0 {
        out.push(63 + (cur << (6 - k % 6)));
    }
    String::from_utf8(out).expect("graph6 bytes are ASCII")
}

/// Parses the plain edge-list format: first non-empty line is `n`, then one
/// `u v` pair per line. Blank lines and `#` comments are ignored.
pub fn parse_edge_list(text: &str) -> Result<Graph, GraphError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let bad = |line: usize, reason: String| GraphError::EdgeList { line, reason };
    let (first, header) = lines.next().ok_or_else(|| bad(1, "missing vertex count".into()))?;
    let n: usize = header
        .parse()
        .map_err(|_| bad(first, format!("expected vertex count, found {header:?}")))?;
    if n == 0 || n > MAX_VERTICES {
        return Err(GraphError::VertexCount(n));
    }
    let mut edges = Vec::new();
    for (line, l) in lines {
        let fields: Vec<&str> = l.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(bad(line, format!("expected \"u v\", found {l:?}")));
        }
        let parse = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| bad(line, format!("invalid vertex {s:?}")))
        };
        edges.push((parse(fields[0])?, parse(fields[1])?));
    }
    Graph::from_edges(n, edges)
}

/// Writes `g` in the plain edge-list format accepted by [`parse_edge_list`].
pub fn emit_edge_list(g: &Graph) -> String {
    let mut out = format!("{}\n", g.n());
    for &(u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}
