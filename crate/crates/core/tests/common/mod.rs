#![allow(dead_code)]

use orientcorr::graph::{path_graph, star_graph, Graph};

/// Small deterministic generator for test inputs only.
pub struct Lcg(pub u64);

impl Lcg {
    pub fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        self.0 >> 33
    }

    pub fn below(&mut self, k: u64) -> u64 {
        self.next() % k
    }
}

/// Decodes a Prüfer sequence of length `n - 2` into the edges of a labeled tree.
pub fn prufer_tree(n: usize, seq: &[usize]) -> Graph {
    assert_eq!(seq.len() + 2, n);
    let mut degree = vec![1usize; n];
    for &v in seq {
        degree[v] += 1;
    }
    let mut edges = Vec::new();
    for &v in seq {
        let leaf = (0..n).find(|&u| degree[u] == 1).unwrap();
        edges.push((leaf, v));
        degree[leaf] -= 1;
        degree[v] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&u| degree[u] == 1).collect();
    edges.push((rest[0], rest[1]));
    Graph::from_edges(n, edges).unwrap()
}

/// Every labeled tree on `n` vertices (n^(n-2) of them).
pub fn all_labeled_trees(n: usize) -> Vec<Graph> {
    if n == 2 {
        return vec![path_graph(2).unwrap()];
    }
    let len = n - 2;
    let total = n.pow(len as u32);
    (0..total)
        .map(|mut code| {
            let seq: Vec<usize> = (0..len)
                .map(|_| {
                    let d = code % n;
                    code /= n;
                    d
                })
                .collect();
            prufer_tree(n, &seq)
        })
        .collect()
}

pub fn random_tree(n: usize, rng: &mut Lcg) -> Graph {
    let seq: Vec<usize> = (0..n - 2).map(|_| rng.below(n as u64) as usize).collect();
    prufer_tree(n, &seq)
}

/// Caterpillar: a spine path with `legs[i]` pendant leaves on spine vertex `i`.
pub fn caterpillar(legs: &[usize]) -> Graph {
    let spine = legs.len();
    let mut edges: Vec<(usize, usize)> = (1..spine).map(|v| (v - 1, v)).collect();
    let mut next = spine;
    for (i, &k) in legs.iter().enumerate() {
        for _ in 0..k {
            edges.push((i, next));
            next += 1;
        }
    }
    Graph::from_edges(next, edges).unwrap()
}

/// At least 50 trees with 3..=8 vertices: every labeled tree on 3..=5
/// vertices, random trees on 6..=8, and paths, stars and caterpillars.
pub fn test_trees() -> Vec<Graph> {
    let mut trees = Vec::new();
    for n in 3..=5 {
        trees.extend(all_labeled_trees(n));
    }
    let mut rng = Lcg(0x7e57);
    for n in 6..=8 {
        for _ in 0..12 {
            trees.push(random_tree(n, &mut rng));
        }
    }
    for n in 3..=8 {
        trees.push(path_graph(n).unwrap());
        trees.push(star_graph(n).unwrap());
    }
    trees.push(caterpillar(&[1, 2, 1]));
    trees.push(caterpillar(&[0, 3, 0, 1]));
    trees.push(caterpillar(&[2, 0, 2]));
    trees
}

/// Random simple graph from independent fair coin flips per pair.
pub fn random_graph(n: usize, max_edges: usize, rng: &mut Lcg) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.below(2) == 1 && edges.len() < max_edges {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

/// Reachability matrix of a digraph by repeated boolean squaring of `I + A`.
pub fn naive_closure(n: usize, arcs: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut r = vec![vec![false; n]; n];
    for (v, row) in r.iter_mut().enumerate() {
        row[v] = true;
    }
    for &(u, v) in arcs {
        r[u][v] = true;
    }
    let mut span = 1;
    while span < n {
        let mut sq = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                sq[i][j] = (0..n).any(|k| r[i][k] && r[k][j]);
            }
        }
        r = sq;
        span *= 2;
    }
    r
}
