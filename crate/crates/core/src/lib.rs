//! Correlation of the reachability events `{a -> s}` and `{s -> b}` when every
//! edge of an undirected graph is oriented independently and uniformly.
//!
//! * [`graph`]: graphs, graph6 and edge-list I/O.
//! * [`enumerate`]: exact counts over all `2^m` orientations.
//! * [`kn`]: exact recursions and bounds for complete graphs.
//! * [`closed_form`]: cycles and forests.
//! * [`monte_carlo`]: seeded sampling for graphs beyond the enumeration cap.
//! * [`classify`]: Class I/II/III membership and minor tests.

pub mod classify;
pub mod closed_form;
pub mod correlation;
pub mod dyadic;
pub mod enumerate;
pub mod graph;
pub mod kn;
pub mod monte_carlo;

pub use correlation::TripleCorrelation;
pub use dyadic::{DyadicProb, Sign, SignedDyadic};
pub use graph::{Graph, Triple};

/// Environment variable read for the default worker count.
pub const THREADS_ENV: &str = "ORIENTCORR_THREADS";

/// Runs `f` on a dedicated rayon pool with `threads` workers (0 = one per core).
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool construction");
    pool.install(f)
}
