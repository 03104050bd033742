//! Batch mapping over independent work items.
//!
//! With the default `parallel` feature the batch fans out over a rayon pool;
//! compiled without it the same entry point degrades to the sequential twin.
//! Both preserve input order, so downstream CSV output is byte-stable either
//! way.

/// Maps `f` over the batch, in parallel when the `parallel` feature is on.
#[cfg(feature = "parallel")]
pub fn map_batch<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.into_par_iter().map(f).collect()
}

/// Maps `f` over the batch, in parallel when the `parallel` feature is on.
#[cfg(not(feature = "parallel"))]
pub fn map_batch<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    map_batch_seq(items, f)
}

/// Sequential twin of `map_batch`, always available as a baseline.
pub fn map_batch_seq<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U,
{
    items.into_iter().map(f).collect()
}

/// Caps the worker pool at `jobs` threads. Safe to call repeatedly; once a
/// pool exists later calls are ignored, and the sequential build ignores the
/// hint entirely.
pub fn configure_threads(jobs: usize) {
    #[cfg(feature = "parallel")]
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = jobs;
}
