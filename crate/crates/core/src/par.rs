//! Order-preserving data-parallel map.
//!
//! With the `parallel` feature and `jobs > 1` items are processed on a
//! dedicated pool of `jobs` threads; otherwise sequentially. Results always
//! come back in input order, so output is identical for every `jobs` value.

/// Worker count requested by the `TRAJSEG_JOBS` environment variable.
pub fn jobs_from_env() -> Option<usize> {
    std::env::var("TRAJSEG_JOBS").ok()?.trim().parse().ok()
}

/// Whether this build can run more than one worker.
pub const fn parallel_enabled() -> bool {
    cfg!(feature = "parallel")
}

pub fn map_ordered<T, R, F>(items: &[T], jobs: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if jobs > 1 && items.len() > 1 {
        use rayon::prelude::*;
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
            return pool.install(|| items.par_iter().map(&f).collect());
        }
    }
    let _ = jobs;
    items.iter().map(f).collect()
}

/// Like [`map_ordered`] but stops at the first error in input order.
pub fn try_map_ordered<T, R, E, F>(items: &[T], jobs: usize, f: F) -> Result<Vec<R>, E>
where
    T: Sync,
    R: Send,
    E: Send,
    F: Fn(&T) -> Result<R, E> + Sync + Send,
{
    map_ordered(items, jobs, f).into_iter().collect()
}
