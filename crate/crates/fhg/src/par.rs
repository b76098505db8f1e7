//! Parallel execution plumbing.
//!
//! With the `parallel` feature (the default) coarse-grained work is spread
//! over a rayon pool; without it everything runs on the calling thread. All
//! callers combine results by exact max with a deterministic tie-break, so
//! output never depends on the job count.

/// Resolves a requested job count: `None`/`0` means "all cores" with the
/// `parallel` feature and 1 without it.
pub fn effective_jobs(requested: Option<usize>) -> usize {
    match requested {
        Some(j) if j > 0 => j,
        _ => {
            #[cfg(feature = "parallel")]
            {
                std::thread::available_parallelism()
                    .map(|p| p.get())
                    .unwrap_or(1)
            }
            #[cfg(not(feature = "parallel"))]
            {
                1
            }
        }
    }
}

/// Maps `f` over `items`, preserving input order in the output. With no
/// explicit job count the global rayon pool is used; an explicit count gets
/// a dedicated pool of that size.
#[cfg(feature = "parallel")]
pub fn par_map<I, O, F>(jobs: Option<usize>, items: Vec<I>, f: F) -> Vec<O>
where
    I: Send,
    O: Send,
    F: Fn(I) -> O + Sync + Send,
{
    use rayon::prelude::*;
    if effective_jobs(jobs) <= 1 || items.len() <= 1 {
        return items.into_iter().map(f).collect();
    }
    match jobs {
        None => items.into_par_iter().map(f).collect(),
        Some(j) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(j)
                .build()
                .expect("failed to build thread pool");
            pool.install(|| items.into_par_iter().map(f).collect())
        }
    }
}

#[cfg(not(feature = "parallel"))]
pub fn par_map<I, O, F>(_jobs: Option<usize>, items: Vec<I>, f: F) -> Vec<O>
where
    I: Send,
    O: Send,
    F: Fn(I) -> O + Sync + Send,
{
    items.into_iter().map(f).collect()
}
