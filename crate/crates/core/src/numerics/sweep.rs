use rayon::prelude::*;

/// Runs `f` on a dedicated pool with `workers` threads (0 means the rayon
/// default).
pub fn with_workers<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> R {
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// Evaluates `task` at every point in parallel. Records come back in input
/// order and a failing point only affects its own record.
pub fn sweep<P, R, E, F>(points: &[P], task: F) -> Vec<Result<R, E>>
where
    P: Sync,
    R: Send,
    E: Send,
    F: Fn(&P) -> Result<R, E> + Sync,
{
    points.par_iter().map(&task).collect()
}
