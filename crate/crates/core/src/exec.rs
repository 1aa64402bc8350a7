//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (on by default) [`Execution::Parallel`] runs
//! on the rayon pool; without it every mode degrades to a plain loop.
//! Results are always returned in input order, so output never depends on
//! the thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// Order-preserving map over a slice.
pub fn map<T, R, F>(mode: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        Execution::Parallel => items.par_iter().map(f).collect(),
        _ => items.iter().map(f).collect(),
    }
}

/// Order-preserving map over `0..len` split into chunks of `chunk` indices.
/// `f` receives the half-open range `[start, end)` of each chunk.
pub fn map_chunks<R, F>(mode: Execution, len: u64, chunk: u64, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(u64, u64) -> R + Sync + Send,
{
    let chunk = chunk.max(1);
    let count = len.div_ceil(chunk);
    let run = |c: u64| {
        let start = c * chunk;
        f(start, (start + chunk).min(len))
    };
    match mode {
        #[cfg(feature = "parallel")]
        Execution::Parallel => (0..count).into_par_iter().map(run).collect(),
        _ => (0..count).map(run).collect(),
    }
}

/// Caps the global pool size. Returns false if the pool was already built
/// or parallelism is compiled out.
pub fn init_threads(threads: usize) -> bool {
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .is_ok()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let xs: Vec<u64> = (0..1000).collect();
        let a = map(Execution::Sequential, &xs, |x| x * x);
        let b = map(Execution::Parallel, &xs, |x| x * x);
        assert_eq!(a, b);
    }

    #[test]
    fn chunks_cover_range() {
        let parts = map_chunks(Execution::Parallel, 103, 10, |s, e| (s, e));
        assert_eq!(parts.len(), 11);
        assert_eq!(parts[0], (0, 10));
        assert_eq!(parts[10], (100, 103));
        let total: u64 = parts.iter().map(|(s, e)| e - s).sum();
        assert_eq!(total, 103);
    }
}
