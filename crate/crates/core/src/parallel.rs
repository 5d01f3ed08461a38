//! Execution policy for the embarrassingly parallel loops (simulation seeds,
//! subset enumeration, validity trials).
//!
//! Results never depend on the policy: every parallel map collects in index
//! order and every reduction is applied to that ordered output.

/// How to run an independent-iteration loop.
///
/// `Parallel` falls back to sequential execution when the crate is built
/// without the `parallel` feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether work will actually be spread over a thread pool.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// `(0..n).map(f).collect()`, possibly on the rayon pool.
pub(crate) fn map_indexed<T, F>(n: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// Splits `0..n` into contiguous chunks and maps each chunk, returning the
/// per-chunk results in order. Used where per-item results would be too
/// many to materialise.
pub(crate) fn map_chunks<T, F>(n: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(std::ops::Range<usize>) -> T + Sync + Send,
{
    const CHUNK: usize = 1 << 12;
    let chunks = n.div_ceil(CHUNK).max(1);
    map_indexed(chunks, exec, |c| {
        let start = c * CHUNK;
        f(start..(start + CHUNK).min(n))
    })
}
