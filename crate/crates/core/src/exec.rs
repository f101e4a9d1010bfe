use alloc::vec::Vec;

/// Strategy for evaluating independent, indexed units of work.
///
/// Implementations may run units in any order and on any number of threads,
/// but must return results in index order. Callers only rely on that, so
/// harness output is identical for every implementation.
pub trait Executor {
    /// Evaluates `f(0)..f(n)` and returns the results in index order.
    fn map_indexed<T, F>(&self, n: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send;

    /// Number of indices in `0..n` for which `f` returns true.
    fn count<F>(&self, n: u64, f: F) -> u64
    where
        F: Fn(u64) -> bool + Sync + Send,
    {
        self.map_indexed(n, f).into_iter().filter(|&hit| hit).count() as u64
    }
}

/// Runs every unit on the calling thread.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map_indexed<T, F>(&self, n: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        (0..n).map(f).collect()
    }

    fn count<F>(&self, n: u64, f: F) -> u64
    where
        F: Fn(u64) -> bool + Sync + Send,
    {
        (0..n).filter(|&i| f(i)).count() as u64
    }
}
