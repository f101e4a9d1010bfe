use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuildError, ThreadPoolBuilder};
use softdec_core::Executor;

/// Runs work units on a dedicated rayon pool.
pub struct Parallel {
    pool: ThreadPool,
}

impl Parallel {
    /// `workers = 0` lets rayon pick one thread per core.
    pub fn new(workers: usize) -> Result<Self, ThreadPoolBuildError> {
        let pool = ThreadPoolBuilder::new().num_threads(workers).build()?;
        Ok(Self { pool })
    }

    pub fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Executor for Parallel {
    fn map_indexed<T, F>(&self, n: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        self.pool.install(|| (0..n).into_par_iter().map(f).collect())
    }

    fn count<F>(&self, n: u64, f: F) -> u64
    where
        F: Fn(u64) -> bool + Sync + Send,
    {
        self.pool.install(|| (0..n).into_par_iter().filter(|&i| f(i)).count() as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keeps_index_order() {
        let exec = Parallel::new(3).unwrap();
        assert_eq!(exec.workers(), 3);
        let out = exec.map_indexed(10_000, |i| i * i);
        assert!(out.iter().enumerate().all(|(i, &v)| v == (i * i) as u64));
        assert_eq!(exec.count(1000, |i| i % 7 == 0), 143);
    }
}
