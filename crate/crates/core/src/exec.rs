//! Data-parallel map with a sequential fallback.
//!
//! Results always come back in input order, and every reduction in the crate
//! is performed sequentially over that ordered output, so parallel and
//! sequential runs are bit-identical.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

impl Execution {
    /// Whether this build can actually run in parallel.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Execution::Parallel {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// Like [`Execution::map`] for fallible closures; the first error in input
    /// order is returned.
    pub fn try_map<T, R, F>(self, items: &[T], f: F) -> crate::Result<Vec<R>>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> crate::Result<R> + Sync + Send,
    {
        self.map(items, f).into_iter().collect()
    }
}

/// Caps the global worker pool. Has no effect without the `parallel` feature
/// or once the pool is already initialised.
pub fn set_thread_cap(threads: usize) {
    #[cfg(feature = "parallel")]
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree_and_keep_order() {
        let xs: Vec<u64> = (0..100).collect();
        let a = Execution::Parallel.map(&xs, |x| x * x);
        let b = Execution::Sequential.map(&xs, |x| x * x);
        assert_eq!(a, b);
        assert_eq!(a[7], 49);
    }
}
