//! Execution policy shared by the data-parallel loops.
//!
//! Every parallel loop in the crate reduces with exact integer or rational
//! sums (or sorts before merging), so results do not depend on the schedule.

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// `Parallel` when the crate was built with the `parallel` feature.
    pub fn available() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }

    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    /// Maps `f` over `items`, preserving order.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// Maps `f` over `range`, preserving order.
    pub fn map_range<R, F>(self, range: std::ops::Range<i64>, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(i64) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return range.into_par_iter().map(f).collect();
        }
        range.map(f).collect()
    }

    /// Sum of `f` over `range` in exact `u64` arithmetic.
    pub fn sum_range<F>(self, range: std::ops::Range<i64>, f: F) -> u64
    where
        F: Fn(i64) -> u64 + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return range.into_par_iter().map(f).sum();
        }
        range.map(f).sum()
    }
}
