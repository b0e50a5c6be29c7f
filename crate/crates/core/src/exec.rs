//! Data-parallel evaluation of independent cells, with a sequential fallback.
//!
//! With the `parallel` feature, [`Strategy::Parallel`] fans out over rayon's
//! global pool; without it every strategy runs sequentially. Results always
//! come back in input order.

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strategy {
    /// Parallel when the feature is compiled in.
    #[default]
    Auto,
    Sequential,
    Parallel,
}

impl Strategy {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self != Strategy::Sequential
    }
}

/// `items.iter().map(f)` in order, possibly in parallel.
pub fn map_ordered<T, R, F>(items: &[T], strategy: Strategy, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if strategy.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = strategy;
    items.iter().map(f).collect()
}
