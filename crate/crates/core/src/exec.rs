//! Execution strategy for the data-parallel inner loops (valuation
//! enumeration, refinement rounds, experiment batches).
//!
//! With the `parallel` feature disabled, [`Exec::Parallel`] runs the same
//! code sequentially, so results never depend on the strategy.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    /// True when this strategy actually fans out to a thread pool.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    /// `true` iff `pred(i)` holds for every `i` in `0..len`.
    pub fn all_in_range<F>(self, len: u64, pred: F) -> bool
    where
        F: Fn(u64) -> bool + Sync + Send,
    {
        self.find_in_range(len, |i| !pred(i)).is_none()
    }

    /// Some index in `0..len` satisfying `pred`. Sequential search returns
    /// the least such index; parallel search returns any one.
    pub fn find_in_range<F>(self, len: u64, pred: F) -> Option<u64>
    where
        F: Fn(u64) -> bool + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() && len > 1 {
            use rayon::prelude::*;
            return (0..len).into_par_iter().find_any(|&i| pred(i));
        }
        (0..len).find(|&i| pred(i))
    }

    /// Chunked variant of [`Exec::find_in_range`]: `scan(lo, hi)` inspects
    /// `lo..hi` with its own scratch state and reports a hit.
    pub fn find_in_chunks<F>(self, len: u64, chunk: u64, scan: F) -> Option<u64>
    where
        F: Fn(u64, u64) -> Option<u64> + Sync + Send,
    {
        let chunk = chunk.max(1);
        let chunks = len.div_ceil(chunk);
        let run = |c: u64| scan(c * chunk, ((c + 1) * chunk).min(len));
        #[cfg(feature = "parallel")]
        if self.is_parallel() && chunks > 1 {
            use rayon::prelude::*;
            return (0..chunks).into_par_iter().find_map_any(run);
        }
        (0..chunks).find_map(run)
    }

    /// Order-preserving map over a slice.
    pub fn map<T, U, F>(self, items: &[T], f: F) -> Vec<U>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// Order-preserving map over `0..len`.
    pub fn map_range<U, F>(self, len: usize, f: F) -> Vec<U>
    where
        U: Send,
        F: Fn(usize) -> U + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return (0..len).into_par_iter().map(f).collect();
        }
        (0..len).map(f).collect()
    }
}
