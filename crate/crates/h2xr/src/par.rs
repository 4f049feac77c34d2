//! Execution strategy for embarrassingly parallel sweeps.
//!
//! Mode solves, witness scans, and parameter sweeps are independent jobs; the
//! `parallel` feature routes them through rayon, and without it the same
//! entry points run sequentially. [`Exec`] exists so benchmarks (and callers
//! that know their jobs are tiny) can pick the strategy at runtime; results
//! are identical either way — order is restored by index.

/// Map strategy for independent jobs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    /// Rayon work-stealing pool. Only available with the `parallel` feature.
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for Exec {
    #[cfg(feature = "parallel")]
    fn default() -> Self {
        Exec::Parallel
    }
    #[cfg(not(feature = "parallel"))]
    fn default() -> Self {
        Exec::Sequential
    }
}

/// Order-preserving map over owned items.
pub fn map<I, U, F>(exec: Exec, items: Vec<I>, f: F) -> Vec<U>
where
    I: Send,
    U: Send,
    F: Fn(I) -> U + Send + Sync,
{
    match exec {
        Exec::Sequential => items.into_iter().map(f).collect(),
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            items.into_par_iter().map(f).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequential_and_default_agree_and_preserve_order() {
        let items: Vec<u64> = (0..100).collect();
        let seq = map(Exec::Sequential, items.clone(), |x| x * x + 1);
        let dft = map(Exec::default(), items, |x| x * x + 1);
        assert_eq!(seq, dft);
        assert_eq!(seq[10], 101);
    }
}
