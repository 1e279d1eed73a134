//! Data-parallel fan-out with a sequential fallback.
//!
//! With the `parallel` feature disabled every [`Execution`] runs sequentially,
//! so callers never need their own `cfg` gates.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

impl Execution {
    /// True when work will actually be spread over a thread pool.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Order-preserving map over a slice.
pub fn map<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec == Execution::Parallel {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Order-preserving map over `0..n`.
pub fn map_range<R, F>(exec: Execution, n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec == Execution::Parallel {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// Runs `f` inside a pool of `workers` threads; `None` uses the global pool.
pub fn with_workers<R: Send>(workers: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    if let Some(n) = workers {
        match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => return pool.install(f),
            Err(e) => log::warn!("could not build a {n}-thread pool ({e}), using the global pool"),
        }
    }
    let _ = workers;
    f()
}

/// Threads available to [`Execution::Parallel`].
pub fn current_workers() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_modes_agree() {
        let xs: Vec<u64> = (0..257).collect();
        let a = map(Execution::Parallel, &xs, |x| x * x + 1);
        let b = map(Execution::Sequential, &xs, |x| x * x + 1);
        assert_eq!(a, b);
        assert_eq!(
            map_range(Execution::Parallel, 10, |i| i * 3),
            map_range(Execution::Sequential, 10, |i| i * 3)
        );
    }

    #[test]
    fn pool_of_two() {
        let n = with_workers(Some(2), current_workers);
        if cfg!(feature = "parallel") {
            assert_eq!(n, 2);
        } else {
            assert_eq!(n, 1);
        }
    }
}
