//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) the [`Execution::Parallel`] mode
//! distributes independent items over the rayon pool. Without it every mode
//! runs sequentially. Results are always returned in input order, so output
//! does not depend on the execution mode.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// True when work will actually be spread over threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Maps `f` over `items`, preserving order.
pub fn map<T, R, F>(mode: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = mode;
    items.iter().map(f).collect()
}

/// Maps `f` over `0..n`, preserving order.
pub fn map_range<R, F>(mode: Execution, n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = mode;
    (0..n).map(f).collect()
}

/// Fallible order-preserving map; returns the first error in input order.
pub fn try_map<T, R, E, F>(mode: Execution, items: &[T], f: F) -> Result<Vec<R>, E>
where
    T: Sync,
    R: Send,
    E: Send,
    F: Fn(&T) -> Result<R, E> + Sync + Send,
{
    map(mode, items, f).into_iter().collect()
}

/// Applies `f` to each chunk of `data` of length `chunk` in place.
pub fn for_each_chunk_mut<T, F>(mode: Execution, data: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        use rayon::prelude::*;
        data.par_chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
        return;
    }
    let _ = mode;
    data.chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree_and_keep_order() {
        let xs: Vec<u64> = (0..1000).collect();
        let a = map(Execution::Sequential, &xs, |x| x * x);
        let b = map(Execution::Parallel, &xs, |x| x * x);
        assert_eq!(a, b);
        assert_eq!(a[999], 999 * 999);
    }

    #[test]
    fn try_map_reports_first_error() {
        let xs: Vec<i32> = (0..100).collect();
        let r: Result<Vec<i32>, i32> =
            try_map(Execution::Parallel, &xs, |&x| if x == 40 || x == 70 { Err(x) } else { Ok(x) });
        assert_eq!(r, Err(40));
    }

    #[test]
    fn chunks_are_indexed() {
        let mut v = vec![0usize; 12];
        for_each_chunk_mut(Execution::Parallel, &mut v, 4, |i, c| c.fill(i));
        assert_eq!(v, vec![0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2]);
    }
}
