//! Column- and sample-parallel loops.
//!
//! With the `parallel` feature the loops run on the current rayon pool;
//! without it they are plain sequential iterators. Reductions never use
//! rayon's tree reduction: partial values are collected in index order and
//! summed sequentially, so results do not depend on the thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Calls `f(j, column)` for every `len`-sized chunk of `data`.
pub fn for_each_chunk<F>(data: &mut [f64], len: usize, f: F)
where
    F: Fn(usize, &mut [f64]) + Sync + Send,
{
    if len == 0 {
        return;
    }
    #[cfg(feature = "parallel")]
    data.par_chunks_mut(len)
        .enumerate()
        .for_each(|(j, c)| f(j, c));
    #[cfg(not(feature = "parallel"))]
    data.chunks_mut(len).enumerate().for_each(|(j, c)| f(j, c));
}

/// Like [`for_each_chunk`] with a per-worker scratch value built by `init`.
pub fn for_each_chunk_init<S, I, F>(data: &mut [f64], len: usize, init: I, f: F)
where
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, usize, &mut [f64]) + Sync + Send,
{
    if len == 0 {
        return;
    }
    #[cfg(feature = "parallel")]
    data.par_chunks_mut(len)
        .enumerate()
        .for_each_init(&init, |s, (j, c)| f(s, j, c));
    #[cfg(not(feature = "parallel"))]
    {
        let mut s = init();
        data.chunks_mut(len)
            .enumerate()
            .for_each(|(j, c)| f(&mut s, j, c));
    }
}

/// Evaluates `f` for every index in `0..n`, results in index order.
pub fn map_indices<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Sums `f(j)` over `0..n` in index order.
pub fn ordered_sum<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    map_indices(n, f).into_iter().sum()
}
