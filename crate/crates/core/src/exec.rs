//! Data-parallel helpers.
//!
//! With the `parallel` feature (default) these fan out over the current rayon
//! pool; without it they run as plain sequential loops. Results are always
//! returned in index order, so outputs do not depend on scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Evaluates `f(0..len)` and collects the results in index order.
pub fn map_indices<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..len).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(f).collect()
    }
}

/// Maps each element of `items`, preserving order.
pub fn map_slice<S, T, F>(items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Fills `out[i] = f(i)`.
pub fn fill_indexed<T, F>(out: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        out.par_iter_mut().enumerate().for_each(|(i, v)| *v = f(i));
    }
    #[cfg(not(feature = "parallel"))]
    {
        out.iter_mut().enumerate().for_each(|(i, v)| *v = f(i));
    }
}

/// Calls `f(chunk_index, chunk)` on consecutive mutable chunks of `chunk_len`.
pub fn for_each_chunk_mut<T, F>(out: &mut [T], chunk_len: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    let chunk_len = chunk_len.max(1);
    #[cfg(feature = "parallel")]
    {
        out.par_chunks_mut(chunk_len)
            .enumerate()
            .for_each(|(k, c)| f(k, c));
    }
    #[cfg(not(feature = "parallel"))]
    {
        out.chunks_mut(chunk_len)
            .enumerate()
            .for_each(|(k, c)| f(k, c));
    }
}

/// Maximum of `f(i)` over `0..len`, `f64::NEG_INFINITY` when empty.
pub fn max_over<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..len)
            .into_par_iter()
            .map(f)
            .reduce(|| f64::NEG_INFINITY, f64::max)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(f).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Sum of `f(i)` over `0..len`, accumulated in fixed-size blocks so the
/// rounding pattern is the same with or without the `parallel` feature.
pub fn sum_over<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    const BLOCK: usize = 4096;
    let blocks = len.div_ceil(BLOCK);
    let partial = map_indices(blocks, |b| {
        let lo = b * BLOCK;
        let hi = (lo + BLOCK).min(len);
        (lo..hi).map(&f).sum::<f64>()
    });
    partial.into_iter().sum()
}
