//! Thin execution layer: data-parallel loops with a sequential fallback.
//!
//! Built with the `parallel` feature (default) these map onto rayon;
//! without it they degrade to plain iterator loops. All reductions in the
//! crate are structured so that both paths produce bit-identical results:
//! floating-point partials are collected in index order and folded
//! sequentially, and histogram accumulators use exact integer addition.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `0..n`, collecting results in index order.
#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

/// Map `f` over `0..n`, collecting results in index order.
#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Run `f` for every index in `0..n` for its side effects on shared state.
#[cfg(feature = "parallel")]
pub fn for_each_indexed<F>(n: usize, f: F)
where
    F: Fn(usize) + Sync + Send,
{
    (0..n).into_par_iter().for_each(f);
}

/// Run `f` for every index in `0..n` for its side effects on shared state.
#[cfg(not(feature = "parallel"))]
pub fn for_each_indexed<F>(n: usize, f: F)
where
    F: Fn(usize) + Sync + Send,
{
    (0..n).for_each(f);
}

/// Map batches `0..n_batches` to partial accumulators and merge them.
///
/// The merge order is unspecified, so `merge` must be exactly associative
/// and commutative (integer histograms qualify; floating sums do not —
/// use [`map_indexed`] plus an ordered fold for those).
#[cfg(feature = "parallel")]
pub fn reduce_batches<T, F, M>(n_batches: usize, identity: impl Fn() -> T + Sync + Send, f: F, merge: M) -> T
where
    T: Send,
    F: Fn(usize, &mut T) + Sync + Send,
    M: Fn(T, T) -> T + Sync + Send,
{
    (0..n_batches)
        .into_par_iter()
        .fold(&identity, |mut acc, b| {
            f(b, &mut acc);
            acc
        })
        .reduce(&identity, merge)
}

/// Map batches `0..n_batches` to partial accumulators and merge them.
#[cfg(not(feature = "parallel"))]
pub fn reduce_batches<T, F, M>(n_batches: usize, identity: impl Fn() -> T + Sync + Send, f: F, merge: M) -> T
where
    T: Send,
    F: Fn(usize, &mut T) + Sync + Send,
    M: Fn(T, T) -> T + Sync + Send,
{
    let _ = &merge;
    let mut acc = identity();
    for b in 0..n_batches {
        f(b, &mut acc);
    }
    acc
}

/// Whether this build executes loops through rayon.
pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
