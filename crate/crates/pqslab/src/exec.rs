//! Data-parallel map helpers. With the `parallel` feature the maps fan out
//! over rayon; without it they run sequentially. Output order always matches
//! input order, so downstream reductions are bitwise reproducible either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
pub(crate) fn map_slice<I, O, F>(items: &[I], f: F) -> Vec<O>
where
    I: Sync,
    O: Send,
    F: Fn(&I) -> O + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_slice<I, O, F>(items: &[I], f: F) -> Vec<O>
where
    F: Fn(&I) -> O,
{
    items.iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub(crate) fn map_indices<O, F>(count: usize, f: F) -> Vec<O>
where
    O: Send,
    F: Fn(usize) -> O + Sync + Send,
{
    (0..count).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indices<O, F>(count: usize, f: F) -> Vec<O>
where
    F: Fn(usize) -> O,
{
    (0..count).map(f).collect()
}

/// Map that stops on the first error (in input order).
pub(crate) fn try_map_slice<I, O, E, F>(items: &[I], f: F) -> Result<Vec<O>, E>
where
    I: Sync,
    O: Send,
    E: Send,
    F: Fn(&I) -> Result<O, E> + Sync + Send,
{
    let results = map_slice(items, f);
    results.into_iter().collect()
}
