//! Batch evaluation of per-seed checks.
//!
//! With the `parallel` feature (on by default) work is spread over the rayon
//! pool; without it, or through the `*_sequential` entry points, seeds are
//! processed in order on the calling thread. Both produce identical results.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Applies `f` to every seed, preserving seed order in the output.
pub fn map_seeds<T, F>(seeds: Range<u64>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        seeds.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_seeds_sequential(seeds, f)
    }
}

pub fn map_seeds_sequential<T, F>(seeds: Range<u64>, f: F) -> Vec<T>
where
    F: Fn(u64) -> T,
{
    seeds.map(f).collect()
}

/// Seeds for which `holds` is false, in increasing order.
pub fn failing_seeds<F>(seeds: Range<u64>, holds: F) -> Vec<u64>
where
    F: Fn(u64) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        seeds.into_par_iter().filter(|&s| !holds(s)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        failing_seeds_sequential(seeds, holds)
    }
}

pub fn failing_seeds_sequential<F>(seeds: Range<u64>, holds: F) -> Vec<u64>
where
    F: Fn(u64) -> bool,
{
    seeds.filter(|&s| !holds(s)).collect()
}
