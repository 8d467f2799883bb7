//! Trial fan-out.
//!
//! With the `parallel` feature (default) independent trials and row blocks are
//! spread over the rayon pool; without it the same closures run in order on
//! the calling thread. Output order is always trial order.

use crate::rng::{trial_rng, SimRng};

/// Run `n` independent trials, trial `i` receiving `trial_rng(seed, i)`.
pub fn map_trials<T, F>(n: usize, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut SimRng) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        map_trials_parallel(n, seed, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_trials_sequential(n, seed, f)
    }
}

pub fn map_trials_sequential<T, F>(n: usize, seed: u64, f: F) -> Vec<T>
where
    F: Fn(usize, &mut SimRng) -> T,
{
    (0..n)
        .map(|i| {
            let mut rng = trial_rng(seed, i as u64);
            f(i, &mut rng)
        })
        .collect()
}

/// Rayon-backed variant; falls back to [`map_trials_sequential`] when the
/// crate is built without `parallel`.
pub fn map_trials_parallel<T, F>(n: usize, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut SimRng) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n)
            .into_par_iter()
            .map(|i| {
                let mut rng = trial_rng(seed, i as u64);
                f(i, &mut rng)
            })
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_trials_sequential(n, seed, f)
    }
}

/// Apply `f(index, item)` to every element, in parallel under the
/// `parallel` feature.
pub fn for_each_mut<T, F>(items: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize, &mut T) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter_mut().enumerate().for_each(|(i, x)| f(i, x));
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter_mut().enumerate().for_each(|(i, x)| f(i, x));
    }
}

/// Apply `f(row_index, row)` to each `width`-long row of `data`.
pub(crate) fn for_each_row_mut<T, F>(data: &mut [T], width: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        data.par_chunks_mut(width).enumerate().for_each(|(i, row)| f(i, row));
    }
    #[cfg(not(feature = "parallel"))]
    {
        data.chunks_mut(width).enumerate().for_each(|(i, row)| f(i, row));
    }
}
