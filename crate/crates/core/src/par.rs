//! Data-parallel helpers. With the `parallel` feature the batch maps run on
//! the rayon pool; without it they fall back to plain iterators. Results are
//! always returned in index order, so output never depends on scheduling.

pub fn map_range_seq<R, F>(n: usize, f: F) -> Vec<R>
where
    F: Fn(usize) -> R,
{
    (0..n).map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map_range_par<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

/// `(0..n).map(f)`, in parallel when the feature is enabled.
pub fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        map_range_par(n, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_range_seq(n, f)
    }
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
