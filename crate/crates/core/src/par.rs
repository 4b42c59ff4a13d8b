//! Execution-mode switch for the data-parallel kernels.
//!
//! With the `parallel` feature the kernels dispatch disjoint chunks to rayon;
//! without it, or with [`Exec::Sequential`], the same chunk loop runs on the
//! calling thread. Reductions always combine per-chunk partials in chunk
//! order, so both modes return bit-identical results.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }
}

/// Run `f(offset, chunk)` over consecutive chunks of `data`.
pub fn for_each_chunk_mut<T, F>(data: &mut [T], chunk: usize, exec: Exec, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    let chunk = chunk.max(1);
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        data.par_chunks_mut(chunk)
            .enumerate()
            .for_each(|(i, c)| f(i * chunk, c));
        return;
    }
    let _ = exec;
    for (i, c) in data.chunks_mut(chunk).enumerate() {
        f(i * chunk, c);
    }
}

/// Run `f(offset, a_chunk, b_chunk)` over matching chunks of two equal-length slices.
pub fn for_each_chunk_pair_mut<T, F>(a: &mut [T], b: &mut [T], chunk: usize, exec: Exec, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T], &mut [T]) + Sync + Send,
{
    debug_assert_eq!(a.len(), b.len());
    let chunk = chunk.max(1);
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        a.par_chunks_mut(chunk)
            .zip(b.par_chunks_mut(chunk))
            .enumerate()
            .for_each(|(i, (x, y))| f(i * chunk, x, y));
        return;
    }
    let _ = exec;
    for (i, (x, y)) in a.chunks_mut(chunk).zip(b.chunks_mut(chunk)).enumerate() {
        f(i * chunk, x, y);
    }
}

/// Map each index range `[i*chunk, min((i+1)*chunk, len))` to a partial value
/// and fold the partials in index order.
pub fn map_reduce_ranges<R, M, C>(len: usize, chunk: usize, exec: Exec, identity: R, map: M, combine: C) -> R
where
    R: Send + Clone,
    M: Fn(usize, usize) -> R + Sync + Send,
    C: Fn(R, R) -> R,
{
    let chunk = chunk.max(1);
    let n_chunks = len.div_ceil(chunk);
    let range = |i: usize| (i * chunk, ((i + 1) * chunk).min(len));
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        let partials: Vec<R> = (0..n_chunks)
            .into_par_iter()
            .map(|i| {
                let (lo, hi) = range(i);
                map(lo, hi)
            })
            .collect();
        return partials.into_iter().fold(identity, &combine);
    }
    let _ = exec;
    (0..n_chunks).fold(identity, |acc, i| {
        let (lo, hi) = range(i);
        combine(acc, map(lo, hi))
    })
}

/// Run `map(offset, chunk)` over consecutive mutable chunks and fold the
/// per-chunk results in chunk order.
pub fn map_reduce_chunks_mut<T, R, M, C>(data: &mut [T], chunk: usize, exec: Exec, identity: R, map: M, combine: C) -> R
where
    T: Send,
    R: Send,
    M: Fn(usize, &mut [T]) -> R + Sync + Send,
    C: Fn(R, R) -> R,
{
    let chunk = chunk.max(1);
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        let partials: Vec<R> = data
            .par_chunks_mut(chunk)
            .enumerate()
            .map(|(i, c)| map(i * chunk, c))
            .collect();
        return partials.into_iter().fold(identity, &combine);
    }
    let _ = exec;
    data.chunks_mut(chunk)
        .enumerate()
        .fold(identity, |acc, (i, c)| combine(acc, map(i * chunk, c)))
}

/// Map over `0..n` and collect in order.
pub fn map_collect<R, M>(n: usize, exec: Exec, map: M) -> Vec<R>
where
    R: Send,
    M: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return (0..n).into_par_iter().map(map).collect();
    }
    let _ = exec;
    (0..n).map(map).collect()
}
