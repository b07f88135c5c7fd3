//! Data-parallel primitives with a sequential fallback.
//!
//! With the `parallel` feature these run on the rayon pool; without it they
//! are plain loops. Floating-point sums are split into fixed-size chunks that
//! are reduced in index order, so the result is bit-identical for any number
//! of workers and for both backends.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Rows per chunk in ordered reductions. Changing it changes low-order bits
/// of every summed objective.
pub const CHUNK: usize = 1024;

/// `(0..n).map(f).collect()`, possibly in parallel.
pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
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

/// Applies `f(index, item)` to every element of `items`.
pub fn for_each_mut<T, F>(items: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize, &mut T) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter_mut().enumerate().for_each(|(i, t)| f(i, t));
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter_mut().enumerate().for_each(|(i, t)| f(i, t));
    }
}

/// Applies `f(chunk_index, chunk)` to consecutive chunks of `len` elements.
pub fn for_each_chunk_mut<T, F>(items: &mut [T], len: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_chunks_mut(len).enumerate().for_each(|(i, c)| f(i, c));
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.chunks_mut(len).enumerate().for_each(|(i, c)| f(i, c));
    }
}

/// `sum_{i < n} f(i)` with a worker-independent summation order.
pub fn sum(n: usize, f: impl Fn(usize) -> f64 + Sync + Send) -> f64 {
    let chunks = n.div_ceil(CHUNK);
    let partial = map_range(chunks, |c| {
        let end = ((c + 1) * CHUNK).min(n);
        let mut s = 0.0;
        for i in c * CHUNK..end {
            s += f(i);
        }
        s
    });
    partial.iter().sum()
}

/// Largest `f(i)` and the lowest index achieving it. `None` when `n == 0`.
pub fn argmax(n: usize, f: impl Fn(usize) -> f64 + Sync + Send) -> Option<(f64, usize)> {
    let pick = |a: (f64, usize), b: (f64, usize)| {
        if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
            b
        } else {
            a
        }
    };
    let chunks = n.div_ceil(CHUNK);
    let partial = map_range(chunks, |c| {
        let end = ((c + 1) * CHUNK).min(n);
        let mut best = (f64::NEG_INFINITY, usize::MAX);
        for i in c * CHUNK..end {
            best = pick(best, (f(i), i));
        }
        best
    });
    partial.into_iter().reduce(pick)
}

/// Number of worker threads the primitives above will use.
pub fn workers() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

/// Runs `f` on a pool with `threads` workers (ignored without `parallel`).
pub fn with_workers<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    {
        match rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        f()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_is_worker_independent() {
        let f = |i: usize| ((i as f64) * 0.37).sin() * 1e-3 + 1.0 / (i as f64 + 1.0);
        let one = with_workers(1, || sum(10_007, f));
        let four = with_workers(4, || sum(10_007, f));
        assert_eq!(one.to_bits(), four.to_bits());
    }

    #[test]
    fn argmax_prefers_lowest_index() {
        let v = [1.0, 3.0, 2.0, 3.0];
        assert_eq!(argmax(4, |i| v[i]), Some((3.0, 1)));
        assert_eq!(argmax(0, |_| 0.0), None);
        let big = with_workers(3, || argmax(5000, |i| if i % 1500 == 7 { 9.0 } else { 0.0 }));
        assert_eq!(big, Some((9.0, 7)));
    }
}
