//! Execution glue: every hot kernel walks the grid one horizontal row at a
//! time, either in parallel over rows (feature `parallel`, the default) or
//! sequentially. Reductions always combine per-row partials in row order, so
//! results are bit-identical across thread counts and across the two paths.

use std::sync::atomic::{AtomicBool, Ordering};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

static FORCE_SEQ: AtomicBool = AtomicBool::new(false);

/// Force the sequential path even when the `parallel` feature is compiled in.
/// Intended for the benchmark suite, which compares both paths in one process.
#[doc(hidden)]
pub fn set_force_sequential(v: bool) {
    FORCE_SEQ.store(v, Ordering::SeqCst);
}

#[inline]
pub(crate) fn parallel_active() -> bool {
    cfg!(feature = "parallel") && !FORCE_SEQ.load(Ordering::Relaxed)
}

/// Apply `f(row_index, row)` to each consecutive chunk of `row_len` elements.
pub(crate) fn for_each_row<T, F>(data: &mut [T], row_len: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync,
{
    debug_assert_eq!(data.len() % row_len, 0);
    #[cfg(feature = "parallel")]
    if parallel_active() {
        data.par_chunks_mut(row_len)
            .enumerate()
            .for_each(|(j, row)| f(j, row));
        return;
    }
    for (j, row) in data.chunks_mut(row_len).enumerate() {
        f(j, row);
    }
}

/// Like [`for_each_row`] but with a second, read-only row source of the same
/// shape.
pub(crate) fn for_each_row_with<T, U, F>(data: &mut [T], other: &[U], row_len: usize, f: F)
where
    T: Send,
    U: Sync,
    F: Fn(usize, &mut [T], &[U]) + Sync,
{
    debug_assert_eq!(data.len(), other.len());
    debug_assert_eq!(data.len() % row_len, 0);
    #[cfg(feature = "parallel")]
    if parallel_active() {
        data.par_chunks_mut(row_len)
            .zip(other.par_chunks(row_len))
            .enumerate()
            .for_each(|(j, (row, src))| f(j, row, src));
        return;
    }
    for (j, (row, src)) in data.chunks_mut(row_len).zip(other.chunks(row_len)).enumerate() {
        f(j, row, src);
    }
}

/// Sum `f(row_index)` over rows. Partials are collected per row and folded
/// left-to-right, so the result does not depend on the thread count.
pub(crate) fn sum_over_rows<F>(nrows: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    #[cfg(feature = "parallel")]
    if parallel_active() {
        let partials: Vec<f64> = (0..nrows).into_par_iter().map(|j| f(j)).collect();
        return partials.iter().sum();
    }
    let partials: Vec<f64> = (0..nrows).map(|j| f(j)).collect();
    partials.iter().sum()
}

/// Run `f` over each element of `items` (coarse-grained jobs: moduli stencil
/// solves, independent columns, ...).
pub(crate) fn for_each_item<T, F>(items: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize, &mut T) + Sync,
{
    #[cfg(feature = "parallel")]
    if parallel_active() {
        items
            .par_iter_mut()
            .enumerate()
            .for_each(|(i, item)| f(i, item));
        return;
    }
    for (i, item) in items.iter_mut().enumerate() {
        f(i, item);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_sums_bitwise_stable_across_paths() {
        // Values chosen so that a different association order would change the
        // rounded result; identical bytes demonstrate the fixed reduction tree.
        let n = 64usize;
        let vals: Vec<f64> = (0..n * n)
            .map(|i| (i as f64 * 0.7391).sin() * 1e3 + 1e-7 * (i as f64))
            .collect();
        let sum_with = |force: bool| {
            set_force_sequential(force);
            let s = sum_over_rows(n, |j| vals[j * n..(j + 1) * n].iter().sum::<f64>());
            set_force_sequential(false);
            s
        };
        let par = sum_with(false);
        let seq = sum_with(true);
        assert_eq!(par.to_bits(), seq.to_bits());
    }

    #[test]
    fn for_each_row_covers_all_rows() {
        let mut data = vec![0.0f64; 12 * 5];
        for_each_row(&mut data, 12, |j, row| {
            for (i, v) in row.iter_mut().enumerate() {
                *v = (j * 100 + i) as f64;
            }
        });
        assert_eq!(data[0], 0.0);
        assert_eq!(data[12], 100.0);
        assert_eq!(data[4 * 12 + 11], 411.0);
    }
}
