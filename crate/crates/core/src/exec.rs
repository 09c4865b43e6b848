//! Chunked execution helpers. With the `parallel` feature the chunks run on
//! the rayon pool; without it they run in a plain loop. Per-chunk states are
//! merged in chunk order either way, so results never depend on thread count
//! or scheduling.

/// Fixed chunk length used by callers that just want a sensible default.
pub const DEFAULT_CHUNK: usize = 8192;

pub fn fold_chunks_seq<T, S>(
    items: &[T],
    chunk: usize,
    init: impl Fn() -> S,
    step: impl Fn(&mut S, &T),
    merge: impl Fn(&mut S, S),
) -> S {
    let mut acc = init();
    for block in items.chunks(chunk.max(1)) {
        let mut local = init();
        for item in block {
            step(&mut local, item);
        }
        merge(&mut acc, local);
    }
    acc
}

#[cfg(feature = "parallel")]
pub fn fold_chunks_par<T, S>(
    items: &[T],
    chunk: usize,
    init: impl Fn() -> S + Sync,
    step: impl Fn(&mut S, &T) + Sync,
    merge: impl Fn(&mut S, S),
) -> S
where
    T: Sync,
    S: Send,
{
    use rayon::prelude::*;
    let locals: Vec<S> = items
        .par_chunks(chunk.max(1))
        .map(|block| {
            let mut local = init();
            for item in block {
                step(&mut local, item);
            }
            local
        })
        .collect();
    let mut acc = init();
    for local in locals {
        merge(&mut acc, local);
    }
    acc
}

/// Chunked fold using whichever backend the build enables.
pub fn fold_chunks<T, S>(
    items: &[T],
    chunk: usize,
    init: impl Fn() -> S + Sync,
    step: impl Fn(&mut S, &T) + Sync,
    merge: impl Fn(&mut S, S),
) -> S
where
    T: Sync,
    S: Send,
{
    #[cfg(feature = "parallel")]
    {
        fold_chunks_par(items, chunk, init, step, merge)
    }
    #[cfg(not(feature = "parallel"))]
    {
        fold_chunks_seq(items, chunk, init, step, merge)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seq_fold_sums() {
        let items: Vec<u64> = (0..10_000).collect();
        let total = fold_chunks_seq(&items, 97, || 0u64, |s, &x| *s += x, |a, b| *a += b);
        assert_eq!(total, 10_000 * 9_999 / 2);
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn par_matches_seq() {
        let items: Vec<u64> = (0..50_000).map(|i| i * 7 % 1013).collect();
        let seq = fold_chunks_seq(&items, 1024, || 0u64, |s, &x| *s += x, |a, b| *a += b);
        let par = fold_chunks_par(&items, 1024, || 0u64, |s, &x| *s += x, |a, b| *a += b);
        assert_eq!(seq, par);
    }
}
