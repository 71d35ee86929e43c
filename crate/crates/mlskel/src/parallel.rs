//! Data-parallel primitives with a sequential fallback.
//!
//! With the default `parallel` feature the helpers fan work out over a rayon
//! pool; without it they run the identical logic on the calling thread. The
//! pipeline keys all ordering decisions off configured worker *counts*, never
//! off execution interleaving, so both builds produce identical results.

/// Runs `f` on a pool with exactly `threads` workers (or inline when built
/// without the `parallel` feature).
pub fn run_with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    assert!(threads >= 1, "worker count must be positive");
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool construction failed")
            .install(f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        f()
    }
}

/// Index of the current pool worker, for indexing per-worker scratch. Always
/// 0 outside a pool or in sequential builds.
pub fn worker_index() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_thread_index().unwrap_or(0)
    }
    #[cfg(not(feature = "parallel"))]
    {
        0
    }
}

/// Maps `f` over `items`, preserving input order in the output.
pub fn map_collect<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Runs both closures, possibly concurrently, and returns both results.
pub fn join<A: Send, B: Send>(
    a: impl FnOnce() -> A + Send,
    b: impl FnOnce() -> B + Send,
) -> (A, B) {
    #[cfg(feature = "parallel")]
    {
        rayon::join(a, b)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (a(), b())
    }
}

/// Maps `f` over `items`, each invocation owning one entry of `states`
/// exclusively; output order matches `items`. Requires at least as many
/// states as items.
pub fn zip_map_collect<S: Send, T: Sync, R: Send>(
    states: &mut [S],
    items: &[T],
    f: impl Fn(&mut S, &T) -> R + Sync + Send,
) -> Vec<R> {
    assert!(states.len() >= items.len(), "fewer states than items");
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        states[..items.len()]
            .par_iter_mut()
            .zip(items.par_iter())
            .map(|(s, t)| f(s, t))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        states[..items.len()].iter_mut().zip(items).map(|(s, t)| f(s, t)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_preserves_order() {
        let items: Vec<u32> = (0..1000).collect();
        let out = run_with_threads(4, || map_collect(&items, |&x| x * 2));
        assert_eq!(out, (0..1000).map(|x| x * 2).collect::<Vec<_>>());
    }

    #[test]
    fn worker_index_within_bounds() {
        let items: Vec<u32> = (0..256).collect();
        let idx = run_with_threads(3, || map_collect(&items, |_| worker_index()));
        assert!(idx.iter().all(|&i| i < 3));
    }

    #[test]
    fn zipped_map_gives_each_item_its_own_state() {
        let mut states = vec![0u32; 4];
        let items = [10u32, 20, 30];
        let out = run_with_threads(4, || {
            zip_map_collect(&mut states, &items, |s, &x| {
                *s += 1;
                x + 1
            })
        });
        assert_eq!(out, vec![11, 21, 31]);
        assert_eq!(states, vec![1, 1, 1, 0]);
    }
}
