//! Scoped worker-thread helper for embarrassingly parallel evaluation.
//!
//! The worker count is capped by the `MDPCG_THREADS` environment variable
//! (default: available parallelism). Results are written into index-ordered
//! slots, so output is deterministic regardless of scheduling.

use std::sync::atomic::{AtomicUsize, Ordering};

/// Worker cap from `MDPCG_THREADS`, falling back to available parallelism.
pub fn thread_cap() -> usize {
    if let Ok(v) = std::env::var("MDPCG_THREADS") {
        if let Ok(n) = v.trim().parse::<usize>() {
            return n.max(1);
        }
    }
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// Applies `f` to every index in `0..n`, collecting results in order.
/// `f` must be deterministic per index; the work is striped over at most
/// [`thread_cap`] scoped threads.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let workers = thread_cap().min(n.max(1));
    if workers <= 1 || n <= 1 {
        return (0..n).map(f).collect();
    }

    let mut slots: Vec<Option<T>> = (0..n).map(|_| None).collect();
    let counter = AtomicUsize::new(0);
    let slots_ptr = SendPtr(slots.as_mut_ptr());

    std::thread::scope(|scope| {
        for _ in 0..workers {
            let f = &f;
            let counter = &counter;
            let slots_ptr = &slots_ptr;
            scope.spawn(move || loop {
                let i = counter.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let value = f(i);
                // Each index is claimed exactly once, so the write is
                // exclusive to this thread.
                unsafe { *slots_ptr.0.add(i) = Some(value) };
            });
        }
    });

    slots.into_iter().map(|s| s.expect("all indices computed")).collect()
}

struct SendPtr<T>(*mut T);
unsafe impl<T: Send> Send for SendPtr<T> {}
unsafe impl<T: Send> Sync for SendPtr<T> {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn results_are_in_index_order() {
        let out = map_indexed(100, |i| i * i);
        for (i, v) in out.iter().enumerate() {
            assert_eq!(*v, i * i);
        }
    }

    #[test]
    fn empty_input_yields_empty_output() {
        let out: Vec<usize> = map_indexed(0, |i| i);
        assert!(out.is_empty());
    }
}
