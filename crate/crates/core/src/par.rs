//! Execution-mode plumbing: searches run data-parallel under the
//! `parallel` feature, with a sequential path that is always available.
//! Both paths return the enumeration-order-minimal result, so the mode
//! never changes an answer.

use std::sync::atomic::{AtomicBool, Ordering};

static FORCE_SEQUENTIAL: AtomicBool = AtomicBool::new(false);

/// Forces the sequential path even when the `parallel` feature is on.
/// Used by the benches and the determinism tests.
pub fn force_sequential(on: bool) {
    FORCE_SEQUENTIAL.store(on, Ordering::SeqCst);
}

pub fn sequential_forced() -> bool {
    FORCE_SEQUENTIAL.load(Ordering::SeqCst)
}

/// First `Some` in slice order.
pub(crate) fn find_map_first<T: Sync, R: Send>(
    items: &[T],
    f: impl Fn(&T) -> Option<R> + Sync,
) -> Option<R> {
    #[cfg(feature = "parallel")]
    {
        if !sequential_forced() {
            use rayon::prelude::*;
            return items.par_iter().find_map_first(|t| f(t));
        }
    }
    items.iter().find_map(|t| f(t))
}

/// Maps every item, preserving order.
pub(crate) fn map_collect<T: Sync, R: Send>(
    items: &[T],
    f: impl Fn(&T) -> R + Sync,
) -> Vec<R> {
    #[cfg(feature = "parallel")]
    {
        if !sequential_forced() {
            use rayon::prelude::*;
            return items.par_iter().map(|t| f(t)).collect();
        }
    }
    items.iter().map(|t| f(t)).collect()
}
