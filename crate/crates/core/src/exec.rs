//! Batch-level work distribution.
//!
//! With the `parallel` feature, independent batch items are mapped over the
//! rayon pool. Without it, or after `set_parallel(false)`, the same closures
//! run in index order on the calling thread. Results are always returned in
//! index order, so reductions over them are bitwise identical in both modes.

use std::sync::atomic::{AtomicBool, Ordering};

static PARALLEL: AtomicBool = AtomicBool::new(true);

/// Runtime switch, only meaningful when the `parallel` feature is compiled in.
pub fn set_parallel(enabled: bool) {
    PARALLEL.store(enabled, Ordering::Relaxed);
}

pub fn parallel_enabled() -> bool {
    cfg!(feature = "parallel") && PARALLEL.load(Ordering::Relaxed)
}

pub fn map_indexed<R, F>(count: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if count > 1 && parallel_enabled() {
        use rayon::prelude::*;
        return (0..count).into_par_iter().map(f).collect();
    }
    (0..count).map(f).collect()
}
