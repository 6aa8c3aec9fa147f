use std::sync::atomic::{AtomicUsize, Ordering};

/// Callback receiving `(completed, total)` work units.
pub type ProgressFn<'a> = &'a (dyn Fn(usize, usize) + Sync);

/// Shared counter for parallel loops; reports roughly every `total / 20` units.
pub(crate) struct Ticker<'a> {
    done: AtomicUsize,
    total: usize,
    every: usize,
    callback: Option<ProgressFn<'a>>,
}

impl<'a> Ticker<'a> {
    pub(crate) fn new(total: usize, callback: Option<ProgressFn<'a>>) -> Self {
        Ticker {
            done: AtomicUsize::new(0),
            total,
            every: (total / 20).max(1),
            callback,
        }
    }

    pub(crate) fn tick(&self) {
        if let Some(cb) = self.callback {
            let done = self.done.fetch_add(1, Ordering::Relaxed) + 1;
            if done % self.every == 0 || done == self.total {
                cb(done, self.total);
            }
        }
    }
}
