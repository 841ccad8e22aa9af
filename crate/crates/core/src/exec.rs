//! Trial execution seam.
//!
//! Campaigns hand the executor a trial count and a pure per-trial closure;
//! the executor must return results in trial order. Because every trial
//! derives its own random stream from its index, any scheduling of the
//! closures produces the same output.

use alloc::vec::Vec;

pub trait Executor: Sync {
    /// Evaluates `f(0), ..., f(count - 1)` and returns the results in index order.
    fn map_indexed<T, F>(&self, count: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send;

    /// Called once before each grid point of a campaign.
    fn progress(&self, _done: usize, _total: usize, _label: &str) {}
}

/// Runs trials one after another on the calling thread.
#[derive(Debug, Default, Clone, Copy)]
pub struct Sequential;

impl Executor for Sequential {
    fn map_indexed<T, F>(&self, count: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        (0..count).map(f).collect()
    }
}
