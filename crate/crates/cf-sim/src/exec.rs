use cf_core::exec::Executor;
use rayon::prelude::*;

use crate::CliError;

/// Environment variable capping worker threads; `0` or unset means one per core.
pub const THREADS_ENV: &str = "CF_SIM_THREADS";

/// Runs trials on a dedicated rayon pool. Results come back in trial order,
/// so the thread count never changes the output.
pub struct RayonExecutor {
    pool: rayon::ThreadPool,
    progress: bool,
}

impl RayonExecutor {
    pub fn new(threads: usize, progress: bool) -> Result<Self, CliError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| CliError::Compute(format!("thread pool: {e}")))?;
        Ok(RayonExecutor { pool, progress })
    }

    pub fn from_env(progress: bool) -> Result<Self, CliError> {
        let threads = match std::env::var(THREADS_ENV) {
            Ok(v) => v
                .trim()
                .parse::<usize>()
                .map_err(|_| CliError::Usage(format!("{THREADS_ENV} must be a non-negative integer, got {v:?}")))?,
            Err(_) => 0,
        };
        Self::new(threads, progress)
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Executor for RayonExecutor {
    fn map_indexed<T, F>(&self, count: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        self.pool.install(|| (0..count).into_par_iter().map(&f).collect())
    }

    fn progress(&self, done: usize, total: usize, label: &str) {
        if self.progress {
            eprintln!("[{}/{}] {}", done + 1, total, label);
        }
    }
}
