//! Execution strategy for independent work items (simulation replications,
//! grid sweeps). Results always come back in index order, so reductions over
//! them are deterministic whichever strategy ran.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExecMode {
    /// Rayon work-stealing when the `parallel` feature is on, sequential
    /// otherwise.
    #[default]
    Parallel,
    Sequential,
}

impl ExecMode {
    pub fn is_parallel_available() -> bool {
        cfg!(feature = "parallel")
    }
}

/// `(0..n).map(f)` under the chosen strategy.
pub fn map_indexed<T, F>(mode: ExecMode, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}
