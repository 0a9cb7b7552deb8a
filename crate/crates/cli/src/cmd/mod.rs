pub mod bcs;
pub mod phase;
pub mod point;
pub mod sweep;
pub mod verify;

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// `verify` found a failing invariant.
    Failed,
    /// Some grid points failed; the rest were written.
    Partial,
}

/// Thread pool honoring `--threads` / `QGT_THREADS`.
pub fn pool(threads: Option<usize>) -> anyhow::Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            anyhow::bail!("--threads must be at least 1");
        }
        b = b.num_threads(n);
    }
    Ok(b.build()?)
}
