//! Batch runner for the path estimators.
//!
//! Paths are grouped into fixed-size batches regardless of the worker
//! count; each batch accumulates sequentially in path order and the batch
//! accumulators merge in batch order. Every float therefore combines in
//! exactly the same order whether the batches run on one thread, on a
//! rayon pool of any width, or on the sequential fallback engine, which is
//! what makes the estimates bit-identical across `workers` settings.

/// Paths per batch; fixed so that batch boundaries never depend on the
/// worker count.
const BATCH: u64 = 4096;

/// Running sum / sum of squares / count for one batch (or the merged run).
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Accum {
    pub sum: f64,
    pub sumsq: f64,
    pub n: u64,
}

impl Accum {
    #[inline]
    fn push(&mut self, v: f64) {
        self.sum += v;
        self.sumsq += v * v;
        self.n += 1;
    }

    fn merge(mut self, other: Accum) -> Accum {
        self.sum += other.sum;
        self.sumsq += other.sumsq;
        self.n += other.n;
        self
    }
}

fn batch_accum(range: std::ops::Range<u64>, per_path: &(impl Fn(u64) -> f64 + Sync)) -> Accum {
    let mut acc = Accum::default();
    for i in range {
        acc.push(per_path(i));
    }
    acc
}

fn batch_ranges(paths: u64) -> impl Iterator<Item = std::ops::Range<u64>> {
    let n_batches = paths.div_ceil(BATCH);
    (0..n_batches).map(move |b| (b * BATCH)..((b + 1) * BATCH).min(paths))
}

pub(crate) fn run_sequential(paths: u64, per_path: impl Fn(u64) -> f64 + Sync) -> Accum {
    batch_ranges(paths)
        .map(|r| batch_accum(r, &per_path))
        .fold(Accum::default(), Accum::merge)
}

#[cfg(feature = "parallel")]
fn pool_for(workers: usize) -> std::sync::Arc<rayon::ThreadPool> {
    use std::collections::HashMap;
    use std::sync::{Arc, Mutex, OnceLock};
    static POOLS: OnceLock<Mutex<HashMap<usize, Arc<rayon::ThreadPool>>>> = OnceLock::new();
    let pools = POOLS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = pools.lock().expect("pool cache poisoned");
    guard
        .entry(workers)
        .or_insert_with(|| {
            Arc::new(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(workers)
                    .build()
                    .expect("worker pool"),
            )
        })
        .clone()
}

#[cfg(feature = "parallel")]
pub(crate) fn run_parallel(
    paths: u64,
    workers: usize,
    per_path: impl Fn(u64) -> f64 + Sync,
) -> Accum {
    use rayon::prelude::*;
    let ranges: Vec<_> = batch_ranges(paths).collect();
    let accums: Vec<Accum> = pool_for(workers).install(|| {
        ranges
            .into_par_iter()
            .map(|r| batch_accum(r, &per_path))
            .collect()
    });
    // ordered reduction over batch index
    accums.into_iter().fold(Accum::default(), Accum::merge)
}

/// Dispatch on the worker count and the `parallel` feature.
pub(crate) fn run(paths: u64, workers: usize, per_path: impl Fn(u64) -> f64 + Sync) -> Accum {
    #[cfg(feature = "parallel")]
    {
        if workers > 1 {
            return run_parallel(paths, workers, per_path);
        }
    }
    let _ = workers;
    run_sequential(paths, per_path)
}
