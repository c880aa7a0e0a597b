//! Threaded drivers with a fixed reduction order.
//!
//! Work is cut into pieces whose boundaries depend only on the problem, never
//! on the worker count, and partial results are merged in piece order. Any
//! number of workers therefore yields the same bits as one.

use std::thread;

use zgraphon_core::density::{assignment_count, density_enumerate_range, mc_stream, stream_sizes, McAccumulator};
use zgraphon_core::numeric::CompensatedSum;
use zgraphon_core::{DecoratedMultigraph, Error, McEstimate, StepGraphon};

use crate::error::CliError;

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "ZGRAPHON_WORKERS";

/// Number of index ranges an enumeration is cut into.
pub const ENUMERATION_CHUNKS: u64 = 64;

/// Reads [`WORKERS_ENV`]; unset means one worker.
pub fn workers_from_env() -> Result<usize, CliError> {
    match std::env::var(WORKERS_ENV) {
        Err(_) => Ok(1),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(CliError::Usage(format!("{WORKERS_ENV} must be a positive integer, got `{s}`"))),
        },
    }
}

/// Runs `f` on every item, `workers` items at a time, returning results in item order.
pub fn map_ordered<T, R, F>(items: &[T], workers: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    if workers <= 1 || items.len() <= 1 {
        return items.iter().map(&f).collect();
    }
    let per = items.len().div_ceil(workers);
    thread::scope(|s| {
        let handles: Vec<_> = items
            .chunks(per)
            .map(|chunk| {
                let f = &f;
                s.spawn(move || chunk.iter().map(f).collect::<Vec<R>>())
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

/// Brute-force `t(F, W)` over all `q^n` assignments, split into fixed ranges.
pub fn density_enumerate(graph: &DecoratedMultigraph, w: &StepGraphon, workers: usize) -> Result<f64, CliError> {
    let total = assignment_count(graph, w).ok_or(Error::InvalidArgument("assignment space too large"))?;
    let step = total.div_ceil(ENUMERATION_CHUNKS).max(1);
    let ranges: Vec<(u64, u64)> = (0..total).step_by(step as usize).map(|a| (a, (a + step).min(total))).collect();
    let parts = map_ordered(&ranges, workers, |&(a, b)| density_enumerate_range(graph, w, a, b));
    let mut acc = CompensatedSum::new();
    for p in parts {
        acc.merge(&p?);
    }
    Ok(acc.value())
}

/// Monte Carlo over `streams` substreams; matches `mc_density_streams` for any worker count.
pub fn mc_density(
    graph: &DecoratedMultigraph,
    w: &StepGraphon,
    samples: u64,
    seed: u64,
    streams: usize,
    workers: usize,
) -> Result<McEstimate, CliError> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1").into());
    }
    let jobs: Vec<(u64, u64)> =
        stream_sizes(samples, streams).into_iter().enumerate().map(|(s, n)| (s as u64, n)).collect();
    let parts = map_ordered(&jobs, workers, |&(stream, n)| mc_stream(graph, w, n, seed, stream));
    let mut total = McAccumulator::default();
    for p in parts {
        total.merge(&p?);
    }
    Ok(total.estimate(seed))
}
