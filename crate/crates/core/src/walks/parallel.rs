//! Trajectory-parallel execution with results independent of the thread count.
//!
//! Trajectory `i` always draws from ChaCha8 stream `i` of the run seed. Work is
//! cut into fixed chunks, each folded sequentially, and the chunk results are
//! merged in index order.

use crate::error::{config, Result};
use crate::stats::Merge;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub const CHUNK_SIZE: u64 = 64;

pub fn trajectory_rng(seed: u64, trajectory: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trajectory);
    rng
}

/// Runs `body(index, rng, scratch, stats)` for every trajectory.
pub fn run_trajectories<S, C, FI, FS, FB>(
    trajectories: u64,
    seed: u64,
    threads: Option<usize>,
    new_stats: FI,
    new_scratch: FS,
    body: FB,
) -> Result<S>
where
    S: Merge + Send,
    FI: Fn() -> S + Sync,
    FS: Fn() -> C + Sync,
    FB: Fn(u64, &mut ChaCha8Rng, &mut C, &mut S) -> Result<()> + Sync,
{
    let chunks: Vec<(u64, u64)> =
        (0..trajectories).step_by(CHUNK_SIZE as usize).map(|s| (s, (s + CHUNK_SIZE).min(trajectories))).collect();
    let work = || -> Result<S> {
        let parts: Vec<Result<S>> = chunks
            .par_iter()
            .map(|&(start, end)| {
                let mut stats = new_stats();
                let mut scratch = new_scratch();
                for t in start..end {
                    let mut rng = trajectory_rng(seed, t);
                    body(t, &mut rng, &mut scratch, &mut stats)?;
                }
                Ok(stats)
            })
            .collect();
        let mut total = new_stats();
        for p in parts {
            total.merge(&p?);
        }
        Ok(total)
    };
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| config(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::Moments;
    use rand::Rng;

    #[test]
    fn thread_count_does_not_change_bits() {
        let run = |threads| {
            run_trajectories(
                1000,
                42,
                Some(threads),
                Moments::<f64>::new,
                || (),
                |_, rng, _, m| {
                    m.push(rng.gen::<f64>().ln());
                    Ok(())
                },
            )
            .unwrap()
        };
        let a = run(1);
        let b = run(4);
        assert_eq!(a.mean().to_bits(), b.mean().to_bits());
        assert_eq!(a.variance().to_bits(), b.variance().to_bits());
        assert_eq!(a.count(), 1000);
    }

    #[test]
    fn streams_differ() {
        let a: u64 = trajectory_rng(1, 0).gen();
        let b: u64 = trajectory_rng(1, 1).gen();
        let c: u64 = trajectory_rng(1, 0).gen();
        assert_ne!(a, b);
        assert_eq!(a, c);
    }
}
