//! Shared fixtures for the kernel benchmarks.

use torushaar::expansion::HaarExpansion;
use torushaar::geometry::Shape;
use torushaar::rng::{derive_rng, random_expansion, random_signal};
use torushaar::signal::GridSignal;

pub fn bench_signal(n_params: usize, depth: usize, seed: u64) -> GridSignal {
    let shape = Shape::uniform(n_params, depth).expect("valid shape");
    let mut rng = derive_rng(seed, "bench-signal", 0);
    random_signal(&shape, &mut rng)
}

pub fn bench_expansion(n_params: usize, depth: usize, seed: u64) -> HaarExpansion {
    let shape = Shape::uniform(n_params, depth).expect("valid shape");
    let mut rng = derive_rng(seed, "bench-expansion", 0);
    random_expansion(&shape, &mut rng, false)
}
