//! Benchmark-only crate; see `benches/kernels.rs`.
//!
//! Shared helpers for building the benchmark inputs live here so the
//! bench target stays declarative.

use mixconc_core::{Alphabet, JointDist, KernelFn, MarkovSpec, Pmf, StochasticMatrix};

/// Four-symbol chain of length `n` with moderately contracting kernels.
pub fn bench_chain(n: usize) -> MarkovSpec {
    let s = 4usize;
    let alphabet = Alphabet::indexed(s);
    let rows: Vec<Vec<f64>> = (0..s)
        .map(|i| {
            let raw: Vec<f64> = (0..s)
                .map(|j| if i == j { 2.0 } else { 1.0 + 0.1 * j as f64 })
                .collect();
            let total: f64 = raw.iter().sum();
            raw.iter().map(|v| v / total).collect()
        })
        .collect();
    let kernel = StochasticMatrix::new(rows).unwrap();
    MarkovSpec::homogeneous(alphabet, n, vec![0.25; s], kernel).unwrap()
}

/// Deterministically seeded kernel with sign-alternating entries.
pub fn bench_kernel(s: usize, k: usize) -> KernelFn {
    let cells = s.pow(k as u32);
    let values: Vec<f64> = (0..cells)
        .map(|r| ((r * 2654435761usize) % 1000) as f64 / 500.0 - 1.0)
        .collect();
    KernelFn::new(s, k, values).unwrap()
}

/// Small dense joint for profile benchmarks.
pub fn bench_joint(n: usize, s: usize) -> JointDist {
    let cells = s.pow(n as u32);
    let raw: Vec<f64> = (0..cells)
        .map(|r| 1.0 + ((r * 48271) % 101) as f64 / 101.0)
        .collect();
    let total: f64 = raw.iter().sum();
    let mass = raw.iter().map(|v| v / total).collect();
    JointDist::new(Pmf::new(Alphabet::indexed(s), n, mass).unwrap())
}
