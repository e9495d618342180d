//! Shared reference processes used by tests, the verification suites and
//! the benchmarks.

use crate::process::{Alphabet, HmmSpec, MarkovSpec, StochasticMatrix};

/// Symmetric two-symbol chain: `S = {a, b}`, `n = 3`, uniform start,
/// every kernel `[[0.75, 0.25], [0.25, 0.75]]` (contraction 0.5).
pub fn f1() -> MarkovSpec {
    f1_extended(3)
}

/// The F1 family at arbitrary length.
pub fn f1_extended(n: usize) -> MarkovSpec {
    let alphabet = Alphabet::new(["a", "b"]).unwrap();
    let kernel = StochasticMatrix::new(vec![vec![0.75, 0.25], vec![0.25, 0.75]]).unwrap();
    MarkovSpec::homogeneous(alphabet, n, vec![0.5, 0.5], kernel).unwrap()
}

/// A genuinely inhomogeneous two-symbol chain of length 3.
pub fn f1_inhomogeneous() -> MarkovSpec {
    let alphabet = Alphabet::new(["a", "b"]).unwrap();
    let k1 = StochasticMatrix::new(vec![vec![0.75, 0.25], vec![0.25, 0.75]]).unwrap();
    let k2 = StochasticMatrix::new(vec![vec![0.6, 0.4], vec![0.3, 0.7]]).unwrap();
    MarkovSpec::new(alphabet, 3, vec![0.5, 0.5], vec![k1, k2], false).unwrap()
}

/// Hidden Markov fixture: hidden chain F1, symmetric noisy emissions
/// `[[0.9, 0.1], [0.1, 0.9]]` onto an observed two-symbol alphabet.
pub fn f4() -> HmmSpec {
    let hidden = f1();
    let observed = Alphabet::new(["a", "b"]).unwrap();
    let emission = StochasticMatrix::new(vec![vec![0.9, 0.1], vec![0.1, 0.9]]).unwrap();
    HmmSpec::new(hidden, observed, vec![emission], true).unwrap()
}

/// Six-symbol chain built to demonstrate truncation convergence. The
/// mixing supremum is attained by the first two kernel rows, which share
/// an identical geometric tail (ratio `q`), so the truncated coefficient
/// differs from the full one by the renormalization of that tail, about
/// `q^m`. The remaining rows sit far enough below the extremal pair that
/// the sink-row distortion of the m-truncation never promotes them.
pub fn geometric6(n: usize) -> MarkovSpec {
    let alphabet = Alphabet::new(["s1", "s2", "s3", "s4", "s5", "s6"]).unwrap();
    let q = 0.08f64;
    let tail: Vec<f64> = (2..6).map(|j| q.powi(j)).collect();
    let normalized = |head: [f64; 2]| -> Vec<f64> {
        let raw: Vec<f64> = head.iter().chain(tail.iter()).copied().collect();
        let total: f64 = raw.iter().sum();
        raw.iter().map(|v| v / total).collect()
    };
    let mut rows = vec![normalized([0.9, 0.1]), normalized([0.1, 0.9])];
    for j in 0..4 {
        let tweak = 0.01 * j as f64;
        rows.push(normalized([0.45 + tweak, 0.45 - tweak]));
    }
    let kernel = StochasticMatrix::new(rows).unwrap();
    let p0_raw: Vec<f64> = (0..6).map(|j| 0.3f64.powi(j)).collect();
    let p0_total: f64 = p0_raw.iter().sum();
    let p0 = p0_raw.iter().map(|v| v / p0_total).collect();
    MarkovSpec::homogeneous(alphabet, n, p0, kernel).unwrap()
}
