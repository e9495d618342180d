//! Mixing coefficients and contraction machinery.
//!
//! The central object is the upper-triangular matrix of coefficients
//!
//! ```text
//! eta_bar(i, j) = sup TV( L(X_j^n | X^i = y w), L(X_j^n | X^i = y w') )
//! ```
//!
//! taken over positive-probability prefixes, whose row sums
//! `H_i = 1 + sum_{j>i} eta_bar(i, j)` give the infinity operator norm that
//! drives the concentration constants. For Markov and hidden Markov chains
//! the coefficients are bounded by products of per-step Dobrushin
//! contraction coefficients.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::indexing::MultiIndexIter;
use crate::process::{
    conditional, tv_distance, HmmSpec, JointDist, MarkovSpec, StochasticMatrix, POSITIVITY_FLOOR,
};

/// The matrix of eta-bar coefficients with its row sums and norm.
#[derive(Debug, Clone, Serialize)]
pub struct MixingProfile {
    pub n: usize,
    /// Full n x n matrix: unit diagonal, eta-bar above, zero below.
    pub eta_bar: Vec<Vec<f64>>,
    /// Row sums `H_i = 1 + sum_{j > i} eta_bar[i][j]`.
    pub h_rows: Vec<f64>,
    /// `max_i H_i`, the infinity operator norm of the matrix.
    pub inf_norm: f64,
}

/// Per-step contraction coefficients and the product bound `M_n`.
#[derive(Debug, Clone, Serialize)]
pub struct ContractionProfile {
    pub n: usize,
    /// `theta_1 .. theta_{n-1}`.
    pub thetas: Vec<f64>,
    /// `max_i (1 + theta_i + theta_i theta_{i+1} + ...)`, with `M_1 = 1`.
    pub m_n: f64,
}

/// Pairwise mixing coefficient `eta_ij(prefix, w, w_hat)`: the total
/// variation distance between the two conditional future laws from step
/// `j` on, after prefixes differing only in coordinate `i`.
pub fn eta(
    dist: &JointDist,
    i: usize,
    j: usize,
    prefix: &[usize],
    w: usize,
    w_hat: usize,
) -> Result<f64> {
    check_ij(dist.n(), i, j)?;
    if prefix.len() != i - 1 {
        return Err(Error::ShapeMismatch(format!(
            "prefix has length {}, expected i-1 = {}",
            prefix.len(),
            i - 1
        )));
    }
    let mut full = prefix.to_vec();
    full.push(w);
    let law_w = conditional(dist, &full, j)?;
    *full.last_mut().unwrap() = w_hat;
    let law_w_hat = conditional(dist, &full, j)?;
    tv_distance(&law_w, &law_w_hat)
}

/// Supremum of `eta` over all positive-probability `(prefix, w, w_hat)`.
/// Returns 0 when fewer than two admissible symbols exist anywhere.
pub fn eta_bar(dist: &JointDist, i: usize, j: usize) -> Result<f64> {
    check_ij(dist.n(), i, j)?;
    let s = dist.alphabet().len();
    let level = dist.prefix_marginal(i);
    let mut best = 0.0f64;
    let mut it = MultiIndexIter::new(s, i - 1);
    while let Some(prefix) = it.next_index() {
        let base = crate::indexing::rank(s, prefix) * s;
        let admissible: Vec<usize> = (0..s)
            .filter(|&w| level[base + w] > POSITIVITY_FLOOR)
            .collect();
        if admissible.len() < 2 {
            continue;
        }
        let prefix = prefix.to_vec();
        for (a, &w) in admissible.iter().enumerate() {
            for &w_hat in &admissible[a + 1..] {
                let v = eta(dist, i, j, &prefix, w, w_hat)?;
                if v > best {
                    best = v;
                }
            }
        }
    }
    Ok(best)
}

/// Assembles the full mixing profile of a joint law by exhaustive
/// enumeration of the suprema.
pub fn mixing_profile(dist: &JointDist) -> Result<MixingProfile> {
    let n = dist.n();
    let mut matrix = vec![vec![0.0f64; n]; n];
    for (i, row) in matrix.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for i in 1..=n {
        for j in (i + 1)..=n {
            matrix[i - 1][j - 1] = eta_bar(dist, i, j)?;
        }
    }
    let h_rows: Vec<f64> = matrix.iter().map(|row| row.iter().sum()).collect();
    let inf_norm = h_rows.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(MixingProfile {
        n,
        eta_bar: matrix,
        h_rows,
        inf_norm,
    })
}

/// Dobrushin contraction coefficient of a stochastic matrix: half the
/// maximal l1 distance between two rows. Always in `[0, 1]`.
pub fn theta(kernel: &StochasticMatrix) -> f64 {
    let mut worst = 0.0f64;
    for r in 0..kernel.nrows() {
        for r2 in (r + 1)..kernel.nrows() {
            let l1: f64 = kernel
                .row(r)
                .iter()
                .zip(kernel.row(r2))
                .map(|(&a, &b)| (a - b).abs())
                .sum();
            worst = worst.max(0.5 * l1);
        }
    }
    worst
}

/// Contraction coefficients of every step of a Markov spec and the bound
/// `M_n` from their tail products. `M_1 = 1` by the empty-product
/// convention.
pub fn contraction_profile(spec: &MarkovSpec) -> ContractionProfile {
    let n = spec.n();
    let thetas: Vec<f64> = (1..n).map(|k| theta(spec.kernel(k))).collect();
    let m_n = m_n_from_thetas(&thetas);
    ContractionProfile { n, thetas, m_n }
}

pub(crate) fn m_n_from_thetas(thetas: &[f64]) -> f64 {
    if thetas.is_empty() {
        return 1.0;
    }
    let mut best = f64::NEG_INFINITY;
    for i in 0..thetas.len() {
        let mut acc = 1.0f64;
        let mut prod = 1.0f64;
        for &t in &thetas[i..] {
            prod *= t;
            acc += prod;
        }
        best = best.max(acc);
    }
    best
}

/// Product bound `eta_bar(i, j) <= theta_i ... theta_{j-1}` for a Markov
/// chain.
pub fn markov_eta_bound(spec: &MarkovSpec, i: usize, j: usize) -> Result<f64> {
    check_ij(spec.n(), i, j)?;
    Ok((i..j).map(|k| theta(spec.kernel(k))).product())
}

/// The same product bound for a hidden Markov chain, taken over the
/// hidden-chain kernels; it dominates the observed chain's eta-bar.
pub fn hmm_eta_bound(spec: &HmmSpec, i: usize, j: usize) -> Result<f64> {
    markov_eta_bound(spec.hidden(), i, j)
}

/// Left-multiplies a zero-sum row vector by a stochastic matrix. The
/// result satisfies the contraction inequality
/// `||u^T P||_1 <= theta(P) * ||u||_1`.
pub fn apply_kernel_transpose(u: &[f64], kernel: &StochasticMatrix) -> Result<Vec<f64>> {
    if u.len() != kernel.nrows() {
        return Err(Error::ShapeMismatch(format!(
            "vector has {} entries, kernel has {} rows",
            u.len(),
            kernel.nrows()
        )));
    }
    let total: f64 = u.iter().sum();
    if total.abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "vector must sum to zero, sums to {total}"
        )));
    }
    let mut out = vec![0.0f64; kernel.ncols()];
    for (r, &weight) in u.iter().enumerate() {
        if weight == 0.0 {
            continue;
        }
        for (c, &p) in kernel.row(r).iter().enumerate() {
            out[c] += weight * p;
        }
    }
    Ok(out)
}

fn check_ij(n: usize, i: usize, j: usize) -> Result<()> {
    if i == 0 || i >= j || j > n {
        return Err(Error::IndexOutOfRange(format!(
            "(i, j) = ({i}, {j}) violates 1 <= i < j <= {n}"
        )));
    }
    Ok(())
}
