//! Martingale-difference kernels and the Psi / Phi norm machinery.
//!
//! A martingale difference of a function `phi` under a joint law is a
//! linear functional of `phi`, so it is an inner product with a kernel
//! `kappa` on `S^n`. Two kernel forms appear:
//!
//! * the pairwise kernel for `E[phi | y w] - E[phi | y w']`, and
//! * the prefix kernel for `E[phi | z^i] - E[phi | z^{i-1}]`.
//!
//! The Psi functional iterates "sum positive parts, project out the first
//! coordinate"; its norm dominates the Phi-norm, the exact maximum of
//! `|<kappa, phi>|` over 1-Lipschitz `phi` with range `[0, n]`. The
//! Phi-norm is computed here by an exhaustive oracle over the integer
//! vertices of the Lipschitz polytope.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::indexing::{self, kahan_sum, MultiIndexIter};
use crate::process::{conditional, JointDist, LipschitzFn, POSITIVITY_FLOOR};

/// Default cap on the naive Phi-oracle candidate count `(k+1)^(|S|^k)`.
pub const DEFAULT_ORACLE_BUDGET: u64 = 1 << 20;

/// A real-valued function on `S^k`, the carrier for martingale-difference
/// functionals. `len == 0` is the scalar space.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelFn {
    alphabet_size: usize,
    len: usize,
    values: Vec<f64>,
}

impl KernelFn {
    pub fn new(alphabet_size: usize, len: usize, values: Vec<f64>) -> Result<Self> {
        if alphabet_size == 0 {
            return Err(Error::InvalidParameter("alphabet must be nonempty".into()));
        }
        let cells = indexing::checked_cells(alphabet_size, len, indexing::DEFAULT_CELL_BUDGET)?;
        if values.len() != cells {
            return Err(Error::ShapeMismatch(format!(
                "kernel has {} values, expected {cells}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite kernel entry".into()));
        }
        Ok(KernelFn {
            alphabet_size,
            len,
            values,
        })
    }

    pub fn zeros(alphabet_size: usize, len: usize) -> Self {
        let cells = alphabet_size.pow(len as u32);
        KernelFn {
            alphabet_size,
            len,
            values: vec![0.0; cells],
        }
    }

    /// Point mass at a multi-index.
    pub fn delta(alphabet_size: usize, index: &[usize]) -> Self {
        let mut out = KernelFn::zeros(alphabet_size, index.len());
        out.values[indexing::rank(alphabet_size, index)] = 1.0;
        out
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn len(&self) -> usize {
        self.len
    }

    /// True only for the scalar space `K_0`.
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value_at(&self, index: &[usize]) -> f64 {
        self.values[indexing::rank(self.alphabet_size, index)]
    }

    /// Sum of all entries (zero for difference-of-probability kernels).
    pub fn total(&self) -> f64 {
        kahan_sum(self.values.iter().copied())
    }

    /// Sum of positive parts.
    pub fn positive_sum(&self) -> f64 {
        kahan_sum(self.values.iter().map(|&v| v.max(0.0)))
    }

    pub fn scale(&self, a: f64) -> Self {
        KernelFn {
            alphabet_size: self.alphabet_size,
            len: self.len,
            values: self.values.iter().map(|v| a * v).collect(),
        }
    }

    pub fn add(&self, other: &KernelFn) -> Result<Self> {
        if self.alphabet_size != other.alphabet_size || self.len != other.len {
            return Err(Error::ShapeMismatch("kernel shapes differ".into()));
        }
        Ok(KernelFn {
            alphabet_size: self.alphabet_size,
            len: self.len,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }
}

/// Inner product `<kappa, phi> = sum_x kappa(x) phi(x)`.
pub fn inner(kappa: &KernelFn, phi: &LipschitzFn) -> Result<f64> {
    if phi.len() != kappa.len() || phi.alphabet_size() != kappa.alphabet_size() {
        return Err(Error::ShapeMismatch(format!(
            "kernel on S^{} (|S|={}) vs function on S^{} (|S|={})",
            kappa.len(),
            kappa.alphabet_size(),
            phi.len(),
            phi.alphabet_size()
        )));
    }
    if let LipschitzFn::Table { values, .. } = phi {
        return Ok(kahan_sum(
            kappa.values().iter().zip(values).map(|(&k, &f)| k * f),
        ));
    }
    let mut it = MultiIndexIter::new(kappa.alphabet_size(), kappa.len());
    let mut acc = Vec::with_capacity(kappa.values().len());
    let mut r = 0usize;
    while let Some(digits) = it.next_index() {
        acc.push(kappa.values()[r] * phi.eval(digits));
        r += 1;
    }
    Ok(kahan_sum(acc))
}

/// Pairwise martingale-difference kernel: represents
/// `phi -> E[phi | X^i = y w] - E[phi | X^i = y w']` as an element of K_n.
pub fn kappa_pair(
    dist: &JointDist,
    i: usize,
    prefix: &[usize],
    w: usize,
    w_hat: usize,
) -> Result<KernelFn> {
    let n = dist.n();
    let s = dist.alphabet().len();
    if i == 0 || i >= n {
        return Err(Error::IndexOutOfRange(format!(
            "kappa_pair index i={i} not in 1..={}",
            n - 1
        )));
    }
    if prefix.len() != i - 1 {
        return Err(Error::ShapeMismatch(format!(
            "prefix has length {}, expected {}",
            prefix.len(),
            i - 1
        )));
    }
    let mut kernel = KernelFn::zeros(s, n);
    let suffix_cells = s.pow((n - i) as u32);
    let mut full = prefix.to_vec();
    full.push(w);
    let law_w = conditional(dist, &full, i + 1)?;
    let base_w = indexing::rank(s, &full) * suffix_cells;
    *full.last_mut().unwrap() = w_hat;
    let law_w_hat = conditional(dist, &full, i + 1)?;
    let base_w_hat = indexing::rank(s, &full) * suffix_cells;
    for (offset, &p) in law_w.mass().iter().enumerate() {
        kernel.values[base_w + offset] += p;
    }
    for (offset, &p) in law_w_hat.mass().iter().enumerate() {
        kernel.values[base_w_hat + offset] -= p;
    }
    Ok(kernel)
}

/// Prefix martingale-difference kernel: represents
/// `phi -> E[phi | X^i = z^i] - E[phi | X^{i-1} = z^{i-1}]`.
pub fn kappa_prefix(dist: &JointDist, z: &[usize]) -> Result<KernelFn> {
    let n = dist.n();
    let s = dist.alphabet().len();
    let i = z.len();
    if i == 0 || i > n {
        return Err(Error::IndexOutOfRange(format!(
            "kappa_prefix needs a prefix of length 1..={n}"
        )));
    }
    let mut kernel = KernelFn::zeros(s, n);

    // positive part: the law conditioned on the full prefix z^i
    if i == n {
        let p = dist.prob(z);
        if p <= POSITIVITY_FLOOR {
            return Err(Error::ZeroProbabilityPrefix { prefix: z.to_vec() });
        }
        kernel.values[indexing::rank(s, z)] += 1.0;
    } else {
        let law = conditional(dist, z, i + 1)?;
        let base = indexing::rank(s, z) * s.pow((n - i) as u32);
        for (offset, &p) in law.mass().iter().enumerate() {
            kernel.values[base + offset] += p;
        }
    }

    // negative part: the law conditioned on z^{i-1}
    let parent = &z[..i - 1];
    let law = conditional(dist, parent, i)?;
    let base = indexing::rank(s, parent) * s.pow((n - i + 1) as u32);
    for (offset, &p) in law.mass().iter().enumerate() {
        kernel.values[base + offset] -= p;
    }
    Ok(kernel)
}

/// How a martingale difference is evaluated.
#[derive(Debug, Clone)]
pub enum DiffMode<'a> {
    /// `V_i(phi; z^i)` at one conditioning point (slice of length `i`).
    AtPoint(&'a [usize]),
    /// `max over positive-probability z^i of |V_i(phi; z^i)|`.
    SupNorm,
    /// `E[phi | y w] - E[phi | y w']` (prefix of length `i - 1`).
    Pairwise {
        prefix: &'a [usize],
        w: usize,
        w_hat: usize,
    },
}

/// Conditional expectation `E[phi | X^i = prefix]`; the empty prefix gives
/// the plain expectation.
pub fn conditional_expectation(
    dist: &JointDist,
    phi: &LipschitzFn,
    prefix: &[usize],
) -> Result<f64> {
    let n = dist.n();
    let s = dist.alphabet().len();
    let i = prefix.len();
    if i > n {
        return Err(Error::IndexOutOfRange(format!(
            "prefix of length {i} exceeds n={n}"
        )));
    }
    let block = s.pow((n - i) as u32);
    let base = indexing::rank(s, prefix) * block;
    let mass = &dist.mass()[base..base + block];
    let denom = kahan_sum(mass.iter().copied());
    if denom <= POSITIVITY_FLOOR {
        return Err(Error::ZeroProbabilityPrefix {
            prefix: prefix.to_vec(),
        });
    }
    let mut digits = vec![0usize; n];
    digits[..i].copy_from_slice(prefix);
    let mut acc = Vec::with_capacity(block);
    for (offset, &p) in mass.iter().enumerate() {
        if p > 0.0 {
            indexing::unrank(s, n - i, offset, &mut digits[i..]);
            acc.push(p * phi.eval(&digits));
        }
    }
    Ok(kahan_sum(acc) / denom)
}

/// Martingale difference of `phi` at level `i` in the requested mode.
pub fn martingale_diff(
    dist: &JointDist,
    phi: &LipschitzFn,
    i: usize,
    mode: DiffMode<'_>,
) -> Result<f64> {
    let n = dist.n();
    if i == 0 || i > n {
        return Err(Error::IndexOutOfRange(format!("level i={i} not in 1..={n}")));
    }
    match mode {
        DiffMode::AtPoint(z) => {
            if z.len() != i {
                return Err(Error::ShapeMismatch(format!(
                    "point has length {}, expected i={i}",
                    z.len()
                )));
            }
            let now = conditional_expectation(dist, phi, z)?;
            let before = conditional_expectation(dist, phi, &z[..i - 1])?;
            Ok(now - before)
        }
        DiffMode::SupNorm => Ok(martingale_sup_profile(dist, phi)?[i - 1]),
        DiffMode::Pairwise { prefix, w, w_hat } => {
            if prefix.len() != i - 1 {
                return Err(Error::ShapeMismatch(format!(
                    "prefix has length {}, expected i-1={}",
                    prefix.len(),
                    i - 1
                )));
            }
            let mut full = prefix.to_vec();
            full.push(w);
            let a = conditional_expectation(dist, phi, &full)?;
            *full.last_mut().unwrap() = w_hat;
            let b = conditional_expectation(dist, phi, &full)?;
            Ok(a - b)
        }
    }
}

/// `||V_i(phi)||_inf` for every level `i = 1..=n` in one sweep.
pub fn martingale_sup_profile(dist: &JointDist, phi: &LipschitzFn) -> Result<Vec<f64>> {
    let n = dist.n();
    let s = dist.alphabet().len();
    if phi.len() != n || phi.alphabet_size() != s {
        return Err(Error::ShapeMismatch(
            "function shape does not match the joint".into(),
        ));
    }
    // numer[i][rank(z^i)] = sum over the block of P * phi; denom likewise
    let weighted: Vec<f64> = if let LipschitzFn::Table { values, .. } = phi {
        dist.mass().iter().zip(values).map(|(&p, &f)| p * f).collect()
    } else {
        let mut weighted = Vec::with_capacity(dist.mass().len());
        let mut it = MultiIndexIter::new(s, n);
        let mut r = 0usize;
        while let Some(digits) = it.next_index() {
            weighted.push(dist.mass()[r] * phi.eval(digits));
            r += 1;
        }
        weighted
    };
    let mut sups = vec![0.0f64; n];
    // expectations at level i-1 (parents), starting from the global mean
    let mut parent_num = vec![kahan_sum(weighted.iter().copied())];
    let mut parent_den = vec![1.0f64];
    for i in 1..=n {
        let cells = s.pow(i as u32);
        let block = s.pow((n - i) as u32);
        let mut num = vec![0.0f64; cells];
        let mut den = vec![0.0f64; cells];
        for z in 0..cells {
            num[z] = kahan_sum(weighted[z * block..(z + 1) * block].iter().copied());
            den[z] = kahan_sum(dist.mass()[z * block..(z + 1) * block].iter().copied());
        }
        let mut worst = 0.0f64;
        for z in 0..cells {
            if den[z] <= POSITIVITY_FLOOR {
                continue;
            }
            let parent = z / s;
            // positive-mass child implies positive-mass parent
            let v = num[z] / den[z] - parent_num[parent] / parent_den[parent];
            worst = worst.max(v.abs());
        }
        sups[i - 1] = worst;
        parent_num = num;
        parent_den = den;
    }
    Ok(sups)
}

/// Marginal projection: sums out the first coordinate. Takes `K_k` to
/// `K_{k-1}`; the image of a `K_1` kernel is the scalar space `K_0`.
pub fn project(kappa: &KernelFn) -> Result<KernelFn> {
    if kappa.is_empty() {
        return Err(Error::IndexOutOfRange(
            "cannot project a scalar kernel".into(),
        ));
    }
    let s = kappa.alphabet_size();
    let out_cells = s.pow((kappa.len() - 1) as u32);
    let mut values = vec![0.0f64; out_cells];
    for chunk in kappa.values().chunks(out_cells) {
        for (v, &x) in values.iter_mut().zip(chunk) {
            *v += x;
        }
    }
    KernelFn::new(s, kappa.len() - 1, values)
}

/// Section at the last coordinate: `kappa_y(x) = kappa(x y)`.
pub fn section(kappa: &KernelFn, y: usize) -> Result<KernelFn> {
    if kappa.is_empty() {
        return Err(Error::IndexOutOfRange(
            "cannot section a scalar kernel".into(),
        ));
    }
    let s = kappa.alphabet_size();
    if y >= s {
        return Err(Error::IndexOutOfRange(format!(
            "section symbol {y} exceeds alphabet size {s}"
        )));
    }
    let out_cells = s.pow((kappa.len() - 1) as u32);
    let values = (0..out_cells).map(|r| kappa.values()[r * s + y]).collect();
    KernelFn::new(s, kappa.len() - 1, values)
}

/// Restriction by a fixed prefix: `(T_z kappa)(x) = kappa(z x)`.
pub fn prefix_reduce(kappa: &KernelFn, z: &[usize]) -> Result<KernelFn> {
    if z.len() >= kappa.len() && !(z.is_empty() && kappa.is_empty()) {
        return Err(Error::IndexOutOfRange(format!(
            "prefix of length {} must be shorter than the kernel length {}",
            z.len(),
            kappa.len()
        )));
    }
    let s = kappa.alphabet_size();
    let out_len = kappa.len() - z.len();
    let out_cells = s.pow(out_len as u32);
    let base = indexing::rank(s, z) * out_cells;
    KernelFn::new(s, out_len, kappa.values()[base..base + out_cells].to_vec())
}

/// The Positive-Summation-Iterated functional: sum of positive parts at
/// every projection level down to `K_1`.
pub fn psi(kappa: &KernelFn) -> f64 {
    psi_signed(kappa, 1.0)
}

fn psi_signed(kappa: &KernelFn, sign: f64) -> f64 {
    let s = kappa.alphabet_size();
    let mut level: Vec<f64> = kappa.values().iter().map(|&v| sign * v).collect();
    let mut len = kappa.len();
    let mut acc = 0.0f64;
    while len >= 1 {
        acc += kahan_sum(level.iter().map(|&v| v.max(0.0)));
        let out_cells = s.pow((len - 1) as u32);
        let mut next = vec![0.0f64; out_cells];
        for chunk in level.chunks(out_cells) {
            for (v, &x) in next.iter_mut().zip(chunk) {
                *v += x;
            }
        }
        level = next;
        len -= 1;
    }
    acc
}

/// The norm `max(Psi(kappa), Psi(-kappa))`.
pub fn psi_norm(kappa: &KernelFn) -> f64 {
    psi_signed(kappa, 1.0).max(psi_signed(kappa, -1.0))
}

/// Result of the exact Phi-norm maximization.
#[derive(Debug, Clone)]
pub struct PhiOracleResult {
    /// `max over vertices phi of |<kappa, phi>|`.
    pub value: f64,
    /// First maximizer in enumeration order.
    pub argmax: LipschitzFn,
    /// `max over vertices of the signed <kappa, phi>` (one-sided variant).
    pub max_signed: f64,
    /// Number of enumerated vertices.
    pub vertex_count: usize,
}

/// Exact Phi-norm by exhaustive enumeration of the integer vertices of the
/// Lipschitz polytope: all 1-Lipschitz `phi : S^k -> {0, ..., k}`.
///
/// The candidate space is `(k+1)^(|S|^k)` before Lipschitz filtering; the
/// call fails if that exceeds `budget`. Ties resolve to the first
/// maximizer in mixed-radix enumeration order.
pub fn phi_norm_oracle(kappa: &KernelFn) -> Result<PhiOracleResult> {
    phi_norm_oracle_with_budget(kappa, DEFAULT_ORACLE_BUDGET)
}

pub fn phi_norm_oracle_with_budget(kappa: &KernelFn, budget: u64) -> Result<PhiOracleResult> {
    let s = kappa.alphabet_size();
    let k = kappa.len();
    if k == 0 {
        return Err(Error::InvalidParameter(
            "phi oracle requires kernel length >= 1".into(),
        ));
    }
    let vertices = lipschitz_vertices(s, k, budget)?;
    let mut best_abs = f64::NEG_INFINITY;
    let mut best_signed = f64::NEG_INFINITY;
    let mut best_index = 0usize;
    for (idx, phi) in vertices.iter().enumerate() {
        let v = kahan_sum(
            kappa
                .values()
                .iter()
                .zip(phi)
                .map(|(&kv, &fv)| kv * fv as f64),
        );
        best_signed = best_signed.max(v);
        if v.abs() > best_abs {
            best_abs = v.abs();
            best_index = idx;
        }
    }
    let table: Vec<f64> = vertices[best_index].iter().map(|&v| v as f64).collect();
    Ok(PhiOracleResult {
        value: best_abs,
        argmax: LipschitzFn::table(s, k, table)?,
        max_signed: best_signed,
        vertex_count: vertices.len(),
    })
}

/// All integer vertices of the Lipschitz polytope for shape `(s, k)`:
/// functions `S^k -> {0..k}` whose values differ by at most 1 across every
/// Hamming-1 neighbor pair (which suffices on a product space). Cached per
/// shape; enumeration order is mixed-radix over value vectors.
pub fn lipschitz_vertices(s: usize, k: usize, budget: u64) -> Result<Arc<Vec<Vec<u8>>>> {
    type VertexCache = Mutex<HashMap<(usize, usize), Arc<Vec<Vec<u8>>>>>;
    static CACHE: OnceLock<VertexCache> = OnceLock::new();
    let cells = indexing::checked_cells(s, k, budget)?;
    let mut naive: u128 = 1;
    for _ in 0..cells {
        naive = naive.saturating_mul((k + 1) as u128);
        if naive > budget as u128 {
            return Err(Error::OracleBudgetExceeded {
                candidates: naive,
                budget,
            });
        }
    }
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&(s, k)) {
        return Ok(Arc::clone(hit));
    }

    // ranks of Hamming-1 neighbors that precede each cell in rank order
    let mut smaller_neighbors: Vec<Vec<usize>> = vec![Vec::new(); cells];
    let mut digits = vec![0usize; k];
    for (r, nbrs) in smaller_neighbors.iter_mut().enumerate() {
        indexing::unrank(s, k, r, &mut digits);
        for (pos, &d) in digits.iter().enumerate() {
            let stride = s.pow((k - 1 - pos) as u32);
            for v in 0..d {
                nbrs.push(r - (d - v) * stride);
            }
        }
    }

    let mut out: Vec<Vec<u8>> = Vec::new();
    let mut values = vec![0u8; cells];
    dfs_vertices(0, k as u8, &smaller_neighbors, &mut values, &mut out);
    let arc = Arc::new(out);
    cache
        .lock()
        .unwrap()
        .insert((s, k), Arc::clone(&arc));
    Ok(arc)
}

fn dfs_vertices(
    pos: usize,
    max_value: u8,
    smaller_neighbors: &[Vec<usize>],
    values: &mut Vec<u8>,
    out: &mut Vec<Vec<u8>>,
) {
    if pos == values.len() {
        out.push(values.clone());
        return;
    }
    'candidates: for v in 0..=max_value {
        for &nb in &smaller_neighbors[pos] {
            if values[nb].abs_diff(v) > 1 {
                continue 'candidates;
            }
        }
        values[pos] = v;
        dfs_vertices(pos + 1, max_value, smaller_neighbors, values, out);
    }
}
