//! Finite-alphabet process models: explicit joints, inhomogeneous Markov
//! chains and hidden Markov chains, plus the conditional-law, total-variation
//! and truncation utilities the mixing analysis is built on.
//!
//! All laws are dense arrays over `S^k` in row-major multi-index order, so
//! every conditional block is a contiguous slice. Construction validates
//! normalization to 1e-12 and rejects bad inputs instead of renormalizing.

use crate::error::{Error, Result};
use crate::indexing::{self, kahan_sum, MultiIndexIter, DEFAULT_CELL_BUDGET};

/// Tolerance for probability-mass normalization checks.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Probabilities at or below this are treated as zero when conditioning.
pub const POSITIVITY_FLOOR: f64 = 1e-300;

/// An ordered finite alphabet of distinct symbol labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    labels: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::InvalidParameter("alphabet must be nonempty".into()));
        }
        for (i, a) in labels.iter().enumerate() {
            for b in &labels[i + 1..] {
                if a == b {
                    return Err(Error::InvalidParameter(format!(
                        "duplicate alphabet label {a:?}"
                    )));
                }
            }
        }
        Ok(Alphabet { labels })
    }

    /// Alphabet with labels `"0", "1", ...`; handy for tests and fixtures.
    pub fn indexed(size: usize) -> Self {
        Alphabet::new((0..size).map(|i| i.to_string())).expect("indexed labels are distinct")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownSymbol(label.to_string()))
    }

    /// The sub-alphabet of the first `m` symbols (used by truncation).
    pub fn truncated(&self, m: usize) -> Result<Alphabet> {
        if m == 0 || m > self.len() {
            return Err(Error::IndexOutOfRange(format!(
                "truncation level {m} not in 1..={}",
                self.len()
            )));
        }
        Ok(Alphabet {
            labels: self.labels[..m].to_vec(),
        })
    }

    /// Product alphabet with labels `"a|b"`, in row-major pair order.
    pub fn product(&self, other: &Alphabet) -> Alphabet {
        let labels = self
            .labels
            .iter()
            .flat_map(|a| other.labels.iter().map(move |b| format!("{a}|{b}")))
            .collect::<Vec<_>>();
        Alphabet { labels }
    }
}

/// A probability mass function on `S^k`, stored densely in rank order.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    alphabet: Alphabet,
    len: usize,
    mass: Vec<f64>,
}

impl Pmf {
    /// Validates nonnegativity and normalization (within 1e-12).
    pub fn new(alphabet: Alphabet, len: usize, mass: Vec<f64>) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidParameter("pmf length must be >= 1".into()));
        }
        let cells = indexing::checked_cells(alphabet.len(), len, DEFAULT_CELL_BUDGET)?;
        if mass.len() != cells {
            return Err(Error::ShapeMismatch(format!(
                "mass has {} entries, expected {cells}",
                mass.len()
            )));
        }
        for &p in &mass {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "negative or non-finite mass entry {p}"
                )));
            }
        }
        let total = kahan_sum(mass.iter().copied());
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidDistribution(format!(
                "mass sums to {total}, not 1"
            )));
        }
        Ok(Pmf {
            alphabet,
            len,
            mass,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn prob(&self, index: &[usize]) -> f64 {
        self.mass[indexing::rank(self.alphabet.len(), index)]
    }
}

/// The full sequence law on `S^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDist {
    pmf: Pmf,
}

impl JointDist {
    pub fn new(pmf: Pmf) -> Self {
        JointDist { pmf }
    }

    pub fn pmf(&self) -> &Pmf {
        &self.pmf
    }

    pub fn n(&self) -> usize {
        self.pmf.len()
    }

    pub fn alphabet(&self) -> &Alphabet {
        self.pmf.alphabet()
    }

    pub fn mass(&self) -> &[f64] {
        self.pmf.mass()
    }

    pub fn prob(&self, path: &[usize]) -> f64 {
        self.pmf.prob(path)
    }

    /// Marginal mass of every length-`i` prefix, in rank order.
    pub fn prefix_marginal(&self, i: usize) -> Vec<f64> {
        let s = self.alphabet().len();
        let block = s.pow((self.n() - i) as u32);
        self.mass()
            .chunks(block)
            .map(|c| kahan_sum(c.iter().copied()))
            .collect()
    }

    /// Expectation of `phi` under this law.
    pub fn expectation(&self, phi: &LipschitzFn) -> Result<f64> {
        check_phi_shape(self, phi)?;
        let s = self.alphabet().len();
        let mut it = MultiIndexIter::new(s, self.n());
        let mut terms = Vec::with_capacity(self.mass().len());
        let mut r = 0usize;
        while let Some(digits) = it.next_index() {
            terms.push(self.mass()[r] * phi.eval(digits));
            r += 1;
        }
        Ok(kahan_sum(terms))
    }

    /// Exact deviation tail `P{|phi - mean| >= t}` by full enumeration.
    pub fn deviation_tail(&self, phi: &LipschitzFn, mean: f64, t: f64) -> Result<f64> {
        check_phi_shape(self, phi)?;
        let s = self.alphabet().len();
        let mut it = MultiIndexIter::new(s, self.n());
        let mut acc = Vec::new();
        let mut r = 0usize;
        while let Some(digits) = it.next_index() {
            if (phi.eval(digits) - mean).abs() >= t {
                acc.push(self.mass()[r]);
            }
            r += 1;
        }
        Ok(kahan_sum(acc))
    }
}

fn check_phi_shape(dist: &JointDist, phi: &LipschitzFn) -> Result<()> {
    if phi.len() != dist.n() || phi.alphabet_size() != dist.alphabet().len() {
        return Err(Error::ShapeMismatch(format!(
            "function on S^{} with |S|={} applied to joint on S^{} with |S|={}",
            phi.len(),
            phi.alphabet_size(),
            dist.n(),
            dist.alphabet().len()
        )));
    }
    Ok(())
}

/// A row-stochastic matrix (rows are pmfs over the column alphabet).
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<f64>,
}

impl StochasticMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let nrows = rows.len();
        if nrows == 0 {
            return Err(Error::InvalidParameter("matrix has no rows".into()));
        }
        let ncols = rows[0].len();
        if ncols == 0 {
            return Err(Error::InvalidParameter("matrix has no columns".into()));
        }
        let mut data = Vec::with_capacity(nrows * ncols);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != ncols {
                return Err(Error::ShapeMismatch(format!(
                    "row {r} has {} entries, expected {ncols}",
                    row.len()
                )));
            }
            for &p in row {
                if !p.is_finite() || p < 0.0 {
                    return Err(Error::InvalidDistribution(format!(
                        "row {r} has negative or non-finite entry {p}"
                    )));
                }
            }
            let total = kahan_sum(row.iter().copied());
            if (total - 1.0).abs() > NORMALIZATION_TOL {
                return Err(Error::InvalidDistribution(format!(
                    "row {r} sums to {total}, not 1"
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(StochasticMatrix { nrows, ncols, data })
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.ncols..(r + 1) * self.ncols]
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.ncols + c]
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    /// True when every entry is strictly positive.
    pub fn has_full_support(&self) -> bool {
        self.data.iter().all(|&p| p > 0.0)
    }
}

/// An inhomogeneous Markov chain: initial law plus one kernel per step.
#[derive(Debug, Clone)]
pub struct MarkovSpec {
    alphabet: Alphabet,
    n: usize,
    p0: Vec<f64>,
    kernels: Vec<StochasticMatrix>,
    homogeneous: bool,
}

impl MarkovSpec {
    /// `kernels` must hold `n - 1` matrices, or exactly one when
    /// `homogeneous` is set (reused for every step). For `n = 1` the kernel
    /// list may be empty.
    pub fn new(
        alphabet: Alphabet,
        n: usize,
        p0: Vec<f64>,
        kernels: Vec<StochasticMatrix>,
        homogeneous: bool,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("sequence length must be >= 1".into()));
        }
        let s = alphabet.len();
        Pmf::new(alphabet.clone(), 1, p0.clone())?;
        let expected = if homogeneous {
            usize::from(n > 1)
        } else {
            n - 1
        };
        if kernels.len() != expected {
            return Err(Error::ShapeMismatch(format!(
                "expected {expected} kernel(s) for n={n} (homogeneous={homogeneous}), got {}",
                kernels.len()
            )));
        }
        for (k, m) in kernels.iter().enumerate() {
            if m.nrows() != s || m.ncols() != s {
                return Err(Error::ShapeMismatch(format!(
                    "kernel {k} is {}x{}, expected {s}x{s}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        Ok(MarkovSpec {
            alphabet,
            n,
            p0,
            kernels,
            homogeneous,
        })
    }

    /// Homogeneous chain with one kernel reused at every step.
    pub fn homogeneous(
        alphabet: Alphabet,
        n: usize,
        p0: Vec<f64>,
        kernel: StochasticMatrix,
    ) -> Result<Self> {
        let kernels = if n > 1 { vec![kernel] } else { Vec::new() };
        MarkovSpec::new(alphabet, n, p0, kernels, true)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p0(&self) -> &[f64] {
        &self.p0
    }

    /// Kernel for the transition from coordinate `k` to `k + 1` (1-based).
    pub fn kernel(&self, k: usize) -> &StochasticMatrix {
        assert!(k >= 1 && k < self.n, "kernel index {k} out of 1..{}", self.n);
        if self.homogeneous {
            &self.kernels[0]
        } else {
            &self.kernels[k - 1]
        }
    }

    pub fn num_steps(&self) -> usize {
        self.n - 1
    }

    /// Strict positivity of every kernel entry (the BAR extremality
    /// hypothesis). The initial law is not required to be positive.
    pub fn has_full_support(&self) -> bool {
        (1..self.n).all(|k| self.kernel(k).has_full_support())
    }
}

/// A hidden Markov chain: hidden-state Markov spec plus per-step emission
/// kernels into the observed alphabet.
#[derive(Debug, Clone)]
pub struct HmmSpec {
    hidden: MarkovSpec,
    observed: Alphabet,
    emissions: Vec<StochasticMatrix>,
    homogeneous_emissions: bool,
}

impl HmmSpec {
    /// `emissions` must hold `n` matrices (`|hidden| x |observed|`), or one
    /// when `homogeneous_emissions` is set.
    pub fn new(
        hidden: MarkovSpec,
        observed: Alphabet,
        emissions: Vec<StochasticMatrix>,
        homogeneous_emissions: bool,
    ) -> Result<Self> {
        let expected = if homogeneous_emissions { 1 } else { hidden.n() };
        if emissions.len() != expected {
            return Err(Error::ShapeMismatch(format!(
                "expected {expected} emission kernel(s), got {}",
                emissions.len()
            )));
        }
        for (k, m) in emissions.iter().enumerate() {
            if m.nrows() != hidden.alphabet().len() || m.ncols() != observed.len() {
                return Err(Error::ShapeMismatch(format!(
                    "emission {k} is {}x{}, expected {}x{}",
                    m.nrows(),
                    m.ncols(),
                    hidden.alphabet().len(),
                    observed.len()
                )));
            }
        }
        Ok(HmmSpec {
            hidden,
            observed,
            emissions,
            homogeneous_emissions,
        })
    }

    pub fn hidden(&self) -> &MarkovSpec {
        &self.hidden
    }

    pub fn observed_alphabet(&self) -> &Alphabet {
        &self.observed
    }

    pub fn n(&self) -> usize {
        self.hidden.n()
    }

    /// Emission kernel at coordinate `l` (1-based).
    pub fn emission(&self, l: usize) -> &StochasticMatrix {
        assert!(l >= 1 && l <= self.n(), "emission index {l} out of 1..={}", self.n());
        if self.homogeneous_emissions {
            &self.emissions[0]
        } else {
            &self.emissions[l - 1]
        }
    }
}

/// Builds the dense joint law of a Markov spec: `P(x) = p0(x1) prod p_k`.
pub fn build_markov_joint(spec: &MarkovSpec) -> Result<JointDist> {
    build_markov_joint_with_budget(spec, DEFAULT_CELL_BUDGET)
}

pub fn build_markov_joint_with_budget(spec: &MarkovSpec, budget: u64) -> Result<JointDist> {
    let s = spec.alphabet().len();
    let cells = indexing::checked_cells(s, spec.n(), budget)?;
    let mut mass = vec![0.0f64; cells];
    let mut it = MultiIndexIter::new(s, spec.n());
    let mut r = 0usize;
    while let Some(digits) = it.next_index() {
        let mut p = spec.p0()[digits[0]];
        for k in 1..spec.n() {
            if p == 0.0 {
                break;
            }
            p *= spec.kernel(k).get(digits[k - 1], digits[k]);
        }
        mass[r] = p;
        r += 1;
    }
    Ok(JointDist::new(Pmf::new(
        spec.alphabet().clone(),
        spec.n(),
        mass,
    )?))
}

/// Builds the joint law of the (hidden, observed) pair chain on
/// `(Shat x S)^n` together with its observed marginal on `S^n`.
pub fn build_hmm_joint(spec: &HmmSpec) -> Result<(JointDist, JointDist)> {
    build_hmm_joint_with_budget(spec, DEFAULT_CELL_BUDGET)
}

pub fn build_hmm_joint_with_budget(spec: &HmmSpec, budget: u64) -> Result<(JointDist, JointDist)> {
    let n = spec.n();
    let sh = spec.hidden().alphabet().len();
    let so = spec.observed_alphabet().len();
    let pair_cells = indexing::checked_cells(sh * so, n, budget)?;
    let obs_cells = indexing::checked_cells(so, n, budget)?;

    let mut pair_mass = vec![0.0f64; pair_cells];
    let mut obs_mass = vec![0.0f64; obs_cells];

    // pair digit d encodes (hidden, observed) as d = hidden * so + observed
    let mut it = MultiIndexIter::new(sh * so, n);
    let mut r = 0usize;
    while let Some(digits) = it.next_index() {
        let mut p = spec.hidden().p0()[digits[0] / so];
        let mut obs_rank = 0usize;
        for l in 1..=n {
            let h = digits[l - 1] / so;
            let x = digits[l - 1] % so;
            obs_rank = obs_rank * so + x;
            if l > 1 {
                let h_prev = digits[l - 2] / so;
                p *= spec.hidden().kernel(l - 1).get(h_prev, h);
            }
            p *= spec.emission(l).get(h, x);
        }
        pair_mass[r] = p;
        obs_mass[obs_rank] += p;
        r += 1;
    }

    let pair_alphabet = spec.hidden().alphabet().product(spec.observed_alphabet());
    let pair = JointDist::new(Pmf::new(pair_alphabet, n, pair_mass)?);
    let observed = JointDist::new(Pmf::new(spec.observed_alphabet().clone(), n, obs_mass)?);
    Ok((pair, observed))
}

/// Conditional law `L(X_j^n | X^i = prefix)` as a pmf over `S^{n-j+1}`.
///
/// `prefix` has length `i` (possibly 0, meaning no conditioning) and
/// `from_j` must satisfy `i < from_j <= n`. Coordinates between `i` and
/// `from_j` are summed out. Errors if the prefix has zero probability.
pub fn conditional(dist: &JointDist, prefix: &[usize], from_j: usize) -> Result<Pmf> {
    let n = dist.n();
    let s = dist.alphabet().len();
    let i = prefix.len();
    if from_j <= i || from_j > n {
        return Err(Error::IndexOutOfRange(format!(
            "conditional target j={from_j} not in {}..={n}",
            i + 1
        )));
    }
    for &d in prefix {
        if d >= s {
            return Err(Error::IndexOutOfRange(format!(
                "prefix digit {d} exceeds alphabet size {s}"
            )));
        }
    }
    let suffix_len = n - from_j + 1;
    let suffix_cells = s.pow(suffix_len as u32);
    let block = s.pow((n - i) as u32);
    let base = indexing::rank(s, prefix) * block;

    let mut numer = vec![0.0f64; suffix_cells];
    for offset in 0..block {
        numer[offset % suffix_cells] += dist.mass()[base + offset];
    }
    let denom = kahan_sum(dist.mass()[base..base + block].iter().copied());
    if denom <= POSITIVITY_FLOOR {
        return Err(Error::ZeroProbabilityPrefix {
            prefix: prefix.to_vec(),
        });
    }
    for v in &mut numer {
        *v /= denom;
    }
    // Renormalize away the division residue so Pmf validation stays exact.
    Pmf::new(dist.alphabet().clone(), suffix_len, numer)
}

/// Total variation distance between two pmfs on the same index space.
///
/// Computed as half the l1 distance; the positive-part form agrees with it
/// to within accumulated rounding (the two are identical for equal-mass
/// vectors).
pub fn tv_distance(p: &Pmf, q: &Pmf) -> Result<f64> {
    if p.alphabet() != q.alphabet() || p.len() != q.len() {
        return Err(Error::ShapeMismatch(
            "tv_distance requires identical alphabets and lengths".into(),
        ));
    }
    let l1 = kahan_sum(
        p.mass()
            .iter()
            .zip(q.mass())
            .map(|(&a, &b)| (a - b).abs()),
    );
    Ok(0.5 * l1)
}

/// The m-truncation of a joint law: keeps the mass on the first-`m`-symbol
/// sub-alphabet and collapses everything else onto `(s_m, ..., s_m)`.
pub fn truncate(dist: &JointDist, m: usize) -> Result<JointDist> {
    let s = dist.alphabet().len();
    if m == 0 || m > s {
        return Err(Error::IndexOutOfRange(format!(
            "truncation level {m} not in 1..={s}"
        )));
    }
    let n = dist.n();
    let alphabet = dist.alphabet().truncated(m)?;
    let cells = m.pow(n as u32);
    let mut mass = vec![0.0f64; cells];
    let mut tail = Vec::new();

    let mut it = MultiIndexIter::new(s, n);
    let mut r = 0usize;
    while let Some(digits) = it.next_index() {
        let p = dist.mass()[r];
        if digits.iter().all(|&d| d < m) {
            mass[indexing::rank(m, digits)] += p;
        } else {
            tail.push(p);
        }
        r += 1;
    }
    // the all-(s_m) point is the last rank of the truncated index space
    mass[cells - 1] += kahan_sum(tail);
    Ok(JointDist::new(Pmf::new(alphabet, n, mass)?))
}

/// A real function on `S^n` with a certified Hamming Lipschitz constant.
///
/// The table variant certifies its constant at construction; the
/// hamming-weight and BAR variants are 1-Lipschitz by structure and can be
/// evaluated on long paths without a dense table.
#[derive(Debug, Clone, PartialEq)]
pub enum LipschitzFn {
    Table {
        alphabet_size: usize,
        n: usize,
        values: Vec<f64>,
        lipschitz_const: f64,
        range: (f64, f64),
    },
    /// Count of coordinates equal to `symbol`.
    HammingWeight {
        alphabet_size: usize,
        n: usize,
        symbol: usize,
    },
    /// Binary additive representation: one bit vector over `S` per
    /// coordinate, value is the sum of selected bits.
    Bar { bits: Vec<Vec<bool>> },
}

impl LipschitzFn {
    /// Dense table; the Lipschitz constant is certified by a scan over all
    /// Hamming-1 neighbor pairs (sufficient for the Hamming metric on a
    /// product space).
    pub fn table(alphabet_size: usize, n: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 || alphabet_size == 0 {
            return Err(Error::InvalidParameter(
                "table function needs n >= 1 and a nonempty alphabet".into(),
            ));
        }
        let cells = indexing::checked_cells(alphabet_size, n, DEFAULT_CELL_BUDGET)?;
        if values.len() != cells {
            return Err(Error::ShapeMismatch(format!(
                "table has {} entries, expected {cells}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite table entry".into()));
        }
        let mut c: f64 = 0.0;
        let mut digits = vec![0usize; n];
        for r in 0..cells {
            indexing::unrank(alphabet_size, n, r, &mut digits);
            for (pos, &digit) in digits.iter().enumerate() {
                let stride = alphabet_size.pow((n - 1 - pos) as u32);
                for v in 0..digit {
                    let nb = r - (digit - v) * stride;
                    c = c.max((values[r] - values[nb]).abs());
                }
            }
        }
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(LipschitzFn::Table {
            alphabet_size,
            n,
            values,
            lipschitz_const: c,
            range: (lo, hi),
        })
    }

    pub fn hamming_weight(alphabet_size: usize, n: usize, symbol: usize) -> Result<Self> {
        if symbol >= alphabet_size {
            return Err(Error::IndexOutOfRange(format!(
                "symbol index {symbol} exceeds alphabet size {alphabet_size}"
            )));
        }
        Ok(LipschitzFn::HammingWeight {
            alphabet_size,
            n,
            symbol,
        })
    }

    pub fn bar(bits: Vec<Vec<bool>>) -> Result<Self> {
        if bits.is_empty() || bits[0].is_empty() {
            return Err(Error::InvalidParameter("bar function needs n >= 1 rows".into()));
        }
        let s = bits[0].len();
        if bits.iter().any(|row| row.len() != s) {
            return Err(Error::ShapeMismatch("bar rows have unequal lengths".into()));
        }
        Ok(LipschitzFn::Bar { bits })
    }

    /// Parses the named-functional syntax used by the CLI and reports:
    /// `hamming-weight:<label>` or `bar:<row>,<row>,...` with 0/1 rows.
    pub fn parse_named(text: &str, alphabet: &Alphabet, n: usize) -> Result<Self> {
        if let Some(label) = text.strip_prefix("hamming-weight:") {
            let symbol = alphabet.index_of(label)?;
            return LipschitzFn::hamming_weight(alphabet.len(), n, symbol);
        }
        if let Some(rows) = text.strip_prefix("bar:") {
            let mut bits = Vec::new();
            for row in rows.split(',') {
                if row.len() != alphabet.len() {
                    return Err(Error::ShapeMismatch(format!(
                        "bar row {row:?} has {} bits, expected {}",
                        row.len(),
                        alphabet.len()
                    )));
                }
                let mut parsed = Vec::with_capacity(row.len());
                for ch in row.chars() {
                    match ch {
                        '0' => parsed.push(false),
                        '1' => parsed.push(true),
                        other => {
                            return Err(Error::InvalidParameter(format!(
                                "bar rows are 0/1 strings, found {other:?}"
                            )))
                        }
                    }
                }
                bits.push(parsed);
            }
            if bits.len() != n {
                return Err(Error::ShapeMismatch(format!(
                    "bar has {} rows, expected n={n}",
                    bits.len()
                )));
            }
            return LipschitzFn::bar(bits);
        }
        Err(Error::InvalidParameter(format!(
            "unknown functional {text:?}; expected hamming-weight:<label> or bar:<rows>"
        )))
    }

    pub fn len(&self) -> usize {
        match self {
            LipschitzFn::Table { n, .. } | LipschitzFn::HammingWeight { n, .. } => *n,
            LipschitzFn::Bar { bits } => bits.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn alphabet_size(&self) -> usize {
        match self {
            LipschitzFn::Table { alphabet_size, .. }
            | LipschitzFn::HammingWeight { alphabet_size, .. } => *alphabet_size,
            LipschitzFn::Bar { bits } => bits[0].len(),
        }
    }

    /// Certified Lipschitz constant w.r.t. the unnormalized Hamming metric.
    pub fn lipschitz_const(&self) -> f64 {
        match self {
            LipschitzFn::Table {
                lipschitz_const, ..
            } => *lipschitz_const,
            LipschitzFn::HammingWeight { .. } | LipschitzFn::Bar { .. } => 1.0,
        }
    }

    /// Bounds on the attained values.
    pub fn range(&self) -> (f64, f64) {
        match self {
            LipschitzFn::Table { range, .. } => *range,
            LipschitzFn::HammingWeight { n, .. } => (0.0, *n as f64),
            LipschitzFn::Bar { bits } => {
                let lo = bits
                    .iter()
                    .map(|row| row.iter().all(|&b| b) as usize)
                    .sum::<usize>();
                let hi = bits
                    .iter()
                    .map(|row| row.iter().any(|&b| b) as usize)
                    .sum::<usize>();
                (lo as f64, hi as f64)
            }
        }
    }

    pub fn eval(&self, path: &[usize]) -> f64 {
        match self {
            LipschitzFn::Table {
                alphabet_size,
                values,
                ..
            } => values[indexing::rank(*alphabet_size, path)],
            LipschitzFn::HammingWeight { symbol, .. } => {
                path.iter().filter(|&&d| d == *symbol).count() as f64
            }
            LipschitzFn::Bar { bits } => bits
                .iter()
                .zip(path)
                .map(|(row, &d)| row[d] as usize)
                .sum::<usize>() as f64,
        }
    }

    /// Short description used in reports.
    pub fn describe(&self) -> String {
        match self {
            LipschitzFn::Table { n, .. } => format!("table over S^{n}"),
            LipschitzFn::HammingWeight { symbol, .. } => format!("hamming-weight:#{symbol}"),
            LipschitzFn::Bar { bits } => {
                let rows: Vec<String> = bits
                    .iter()
                    .map(|row| row.iter().map(|&b| if b { '1' } else { '0' }).collect())
                    .collect();
                format!("bar:{}", rows.join(","))
            }
        }
    }
}
