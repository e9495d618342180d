//! Path sampling and empirical tail estimation.
//!
//! Sampling is counter-based: path `k` is drawn from an independent ChaCha
//! stream of the master seed, so batches are reproducible bit-for-bit
//! regardless of scheduling or worker count. Tail estimates attach exact
//! (Clopper–Pearson) binomial upper confidence bounds; when the mean is
//! estimated from the same sample, its error margin is folded into the
//! confidence bound as well.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::distribution::{Beta, ContinuousCDF};

use crate::certificates::{Certificate, MetricFlavor};
use crate::error::{Error, Result};
use crate::process::{HmmSpec, JointDist, LipschitzFn, MarkovSpec};

/// A batch of sampled paths, stored flat as symbol indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathBatch {
    alphabet_size: usize,
    n: usize,
    count: usize,
    seed: u64,
    data: Vec<u8>,
}

impl PathBatch {
    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn path(&self, k: usize) -> &[u8] {
        &self.data[k * self.n..(k + 1) * self.n]
    }
}

fn draw_from(weights: &[f64], u: f64) -> usize {
    let mut acc = 0.0f64;
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    weights.len() - 1
}

fn check_sampling_shape(alphabet_size: usize, count: usize) -> Result<()> {
    if count == 0 {
        return Err(Error::InvalidParameter("sample count must be >= 1".into()));
    }
    if alphabet_size > u8::MAX as usize {
        return Err(Error::InvalidParameter(
            "sampling supports alphabets up to 255 symbols".into(),
        ));
    }
    Ok(())
}

/// Ancestral sampling of a Markov spec. Path `k` depends only on
/// `(seed, k)`.
pub fn sample_markov_paths(spec: &MarkovSpec, seed: u64, count: usize) -> Result<PathBatch> {
    let s = spec.alphabet().len();
    check_sampling_shape(s, count)?;
    let n = spec.n();
    let mut data = vec![0u8; count * n];
    for k in 0..count {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        let path = &mut data[k * n..(k + 1) * n];
        let mut state = draw_from(spec.p0(), rng.random::<f64>());
        path[0] = state as u8;
        for (l, slot) in path.iter_mut().enumerate().skip(1) {
            state = draw_from(spec.kernel(l).row(state), rng.random::<f64>());
            *slot = state as u8;
        }
    }
    Ok(PathBatch {
        alphabet_size: s,
        n,
        count,
        seed,
        data,
    })
}

/// Ancestral sampling of a hidden Markov spec; returns observed paths.
pub fn sample_hmm_paths(spec: &HmmSpec, seed: u64, count: usize) -> Result<PathBatch> {
    let so = spec.observed_alphabet().len();
    check_sampling_shape(so, count)?;
    let n = spec.n();
    let hidden = spec.hidden();
    let mut data = vec![0u8; count * n];
    for k in 0..count {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        let path = &mut data[k * n..(k + 1) * n];
        let mut state = draw_from(hidden.p0(), rng.random::<f64>());
        path[0] = draw_from(spec.emission(1).row(state), rng.random::<f64>()) as u8;
        for l in 2..=n {
            state = draw_from(hidden.kernel(l - 1).row(state), rng.random::<f64>());
            path[l - 1] = draw_from(spec.emission(l).row(state), rng.random::<f64>()) as u8;
        }
    }
    Ok(PathBatch {
        alphabet_size: so,
        n,
        count,
        seed,
        data,
    })
}

/// How the reference mean `E phi` is obtained.
#[derive(Debug, Clone, Copy)]
pub enum MeanMode<'a> {
    /// Exact expectation by enumerating the given joint law.
    Exact(&'a JointDist),
    /// Sample mean of the batch, with its error margin folded into the
    /// upper confidence bounds.
    PlugIn,
}

/// Empirical deviation tails with one-sided upper confidence bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailEstimate {
    pub schema: String,
    pub n: usize,
    pub metric: MetricFlavor,
    pub functional: String,
    /// Certified Lipschitz constant of the functional (unnormalized
    /// Hamming metric).
    pub lipschitz_const: f64,
    pub count: usize,
    pub seed: u64,
    pub mean: f64,
    pub mean_mode: String,
    /// High-confidence bound on `|sample mean - E phi|` (zero in exact
    /// mode), already folded into `upper_conf`.
    pub mean_margin: f64,
    pub t_grid: Vec<f64>,
    pub empirical: Vec<f64>,
    pub upper_conf: Vec<f64>,
}

/// One-sided Clopper–Pearson upper confidence bound for a binomial
/// proportion with `k` hits out of `n` at the given confidence level.
pub fn binomial_upper_confidence(k: usize, n: usize, confidence: f64) -> f64 {
    if k >= n {
        return 1.0;
    }
    let beta = Beta::new((k + 1) as f64, (n - k) as f64).expect("valid beta parameters");
    beta.inverse_cdf(confidence)
}

fn validate_t_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::InvalidParameter("t grid must be nonempty".into()));
    }
    for pair in t_grid.windows(2) {
        if pair[0].is_nan() || pair[1].is_nan() || pair[1] <= pair[0] {
            return Err(Error::InvalidParameter(
                "t grid must be strictly increasing".into(),
            ));
        }
    }
    if t_grid[0] < 0.0 {
        return Err(Error::InvalidParameter("t grid must be nonnegative".into()));
    }
    Ok(())
}

/// Estimates `P{|phi - E phi| >= t}` over the grid from a sampled batch.
///
/// Overall coverage is 95%: in exact-mean mode the full 5% goes to the
/// binomial bound; in plug-in mode it is split evenly between the mean
/// margin (Hoeffding on the range) and the binomial bound.
pub fn empirical_tail(
    batch: &PathBatch,
    phi: &LipschitzFn,
    t_grid: &[f64],
    mean_mode: MeanMode<'_>,
    metric: MetricFlavor,
) -> Result<TailEstimate> {
    validate_t_grid(t_grid)?;
    if phi.len() != batch.n() || phi.alphabet_size() != batch.alphabet_size() {
        return Err(Error::ShapeMismatch(format!(
            "functional on S^{} (|S|={}) vs paths on S^{} (|S|={})",
            phi.len(),
            phi.alphabet_size(),
            batch.n(),
            batch.alphabet_size()
        )));
    }

    let mut values = Vec::with_capacity(batch.count());
    let mut digits = vec![0usize; batch.n()];
    for k in 0..batch.count() {
        for (d, &sym) in digits.iter_mut().zip(batch.path(k)) {
            *d = sym as usize;
        }
        values.push(phi.eval(&digits));
    }

    let (mean, mean_margin, binom_confidence, mode_name) = match mean_mode {
        MeanMode::Exact(joint) => {
            if joint.n() != batch.n() || joint.alphabet().len() != batch.alphabet_size() {
                return Err(Error::ShapeMismatch(
                    "exact-mean joint does not match the sampled process".into(),
                ));
            }
            (joint.expectation(phi)?, 0.0, 0.95, "exact")
        }
        MeanMode::PlugIn => {
            let mean = crate::indexing::kahan_sum(values.iter().copied()) / values.len() as f64;
            let (lo, hi) = phi.range();
            let range = (hi - lo).max(f64::MIN_POSITIVE);
            // P{|mean_hat - E phi| >= margin} <= 2 exp(-2 N margin^2 / R^2) = 2.5%
            let margin =
                range * ((2.0f64 / 0.025).ln() / (2.0 * values.len() as f64)).sqrt();
            (mean, margin, 0.975, "plug-in")
        }
    };

    let mut empirical = Vec::with_capacity(t_grid.len());
    let mut upper_conf = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let hits = values.iter().filter(|&&v| (v - mean).abs() >= t).count();
        empirical.push(hits as f64 / values.len() as f64);
        // |phi - E phi| >= t implies |phi - mean_hat| >= t - margin
        let widened = (t - mean_margin).max(0.0);
        let hits_widened = values
            .iter()
            .filter(|&&v| (v - mean).abs() >= widened)
            .count();
        upper_conf.push(
            binomial_upper_confidence(hits_widened, values.len(), binom_confidence).min(1.0),
        );
    }

    Ok(TailEstimate {
        schema: crate::REPORT_SCHEMA.to_string(),
        n: batch.n(),
        metric,
        functional: phi.describe(),
        lipschitz_const: phi.lipschitz_const(),
        count: batch.count(),
        seed: batch.seed(),
        mean,
        mean_mode: mode_name.to_string(),
        mean_margin,
        t_grid: t_grid.to_vec(),
        empirical,
        upper_conf,
    })
}

/// Exact deviation tails by full enumeration of a joint law, packaged as a
/// `TailEstimate` with zero sampling uncertainty.
pub fn exact_tail_estimate(
    dist: &JointDist,
    phi: &LipschitzFn,
    t_grid: &[f64],
    metric: MetricFlavor,
) -> Result<TailEstimate> {
    validate_t_grid(t_grid)?;
    let mean = dist.expectation(phi)?;
    let mut empirical = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        empirical.push(dist.deviation_tail(phi, mean, t)?);
    }
    Ok(TailEstimate {
        schema: crate::REPORT_SCHEMA.to_string(),
        n: dist.n(),
        metric,
        functional: phi.describe(),
        lipschitz_const: phi.lipschitz_const(),
        count: 0,
        seed: 0,
        mean,
        mean_mode: "exact-enumeration".to_string(),
        mean_margin: 0.0,
        t_grid: t_grid.to_vec(),
        upper_conf: empirical.clone(),
        empirical,
    })
}

/// Per-deviation verdict of an estimate/certificate comparison.
#[derive(Debug, Clone, Serialize)]
pub struct CompareRow {
    pub t: f64,
    pub empirical: f64,
    pub upper_conf: f64,
    pub bound: f64,
    pub effective_bound: f64,
    pub pass: bool,
}

/// Machine-readable comparison between an empirical tail and a certified
/// bound.
#[derive(Debug, Clone, Serialize)]
pub struct CompareReport {
    pub schema: String,
    pub n: usize,
    pub metric: MetricFlavor,
    pub functional: String,
    pub count: usize,
    pub seed: u64,
    pub overall_pass: bool,
    pub rows: Vec<CompareRow>,
}

impl CompareReport {
    /// Tab-separated table: t, empirical, upper_conf, bound,
    /// effective_bound, verdict.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("t\tempirical\tupper_conf\tbound\teffective_bound\tverdict\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\n",
                row.t,
                row.empirical,
                row.upper_conf,
                row.bound,
                row.effective_bound,
                if row.pass { "pass" } else { "fail" }
            ));
        }
        out
    }
}

/// Checks the estimate's upper confidence against the certified bound at
/// every grid point. Errors if the conventions do not match or the
/// certificate's Lipschitz constant does not cover the functional.
pub fn compare(estimate: &TailEstimate, certificate: &Certificate) -> Result<CompareReport> {
    if estimate.n != certificate.n {
        return Err(Error::ConventionMismatch(format!(
            "estimate has n={}, certificate has n={}",
            estimate.n, certificate.n
        )));
    }
    if estimate.metric != certificate.metric {
        return Err(Error::ConventionMismatch(
            "estimate and certificate use different metric flavors".into(),
        ));
    }
    let required_c = match certificate.metric {
        MetricFlavor::Hamming => estimate.lipschitz_const,
        MetricFlavor::NormalizedHamming => estimate.lipschitz_const * estimate.n as f64,
    };
    if certificate.c + 1e-12 < required_c {
        return Err(Error::ConventionMismatch(format!(
            "certificate covers c={}, functional needs c={required_c}",
            certificate.c
        )));
    }

    let mut rows = Vec::with_capacity(estimate.t_grid.len());
    let mut overall = true;
    for (idx, &t) in estimate.t_grid.iter().enumerate() {
        let bound = certificate.bound(t);
        let pass = estimate.upper_conf[idx] <= bound + 1e-12;
        overall &= pass;
        rows.push(CompareRow {
            t,
            empirical: estimate.empirical[idx],
            upper_conf: estimate.upper_conf[idx],
            bound,
            effective_bound: bound.min(1.0),
            pass,
        });
    }
    Ok(CompareReport {
        schema: crate::REPORT_SCHEMA.to_string(),
        n: estimate.n,
        metric: estimate.metric,
        functional: estimate.functional.clone(),
        count: estimate.count,
        seed: estimate.seed,
        overall_pass: overall,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificates::ConstantKind;
    use crate::fixtures;
    use crate::mixing::contraction_profile;
    use crate::process::{build_markov_joint, Alphabet, StochasticMatrix};

    fn count_of_a(n: usize) -> LipschitzFn {
        LipschitzFn::hamming_weight(2, n, 0).unwrap()
    }

    #[test]
    fn deterministic_chain_gives_identical_paths() {
        let alphabet = Alphabet::new(["a", "b"]).unwrap();
        let identity = StochasticMatrix::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let spec =
            crate::process::MarkovSpec::homogeneous(alphabet, 4, vec![1.0, 0.0], identity)
                .unwrap();
        let batch = sample_markov_paths(&spec, 9, 50).unwrap();
        for k in 0..batch.count() {
            assert_eq!(batch.path(k), &[0, 0, 0, 0]);
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        let spec = fixtures::f1();
        let a = sample_markov_paths(&spec, 42, 200).unwrap();
        let b = sample_markov_paths(&spec, 42, 200).unwrap();
        assert_eq!(a, b);
        let c = sample_markov_paths(&spec, 43, 200).unwrap();
        assert_ne!(a, c);

        let hmm = fixtures::f4();
        let ha = sample_hmm_paths(&hmm, 42, 100).unwrap();
        let hb = sample_hmm_paths(&hmm, 42, 100).unwrap();
        assert_eq!(ha, hb);
    }

    #[test]
    fn f1_first_coordinate_frequency() {
        let spec = fixtures::f1();
        let batch = sample_markov_paths(&spec, 1234, 100_000).unwrap();
        let hits = (0..batch.count()).filter(|&k| batch.path(k)[0] == 0).count();
        let freq = hits as f64 / batch.count() as f64;
        let se = (0.25f64 / 100_000.0).sqrt();
        assert!((freq - 0.5).abs() < 3.0 * se, "freq = {freq}");
    }

    #[test]
    fn constant_functional_has_zero_tail() {
        let spec = fixtures::f1();
        let batch = sample_markov_paths(&spec, 7, 500).unwrap();
        let constant = LipschitzFn::table(2, 3, vec![2.5; 8]).unwrap();
        let joint = build_markov_joint(&spec).unwrap();
        let est = empirical_tail(
            &batch,
            &constant,
            &[0.5, 1.0],
            MeanMode::Exact(&joint),
            MetricFlavor::Hamming,
        )
        .unwrap();
        assert_eq!(est.empirical, vec![0.0, 0.0]);
    }

    #[test]
    fn f1_exact_tail_at_one_point_five() {
        let joint = build_markov_joint(&fixtures::f1()).unwrap();
        let phi = count_of_a(3);
        let mean = joint.expectation(&phi).unwrap();
        assert!((mean - 1.5).abs() < 1e-12);
        let tail = joint.deviation_tail(&phi, mean, 1.5).unwrap();
        assert!((tail - 0.5625).abs() < 1e-12);

        // Monte Carlo estimate brackets the exact value
        let batch = sample_markov_paths(&fixtures::f1(), 99, 40_000).unwrap();
        let est = empirical_tail(
            &batch,
            &phi,
            &[1.5],
            MeanMode::Exact(&joint),
            MetricFlavor::Hamming,
        )
        .unwrap();
        let se = (0.5625f64 * 0.4375 / 40_000.0).sqrt();
        assert!((est.empirical[0] - tail).abs() < 4.0 * se);
        assert!(est.upper_conf[0] >= est.empirical[0]);
    }

    #[test]
    fn tail_beyond_range_is_zero() {
        let spec = fixtures::f1();
        let joint = build_markov_joint(&spec).unwrap();
        let batch = sample_markov_paths(&spec, 5, 1000).unwrap();
        let est = empirical_tail(
            &batch,
            &count_of_a(3),
            &[5.0],
            MeanMode::Exact(&joint),
            MetricFlavor::Hamming,
        )
        .unwrap();
        assert_eq!(est.empirical[0], 0.0);
    }

    #[test]
    fn tails_are_monotone_and_bounded() {
        let spec = fixtures::f1_extended(20);
        let batch = sample_markov_paths(&spec, 21, 5000).unwrap();
        let grid: Vec<f64> = (0..20).map(|i| i as f64 * 0.5).collect();
        let est = empirical_tail(
            &batch,
            &count_of_a(20),
            &grid,
            MeanMode::PlugIn,
            MetricFlavor::Hamming,
        )
        .unwrap();
        for w in est.empirical.windows(2) {
            assert!(w[1] <= w[0]);
        }
        for (&e, &u) in est.empirical.iter().zip(&est.upper_conf) {
            assert!((0.0..=1.0).contains(&e));
            assert!((0.0..=1.0).contains(&u));
        }
    }

    #[test]
    fn estimates_are_bitwise_deterministic() {
        let spec = fixtures::f1_extended(10);
        let run = || {
            let batch = sample_markov_paths(&spec, 42, 2000).unwrap();
            let est = empirical_tail(
                &batch,
                &count_of_a(10),
                &[0.0, 1.0, 2.0, 4.0],
                MeanMode::PlugIn,
                MetricFlavor::Hamming,
            )
            .unwrap();
            serde_json::to_string(&est).unwrap()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn monte_carlo_concentrates_on_exact_tail() {
        let spec = fixtures::f1();
        let joint = build_markov_joint(&spec).unwrap();
        let phi = count_of_a(3);
        let t = 1.5f64;
        let p = 0.5625f64;
        let count = 2000usize;
        let allowed = 4.0 * (p * (1.0 - p) / count as f64).sqrt();
        let mut within = 0usize;
        for seed in 0..100u64 {
            let batch = sample_markov_paths(&spec, seed, count).unwrap();
            let est = empirical_tail(
                &batch,
                &phi,
                &[t],
                MeanMode::Exact(&joint),
                MetricFlavor::Hamming,
            )
            .unwrap();
            if (est.empirical[0] - p).abs() <= allowed {
                within += 1;
            }
        }
        assert!(within >= 99, "only {within}/100 seeds within 4 sigma");
    }

    #[test]
    fn compare_passes_at_zero_and_on_f1() {
        let spec = fixtures::f1();
        let joint = build_markov_joint(&spec).unwrap();
        let contraction = contraction_profile(&spec);
        let cert =
            Certificate::from_contraction(&contraction, 1.0, MetricFlavor::Hamming).unwrap();

        let exact = exact_tail_estimate(
            &joint,
            &count_of_a(3),
            &[0.0, 0.5, 1.0, 1.5, 2.0, 3.0],
            MetricFlavor::Hamming,
        )
        .unwrap();
        let report = compare(&exact, &cert).unwrap();
        assert!(report.overall_pass);
        assert_eq!(report.rows[0].bound, 2.0);

        let batch = sample_markov_paths(&spec, 42, 20_000).unwrap();
        let est = empirical_tail(
            &batch,
            &count_of_a(3),
            &[0.0, 0.5, 1.0, 1.5, 2.0, 3.0],
            MeanMode::Exact(&joint),
            MetricFlavor::Hamming,
        )
        .unwrap();
        let report = compare(&est, &cert).unwrap();
        assert!(report.overall_pass);

        let tsv = report.to_tsv();
        assert!(tsv.starts_with("t\tempirical"));
        assert_eq!(tsv.lines().count(), 7);
    }

    #[test]
    fn compare_rejects_mismatched_conventions() {
        let spec = fixtures::f1();
        let joint = build_markov_joint(&spec).unwrap();
        let contraction = contraction_profile(&spec);
        let cert =
            Certificate::from_contraction(&contraction, 1.0, MetricFlavor::NormalizedHamming)
                .unwrap();
        let exact = exact_tail_estimate(
            &joint,
            &count_of_a(3),
            &[0.0, 1.0],
            MetricFlavor::Hamming,
        )
        .unwrap();
        assert!(matches!(
            compare(&exact, &cert),
            Err(Error::ConventionMismatch(_))
        ));
    }

    #[test]
    fn halved_constant_certificate_fails_for_sticky_chain() {
        // strongly correlated chain: theta = 0.9, so M_n is large and the
        // halved certificate's tail crosses below the confidence floor
        // inside the grid
        let alphabet = Alphabet::new(["a", "b"]).unwrap();
        let sticky = StochasticMatrix::new(vec![vec![0.95, 0.05], vec![0.05, 0.95]]).unwrap();
        let spec =
            crate::process::MarkovSpec::homogeneous(alphabet, 8, vec![0.5, 0.5], sticky)
                .unwrap();
        let contraction = contraction_profile(&spec);
        let phi = count_of_a(8);
        let batch = sample_markov_paths(&spec, 4242, 20_000).unwrap();
        let grid: Vec<f64> = (0..=60).map(|i| i as f64).collect();
        let joint = build_markov_joint(&spec).unwrap();
        let est = empirical_tail(
            &batch,
            &phi,
            &grid,
            MeanMode::Exact(&joint),
            MetricFlavor::Hamming,
        )
        .unwrap();

        let good = Certificate::from_contraction(&contraction, 1.0, MetricFlavor::Hamming)
            .unwrap();
        assert!(compare(&est, &good).unwrap().overall_pass);

        let halved = Certificate::new(
            spec.n(),
            1.0,
            MetricFlavor::Hamming,
            ConstantKind::Mn,
            contraction.m_n / 2.0,
            "deliberately wrong: constant halved",
        )
        .unwrap();
        let report = compare(&est, &halved).unwrap();
        assert!(!report.overall_pass, "halved certificate must fail somewhere");
        assert!(report.rows.iter().any(|r| !r.pass));
    }

    #[test]
    fn binomial_upper_bound_floor() {
        let floor = binomial_upper_confidence(0, 100_000, 0.95);
        assert!((floor - 3.0e-5).abs() < 5e-6);
        assert_eq!(binomial_upper_confidence(50, 50, 0.95), 1.0);
        let half = binomial_upper_confidence(500, 1000, 0.95);
        assert!(half > 0.5 && half < 0.55);
    }
}
