//! Concentration certificates and tail-bound evaluation.
//!
//! A certificate packages the sequence length, the declared Lipschitz
//! constant, the metric flavor and one constant (the mixing-matrix norm,
//! the contraction bound `M_n`, or an explicit Azuma `D`) into a tail
//! bound `t -> 2 exp(-t^2 / ...)`. Bounds are reported raw (they may
//! exceed 1) with a clipped `effective` value alongside.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mixing::{ContractionProfile, MixingProfile};

/// Which Hamming metric the Lipschitz constant refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricFlavor {
    Hamming,
    NormalizedHamming,
}

impl MetricFlavor {
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "hamming" => Ok(MetricFlavor::Hamming),
            "normalized-hamming" => Ok(MetricFlavor::NormalizedHamming),
            other => Err(Error::InvalidParameter(format!(
                "unknown metric {other:?}; expected hamming or normalized-hamming"
            ))),
        }
    }
}

/// Which constant the certificate carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstantKind {
    /// The infinity norm of the mixing-coefficient matrix.
    DeltaInfNorm,
    /// The contraction product bound `M_n`.
    Mn,
    /// An explicit Azuma constant `D`.
    ExplicitD,
}

/// A concentration certificate: `bound(t)` is a valid upper bound on
/// `P{|phi - E phi| >= t}` for any `c`-Lipschitz `phi` in the stated
/// metric.
#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub n: usize,
    pub c: f64,
    pub metric: MetricFlavor,
    pub constant_kind: ConstantKind,
    pub constant: f64,
    /// Provenance note, e.g. which profile produced the constant.
    pub note: String,
}

impl Certificate {
    pub fn new(
        n: usize,
        c: f64,
        metric: MetricFlavor,
        constant_kind: ConstantKind,
        constant: f64,
        note: impl Into<String>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("certificate needs n >= 1".into()));
        }
        if !c.is_finite() || c <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "lipschitz constant must be positive, got {c}"
            )));
        }
        if !constant.is_finite() || constant <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "certificate constant must be positive, got {constant}"
            )));
        }
        if matches!(constant_kind, ConstantKind::DeltaInfNorm | ConstantKind::Mn)
            && constant < 1.0
        {
            return Err(Error::InvalidParameter(format!(
                "mixing-norm constants are >= 1, got {constant}"
            )));
        }
        Ok(Certificate {
            n,
            c,
            metric,
            constant_kind,
            constant,
            note: note.into(),
        })
    }

    /// Certificate from an exhaustively computed mixing profile.
    pub fn from_mixing(profile: &MixingProfile, c: f64, metric: MetricFlavor) -> Result<Self> {
        Certificate::new(
            profile.n,
            c,
            metric,
            ConstantKind::DeltaInfNorm,
            profile.inf_norm,
            "delta matrix infinity norm from exhaustive eta enumeration",
        )
    }

    /// Certificate from per-step contraction coefficients.
    pub fn from_contraction(
        profile: &ContractionProfile,
        c: f64,
        metric: MetricFlavor,
    ) -> Result<Self> {
        Certificate::new(
            profile.n,
            c,
            metric,
            ConstantKind::Mn,
            profile.m_n,
            "contraction product bound M_n",
        )
    }

    /// Raw tail bound at deviation `t >= 0`; may exceed 1.
    pub fn bound(&self, t: f64) -> f64 {
        let n = self.n as f64;
        let exponent = match self.constant_kind {
            ConstantKind::ExplicitD => t * t / (2.0 * self.constant * self.constant),
            _ => {
                let k = self.c * self.constant;
                match self.metric {
                    MetricFlavor::Hamming => t * t / (2.0 * n * k * k),
                    MetricFlavor::NormalizedHamming => n * t * t / (2.0 * k * k),
                }
            }
        };
        2.0 * (-exponent).exp()
    }

    /// `min(bound(t), 1)`.
    pub fn effective(&self, t: f64) -> f64 {
        self.bound(t).min(1.0)
    }

    /// Evaluates the certificate on a grid for serialization.
    pub fn grid_report(&self, t_grid: &[f64]) -> CertificateReport {
        CertificateReport {
            schema: crate::REPORT_SCHEMA.to_string(),
            n: self.n,
            c: self.c,
            metric: self.metric,
            constant_kind: self.constant_kind,
            constant: self.constant,
            note: self.note.clone(),
            t_grid: t_grid.to_vec(),
            bound: t_grid.iter().map(|&t| self.bound(t)).collect(),
            effective: t_grid.iter().map(|&t| self.effective(t)).collect(),
        }
    }
}

/// Serialized form of a certificate evaluated over a grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateReport {
    pub schema: String,
    pub n: usize,
    pub c: f64,
    pub metric: MetricFlavor,
    pub constant_kind: ConstantKind,
    pub constant: f64,
    pub note: String,
    pub t_grid: Vec<f64>,
    pub bound: Vec<f64>,
    pub effective: Vec<f64>,
}

/// The Azuma–Hoeffding tail `2 exp(-r^2 / (2 D^2))`; the caller owes
/// `D^2 >= sum of squared martingale-difference sup norms`.
pub fn azuma_bound(d: f64, r: f64) -> Result<f64> {
    if !d.is_finite() || d <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "azuma constant must be positive, got {d}"
        )));
    }
    if r.is_nan() || r < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "deviation must be nonnegative, got {r}"
        )));
    }
    Ok(2.0 * (-(r * r) / (2.0 * d * d)).exp())
}

/// Tail bound for a `c`-Lipschitz function (unnormalized Hamming metric)
/// via the exact mixing-matrix norm: `2 exp(-t^2 / (2 n c^2 ||Delta||^2))`.
pub fn certify_general(profile: &MixingProfile, c: f64, t: f64) -> Result<f64> {
    let cert = Certificate::from_mixing(profile, c, MetricFlavor::Hamming)?;
    check_t(t)?;
    Ok(cert.bound(t))
}

/// Tail bound for a Markov chain via the contraction surrogate `M_n`, in
/// either metric flavor.
pub fn certify_markov(
    profile: &ContractionProfile,
    c: f64,
    t: f64,
    metric: MetricFlavor,
) -> Result<f64> {
    let cert = Certificate::from_contraction(profile, c, metric)?;
    check_t(t)?;
    Ok(cert.bound(t))
}

/// The concentration function `alpha(t) = 2 exp(-n t^2 / (2 ||Delta||^2))`
/// for 1-Lipschitz functions in the normalized Hamming metric.
pub fn concentration_alpha(profile: &MixingProfile, t: f64) -> Result<f64> {
    check_t(t)?;
    let cert = Certificate::from_mixing(profile, 1.0, MetricFlavor::NormalizedHamming)?;
    Ok(cert.bound(t))
}

/// The deviation at which `alpha` crosses 1/2: `||Delta|| sqrt(2 ln 4 / n)`.
pub fn median_threshold(profile: &MixingProfile) -> f64 {
    profile.inf_norm * (2.0 * 4.0f64.ln() / profile.n as f64).sqrt()
}

/// Median concentration bound `alpha(t - t0)` with `t0 = alpha^{-1}(1/2)`,
/// valid only for `t` above the threshold; smaller `t` is an error
/// carrying the threshold.
pub fn median_bound(profile: &MixingProfile, t: f64) -> Result<f64> {
    check_t(t)?;
    let threshold = median_threshold(profile);
    if t <= threshold {
        return Err(Error::BelowMedianThreshold { t, threshold });
    }
    let n = profile.n as f64;
    let z = t / profile.inf_norm - (2.0 * 4.0f64.ln() / n).sqrt();
    Ok(2.0 * (-(n / 2.0) * z * z).exp())
}

fn check_t(t: f64) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "deviation must be nonnegative, got {t}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::mixing::{contraction_profile, mixing_profile};
    use crate::process::build_markov_joint;

    fn f1_profiles() -> (MixingProfile, ContractionProfile) {
        let spec = fixtures::f1();
        let joint = build_markov_joint(&spec).unwrap();
        (mixing_profile(&joint).unwrap(), contraction_profile(&spec))
    }

    #[test]
    fn azuma_values() {
        assert_eq!(azuma_bound(1.0, 0.0).unwrap(), 2.0);
        assert!((azuma_bound(1.0, 2.0).unwrap() - 2.0 * (-2.0f64).exp()).abs() < 1e-15);
        assert!(azuma_bound(0.0, 1.0).is_err());
        assert!(azuma_bound(-1.0, 1.0).is_err());
        assert!(azuma_bound(1.0, -0.5).is_err());
        // monotone: decreasing in r, increasing in D
        assert!(azuma_bound(1.0, 2.0).unwrap() < azuma_bound(1.0, 1.0).unwrap());
        assert!(azuma_bound(2.0, 1.0).unwrap() > azuma_bound(1.0, 1.0).unwrap());
    }

    #[test]
    fn certify_general_values() {
        let (mixing, _) = f1_profiles();
        let v = certify_general(&mixing, 1.0, 1.0).unwrap();
        let expected = 2.0 * (-1.0f64 / (2.0 * 3.0 * 1.75 * 1.75)).exp();
        assert!((v - expected).abs() < 1e-15);
        assert!((v - 1.8939).abs() < 5e-4);
        assert_eq!(certify_general(&mixing, 1.0, 0.0).unwrap(), 2.0);
        assert!(certify_general(&mixing, 0.0, 1.0).is_err());
    }

    #[test]
    fn product_measure_recovers_mcdiarmid_shape() {
        let alphabet = crate::process::Alphabet::new(["a", "b"]).unwrap();
        let k =
            crate::process::StochasticMatrix::new(vec![vec![0.4, 0.6], vec![0.4, 0.6]]).unwrap();
        let spec =
            crate::process::MarkovSpec::homogeneous(alphabet, 3, vec![0.4, 0.6], k).unwrap();
        let joint = build_markov_joint(&spec).unwrap();
        let profile = mixing_profile(&joint).unwrap();
        for &t in &[0.5, 1.0, 2.0] {
            let v = certify_general(&profile, 1.0, t).unwrap();
            let expected = 2.0 * (-t * t / (2.0 * 3.0)).exp();
            assert!((v - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn certify_markov_matches_formula_and_general_at_zero_contraction() {
        let (_, contraction) = f1_profiles();
        let v = certify_markov(&contraction, 1.0, 1.0, MetricFlavor::Hamming).unwrap();
        let expected = 2.0 * (-1.0f64 / (2.0 * 3.0 * 1.75 * 1.75)).exp();
        assert!((v - expected).abs() < 1e-15);

        // theta = 0 chain: M_n = 1, same bound as the product-measure case
        let alphabet = crate::process::Alphabet::new(["a", "b"]).unwrap();
        let flat =
            crate::process::StochasticMatrix::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let spec =
            crate::process::MarkovSpec::homogeneous(alphabet, 3, vec![0.5, 0.5], flat).unwrap();
        let joint = build_markov_joint(&spec).unwrap();
        let mix = mixing_profile(&joint).unwrap();
        let con = contraction_profile(&spec);
        for &t in &[0.0, 0.5, 1.5] {
            let a = certify_markov(&con, 1.0, t, MetricFlavor::Hamming).unwrap();
            let b = certify_general(&mix, 1.0, t).unwrap();
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn normalized_uniform_contraction_dominates_exact_mn() {
        // with theta_i <= theta_bar, the 1/(1 - theta_bar) surrogate bound
        // is looser (larger) than the exact-M_n bound
        let theta_bar = 0.5f64;
        let (_, contraction) = f1_profiles();
        let limit = 1.0 / (1.0 - theta_bar);
        for &t in &[0.1, 0.3, 0.7] {
            let exact = certify_markov(&contraction, 1.0, t, MetricFlavor::NormalizedHamming)
                .unwrap();
            let n = contraction.n as f64;
            let surrogate = 2.0 * (-n * t * t / (2.0 * limit * limit)).exp();
            assert!(surrogate >= exact - 1e-15);
        }
    }

    #[test]
    fn pipeline_matches_azuma() {
        let (mixing, _) = f1_profiles();
        let c = 0.7;
        let d = (mixing.n as f64).sqrt() * c * mixing.inf_norm;
        for &t in &[0.0, 0.4, 1.1, 2.5] {
            let a = certify_general(&mixing, c, t).unwrap();
            let b = azuma_bound(d, t).unwrap();
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn general_dominated_by_markov_surrogate() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let spec = crate::suite::random_markov_spec(&mut rng, 3, 2, false);
            let joint = build_markov_joint(&spec).unwrap();
            let mix = mixing_profile(&joint).unwrap();
            let con = contraction_profile(&spec);
            for &t in &[0.2, 0.8, 1.6] {
                let tight = certify_general(&mix, 1.0, t).unwrap();
                let loose = certify_markov(&con, 1.0, t, MetricFlavor::Hamming).unwrap();
                assert!(tight <= loose + 1e-15);
            }
        }
    }

    #[test]
    fn alpha_values_and_inverse() {
        let (mixing, _) = f1_profiles();
        assert_eq!(concentration_alpha(&mixing, 0.0).unwrap(), 2.0);
        let t0 = median_threshold(&mixing);
        assert!((concentration_alpha(&mixing, t0).unwrap() - 0.5).abs() < 1e-12);

        // product measure at n = 100, t = 0.3
        let uniform = MixingProfile {
            n: 100,
            eta_bar: vec![],
            h_rows: vec![],
            inf_norm: 1.0,
        };
        let v = concentration_alpha(&uniform, 0.3).unwrap();
        assert!((v - 2.0 * (-4.5f64).exp()).abs() < 1e-15);
        assert!((v - 0.0222).abs() < 5e-5);
    }

    #[test]
    fn median_bound_threshold_and_value() {
        let (mixing, _) = f1_profiles();
        let t0 = median_threshold(&mixing);
        match median_bound(&mixing, t0 * 0.5) {
            Err(Error::BelowMedianThreshold { threshold, .. }) => {
                assert!((threshold - t0).abs() < 1e-15)
            }
            other => panic!("expected threshold error, got {other:?}"),
        }
        for &t in &[t0 * 1.1, t0 * 2.0, t0 + 0.5] {
            let direct = median_bound(&mixing, t).unwrap();
            let via_alpha = concentration_alpha(&mixing, t - t0).unwrap();
            assert!((direct - via_alpha).abs() < 1e-12);
        }
    }

    #[test]
    fn bounds_reported_raw_with_effective_clip() {
        let (mixing, _) = f1_profiles();
        let cert = Certificate::from_mixing(&mixing, 1.0, MetricFlavor::Hamming).unwrap();
        assert!(cert.bound(0.1) > 1.0);
        assert_eq!(cert.effective(0.1), 1.0);
        let report = cert.grid_report(&[0.0, 1.0, 10.0]);
        assert_eq!(report.bound.len(), 3);
        assert_eq!(report.bound[0], 2.0);
        assert!(report.effective.iter().all(|&v| v <= 1.0));
        // monotone nonincreasing in t
        assert!(report.bound[0] >= report.bound[1] && report.bound[1] >= report.bound[2]);
    }

    #[test]
    fn certificate_rejects_sub_unit_mixing_constants() {
        assert!(Certificate::new(
            3,
            1.0,
            MetricFlavor::Hamming,
            ConstantKind::Mn,
            0.9,
            "bad"
        )
        .is_err());
        assert!(Certificate::new(
            3,
            1.0,
            MetricFlavor::Hamming,
            ConstantKind::ExplicitD,
            0.9,
            "fine for explicit D"
        )
        .is_ok());
    }
}
