//! Concentration-of-measure certificates for functions of dependent
//! discrete random sequences.
//!
//! The crate models finite-alphabet processes (explicit joints,
//! inhomogeneous Markov chains, hidden Markov chains), computes their
//! mixing coefficients and contraction bounds, carries the full
//! martingale-difference norm machinery (the Psi functional, an exact
//! Phi-norm oracle over the Lipschitz polytope, BAR extremal functions),
//! assembles Azuma-style tail certificates, and validates everything by
//! brute-force enumeration and reproducible Monte Carlo sampling.
//!
//! Modules follow the pipeline:
//!
//! * [`process`]: alphabets, dense laws, chain specs, Lipschitz functions;
//! * [`mixing`]: eta coefficients, the Delta matrix, contraction bounds;
//! * [`norms`]: martingale-difference kernels, Psi and Phi norms;
//! * [`bar`]: BAR extremal functions via the sign recursion;
//! * [`certificates`]: tail bounds from either constant;
//! * [`montecarlo`]: path sampling, empirical tails, bound comparison;
//! * [`suite`]: the numbered verification suites run by `verify`.

pub mod bar;
pub mod certificates;
pub mod error;
pub mod fixtures;
pub mod indexing;
pub mod mixing;
pub mod montecarlo;
pub mod norms;
pub mod process;
pub mod specdoc;
pub mod suite;

/// Schema tag stamped on every serialized report.
pub const REPORT_SCHEMA: &str = "mixconc/1";

pub use bar::{bar_count, build_bar, sign_sequence, verify_extremal, BarFunction, ExtremalReport,
    SignFunction, SignSequence};
pub use certificates::{
    azuma_bound, certify_general, certify_markov, concentration_alpha, median_bound,
    median_threshold, Certificate, CertificateReport, ConstantKind, MetricFlavor,
};
pub use error::{Error, Result};
pub use mixing::{
    apply_kernel_transpose, contraction_profile, eta, eta_bar, hmm_eta_bound, markov_eta_bound,
    mixing_profile, theta, ContractionProfile, MixingProfile,
};
pub use montecarlo::{
    compare, empirical_tail, exact_tail_estimate, sample_hmm_paths, sample_markov_paths,
    CompareReport, MeanMode, PathBatch, TailEstimate,
};
pub use norms::{
    inner, kappa_pair, kappa_prefix, martingale_diff, martingale_sup_profile, phi_norm_oracle,
    phi_norm_oracle_with_budget, prefix_reduce, project, psi, psi_norm, section, DiffMode,
    KernelFn, PhiOracleResult,
};
pub use process::{
    build_hmm_joint, build_markov_joint, conditional, truncate, tv_distance, Alphabet, HmmSpec,
    JointDist, LipschitzFn, MarkovSpec, Pmf, StochasticMatrix,
};
pub use specdoc::{ProcessDoc, ProcessModel};
