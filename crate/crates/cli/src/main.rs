//! `mixconc`: concentration certificates for dependent discrete
//! sequences from the command line.
//!
//! Reads a JSON process-spec document (markov, hmm, or explicit joint),
//! dispatches to the analysis library, and emits versioned JSON reports
//! (plus optional TSV for simulation comparisons). Validation failures
//! exit 1 with a machine-readable error on stderr; capacity and oracle
//! budget exhaustion exit 2.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use mixconc_core::{
    bar, error::Error, indexing, mixing, montecarlo, norms, suite, Certificate,
    CertificateReport, LipschitzFn, MetricFlavor, ProcessDoc, ProcessModel, REPORT_SCHEMA,
};

#[derive(Parser)]
#[command(
    name = "mixconc",
    about = "Concentration certificates for dependent discrete sequences",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SpecArgs {
    /// Path to the JSON process-spec document.
    #[arg(long)]
    spec: PathBuf,
    /// Dense-enumeration cell budget (overrides MIXCONC_BUDGET).
    #[arg(long)]
    budget: Option<u64>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct CertArgs {
    /// Lipschitz constant of the target function class.
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// Metric flavor: hamming or normalized-hamming.
    #[arg(long, default_value = "hamming")]
    metric: String,
    /// Constant to certify with: delta (exact mixing norm) or mn
    /// (contraction product bound).
    #[arg(long, default_value = "mn")]
    constant: String,
    /// Deviation grid, either start:step:end or a comma list.
    #[arg(long, default_value = "0:0.25:3")]
    t: String,
}

#[derive(Subcommand)]
enum Command {
    /// Mixing coefficients, row sums, and the matrix infinity norm.
    Mixing(SpecArgs),
    /// Per-step contraction coefficients and the product bound M_n.
    Contraction(SpecArgs),
    /// Tail-bound certificate over a deviation grid.
    Certify {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        cert: CertArgs,
    },
    /// Psi functional and norm of a prefix martingale-difference kernel.
    Psi {
        #[command(flatten)]
        spec: SpecArgs,
        /// Conditioning prefix as comma-separated symbol labels.
        #[arg(long)]
        prefix: String,
        /// Level i; must equal the prefix length when given.
        #[arg(long)]
        i: Option<usize>,
    },
    /// Exact Phi-norm of a prefix kernel by vertex enumeration.
    PhiOracle {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        prefix: String,
        #[arg(long)]
        i: Option<usize>,
        /// Candidate budget for the oracle enumeration.
        #[arg(long, default_value_t = norms::DEFAULT_ORACLE_BUDGET)]
        oracle_budget: u64,
    },
    /// BAR extremal function construction and extremality report.
    Bar {
        #[command(flatten)]
        spec: SpecArgs,
        /// Symbol whose prefix kernel seeds the construction.
        #[arg(long)]
        z: String,
        /// Martingale-difference level for the extremality check.
        #[arg(long, default_value_t = 1)]
        i: usize,
        #[arg(long, default_value_t = norms::DEFAULT_ORACLE_BUDGET)]
        oracle_budget: u64,
    },
    /// Sample paths, estimate deviation tails, compare to a certificate.
    Simulate {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        cert: CertArgs,
        /// Functional: hamming-weight:<label>, bar:<rows>, or
        /// table:<json-path>.
        #[arg(long)]
        functional: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        count: usize,
        /// Mean mode: exact (enumerates the joint) or plugin.
        #[arg(long, default_value = "plugin")]
        mean: String,
        /// Also write the comparison as a TSV table.
        #[arg(long)]
        tsv: Option<PathBuf>,
    },
    /// Run the verification suites; exit 0 iff all pass.
    Verify {
        /// Suite name, comma list, or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    schema: &'a str,
    error: ErrorBody,
}

#[derive(Serialize)]
struct ErrorBody {
    kind: String,
    message: String,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // keep clap's rendered help/usage but normalize the exit code
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            let report = ErrorReport {
                schema: REPORT_SCHEMA,
                error: ErrorBody {
                    kind: e.kind().to_string(),
                    message: e.to_string(),
                },
            };
            eprintln!("{}", serde_json::to_string(&report).unwrap());
            ExitCode::from(if e.is_capacity() { 2 } else { 1 })
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Mixing(args) => {
            let (model, budget) = load(&args)?;
            let joint = model.joint(budget)?;
            let profile = mixing::mixing_profile(&joint)?;
            emit(&args.out, &MixingReport::new(&model, profile))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Contraction(args) => {
            let (model, _) = load(&args)?;
            let report = match &model {
                ProcessModel::Markov(spec) => {
                    ContractionReport::new("markov", mixing::contraction_profile(spec))
                }
                ProcessModel::Hmm(spec) => ContractionReport::new(
                    "hmm-hidden",
                    mixing::contraction_profile(spec.hidden()),
                ),
                ProcessModel::Joint(_) => {
                    return Err(Error::InvalidParameter(
                        "contraction coefficients need a markov or hmm spec".into(),
                    ))
                }
            };
            emit(&args.out, &report)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Certify { spec, cert } => {
            let (model, budget) = load(&spec)?;
            let t_grid = parse_t_grid(&cert.t)?;
            let certificate = build_certificate(&model, &cert, budget)?;
            emit(&spec.out, &certificate.grid_report(&t_grid))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Psi { spec, prefix, i } => {
            let (model, budget) = load(&spec)?;
            let (joint, z) = prefix_kernel_inputs(&model, &prefix, i, budget)?;
            let kernel = norms::kappa_prefix(&joint, &z)?;
            let reduced = norms::prefix_reduce(&kernel, &z[..z.len() - 1])?;
            let report = PsiReport {
                schema: REPORT_SCHEMA,
                i: z.len(),
                prefix: labels_of(&model, &z),
                psi: norms::psi(&reduced),
                psi_negated: norms::psi(&reduced.scale(-1.0)),
                psi_norm: norms::psi_norm(&reduced),
                full_length_psi_norm: norms::psi_norm(&kernel),
                kernel_sum: kernel.total(),
            };
            emit(&spec.out, &report)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::PhiOracle {
            spec,
            prefix,
            i,
            oracle_budget,
        } => {
            let (model, budget) = load(&spec)?;
            let (joint, z) = prefix_kernel_inputs(&model, &prefix, i, budget)?;
            let kernel = norms::kappa_prefix(&joint, &z)?;
            let reduced = norms::prefix_reduce(&kernel, &z[..z.len() - 1])?;
            let oracle = norms::phi_norm_oracle_with_budget(&reduced, oracle_budget)?;
            let report = PhiOracleReport {
                schema: REPORT_SCHEMA,
                i: z.len(),
                prefix: labels_of(&model, &z),
                value: oracle.value,
                psi_norm: norms::psi_norm(&reduced),
                vertex_count: oracle.vertex_count,
                argmax: match oracle.argmax {
                    LipschitzFn::Table { values, .. } => values,
                    _ => unreachable!("oracle maximizers are tables"),
                },
            };
            emit(&spec.out, &report)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Bar {
            spec,
            z,
            i,
            oracle_budget,
        } => {
            let (model, _) = load(&spec)?;
            let markov = match &model {
                ProcessModel::Markov(m) => m,
                _ => {
                    return Err(Error::InvalidParameter(
                        "BAR construction needs a markov spec".into(),
                    ))
                }
            };
            let symbol = markov.alphabet().index_of(&z)?;
            let sequence = bar::sign_sequence(markov, symbol)?;
            let bar_fn = bar::build_bar(markov, symbol)?;
            let extremal = bar::verify_extremal_with_budget(markov, i, oracle_budget)?;
            let report = BarReport {
                schema: REPORT_SCHEMA,
                z,
                sign_levels: sequence
                    .levels
                    .iter()
                    .map(|level| level.values.clone())
                    .collect(),
                full_support: sequence.full_support,
                bar_rows: bar_fn.to_bit_strings(),
                extremal,
            };
            emit(&spec.out, &report)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate {
            spec,
            cert,
            functional,
            seed,
            count,
            mean,
            tsv,
        } => {
            let (model, budget) = load(&spec)?;
            let t_grid = parse_t_grid(&cert.t)?;
            let metric = MetricFlavor::parse(&cert.metric)?;
            let phi = parse_functional(&functional, &model)?;
            let batch = match &model {
                ProcessModel::Markov(m) => montecarlo::sample_markov_paths(m, seed, count)?,
                ProcessModel::Hmm(h) => montecarlo::sample_hmm_paths(h, seed, count)?,
                ProcessModel::Joint(_) => {
                    return Err(Error::InvalidParameter(
                        "simulate needs a markov or hmm spec to sample from".into(),
                    ))
                }
            };
            let joint_for_mean;
            let mean_mode = match mean.as_str() {
                "plugin" => montecarlo::MeanMode::PlugIn,
                "exact" => {
                    joint_for_mean = model.joint(budget)?;
                    montecarlo::MeanMode::Exact(&joint_for_mean)
                }
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "unknown mean mode {other:?}; expected exact or plugin"
                    )))
                }
            };
            let estimate = montecarlo::empirical_tail(&batch, &phi, &t_grid, mean_mode, metric)?;
            let certificate = build_certificate(&model, &cert, budget)?;
            let comparison = montecarlo::compare(&estimate, &certificate)?;
            if let Some(path) = tsv {
                fs::write(&path, comparison.to_tsv())
                    .map_err(|e| Error::InvalidParameter(format!("cannot write {path:?}: {e}")))?;
            }
            let report = SimulateReport {
                schema: REPORT_SCHEMA,
                estimate,
                certificate: certificate.grid_report(&t_grid),
                comparison,
            };
            emit(&spec.out, &report)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { suite, out } => {
            let outcomes = suite::run(&suite)?;
            let overall = outcomes.iter().all(|o| o.pass);
            for outcome in &outcomes {
                let verdict = if outcome.pass { "PASS" } else { "FAIL" };
                eprintln!("[{verdict}] {}: {}", outcome.id, outcome.details);
            }
            let report = VerifyReport {
                schema: REPORT_SCHEMA,
                overall_pass: overall,
                outcomes,
            };
            emit(&out, &report)?;
            Ok(if overall {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

// ---------------------------------------------------------------------
// report shapes

#[derive(Serialize)]
struct MixingReport {
    schema: &'static str,
    n: usize,
    alphabet: Vec<String>,
    eta_bar: Vec<Vec<f64>>,
    h_rows: Vec<f64>,
    inf_norm: f64,
}

impl MixingReport {
    fn new(model: &ProcessModel, profile: mixing::MixingProfile) -> Self {
        MixingReport {
            schema: REPORT_SCHEMA,
            n: profile.n,
            alphabet: model.alphabet().labels().to_vec(),
            eta_bar: profile.eta_bar,
            h_rows: profile.h_rows,
            inf_norm: profile.inf_norm,
        }
    }
}

#[derive(Serialize)]
struct ContractionReport {
    schema: &'static str,
    source: &'static str,
    n: usize,
    thetas: Vec<f64>,
    m_n: f64,
}

impl ContractionReport {
    fn new(source: &'static str, profile: mixing::ContractionProfile) -> Self {
        ContractionReport {
            schema: REPORT_SCHEMA,
            source,
            n: profile.n,
            thetas: profile.thetas,
            m_n: profile.m_n,
        }
    }
}

#[derive(Serialize)]
struct PsiReport {
    schema: &'static str,
    i: usize,
    prefix: Vec<String>,
    psi: f64,
    psi_negated: f64,
    psi_norm: f64,
    full_length_psi_norm: f64,
    kernel_sum: f64,
}

#[derive(Serialize)]
struct PhiOracleReport {
    schema: &'static str,
    i: usize,
    prefix: Vec<String>,
    value: f64,
    psi_norm: f64,
    vertex_count: usize,
    argmax: Vec<f64>,
}

#[derive(Serialize)]
struct BarReport {
    schema: &'static str,
    z: String,
    sign_levels: Vec<Vec<f64>>,
    full_support: bool,
    bar_rows: Vec<String>,
    extremal: bar::ExtremalReport,
}

#[derive(Serialize)]
struct SimulateReport {
    schema: &'static str,
    estimate: montecarlo::TailEstimate,
    certificate: CertificateReport,
    comparison: montecarlo::CompareReport,
}

#[derive(Serialize)]
struct VerifyReport {
    schema: &'static str,
    overall_pass: bool,
    outcomes: Vec<suite::CriterionOutcome>,
}

// ---------------------------------------------------------------------
// helpers

fn load(args: &SpecArgs) -> Result<(ProcessModel, u64), Error> {
    let budget = args
        .budget
        .or_else(|| {
            std::env::var("MIXCONC_BUDGET")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(indexing::DEFAULT_CELL_BUDGET);
    let text = fs::read_to_string(&args.spec)
        .map_err(|e| Error::InvalidParameter(format!("cannot read {:?}: {e}", args.spec)))?;
    Ok((ProcessDoc::from_json(&text)?.build()?, budget))
}

fn emit<T: Serialize>(out: &Option<PathBuf>, report: &T) -> Result<(), Error> {
    let mut text = serde_json::to_string_pretty(report)
        .map_err(|e| Error::InvalidParameter(format!("serialization failed: {e}")))?;
    text.push('\n');
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Error::InvalidParameter(format!("cannot write {path:?}: {e}"))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Parses `start:step:end` (inclusive of `end` when it falls within 1e-12
/// of a grid point) or an explicit comma list.
fn parse_t_grid(text: &str) -> Result<Vec<f64>, Error> {
    let bad = |why: &str| Error::InvalidParameter(format!("bad t grid {text:?}: {why}"));
    let values: Vec<f64> = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected start:step:end"));
        }
        let start: f64 = parts[0].parse().map_err(|_| bad("bad start"))?;
        let step: f64 = parts[1].parse().map_err(|_| bad("bad step"))?;
        let end: f64 = parts[2].parse().map_err(|_| bad("bad end"))?;
        if step <= 0.0 {
            return Err(bad("step must be positive"));
        }
        let mut out = Vec::new();
        let mut k = 0u64;
        loop {
            let t = start + step * k as f64;
            if t > end + 1e-12 {
                break;
            }
            out.push(t);
            k += 1;
        }
        out
    } else {
        text.split(',')
            .map(|v| v.trim().parse().map_err(|_| bad("bad entry")))
            .collect::<Result<_, _>>()?
    };
    if values.is_empty() {
        return Err(bad("empty grid"));
    }
    if values[0] < 0.0 || values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(bad("grid must be nonnegative and strictly increasing"));
    }
    Ok(values)
}

fn build_certificate(
    model: &ProcessModel,
    cert: &CertArgs,
    budget: u64,
) -> Result<Certificate, Error> {
    let metric = MetricFlavor::parse(&cert.metric)?;
    match cert.constant.as_str() {
        "delta" => {
            let joint = model.joint(budget)?;
            let profile = mixing::mixing_profile(&joint)?;
            Certificate::from_mixing(&profile, cert.c, metric)
        }
        "mn" => {
            let profile = match model {
                ProcessModel::Markov(spec) => mixing::contraction_profile(spec),
                ProcessModel::Hmm(spec) => mixing::contraction_profile(spec.hidden()),
                ProcessModel::Joint(_) => {
                    return Err(Error::InvalidParameter(
                        "constant=mn needs a markov or hmm spec; use constant=delta".into(),
                    ))
                }
            };
            Certificate::from_contraction(&profile, cert.c, metric)
        }
        other => Err(Error::InvalidParameter(format!(
            "unknown constant {other:?}; expected delta or mn"
        ))),
    }
}

fn prefix_kernel_inputs(
    model: &ProcessModel,
    prefix: &str,
    i: Option<usize>,
    budget: u64,
) -> Result<(mixconc_core::JointDist, Vec<usize>), Error> {
    let alphabet = model.alphabet();
    let z: Vec<usize> = prefix
        .split(',')
        .map(|label| alphabet.index_of(label.trim()))
        .collect::<Result<_, _>>()?;
    if let Some(level) = i {
        if level != z.len() {
            return Err(Error::InvalidParameter(format!(
                "--i {level} does not match the prefix length {}",
                z.len()
            )));
        }
    }
    Ok((model.joint(budget)?, z))
}

fn labels_of(model: &ProcessModel, z: &[usize]) -> Vec<String> {
    z.iter()
        .map(|&d| model.alphabet().label(d).to_string())
        .collect()
}

fn parse_functional(text: &str, model: &ProcessModel) -> Result<LipschitzFn, Error> {
    if let Some(path) = text.strip_prefix("table:") {
        let raw = fs::read_to_string(path)
            .map_err(|e| Error::InvalidParameter(format!("cannot read {path:?}: {e}")))?;
        let values: Vec<f64> = serde_json::from_str(&raw)
            .map_err(|e| Error::InvalidParameter(format!("bad table file {path:?}: {e}")))?;
        return LipschitzFn::table(model.alphabet().len(), model.n(), values);
    }
    LipschitzFn::parse_named(text, model.alphabet(), model.n())
}
