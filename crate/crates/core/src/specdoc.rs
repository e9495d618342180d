//! The JSON process-spec document consumed by the CLI.
//!
//! ```json
//! {"type": "markov", "alphabet": ["a", "b"], "n": 3,
//!  "p0": [0.5, 0.5],
//!  "kernels": [[[0.75, 0.25], [0.25, 0.75]]], "homogeneous": true}
//! ```
//!
//! `hmm` documents add `hidden_alphabet` and `emissions` (with `p0` and
//! `kernels` describing the hidden chain); `joint` documents carry a flat
//! `mass` array in row-major multi-index order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::process::{
    Alphabet, HmmSpec, JointDist, MarkovSpec, Pmf, StochasticMatrix,
};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ProcessDoc {
    Markov {
        alphabet: Vec<String>,
        n: usize,
        p0: Vec<f64>,
        kernels: Vec<Vec<Vec<f64>>>,
        #[serde(default)]
        homogeneous: bool,
    },
    Hmm {
        alphabet: Vec<String>,
        hidden_alphabet: Vec<String>,
        n: usize,
        p0: Vec<f64>,
        kernels: Vec<Vec<Vec<f64>>>,
        #[serde(default)]
        homogeneous: bool,
        emissions: Vec<Vec<Vec<f64>>>,
        #[serde(default)]
        homogeneous_emissions: bool,
    },
    Joint {
        alphabet: Vec<String>,
        n: usize,
        mass: Vec<f64>,
    },
}

/// A parsed process: either generators or an explicit joint law.
#[derive(Debug, Clone)]
pub enum ProcessModel {
    Markov(MarkovSpec),
    Hmm(HmmSpec),
    Joint(JointDist),
}

impl ProcessModel {
    pub fn n(&self) -> usize {
        match self {
            ProcessModel::Markov(spec) => spec.n(),
            ProcessModel::Hmm(spec) => spec.n(),
            ProcessModel::Joint(dist) => dist.n(),
        }
    }

    /// The observed alphabet of the process.
    pub fn alphabet(&self) -> &Alphabet {
        match self {
            ProcessModel::Markov(spec) => spec.alphabet(),
            ProcessModel::Hmm(spec) => spec.observed_alphabet(),
            ProcessModel::Joint(dist) => dist.alphabet(),
        }
    }

    /// The observed joint law, built within the given cell budget.
    pub fn joint(&self, budget: u64) -> Result<JointDist> {
        match self {
            ProcessModel::Markov(spec) => {
                crate::process::build_markov_joint_with_budget(spec, budget)
            }
            ProcessModel::Hmm(spec) => {
                Ok(crate::process::build_hmm_joint_with_budget(spec, budget)?.1)
            }
            ProcessModel::Joint(dist) => Ok(dist.clone()),
        }
    }
}

impl ProcessDoc {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::InvalidParameter(format!("cannot parse process spec: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("process docs serialize")
    }

    /// Validates and converts the document into model types.
    pub fn build(&self) -> Result<ProcessModel> {
        match self {
            ProcessDoc::Markov {
                alphabet,
                n,
                p0,
                kernels,
                homogeneous,
            } => {
                let alphabet = Alphabet::new(alphabet.iter().cloned())?;
                let kernels = parse_kernels(kernels)?;
                Ok(ProcessModel::Markov(MarkovSpec::new(
                    alphabet,
                    *n,
                    p0.clone(),
                    kernels,
                    *homogeneous,
                )?))
            }
            ProcessDoc::Hmm {
                alphabet,
                hidden_alphabet,
                n,
                p0,
                kernels,
                homogeneous,
                emissions,
                homogeneous_emissions,
            } => {
                let observed = Alphabet::new(alphabet.iter().cloned())?;
                let hidden_alphabet = Alphabet::new(hidden_alphabet.iter().cloned())?;
                let hidden = MarkovSpec::new(
                    hidden_alphabet,
                    *n,
                    p0.clone(),
                    parse_kernels(kernels)?,
                    *homogeneous,
                )?;
                Ok(ProcessModel::Hmm(HmmSpec::new(
                    hidden,
                    observed,
                    parse_kernels(emissions)?,
                    *homogeneous_emissions,
                )?))
            }
            ProcessDoc::Joint { alphabet, n, mass } => {
                let alphabet = Alphabet::new(alphabet.iter().cloned())?;
                Ok(ProcessModel::Joint(JointDist::new(Pmf::new(
                    alphabet,
                    *n,
                    mass.clone(),
                )?)))
            }
        }
    }
}

fn parse_kernels(raw: &[Vec<Vec<f64>>]) -> Result<Vec<StochasticMatrix>> {
    raw.iter()
        .map(|rows| StochasticMatrix::new(rows.clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const F1_JSON: &str = r#"{
        "type": "markov",
        "alphabet": ["a", "b"],
        "n": 3,
        "p0": [0.5, 0.5],
        "kernels": [[[0.75, 0.25], [0.25, 0.75]]],
        "homogeneous": true
    }"#;

    #[test]
    fn parses_markov_document() {
        let doc = ProcessDoc::from_json(F1_JSON).unwrap();
        let model = doc.build().unwrap();
        let joint = model.joint(1 << 20).unwrap();
        assert!((joint.prob(&[0, 0, 0]) - 0.28125).abs() < 1e-15);
    }

    #[test]
    fn parses_hmm_document() {
        let text = r#"{
            "type": "hmm",
            "alphabet": ["x", "y"],
            "hidden_alphabet": ["a", "b"],
            "n": 2,
            "p0": [0.5, 0.5],
            "kernels": [[[0.75, 0.25], [0.25, 0.75]]],
            "homogeneous": true,
            "emissions": [[[0.9, 0.1], [0.1, 0.9]]],
            "homogeneous_emissions": true
        }"#;
        let model = ProcessDoc::from_json(text).unwrap().build().unwrap();
        assert_eq!(model.alphabet().labels(), &["x", "y"]);
        let joint = model.joint(1 << 20).unwrap();
        assert_eq!(joint.n(), 2);
    }

    #[test]
    fn parses_joint_document_in_row_major_order() {
        let text = r#"{
            "type": "joint",
            "alphabet": ["a", "b"],
            "n": 2,
            "mass": [0.4, 0.1, 0.2, 0.3]
        }"#;
        let model = ProcessDoc::from_json(text).unwrap().build().unwrap();
        let joint = model.joint(1 << 20).unwrap();
        assert_eq!(joint.prob(&[0, 1]), 0.1);
        assert_eq!(joint.prob(&[1, 0]), 0.2);
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(ProcessDoc::from_json("{\"type\": \"waffle\"}").is_err());
        let unnormalized = r#"{
            "type": "joint",
            "alphabet": ["a", "b"],
            "n": 1,
            "mass": [0.4, 0.4]
        }"#;
        assert!(ProcessDoc::from_json(unnormalized).unwrap().build().is_err());
    }

    #[test]
    fn document_roundtrips_through_json() {
        let doc = ProcessDoc::from_json(F1_JSON).unwrap();
        let text = doc.to_json();
        let again = ProcessDoc::from_json(&text).unwrap();
        assert_eq!(text, again.to_json());
    }
}
