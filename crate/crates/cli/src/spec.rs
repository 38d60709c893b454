//! Model-spec files: the JSON schema accepted by every subcommand and its
//! translation into engine objects.
//!
//! A spec file names a generator, a model on top of it, and optionally a
//! numeric section (quadrature tolerances, support cutoff) and a default
//! seed:
//!
//! ```json
//! {
//!   "generator": { "kind": "pareto2", "gamma": 2.664557 },
//!   "model": { "gk": { "alpha": 1.548042, "beta": 0.6925677 } },
//!   "seed": 20260815
//! }
//! ```
//!
//! Unknown keys are rejected; parse errors carry line/column positions.

use std::path::Path;

use serde::{Deserialize, Serialize};
use ttesum::{
    make_exponential, make_gumbel_barnett, make_pareto_ii, make_translated_erlang,
    make_truncated_normal, BaselineMarginal, Error, GeneratorSpec, QuadratureCfg, Result,
    TteModel,
};

use crate::CliError;

/// A parsed model-spec file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpecFile {
    pub generator: GeneratorSection,
    pub model: ModelSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub numeric: Option<NumericSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Which catalog generator to build, with its parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorSection {
    Exponential,
    Pareto2 { gamma: f64 },
    TruncNormal,
    TranslatedErlang,
    GumbelBarnett { theta: f64 },
}

/// The model on top of the generator: either the scale-parameter form
/// `F̄(x₁, x₂) = Ḡ(αx₁ + βx₂)` or explicit baseline marginals.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSection {
    Gk { alpha: f64, beta: f64 },
    Tte { baselines: [BaselineSection; 2] },
}

/// A baseline marginal: exponential with a rate, or the generator's own
/// survival function.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BaselineSection {
    Exponential { rate: f64 },
    Generator,
}

/// Optional numeric overrides. Absent fields keep the engine defaults.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abs_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_subdivisions: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support_hint: Option<f64>,
}

impl ModelSpecFile {
    /// Read and parse a spec file; I/O problems are usage errors, parse
    /// problems carry serde_json's line/column report.
    pub fn load(path: &Path) -> std::result::Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> std::result::Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Spec(e.to_string()))
    }

    /// Build the generator, applying any support-cutoff override.
    pub fn generator_spec(&self) -> Result<GeneratorSpec> {
        let mut gen = match self.generator {
            GeneratorSection::Exponential => make_exponential(),
            GeneratorSection::Pareto2 { gamma } => make_pareto_ii(gamma)?,
            GeneratorSection::TruncNormal => make_truncated_normal(),
            GeneratorSection::TranslatedErlang => make_translated_erlang(),
            GeneratorSection::GumbelBarnett { theta } => make_gumbel_barnett(theta)?,
        };
        if let Some(hint) = self.numeric.as_ref().and_then(|n| n.support_hint) {
            if !(hint > 0.0 && hint.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: "support_hint",
                    value: hint,
                    requirement: "finite and > 0",
                });
            }
            gen.support_hint = hint;
        }
        Ok(gen)
    }

    /// Build the full model, applying any quadrature overrides.
    pub fn model(&self) -> Result<TteModel> {
        let gen = self.generator_spec()?;
        let m = match &self.model {
            ModelSection::Gk { alpha, beta } => TteModel::gk(gen, *alpha, *beta)?,
            ModelSection::Tte { baselines } => {
                let build = |section: &BaselineSection| -> Result<BaselineMarginal> {
                    match section {
                        BaselineSection::Exponential { rate } => {
                            BaselineMarginal::exponential(*rate)
                        }
                        BaselineSection::Generator => Ok(BaselineMarginal::from_generator(&gen)),
                    }
                };
                let m1 = build(&baselines[0])?;
                let m2 = build(&baselines[1])?;
                TteModel::new(gen, m1, m2)
            }
        };
        match self.quadrature_override()? {
            Some(cfg) => Ok(m.with_quadrature(cfg)),
            None => Ok(m),
        }
    }

    fn quadrature_override(&self) -> Result<Option<QuadratureCfg>> {
        let Some(n) = &self.numeric else {
            return Ok(None);
        };
        if n.abs_tol.is_none() && n.rel_tol.is_none() && n.max_subdivisions.is_none() {
            return Ok(None);
        }
        let d = QuadratureCfg::default();
        let cfg = QuadratureCfg {
            abs_tol: n.abs_tol.unwrap_or(d.abs_tol),
            rel_tol: n.rel_tol.unwrap_or(d.rel_tol),
            max_subdivisions: n.max_subdivisions.unwrap_or(d.max_subdivisions),
        };
        for (name, value) in [("abs_tol", cfg.abs_tol), ("rel_tol", cfg.rel_tol)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    requirement: "finite and > 0",
                });
            }
        }
        if cfg.max_subdivisions == 0 {
            return Err(Error::InvalidParameter {
                name: "max_subdivisions",
                value: 0.0,
                requirement: "at least 1",
            });
        }
        Ok(Some(cfg))
    }

    /// One-line description of the model section for reports.
    pub fn model_label(&self) -> String {
        match &self.model {
            ModelSection::Gk { alpha, beta } => format!("gk(alpha={alpha}, beta={beta})"),
            ModelSection::Tte { baselines } => {
                let one = |b: &BaselineSection| match b {
                    BaselineSection::Exponential { rate } => format!("exponential(rate={rate})"),
                    BaselineSection::Generator => "generator".to_string(),
                };
                format!("tte(baselines=[{}, {}])", one(&baselines[0]), one(&baselines[1]))
            }
        }
    }

    /// Canonical single-line JSON form, used in the simulate header comment.
    pub fn compact_json(&self) -> String {
        serde_json::to_string(self).expect("spec file serializes")
    }
}
