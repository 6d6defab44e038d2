//! Preset files: the single source of coefficients for every command.
//!
//! A preset is a TOML document:
//!
//! ```toml
//! name = "cos-diffusion-05"
//!
//! [diffusion]          # a(y)
//! mean = 1.0
//! cos = [0.5]          # multiplies cos(2 pi k y), k = 1, 2, ...
//! sin = []             # multiplies sin(2 pi k y)
//! # samples = [...]    # alternative: uniform samples a(j/N), j = 0..N
//! # alpha1 = 0.5       # optional bounds; default to the sampled min / max
//! # alpha2 = 1.5
//!
//! [growth]             # mu(y), same field syntax (bounds ignored)
//! mean = 1.0
//!
//! [reaction]
//! kind = "logistic"    # f = mu(y) s (1 - s / capacity)
//! capacity = 1.0
//! # kind = "crowding"  # f = mu(y) s - nu s^2
//! # nu = 1.0
//! saturation = 1.0     # M: f(y, s) <= 0 for s >= M
//! common_zero = 1.0    # optional s0 with f(y, s0) = 0 for all y
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::coefficients::{PeriodicCoefficient, PeriodicField, ReactionKind, ReactionModel};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cos: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sin: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha2: Option<f64>,
}

impl FieldSpec {
    pub fn series(mean: f64, cos: &[f64], sin: &[f64]) -> Self {
        Self {
            mean: Some(mean),
            cos: cos.to_vec(),
            sin: sin.to_vec(),
            samples: None,
            alpha1: None,
            alpha2: None,
        }
    }

    fn to_field(&self, what: &str) -> Result<PeriodicField> {
        match (&self.samples, self.mean) {
            (Some(_), Some(_)) => Err(Error::Preset(format!(
                "[{what}] gives both samples and series coefficients"
            ))),
            (Some(s), None) => {
                if !self.cos.is_empty() || !self.sin.is_empty() {
                    return Err(Error::Preset(format!(
                        "[{what}] gives both samples and series coefficients"
                    )));
                }
                PeriodicField::from_samples(s)
            }
            (None, Some(mean)) => {
                if !mean.is_finite() || self.cos.iter().chain(&self.sin).any(|c| !c.is_finite()) {
                    return Err(Error::Preset(format!(
                        "[{what}] has non-finite coefficients"
                    )));
                }
                Ok(PeriodicField::series(
                    mean,
                    self.cos.clone(),
                    self.sin.clone(),
                ))
            }
            (None, None) => Err(Error::Preset(format!(
                "[{what}] needs either `mean` (series) or `samples`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ReactionSpec {
    Logistic {
        capacity: f64,
        saturation: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        common_zero: Option<f64>,
    },
    Crowding {
        nu: f64,
        saturation: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        common_zero: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetSpec {
    pub name: String,
    pub diffusion: FieldSpec,
    pub growth: FieldSpec,
    pub reaction: ReactionSpec,
}

/// A parsed preset: diffusion coefficient plus reaction model.
#[derive(Debug, Clone)]
pub struct Preset {
    name: String,
    diffusion: PeriodicCoefficient,
    reaction: ReactionModel,
    spec: PresetSpec,
}

const BUILTIN: [&str; 5] = [
    "fisher-const",
    "cos-diffusion-05",
    "cos-diffusion-09",
    "het-mu",
    "common-zero",
];

impl Preset {
    pub fn builtin_names() -> &'static [&'static str] {
        &BUILTIN
    }

    pub fn builtin(name: &str) -> Result<Self> {
        Self::from_spec(builtin_spec(name)?)
    }

    /// A built-in name or a path to a preset file.
    pub fn load(name_or_path: &str) -> Result<Self> {
        if BUILTIN.contains(&name_or_path) {
            return Self::builtin(name_or_path);
        }
        let path = Path::new(name_or_path);
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Preset(format!("cannot read preset `{name_or_path}`: {e}")))?;
        Self::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let spec: PresetSpec = toml::from_str(text).map_err(|e| Error::Preset(e.to_string()))?;
        Self::from_spec(spec)
    }

    pub fn from_spec(spec: PresetSpec) -> Result<Self> {
        let a_field = spec.diffusion.to_field("diffusion")?;
        let mut diffusion = PeriodicCoefficient::with_sampled_bounds(a_field.clone());
        if spec.diffusion.alpha1.is_some() || spec.diffusion.alpha2.is_some() {
            diffusion = PeriodicCoefficient::new(
                a_field,
                spec.diffusion.alpha1.unwrap_or(diffusion.alpha1()),
                spec.diffusion.alpha2.unwrap_or(diffusion.alpha2()),
            );
        }
        let mu = spec.growth.to_field("growth")?;
        let reaction = match spec.reaction {
            ReactionSpec::Logistic {
                capacity,
                saturation,
                common_zero,
            } => ReactionModel::new(
                ReactionKind::Logistic { capacity },
                mu,
                saturation,
                common_zero,
            )?,
            ReactionSpec::Crowding {
                nu,
                saturation,
                common_zero,
            } => ReactionModel::new(ReactionKind::Crowding { nu }, mu, saturation, common_zero)?,
        };
        Ok(Self {
            name: spec.name.clone(),
            diffusion,
            reaction,
            spec,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn diffusion(&self) -> &PeriodicCoefficient {
        &self.diffusion
    }

    pub fn reaction(&self) -> &ReactionModel {
        &self.reaction
    }

    pub fn spec(&self) -> &PresetSpec {
        &self.spec
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.spec).expect("preset spec serializes")
    }
}

fn builtin_spec(name: &str) -> Result<PresetSpec> {
    let logistic = ReactionSpec::Logistic {
        capacity: 1.0,
        saturation: 1.0,
        common_zero: Some(1.0),
    };
    let (diffusion, growth, reaction) = match name {
        "fisher-const" => (
            FieldSpec::series(1.0, &[], &[]),
            FieldSpec::series(1.0, &[], &[]),
            logistic,
        ),
        "cos-diffusion-05" => (
            FieldSpec::series(1.0, &[0.5], &[]),
            FieldSpec::series(1.0, &[], &[]),
            logistic,
        ),
        "cos-diffusion-09" => (
            FieldSpec::series(1.0, &[0.9], &[]),
            FieldSpec::series(2.0, &[], &[]),
            logistic,
        ),
        "het-mu" => (
            FieldSpec::series(1.0, &[], &[]),
            FieldSpec::series(1.0, &[1.0], &[]),
            ReactionSpec::Crowding {
                nu: 1.0,
                saturation: 2.0,
                common_zero: None,
            },
        ),
        "common-zero" => (
            FieldSpec::series(1.0, &[0.3], &[0.2]),
            FieldSpec::series(1.0, &[], &[0.5]),
            logistic,
        ),
        other => {
            return Err(Error::Preset(format!(
                "unknown preset `{other}` (built-ins: {})",
                BUILTIN.join(", ")
            )))
        }
    };
    Ok(PresetSpec {
        name: name.to_string(),
        diffusion,
        growth,
        reaction,
    })
}
