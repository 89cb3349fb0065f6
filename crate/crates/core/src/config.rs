//! Model configuration files.
//!
//! ```toml
//! [model]
//! name = "counterexample"
//! n = 2
//! eta = 0.0
//!
//! [drag]
//! law = "constant"        # unit | constant | perturbed | degenerate
//! size = 3                # (n+1) x (n+1), index 0 = solvent
//! k = [0, 1, 1,
//!      1, 0, 10,
//!      1, 10, 0]
//!
//! [pressure_q]
//! law = "constant"        # constant | tumor-jb | multiphase-skt
//! size = 3
//! values = [0, 0, 0,
//!           0, 1, 10,
//!           0, 10, 1]
//!
//! [pressure_r]
//! size = 3
//! values = [0, 0, 0, 0, 0, 0, 0, 0, 0]
//! ```
//!
//! JSON files with the same tree are accepted when the path ends in `.json`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::linalg::Mat;
use crate::model::{DragLaw, ModelError, ModelSpec, PressureLaw};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("[{section}] {message}")]
    Field { section: String, message: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub model: ModelSection,
    #[serde(default)]
    pub drag: Option<DragSection>,
    pub pressure_q: PressureSection,
    #[serde(default)]
    pub pressure_r: Option<MatrixSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    #[serde(default = "default_name")]
    pub name: String,
    pub n: usize,
    #[serde(default)]
    pub eta: f64,
    #[serde(default)]
    pub analysis_only: bool,
}

fn default_name() -> String {
    "custom".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DragSection {
    pub law: String,
    #[serde(default)]
    pub size: Option<usize>,
    #[serde(default)]
    pub k: Option<Vec<f64>>,
    #[serde(default)]
    pub eps: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PressureSection {
    #[serde(default = "default_law")]
    pub law: String,
    #[serde(default)]
    pub size: Option<usize>,
    #[serde(default)]
    pub values: Option<Vec<f64>>,
    #[serde(default)]
    pub beta_c: Option<f64>,
    #[serde(default)]
    pub beta_m: Option<f64>,
    #[serde(default)]
    pub theta: Option<f64>,
    #[serde(default)]
    pub theta1: Option<f64>,
    #[serde(default)]
    pub theta2: Option<f64>,
}

fn default_law() -> String {
    "constant".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSection {
    pub size: usize,
    pub values: Vec<f64>,
}

fn field_err(section: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Field {
        section: section.into(),
        message: message.into(),
    }
}

fn matrix(section: &str, size: Option<usize>, values: Option<&Vec<f64>>, n: usize) -> Result<Mat<f64>, ConfigError> {
    let size = size.ok_or_else(|| field_err(section, "missing `size`"))?;
    let values = values.ok_or_else(|| field_err(section, "missing matrix values"))?;
    if size != n + 1 {
        return Err(field_err(
            section,
            format!("size must be n + 1 = {} (got {size})", n + 1),
        ));
    }
    if values.len() != size * size {
        return Err(field_err(
            section,
            format!("expected {} values, got {}", size * size, values.len()),
        ));
    }
    Ok(Mat::from_row_major(size, size, values.clone()))
}

fn require(section: &str, name: &str, v: Option<f64>) -> Result<f64, ConfigError> {
    v.ok_or_else(|| field_err(section, format!("missing `{name}`")))
}

impl ModelFile {
    pub fn parse_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn parse_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            Self::parse_json(&text)
        } else {
            Self::parse_toml(&text)
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("model file serializes")
    }

    pub fn build(&self) -> Result<ModelSpec, ConfigError> {
        let n = self.model.n;
        if n == 0 {
            return Err(ModelError::ZeroSpecies.into());
        }
        let drag = match &self.drag {
            None => DragLaw::Unit,
            Some(d) => match d.law.as_str() {
                "unit" => DragLaw::Unit,
                "constant" => DragLaw::Constant(matrix("drag", d.size, d.k.as_ref(), n)?),
                "perturbed" => DragLaw::Perturbed {
                    k_star: matrix("drag", d.size, d.k.as_ref(), n)?,
                    eps: require("drag", "eps", d.eps)?,
                },
                "degenerate" => DragLaw::Degenerate {
                    k_star: matrix("drag", d.size, d.k.as_ref(), n)?,
                },
                other => return Err(field_err("drag", format!("unknown law `{other}`"))),
            },
        };
        let p = &self.pressure_q;
        let q = match p.law.as_str() {
            "constant" => PressureLaw::ConstantMatrix(matrix("pressure_q", p.size, p.values.as_ref(), n)?),
            "tumor-jb" => PressureLaw::TumorJB {
                beta_c: require("pressure_q", "beta_c", p.beta_c)?,
                beta_m: require("pressure_q", "beta_m", p.beta_m)?,
                theta: require("pressure_q", "theta", p.theta)?,
            },
            "multiphase-skt" => PressureLaw::MultiphaseSKT {
                theta1: require("pressure_q", "theta1", p.theta1)?,
                theta2: require("pressure_q", "theta2", p.theta2)?,
            },
            other => return Err(field_err("pressure_q", format!("unknown law `{other}`"))),
        };
        let r = match &self.pressure_r {
            None => Mat::zeros(n + 1, n + 1),
            Some(m) => matrix("pressure_r", Some(m.size), Some(&m.values), n)?,
        };
        let name = self.model.name.clone();
        let eta = self.model.eta;
        let spec = if self.model.analysis_only {
            ModelSpec::new_analysis_only(name, n, drag, q, r, eta)?
        } else {
            ModelSpec::new(name, n, drag, q, r, eta)?
        };
        Ok(spec)
    }

    /// Inverse of [`ModelFile::build`].
    pub fn from_spec(spec: &ModelSpec) -> Self {
        let n = spec.n();
        let size = Some(n + 1);
        let drag = match spec.drag() {
            DragLaw::Unit => DragSection {
                law: "unit".into(),
                size: None,
                k: None,
                eps: None,
            },
            DragLaw::Constant(k) => DragSection {
                law: "constant".into(),
                size,
                k: Some(k.as_slice().to_vec()),
                eps: None,
            },
            DragLaw::Perturbed { k_star, eps } => DragSection {
                law: "perturbed".into(),
                size,
                k: Some(k_star.as_slice().to_vec()),
                eps: Some(*eps),
            },
            DragLaw::Degenerate { k_star } => DragSection {
                law: "degenerate".into(),
                size,
                k: Some(k_star.as_slice().to_vec()),
                eps: None,
            },
        };
        let empty = PressureSection {
            law: String::new(),
            size: None,
            values: None,
            beta_c: None,
            beta_m: None,
            theta: None,
            theta1: None,
            theta2: None,
        };
        let pressure_q = match spec.q_law() {
            PressureLaw::ConstantMatrix(q) => PressureSection {
                law: "constant".into(),
                size,
                values: Some(q.as_slice().to_vec()),
                ..empty
            },
            PressureLaw::TumorJB {
                beta_c,
                beta_m,
                theta,
            } => PressureSection {
                law: "tumor-jb".into(),
                beta_c: Some(*beta_c),
                beta_m: Some(*beta_m),
                theta: Some(*theta),
                ..empty
            },
            PressureLaw::MultiphaseSKT { theta1, theta2 } => PressureSection {
                law: "multiphase-skt".into(),
                theta1: Some(*theta1),
                theta2: Some(*theta2),
                ..empty
            },
        };
        ModelFile {
            model: ModelSection {
                name: spec.name.clone(),
                n,
                eta: spec.eta(),
                analysis_only: spec.is_analysis_only(),
            },
            drag: Some(drag),
            pressure_q,
            pressure_r: Some(MatrixSection {
                size: n + 1,
                values: spec.r_matrix().as_slice().to_vec(),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::preset;

    const COUNTER: &str = r#"
[model]
name = "counterexample"
n = 2

[drag]
law = "constant"
size = 3
k = [0, 1, 1, 1, 0, 10, 1, 10, 0]

[pressure_q]
size = 3
values = [0, 0, 0, 0, 1, 10, 0, 10, 1]
"#;

    #[test]
    fn parses_counterexample() {
        let spec = ModelFile::parse_toml(COUNTER).unwrap().build().unwrap();
        assert_eq!(spec.n(), 2);
        assert_eq!(spec.constant_q().unwrap()[(1, 2)], 10.0);
    }

    #[test]
    fn asymmetric_r_rejected() {
        let text = format!(
            "{COUNTER}\n[pressure_r]\nsize = 3\nvalues = [0, 0, 0, 0, 0, 3, 0, 0, 0]\n"
        );
        let err = ModelFile::parse_toml(&text).unwrap().build().unwrap_err();
        assert!(matches!(err, ConfigError::Model(ModelError::Asymmetric { .. })));
    }

    #[test]
    fn wrong_size_rejected() {
        let text = COUNTER.replace("size = 3\nvalues", "size = 2\nvalues");
        assert!(matches!(
            ModelFile::parse_toml(&text).unwrap().build(),
            Err(ConfigError::Field { .. })
        ));
    }

    #[test]
    fn presets_round_trip() {
        for name in crate::model::PRESET_NAMES {
            let spec = preset(name).unwrap();
            let file = ModelFile::from_spec(&spec);
            let back = ModelFile::parse_toml(&file.to_toml()).unwrap().build().unwrap();
            assert_eq!(back, spec, "{name}");
            let json = serde_json::to_string(&file).unwrap();
            assert_eq!(ModelFile::parse_json(&json).unwrap().build().unwrap(), spec);
        }
    }
}
