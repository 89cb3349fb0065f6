use std::path::PathBuf;

use clap::Args;
use multiphase::config::ModelFile;
use multiphase::model::{preset, ModelSpec};

use crate::error::CliError;

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Built-in model (see `multiphase presets`).
    #[arg(long, conflicts_with = "config")]
    pub preset: Option<String>,
    /// Model file (TOML, or JSON when the name ends in .json).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Regularizing diffusion added to every species.
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub theta1: Option<f64>,
    #[arg(long)]
    pub theta2: Option<f64>,
    #[arg(long = "beta-c")]
    pub beta_c: Option<f64>,
    #[arg(long = "beta-m")]
    pub beta_m: Option<f64>,
}

impl ModelArgs {
    /// Model file with overrides applied, plus the built model.
    pub fn resolve(&self) -> Result<(ModelFile, ModelSpec), CliError> {
        let mut file = match (&self.preset, &self.config) {
            (Some(name), None) => ModelFile::from_spec(&preset(name)?),
            (None, Some(path)) => ModelFile::load(path)?,
            (None, None) => return Err(CliError::config("give --preset or --config")),
            (Some(_), Some(_)) => unreachable!("clap rejects both"),
        };
        if let Some(eta) = self.eta {
            file.model.eta = eta;
        }
        let law = file.pressure_q.law.clone();
        let p = &mut file.pressure_q;
        let overrides = [
            ("theta", self.theta, &mut p.theta, "tumor-jb"),
            ("theta1", self.theta1, &mut p.theta1, "multiphase-skt"),
            ("theta2", self.theta2, &mut p.theta2, "multiphase-skt"),
            ("beta-c", self.beta_c, &mut p.beta_c, "tumor-jb"),
            ("beta-m", self.beta_m, &mut p.beta_m, "tumor-jb"),
        ];
        for (flag, value, slot, needs) in overrides {
            if let Some(v) = value {
                if law != needs {
                    return Err(CliError::config(format!(
                        "--{flag} applies to the {needs} pressure law, not `{law}`"
                    )));
                }
                *slot = Some(v);
            }
        }
        let spec = file.build()?;
        Ok((file, spec))
    }

    pub fn preset_name(&self) -> Option<&str> {
        self.preset.as_deref()
    }
}
