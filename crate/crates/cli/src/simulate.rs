use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use multiphase::config::ModelFile;
use multiphase::diagnostics::{steady_state, write_trajectory_csv, DiagnosticsSeries};
use multiphase::solver::{initial_profile, run, InitialProfile, JacobianMode, Mesh1D, SolverConfig, StateField};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;
use crate::model_args::ModelArgs;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum JacobianArg {
    Analytic,
    Fd,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Rerun the configuration recorded in a run.meta file.
    #[arg(long, conflicts_with_all = ["preset", "config"])]
    pub manifest: Option<PathBuf>,
    #[arg(long = "N", default_value_t = 600)]
    pub cells: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long = "T", default_value_t = 6.0)]
    pub t_final: f64,
    /// Times at which to store the field, e.g. 1,3,6.
    #[arg(long, value_delimiter = ',')]
    pub snapshots: Vec<f64>,
    /// Diagnostics every this many steps.
    #[arg(long, default_value_t = 10)]
    pub sample_every: usize,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Project each trial state onto the simplex.
    #[arg(long)]
    pub projection: bool,
    #[arg(long, value_enum, default_value_t = JacobianArg::Analytic)]
    pub jacobian: JacobianArg,
    /// Use the initial profile as given, without rescaling into the simplex.
    #[arg(long)]
    pub raw_initial: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Artifact {
    pub path: String,
    pub sha256: String,
}

/// Everything needed to repeat a run; written as `run.meta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub preset: Option<String>,
    pub model: ModelFile,
    pub cells: usize,
    pub solver: SolverConfig,
    pub initial: InitialProfile,
    pub normalization: String,
    pub threads: usize,
    pub artifacts: Vec<Artifact>,
}

fn normalization_note(p: &InitialProfile) -> String {
    if p.normalize && p.scale() != 1.0 {
        format!(
            "initial profile divided by 2*c0 + eps0 = {} so that u0 = 1 - u1 - u2 stays in [0, 1]",
            p.scale()
        )
    } else if p.normalize {
        "initial profile already inside the simplex; no rescaling".into()
    } else {
        "raw initial profile (no rescaling); u0 may be negative".into()
    }
}

fn sha256_file(path: &Path) -> Result<String, CliError> {
    let bytes = fs::read(path)?;
    Ok(format!("{:x}", Sha256::digest(&bytes)))
}

fn build_manifest(args: &SimulateArgs) -> Result<RunManifest, CliError> {
    if let Some(path) = &args.manifest {
        let text = fs::read_to_string(path)?;
        let mut m: RunManifest = serde_json::from_str(&text).map_err(CliError::config)?;
        if m.schema_version != SCHEMA_VERSION {
            return Err(CliError::config(format!("unsupported manifest schema {}", m.schema_version)));
        }
        m.artifacts.clear();
        m.threads = rayon::current_num_threads();
        return Ok(m);
    }
    let (model, _) = args.model.resolve()?;
    let solver = SolverConfig {
        dt: args.dt,
        t_final: args.t_final,
        jacobian_mode: match args.jacobian {
            JacobianArg::Analytic => JacobianMode::Analytic,
            JacobianArg::Fd => JacobianMode::FiniteDifference,
        },
        projection: args.projection,
        sample_every: args.sample_every,
        snapshots: args.snapshots.clone(),
        ..SolverConfig::default()
    };
    let initial = InitialProfile {
        normalize: !args.raw_initial,
        ..InitialProfile::default()
    };
    Ok(RunManifest {
        schema_version: SCHEMA_VERSION,
        preset: args.model.preset_name().map(str::to_string),
        model,
        cells: args.cells,
        normalization: normalization_note(&initial),
        solver,
        initial,
        threads: rayon::current_num_threads(),
        artifacts: Vec::new(),
    })
}

/// Raw data may leave the simplex; the solver still accepts it.
fn initial_field(p: &InitialProfile, mesh: &Mesh1D) -> Result<StateField, CliError> {
    if p.normalize {
        return Ok(initial_profile(p, mesh)?);
    }
    let data: Vec<f64> = mesh.centers().into_iter().flat_map(|x| p.raw(x)).collect();
    Ok(StateField::new(2, mesh.cells(), data, 0.0)?)
}

pub fn simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let mut manifest = build_manifest(args)?;
    let spec = manifest.model.build()?;
    if spec.n() != 2 {
        return Err(CliError::config(format!(
            "the built-in initial profile is for two species (model has {})",
            spec.n()
        )));
    }
    let mesh = Mesh1D::new(manifest.cells)?;
    manifest.solver.validate()?;
    let init = initial_field(&manifest.initial, &mesh)?;
    let traj = run(&spec, &mesh, &manifest.solver, &init)?;

    fs::create_dir_all(&args.out)?;
    let mut fields = vec![traj.initial.clone()];
    fields.extend(traj.snapshots.iter().cloned());
    fields.push(traj.final_state.clone());
    fields.sort_by(|a, b| a.t.total_cmp(&b.t));
    fields.dedup_by(|a, b| a.t == b.t);
    let traj_path = args.out.join("trajectory.csv");
    write_trajectory_csv(BufWriter::new(File::create(&traj_path)?), &mesh, &fields)?;

    let uinf = steady_state(&traj.initial);
    let diag_path = args.out.join("diagnostics.csv");
    let mut outputs = vec![traj_path];
    if !traj.samples.is_empty() {
        let reference: Vec<StateField> = traj
            .samples
            .iter()
            .map(|s| {
                let mut c = StateField::constant(&uinf, mesh.cells());
                c.t = s.t;
                c
            })
            .collect();
        // the rescaled profile has u0 = 0, so u_inf has a zero solvent component
        let series = DiagnosticsSeries::compute(&spec, &mesh, &traj.samples, &traj.sample_iterations, &uinf, Some(&reference))?;
        series.write_csv(BufWriter::new(File::create(&diag_path)?))?;
        outputs.push(diag_path);
    }
    for p in &outputs {
        manifest.artifacts.push(Artifact {
            path: p.file_name().unwrap().to_string_lossy().into_owned(),
            sha256: sha256_file(p)?,
        });
    }
    let meta = serde_json::to_string_pretty(&manifest).map_err(CliError::config)?;
    fs::write(args.out.join("run.meta"), meta + "\n")?;

    println!(
        "{}: {} steps on {} cells, {} Newton iterations, max residual {:.2e}, min u {:.2e}, projections {}",
        spec.name,
        traj.stats.len(),
        mesh.cells(),
        traj.total_iterations(),
        traj.max_residual(),
        traj.min_value,
        traj.total_projections()
    );
    println!("wrote {}", args.out.display());
    Ok(())
}
