use std::fs::{self, File};
use std::io::BufWriter;
use std::path::PathBuf;

use clap::Args;
use multiphase::diagnostics::{convergence_study, default_initial, ConvergenceTable, DiagnosticsError};
use multiphase::solver::SolverConfig;

use crate::error::CliError;
use crate::model_args::ModelArgs;

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_delimiter = ',', default_values_t = [75, 150, 300, 600])]
    pub meshes: Vec<usize>,
    #[arg(long, default_value_t = 2500)]
    pub reference: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long = "T", default_value_t = 6.0)]
    pub t_final: f64,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

fn print_table(t: &ConvergenceTable) {
    println!("{:>6} {:>12} {:>14}", "N", "dx", "L1 error");
    for r in &t.rows {
        println!("{:>6} {:>12.6e} {:>14.6e}", r.cells, r.dx, r.total());
    }
}

pub fn converge(args: &ConvergeArgs) -> Result<(), CliError> {
    let (_, spec) = args.model.resolve()?;
    if spec.n() != 2 {
        return Err(CliError::config("the built-in initial profile is for two species"));
    }
    let cfg = SolverConfig {
        dt: args.dt,
        t_final: args.t_final,
        sample_every: 0,
        ..SolverConfig::default()
    };
    cfg.validate()?;
    fs::create_dir_all(&args.out)?;
    let path = args.out.join("convergence.csv");
    match convergence_study(&spec, &cfg, &args.meshes, args.reference, &default_initial) {
        Ok(table) => {
            table.write_csv(BufWriter::new(File::create(&path)?))?;
            print_table(&table);
            let rates: Vec<String> = table.species_rates.iter().map(|r| format!("{r:.4}")).collect();
            println!("fitted L1 rate: {:.4} (per species: {})", table.rate, rates.join(", "));
            println!("wrote {}", path.display());
            Ok(())
        }
        Err(DiagnosticsError::Run { cells, source, partial }) => {
            partial.write_csv(BufWriter::new(File::create(&path)?))?;
            print_table(&partial);
            Err(CliError::Numerical(format!(
                "run on {cells} cells failed: {source} (partial table in {})",
                path.display()
            )))
        }
        Err(e) => Err(e.into()),
    }
}
