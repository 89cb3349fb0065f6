use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use multiphase::analysis::{
    box_lattice, entropy_hypotheses, lattice_table, perturb_bisection, perturb_threshold, prop_g_classify,
    scan_points, scan_simplex, ScanPredicate,
};
use multiphase::diagnostics::fmt17;
use multiphase::linalg::{eigenvalues_general, sym_eig_min, Mat};
use multiphase::matrices::assemble_all;
use multiphase::model::{DragLaw, ModelSpec, PressureLaw, SimplexPoint};

use crate::error::CliError;
use crate::model_args::ModelArgs;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PredicateArg {
    /// sym(G) positive definite
    Definite,
    /// K^-1 A positively stable
    Stable,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Lattice scan of the structural predicate.
    #[arg(long)]
    pub scan: bool,
    /// Drag-ordering classification (two species, r = 0).
    #[arg(long)]
    pub classify: bool,
    /// Perturbation threshold eps0 (perturbed drag law).
    #[arg(long)]
    pub perturb_threshold: bool,
    #[arg(long, value_enum, default_value_t = PredicateArg::Definite)]
    pub predicate: PredicateArg,
    #[arg(long, default_value_t = 32)]
    pub resolution: usize,
    /// Scan the box lo1,hi1,lo2,hi2 instead of the whole simplex.
    #[arg(long, value_delimiter = ',')]
    pub region: Option<Vec<f64>>,
    /// Upper end of an eps bisection for the onset of indefiniteness.
    #[arg(long)]
    pub bisect: Option<f64>,
    /// Write the per-point lattice table to this file.
    #[arg(long)]
    pub table: Option<PathBuf>,
}

fn predicate(p: PredicateArg) -> ScanPredicate {
    match p {
        PredicateArg::Definite => ScanPredicate::positive_definite(),
        PredicateArg::Stable => ScanPredicate::positively_stable(),
    }
}

/// `(k01, k02, k12)` and the species block of `q` for the classifier.
fn classifier_inputs(spec: &ModelSpec) -> Result<((f64, f64, f64), [[f64; 2]; 2]), CliError> {
    if spec.n() != 2 {
        return Err(CliError::config("classification needs two species"));
    }
    if spec.r_matrix().as_slice().iter().any(|v| *v != 0.0) {
        return Err(CliError::config("classification needs r = 0"));
    }
    let k = match spec.drag() {
        DragLaw::Unit => (1.0, 1.0, 1.0),
        DragLaw::Constant(k) => (k[(0, 1)], k[(0, 2)], k[(1, 2)]),
        other => {
            return Err(CliError::config(format!(
                "classification needs constant drag (got {})",
                other.name()
            )))
        }
    };
    let PressureLaw::ConstantMatrix(q) = spec.q_law() else {
        return Err(CliError::config("classification needs a constant pressure law"));
    };
    Ok((k, [[q[(1, 1)], q[(1, 2)]], [q[(2, 1)], q[(2, 2)]]]))
}

pub fn analyze(args: &AnalyzeArgs) -> Result<(), CliError> {
    let (_, spec) = args.model.resolve()?;
    println!("{spec}");
    let any = args.scan || args.classify || args.perturb_threshold;
    match entropy_hypotheses(&spec, args.resolution.max(8)) {
        Ok(h) => println!(
            "entropy hypotheses: alpha = {:.6e}, q >= r: {}, hold: {}",
            h.alpha, h.q_dominates_r, h.holds
        ),
        Err(e) => println!("entropy hypotheses: not evaluated ({e})"),
    }
    if args.scan || !any {
        let pred = predicate(args.predicate);
        let report = match &args.region {
            Some(r) => {
                if r.len() != 4 {
                    return Err(CliError::config("--region needs lo1,hi1,lo2,hi2"));
                }
                let pts = box_lattice([r[0], r[2]], [r[1], r[3]], args.resolution);
                scan_points(&spec, &pts, args.resolution, pred)?
            }
            None => scan_simplex(&spec, args.resolution, pred)?,
        };
        println!("{report}");
        for v in report.violations.iter().take(20) {
            println!("  violation at u = ({}) value {:.6e}", join(&v.u), v.value);
        }
        if report.violations.len() > 20 {
            println!("  ... {} more", report.violations.len() - 20);
        }
    }
    if args.classify {
        let (k, q) = classifier_inputs(&spec)?;
        let c = prop_g_classify(k.0, k.1, k.2, q)?;
        println!("{c}");
    }
    if args.perturb_threshold {
        let th = perturb_threshold(&spec, args.resolution)?;
        println!(
            "perturbation: alpha = {:.6e}, C1 = {:.6e}, C2 = {:.6e}, eps0 = {:.6e} (resolution {})",
            th.alpha, th.c1, th.c2, th.eps0, th.resolution
        );
        if let Some(hi) = args.bisect {
            match perturb_bisection(&spec, th.eps0, hi, args.resolution, 1e-3 * hi)? {
                Some((a, b)) => println!("G loses definiteness for eps in ({a:.6e}, {b:.6e}]"),
                None => println!("G stays definite up to eps = {hi}"),
            }
        }
    }
    if let Some(path) = &args.table {
        let rows = lattice_table(&spec, args.resolution)?;
        let mut w = BufWriter::new(File::create(path)?);
        let n = spec.n();
        let header: Vec<String> = (1..=n).map(|i| format!("u{i}")).chain(["min_eig_sym_G".into(), "min_re_KinvA".into()]).collect();
        writeln!(w, "{}", header.join(","))?;
        for (u, g, s) in rows {
            let mut rec: Vec<String> = u.iter().map(|v| fmt17(*v)).collect();
            rec.push(fmt17(g));
            rec.push(fmt17(s));
            writeln!(w, "{}", rec.join(","))?;
        }
        w.flush()?;
    }
    Ok(())
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// k01,k02,k12
    #[arg(long, value_delimiter = ',', required = true)]
    pub k: Vec<f64>,
    /// q11,q12,q21,q22
    #[arg(long, value_delimiter = ',', required = true)]
    pub q: Vec<f64>,
}

pub fn classify(args: &ClassifyArgs) -> Result<(), CliError> {
    if args.k.len() != 3 || args.q.len() != 4 {
        return Err(CliError::config("--k needs k01,k02,k12 and --q needs q11,q12,q21,q22"));
    }
    let q = [[args.q[0], args.q[1]], [args.q[2], args.q[3]]];
    let c = prop_g_classify(args.k[0], args.k[1], args.k[2], q)?;
    println!("{c}");
    Ok(())
}

#[derive(Debug, Args)]
pub struct MatrixArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Species fractions u1,..,un.
    #[arg(long, value_delimiter = ',', required = true)]
    pub u: Vec<f64>,
    /// Also write the matrices as JSON to this file.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(", ")
}

fn print_matrix(name: &str, m: &Mat<f64>) {
    println!("{name} =");
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|v| format!("{v:>15.8e}")).collect();
        println!("  [{}]", row.join(" "));
    }
}

pub fn matrix(args: &MatrixArgs) -> Result<(), CliError> {
    let (_, spec) = args.model.resolve()?;
    let p = SimplexPoint::new(args.u.clone())?;
    if p.n() != spec.n() {
        return Err(CliError::config(format!("--u needs {} values", spec.n())));
    }
    let m = assemble_all(&spec, &p).map_err(CliError::config)?;
    let kinv_a = m.k_inv.matmul(&m.a);
    println!("{} at u = ({}), u0 = {:.6}", spec.name, join(p.u()), p.u0());
    for (name, mat) in [("A", &m.a), ("K", &m.k), ("K^-1", &m.k_inv), ("h_B''", &m.hb), ("G", &m.g), ("K^-1 A", &kinv_a)] {
        print_matrix(name, mat);
    }
    let eig = eigenvalues_general(&kinv_a).map_err(CliError::config)?;
    let eig: Vec<String> = eig.iter().map(|c| format!("{:.8e}{:+.8e}i", c.re, c.im)).collect();
    println!("eig(K^-1 A) = {}", eig.join(", "));
    println!("min eig sym(G) = {:.8e}", sym_eig_min(&m.g.sym_part()).map_err(CliError::config)?);
    if let Some(path) = &args.json {
        let doc = serde_json::json!({
            "model": spec.name,
            "u": p.u(),
            "A": m.a, "K": m.k, "K_inv": m.k_inv, "hessian": m.hb, "G": m.g,
        });
        fs::write(path, serde_json::to_string_pretty(&doc).map_err(CliError::config)? + "\n")?;
    }
    Ok(())
}
