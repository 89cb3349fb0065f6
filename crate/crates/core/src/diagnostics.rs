//! Entropies, dissipation, decay fits and mesh-convergence studies.
//!
//! Quadrature is midpoint on cells; gradients live on interior faces as
//! differences of neighbouring cell averages over `Δx`. Terms `u log u` use
//! the limit `0` below [`ENTROPY_FLOOR`].

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::linalg::Mat;
use crate::analysis::sym_eig_min;
use crate::model::{extend, ModelError, ModelSpec};
use crate::solver::{initial_profile, run, InitialProfile, Mesh1D, SolverConfig, SolverError, StateField};

pub const ENTROPY_FLOOR: f64 = 1e-14;

#[derive(Debug, thiserror::Error)]
pub enum DiagnosticsError {
    #[error("diagnostic unavailable: {0}")]
    Unavailable(String),
    #[error("mesh mismatch: {0}")]
    Mesh(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("run on {cells} cells failed: {source}")]
    Run {
        cells: usize,
        source: SolverError,
        partial: Box<ConvergenceTable>,
    },
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn u_log_u_minus_u(u: f64) -> f64 {
    if u <= ENTROPY_FLOOR {
        0.0
    } else {
        u * (u.ln() - 1.0)
    }
}

/// `h_B(u) = Σ_{i=0}^n u_i (log u_i - 1)`.
pub fn hb_density(u: &[f64]) -> f64 {
    extend(u).into_iter().map(u_log_u_minus_u).sum()
}

pub fn boltzmann_entropy(field: &StateField, mesh: &Mesh1D) -> f64 {
    (0..field.cells()).map(|j| hb_density(field.cell(j))).sum::<f64>() * mesh.dx()
}

fn symmetric_constant_q<'a>(spec: &'a ModelSpec, what: &str) -> Result<&'a Mat<f64>, DiagnosticsError> {
    let q = spec
        .constant_q()
        .map_err(|_| DiagnosticsError::Unavailable(format!("{what} needs a constant pressure law")))?;
    for i in 0..q.rows() {
        for j in 0..i {
            if q[(i, j)] != q[(j, i)] {
                return Err(DiagnosticsError::Unavailable(format!(
                    "{what} needs symmetric q (q{i}{j} != q{j}{i})"
                )));
            }
        }
    }
    Ok(q)
}

/// `∫ ½ Σ q_ij u_i u_j` for constant symmetric `q`.
pub fn rao_entropy(spec: &ModelSpec, field: &StateField, mesh: &Mesh1D) -> Result<f64, DiagnosticsError> {
    let q = symmetric_constant_q(spec, "Rao entropy")?;
    let mut total = 0.0;
    for j in 0..field.cells() {
        let ue = extend(field.cell(j));
        total += 0.5 * q.quad_form(&ue);
    }
    Ok(total * mesh.dx())
}

/// `Σ_{i=0}^n ∫ u_i log(u_i / u∞_i)`. A zero reference component is allowed
/// only if that component of the field vanishes as well.
pub fn relative_boltzmann(field: &StateField, mesh: &Mesh1D, uinf: &[f64]) -> Result<f64, DiagnosticsError> {
    if uinf.len() != field.n() {
        return Err(DiagnosticsError::Input("reference has the wrong length".into()));
    }
    let ref_ext = extend(uinf);
    let mut total = 0.0;
    for j in 0..field.cells() {
        for (i, (u, r)) in extend(field.cell(j)).into_iter().zip(&ref_ext).enumerate() {
            if u <= ENTROPY_FLOOR {
                continue;
            }
            if *r <= ENTROPY_FLOOR {
                return Err(DiagnosticsError::Input(format!(
                    "reference component {i} is {r:e} but the field has {u:e} in cell {j}"
                )));
            }
            total += u * (u / r).ln();
        }
    }
    Ok(total * mesh.dx())
}

/// `½ Σ_{i,j} q_ij ∫ (u_i - ū_i)(u_j - ū_j)` between two fields on one mesh.
pub fn relative_rao(
    spec: &ModelSpec,
    field: &StateField,
    reference: &StateField,
    mesh: &Mesh1D,
) -> Result<f64, DiagnosticsError> {
    if field.cells() != reference.cells() || field.n() != reference.n() {
        return Err(DiagnosticsError::Mesh(format!(
            "{} vs {} cells",
            field.cells(),
            reference.cells()
        )));
    }
    let q = symmetric_constant_q(spec, "relative Rao entropy")?;
    let mut total = 0.0;
    for j in 0..field.cells() {
        let d: Vec<f64> = extend(field.cell(j))
            .iter()
            .zip(extend(reference.cell(j)))
            .map(|(a, b)| a - b)
            .collect();
        total += 0.5 * q.quad_form(&d);
    }
    Ok(total * mesh.dx())
}

/// The two Boltzmann dissipation terms for constant laws:
/// `∫ Σ (q_ij + r_ij) ∂u_i ∂u_j` and `4 ∫ Σ (q_i(u) - r_i(u)) |∂√u_i|²`.
pub fn boltzmann_dissipation(
    spec: &ModelSpec,
    field: &StateField,
    mesh: &Mesh1D,
) -> Result<(f64, f64), DiagnosticsError> {
    let q = spec
        .constant_q()
        .map_err(|_| DiagnosticsError::Unavailable("dissipation needs a constant pressure law".into()))?;
    let s = q.add(spec.r_matrix());
    let (n, dx) = (field.n(), mesh.dx());
    let (mut quad, mut root) = (0.0, 0.0);
    for face in 1..field.cells() {
        let (l, r) = (field.cell(face - 1), field.cell(face));
        let mut g = vec![0.0; n + 1];
        for i in 0..n {
            g[i + 1] = (r[i] - l[i]) / dx;
            g[0] -= g[i + 1];
        }
        quad += s.quad_form(&g);
        let mid: Vec<f64> = l.iter().zip(r).map(|(a, b)| 0.5 * (a + b)).collect();
        let ue = extend(&mid);
        let qv = spec.q_values(&ue);
        let rv = spec.r_values(&ue);
        let (le, re) = (extend(l), extend(r));
        for i in 0..=n {
            let d = (re[i].max(0.0).sqrt() - le[i].max(0.0).sqrt()) / dx;
            root += 4.0 * (qv[i] - rv[i]) * d * d;
        }
    }
    Ok((quad * dx, root * dx))
}

/// Cell average of every species, the constant steady state with the same mass.
pub fn steady_state(field: &StateField) -> Vec<f64> {
    (0..field.n())
        .map(|i| field.species(i).iter().sum::<f64>() / field.cells() as f64)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayFit {
    /// `-d log H / dt` from a least-squares line.
    pub lambda: f64,
    /// Coefficient of determination of the log-linear fit.
    pub r_squared: f64,
    /// Sign of the discrete second difference of `H` at interior samples
    /// (`1` convex, `-1` concave, `0` flat).
    pub convexity: Vec<i8>,
    /// Entries at or below zero that were clipped to `1e-16`.
    pub clipped: usize,
}

/// Exponential-rate fit of a positive series over `window = (t0, t1)`.
pub fn decay_fit(t: &[f64], h: &[f64], window: Option<(f64, f64)>) -> Result<DecayFit, DiagnosticsError> {
    if t.len() != h.len() || t.len() < 2 {
        return Err(DiagnosticsError::Input("need at least two matching samples".into()));
    }
    let (lo, hi) = window.unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
    let mut clipped = 0;
    let pts: Vec<(f64, f64)> = t
        .iter()
        .zip(h)
        .filter(|(ti, _)| **ti >= lo && **ti <= hi)
        .map(|(&ti, &hi)| {
            if hi <= 1e-16 {
                clipped += 1;
                (ti, 1e-16f64.ln())
            } else {
                (ti, hi.ln())
            }
        })
        .collect();
    if pts.len() < 2 {
        return Err(DiagnosticsError::Input("fewer than two samples in the window".into()));
    }
    if clipped > 0 {
        log::warn!("decay fit: clipped {clipped} nonpositive entries");
    }
    let (slope, r_squared) = linear_fit(&pts);
    let mut convexity = Vec::new();
    for k in 1..h.len().saturating_sub(1) {
        let d2 = h[k + 1] - 2.0 * h[k] + h[k - 1];
        let scale = 1e-14 * h[k].abs().max(1e-300);
        convexity.push(if d2 > scale {
            1
        } else if d2 < -scale {
            -1
        } else {
            0
        });
    }
    Ok(DecayFit {
        lambda: -slope,
        r_squared,
        convexity,
        clipped,
    })
}

/// Least-squares slope and `R²` of `y` against `x`.
pub fn linear_fit(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    // shift y by its first sample so constant data give exactly zero
    let y0 = pts[0].1;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1 - y0).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - y0 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - y0 - my).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    (slope, r2)
}

/// Average of the piecewise-constant fine field over every coarse cell,
/// weighting fine cells by their overlap. For nested meshes this is the plain
/// mean of the fine cells inside each coarse cell.
pub fn restrict(fine: &StateField, coarse_cells: usize) -> Result<StateField, DiagnosticsError> {
    let nf = fine.cells();
    if coarse_cells == 0 || coarse_cells > nf {
        return Err(DiagnosticsError::Mesh(format!(
            "cannot restrict {nf} cells onto {coarse_cells}"
        )));
    }
    let n = fine.n();
    let mut data = vec![0.0; n * coarse_cells];
    if nf % coarse_cells == 0 {
        let ratio = nf / coarse_cells;
        for jc in 0..coarse_cells {
            for i in 0..n {
                data[jc * n + i] =
                    (0..ratio).map(|k| fine.get(jc * ratio + k, i)).sum::<f64>() / ratio as f64;
            }
        }
    } else {
        // integer arithmetic on the common refinement nf * coarse_cells
        for jc in 0..coarse_cells {
            let (lo, hi) = (jc * nf, (jc + 1) * nf);
            for jf in lo / coarse_cells..=(hi - 1) / coarse_cells {
                let (flo, fhi) = (jf * coarse_cells, (jf + 1) * coarse_cells);
                let overlap = (hi.min(fhi) - lo.max(flo)) as f64 / nf as f64;
                for i in 0..n {
                    data[jc * n + i] += overlap * fine.get(jf, i);
                }
            }
        }
    }
    Ok(StateField::new(n, coarse_cells, data, fine.t)?)
}

/// Per-species `Σ |restrict(fine) - coarse| Δx_coarse`.
pub fn l1_error(fine: &StateField, coarse: &StateField) -> Result<Vec<f64>, DiagnosticsError> {
    if fine.n() != coarse.n() {
        return Err(DiagnosticsError::Mesh("species counts differ".into()));
    }
    let nc = coarse.cells();
    let r = restrict(fine, nc)?;
    let dx = 1.0 / nc as f64;
    Ok((0..fine.n())
        .map(|i| (0..nc).map(|j| (r.get(j, i) - coarse.get(j, i)).abs()).sum::<f64>() * dx)
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub cells: usize,
    pub dx: f64,
    pub errors: Vec<f64>,
}

impl ConvergenceRow {
    pub fn total(&self) -> f64 {
        self.errors.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub reference_cells: usize,
    pub rows: Vec<ConvergenceRow>,
    /// Fitted slope of `log error` vs `log Δx` per species.
    pub species_rates: Vec<f64>,
    /// Same for the summed error `Σ_i ‖u_i - u_i^ref‖_L¹`.
    pub rate: f64,
}

impl ConvergenceTable {
    fn fit(reference_cells: usize, rows: Vec<ConvergenceRow>) -> Self {
        let n = rows.first().map_or(0, |r| r.errors.len());
        let fit = |f: &dyn Fn(&ConvergenceRow) -> f64| {
            let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.dx.ln(), f(r).ln())).collect();
            if pts.len() < 2 {
                f64::NAN
            } else {
                linear_fit(&pts).0
            }
        };
        let species_rates = (0..n).map(|i| fit(&|r: &ConvergenceRow| r.errors[i])).collect();
        let rate = fit(&|r: &ConvergenceRow| r.total());
        Self {
            reference_cells,
            rows,
            species_rates,
            rate,
        }
    }

    /// `N, dx, l1_error_u1.., l1_error_total, fitted_rate` (rate on every row).
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), DiagnosticsError> {
        let mut out = csv::Writer::from_writer(w);
        let n = self.species_rates.len();
        let mut header = vec!["N".to_string(), "dx".to_string()];
        header.extend((1..=n).map(|i| format!("l1_error_u{i}")));
        header.push("l1_error_total".into());
        header.push("fitted_rate".into());
        out.write_record(&header)?;
        for r in &self.rows {
            let mut rec = vec![r.cells.to_string(), fmt17(r.dx)];
            rec.extend(r.errors.iter().map(|e| fmt17(*e)));
            rec.push(fmt17(r.total()));
            rec.push(fmt17(self.rate));
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Runs `initial(mesh)` on every mesh and on the reference mesh up to
/// `config.t_final` (in parallel) and fits the `L¹` rate at final time.
pub fn convergence_study(
    spec: &ModelSpec,
    config: &SolverConfig,
    meshes: &[usize],
    reference_cells: usize,
    initial: &(dyn Fn(&Mesh1D) -> Result<StateField, SolverError> + Sync),
) -> Result<ConvergenceTable, DiagnosticsError> {
    if meshes.len() < 3 {
        return Err(DiagnosticsError::Input(format!(
            "need at least 3 meshes for a rate fit (got {})",
            meshes.len()
        )));
    }
    if let Some(bad) = meshes.iter().find(|&&n| n == 0 || n > reference_cells) {
        return Err(DiagnosticsError::Mesh(format!(
            "mesh {bad} is finer than the reference {reference_cells}"
        )));
    }
    let cfg = SolverConfig {
        sample_every: 0,
        snapshots: Vec::new(),
        ..config.clone()
    };
    let mut all: Vec<usize> = meshes.to_vec();
    all.push(reference_cells);
    let results: Vec<(usize, Result<StateField, SolverError>)> = all
        .par_iter()
        .map(|&cells| {
            let out = Mesh1D::new(cells).and_then(|mesh| {
                let u0 = initial(&mesh)?;
                Ok(run(spec, &mesh, &cfg, &u0)?.final_state)
            });
            (cells, out)
        })
        .collect();
    let mut finals = Vec::with_capacity(results.len());
    for (cells, res) in results {
        match res {
            Ok(f) => finals.push((cells, f)),
            Err(source) => {
                // rows for runs that did finish, if the reference did
                let reference = finals.iter().find(|(c, _)| *c == reference_cells);
                let rows = reference
                    .map(|(_, rf)| {
                        finals
                            .iter()
                            .filter(|(c, _)| *c != reference_cells)
                            .filter_map(|(c, f)| {
                                l1_error(rf, f).ok().map(|errors| ConvergenceRow {
                                    cells: *c,
                                    dx: 1.0 / *c as f64,
                                    errors,
                                })
                            })
                            .collect()
                    })
                    .unwrap_or_default();
                return Err(DiagnosticsError::Run {
                    cells,
                    source,
                    partial: Box::new(ConvergenceTable::fit(reference_cells, rows)),
                });
            }
        }
    }
    let reference = finals.pop().expect("reference run").1;
    let rows = finals
        .iter()
        .map(|(c, f)| {
            Ok(ConvergenceRow {
                cells: *c,
                dx: 1.0 / *c as f64,
                errors: l1_error(&reference, f)?,
            })
        })
        .collect::<Result<Vec<_>, DiagnosticsError>>()?;
    Ok(ConvergenceTable::fit(reference_cells, rows))
}

/// The default segregation profile (normalized) as an initial-data callback.
pub fn default_initial(mesh: &Mesh1D) -> Result<StateField, SolverError> {
    initial_profile(&InitialProfile::default(), mesh)
}

/// Time series of diagnostics along a sampled trajectory.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DiagnosticsSeries {
    pub t: Vec<f64>,
    pub mass: Vec<Vec<f64>>,
    pub h_b: Vec<f64>,
    pub h_r: Vec<Option<f64>>,
    pub h_b_rel: Vec<f64>,
    pub h_r_rel: Vec<Option<f64>>,
    pub dissipation_quad: Vec<Option<f64>>,
    pub dissipation_sqrt: Vec<Option<f64>>,
    pub min_u: Vec<Vec<f64>>,
    pub max_u: Vec<Vec<f64>>,
    pub newton_iters: Vec<usize>,
}

impl DiagnosticsSeries {
    /// Evaluates every diagnostic on `samples`. Entries that do not apply
    /// to the model (Rao terms for state-dependent `q`) are `None`.
    /// `reference` supplies the comparison trajectory for `H_R(u|ū)`.
    pub fn compute(
        spec: &ModelSpec,
        mesh: &Mesh1D,
        samples: &[StateField],
        newton_iters: &[usize],
        uinf: &[f64],
        reference: Option<&[StateField]>,
    ) -> Result<Self, DiagnosticsError> {
        if let Some(r) = reference {
            if r.len() != samples.len() {
                return Err(DiagnosticsError::Input("reference trajectory length differs".into()));
            }
        }
        let mut s = Self::default();
        let rao_ok = symmetric_constant_q(spec, "").is_ok();
        let diss_ok = spec.constant_q().is_ok();
        for (k, f) in samples.iter().enumerate() {
            s.t.push(f.t);
            s.mass.push(f.masses(mesh.dx()));
            s.h_b.push(boltzmann_entropy(f, mesh));
            s.h_r.push(rao_ok.then(|| rao_entropy(spec, f, mesh)).transpose()?);
            s.h_b_rel.push(relative_boltzmann(f, mesh, uinf)?);
            s.h_r_rel.push(match reference {
                Some(r) if rao_ok => Some(relative_rao(spec, f, &r[k], mesh)?),
                _ => None,
            });
            let d = diss_ok.then(|| boltzmann_dissipation(spec, f, mesh)).transpose()?;
            s.dissipation_quad.push(d.map(|d| d.0));
            s.dissipation_sqrt.push(d.map(|d| d.1));
            let n = f.n();
            s.min_u.push((0..n).map(|i| f.species(i).into_iter().fold(f64::INFINITY, f64::min)).collect());
            s.max_u.push((0..n).map(|i| f.species(i).into_iter().fold(f64::NEG_INFINITY, f64::max)).collect());
            s.newton_iters.push(newton_iters.get(k).copied().unwrap_or(0));
        }
        Ok(s)
    }

    /// Largest increase between consecutive samples of a series (0 if monotone).
    pub fn max_increase(values: &[f64]) -> f64 {
        values
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), DiagnosticsError> {
        let mut out = csv::Writer::from_writer(w);
        let n = self.mass.first().map_or(0, Vec::len);
        let mut header = vec!["t".to_string()];
        header.extend((1..=n).map(|i| format!("mass_{i}")));
        for h in ["H_B", "H_R", "H_B_rel", "H_R_rel", "diss_quadratic", "diss_sqrt"] {
            header.push(h.into());
        }
        header.extend((1..=n).map(|i| format!("min_u{i}")));
        header.extend((1..=n).map(|i| format!("max_u{i}")));
        header.push("min_u".into());
        header.push("newton_iters".into());
        out.write_record(&header)?;
        let opt = |v: Option<f64>| v.map(fmt17).unwrap_or_default();
        for k in 0..self.t.len() {
            let mut rec = vec![fmt17(self.t[k])];
            rec.extend(self.mass[k].iter().map(|v| fmt17(*v)));
            rec.push(fmt17(self.h_b[k]));
            rec.push(opt(self.h_r[k]));
            rec.push(fmt17(self.h_b_rel[k]));
            rec.push(opt(self.h_r_rel[k]));
            rec.push(opt(self.dissipation_quad[k]));
            rec.push(opt(self.dissipation_sqrt[k]));
            rec.extend(self.min_u[k].iter().map(|v| fmt17(*v)));
            rec.extend(self.max_u[k].iter().map(|v| fmt17(*v)));
            rec.push(fmt17(self.min_u[k].iter().copied().fold(f64::INFINITY, f64::min)));
            rec.push(self.newton_iters[k].to_string());
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// `t, x, u1..un, u0` for every snapshot.
pub fn write_trajectory_csv<W: Write>(w: W, mesh: &Mesh1D, fields: &[StateField]) -> Result<(), DiagnosticsError> {
    let mut out = csv::Writer::from_writer(w);
    let n = fields.first().map_or(0, StateField::n);
    let mut header = vec!["t".to_string(), "x".to_string()];
    header.extend((1..=n).map(|i| format!("u{i}")));
    header.push("u0".into());
    out.write_record(&header)?;
    for f in fields {
        for j in 0..f.cells() {
            let mut rec = vec![fmt17(f.t), fmt17(mesh.center(j))];
            rec.extend(f.cell(j).iter().map(|v| fmt17(*v)));
            rec.push(fmt17(f.u0(j)));
            out.write_record(&rec)?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Shortest decimal form that round-trips, at most 17 significant digits.
pub fn fmt17(v: f64) -> String {
    if v.is_finite() {
        format!("{:.16e}", v)
    } else {
        v.to_string()
    }
}

/// Smallest eigenvalue of the species block of `q`; the `α` in the relative
/// Rao lower bound.
pub fn rao_alpha(spec: &ModelSpec) -> Result<f64, DiagnosticsError> {
    let q = symmetric_constant_q(spec, "Rao bound")?;
    let n = spec.n();
    let block = Mat::from_fn(n, n, |i, j| q[(i + 1, j + 1)]);
    sym_eig_min(&block).map_err(|e| DiagnosticsError::Input(e.to_string()))
}
