//! Finite-volume implicit Euler scheme on `(0, 1)` with no-flux boundaries.
//!
//! Unknowns are stored cell-major: species `i` of cell `j` lives at
//! `j * n + i`. The interface flux is
//! `F_{j+½} = -(K⁻¹A(û) + ηI)(u_{j+1} - u_j)/Δx` with `û` the mean of the two
//! neighbouring cells, and each step solves
//! `R(u) = (u - u_old)/Δt + (F_{j+½} - F_{j-½})/Δx = 0` by damped Newton.

use serde::{Deserialize, Serialize};

use crate::linalg::{BandedMatrix, LinalgError, Mat};
use crate::matrices::diffusion_matrix_raw;
use crate::model::{ModelSpec, TOL_NEG};
use crate::scalar::Dual;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolverError {
    #[error("mesh needs at least 4 cells (got {0})")]
    Mesh(usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid solver setting: {0}")]
    Config(String),
    #[error("invalid initial data: {0}")]
    InitialData(String),
    #[error("model `{0}` is analysis-only and cannot be simulated")]
    NotSimulatable(String),
    #[error("non-finite diffusion matrix at interface {interface}: {source}")]
    Assembly {
        interface: usize,
        source: LinalgError,
    },
    #[error("linear solve failed: {0}")]
    Linear(LinalgError),
    #[error("newton did not converge in {iterations} iterations at step {step} (residual {residual:e})")]
    MaxIterations {
        step: usize,
        iterations: usize,
        residual: f64,
    },
    #[error("line search stalled at step {step} (residual {residual:e})")]
    LineSearchStall { step: usize, residual: f64 },
    #[error("state left the simplex at step {step}: cell {cell}, value {value:e}")]
    OutOfSimplex { step: usize, cell: usize, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mesh1D {
    cells: usize,
}

impl Mesh1D {
    pub fn new(cells: usize) -> Result<Self, SolverError> {
        if cells < 4 {
            return Err(SolverError::Mesh(cells));
        }
        Ok(Self { cells })
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn dx(&self) -> f64 {
        1.0 / self.cells as f64
    }

    pub fn center(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.dx()
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.cells).map(|j| self.center(j)).collect()
    }
}

/// Cell averages `u_1..u_n` per cell; `u0` is always derived.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateField {
    n: usize,
    cells: usize,
    data: Vec<f64>,
    pub t: f64,
}

impl StateField {
    pub fn new(n: usize, cells: usize, data: Vec<f64>, t: f64) -> Result<Self, SolverError> {
        if n == 0 || data.len() != n * cells {
            return Err(SolverError::Shape(format!(
                "{} values for {cells} cells of {n} species",
                data.len()
            )));
        }
        Ok(Self { n, cells, data, t })
    }

    /// Spatially constant field.
    pub fn constant(u: &[f64], cells: usize) -> Self {
        let data = (0..cells).flat_map(|_| u.iter().copied()).collect();
        Self {
            n: u.len(),
            cells,
            data,
            t: 0.0,
        }
    }

    pub fn from_fn(n: usize, mesh: &Mesh1D, f: impl Fn(f64) -> Vec<f64>) -> Result<Self, SolverError> {
        let mut data = Vec::with_capacity(n * mesh.cells());
        for x in mesh.centers() {
            let u = f(x);
            if u.len() != n {
                return Err(SolverError::Shape(format!("profile returned {} species", u.len())));
            }
            data.extend(u);
        }
        Self::new(n, mesh.cells(), data, 0.0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn cell(&self, j: usize) -> &[f64] {
        &self.data[j * self.n..(j + 1) * self.n]
    }

    pub fn get(&self, j: usize, i: usize) -> f64 {
        self.data[j * self.n + i]
    }

    pub fn u0(&self, j: usize) -> f64 {
        1.0 - self.cell(j).iter().sum::<f64>()
    }

    pub fn species(&self, i: usize) -> Vec<f64> {
        (0..self.cells).map(|j| self.get(j, i)).collect()
    }

    /// `Σ_j u_{j,i} Δx` for every species.
    pub fn masses(&self, dx: f64) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.species(i).iter().sum::<f64>() * dx)
            .collect()
    }

    /// Smallest entry over all cells and species, including `u0`.
    pub fn min_value(&self) -> f64 {
        (0..self.cells)
            .map(|j| {
                self.cell(j)
                    .iter()
                    .copied()
                    .fold(self.u0(j), f64::min)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// First cell and value below `-tol`, if any (solvent checked as well).
    pub fn first_violation(&self, tol: f64) -> Option<(usize, f64)> {
        (0..self.cells).find_map(|j| {
            let m = self.cell(j).iter().copied().fold(self.u0(j), f64::min);
            (m < -tol).then_some((j, m))
        })
    }

    fn with_data(&self, data: Vec<f64>) -> Self {
        Self {
            n: self.n,
            cells: self.cells,
            data,
            t: self.t,
        }
    }

    fn check_shape(&self, other: &StateField) -> Result<(), SolverError> {
        if self.n != other.n || self.cells != other.cells {
            return Err(SolverError::Shape(format!(
                "{}x{} vs {}x{}",
                self.cells, self.n, other.cells, other.n
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum JacobianMode {
    #[default]
    Analytic,
    FiniteDifference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_final: f64,
    pub newton_tol: f64,
    pub newton_max_iters: usize,
    pub jacobian_reg: f64,
    pub jacobian_mode: JacobianMode,
    pub backtrack_factor: f64,
    pub max_backtracks: usize,
    pub projection: bool,
    /// Keep a diagnostics sample every this many steps (0 disables sampling).
    pub sample_every: usize,
    pub snapshots: Vec<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_final: 6.0,
            newton_tol: 1e-10,
            newton_max_iters: 50,
            jacobian_reg: 1e-12,
            jacobian_mode: JacobianMode::Analytic,
            backtrack_factor: 0.5,
            max_backtracks: 30,
            projection: false,
            sample_every: 10,
            snapshots: Vec::new(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |what: &str| Err(SolverError::Config(what.to_string()));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("dt must be positive");
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return bad("final time must be nonnegative");
        }
        if !(self.newton_tol > 0.0) {
            return bad("newton tolerance must be positive");
        }
        if self.newton_max_iters == 0 {
            return bad("newton_max_iters must be positive");
        }
        if !(self.jacobian_reg >= 0.0) {
            return bad("jacobian regularization must be nonnegative");
        }
        if !(self.backtrack_factor > 0.0 && self.backtrack_factor < 1.0) {
            return bad("backtrack factor must lie in (0, 1)");
        }
        if self.snapshots.iter().any(|t| !(*t >= 0.0)) {
            return bad("snapshot times must be nonnegative");
        }
        Ok(())
    }

    /// Number of time steps to reach `t_final`.
    pub fn steps(&self) -> usize {
        (self.t_final / self.dt - 1e-9).ceil().max(0.0) as usize
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NewtonStats {
    pub iterations: usize,
    pub residual: f64,
    pub backtracks: usize,
    pub projections: usize,
    pub history: Vec<f64>,
}

/// Parameters of the smooth segregation profile
/// `u1 = C0 (1 + tanh((x0 - x)/w)) + eps0`, `u2 = C0 (1 - tanh((x0 - x)/w))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialProfile {
    pub c0: f64,
    pub x0: f64,
    pub width: f64,
    pub eps0: f64,
    /// Divide by `2 C0 + eps0` when that exceeds 1.
    pub normalize: bool,
}

impl Default for InitialProfile {
    fn default() -> Self {
        Self {
            c0: 0.5,
            x0: 0.1,
            width: 0.05,
            eps0: 0.01,
            normalize: true,
        }
    }
}

impl InitialProfile {
    pub fn raw(&self, x: f64) -> [f64; 2] {
        let t = ((self.x0 - x) / self.width).tanh();
        [self.c0 * (1.0 + t) + self.eps0, self.c0 * (1.0 - t)]
    }

    /// Factor the profile is divided by (1 if no normalization applies).
    pub fn scale(&self) -> f64 {
        let s = 2.0 * self.c0 + self.eps0;
        if self.normalize && s > 1.0 {
            s
        } else {
            1.0
        }
    }
}

/// Cell-centred evaluation of the two-species profile.
pub fn initial_profile(p: &InitialProfile, mesh: &Mesh1D) -> Result<StateField, SolverError> {
    if !(p.width > 0.0) || p.c0 < 0.0 || p.eps0 < 0.0 {
        return Err(SolverError::InitialData(
            "need width > 0, C0 >= 0 and eps0 >= 0".into(),
        ));
    }
    let s = p.scale();
    let field = StateField::from_fn(2, mesh, |x| {
        let [a, b] = p.raw(x);
        vec![a / s, b / s]
    })?;
    if let Some((cell, value)) = field.first_violation(TOL_NEG) {
        return Err(SolverError::InitialData(format!(
            "profile leaves the simplex in cell {cell} (value {value:e}); enable normalization"
        )));
    }
    Ok(field)
}

fn diffusion(spec: &ModelSpec, u: &[f64], interface: usize) -> Result<Mat<f64>, SolverError> {
    let m = diffusion_matrix_raw(spec, u)
        .map_err(|source| SolverError::Assembly { interface, source })?;
    m.check_finite()
        .map_err(|source| SolverError::Assembly { interface, source })?;
    Ok(m)
}

/// Interface fluxes `F_{j+½}` for `j = 0..=N` (index `j` is the left face of
/// cell `j`); the two boundary faces are zero.
pub fn interface_fluxes(
    spec: &ModelSpec,
    field: &StateField,
    mesh: &Mesh1D,
) -> Result<Vec<Vec<f64>>, SolverError> {
    let (n, cells, dx) = (field.n(), field.cells(), mesh.dx());
    let eta = spec.eta();
    let mut out = vec![vec![0.0; n]; cells + 1];
    let mut mid = vec![0.0; n];
    for face in 1..cells {
        let (l, r) = (field.cell(face - 1), field.cell(face));
        for i in 0..n {
            mid[i] = 0.5 * (l[i] + r[i]);
        }
        let m = diffusion(spec, &mid, face)?;
        for i in 0..n {
            let mut f = 0.0;
            for k in 0..n {
                f += m[(i, k)] * (r[k] - l[k]);
            }
            out[face][i] = -(f + eta * (r[i] - l[i])) / dx;
        }
    }
    Ok(out)
}

/// Fluxes `J_i` at every face, for diagnostics.
pub fn recover_fluxes(
    spec: &ModelSpec,
    field: &StateField,
    mesh: &Mesh1D,
) -> Result<Vec<Vec<f64>>, SolverError> {
    if field.cells() != mesh.cells() || field.n() != spec.n() {
        return Err(SolverError::Shape("field does not match mesh/model".into()));
    }
    interface_fluxes(spec, field, mesh)
}

/// Phase velocities `v_i = J_i / û_i` at every face, `None` where `û_i ≤ 1e-10`.
pub fn face_velocities(
    spec: &ModelSpec,
    field: &StateField,
    mesh: &Mesh1D,
) -> Result<Vec<Vec<Option<f64>>>, SolverError> {
    let fluxes = recover_fluxes(spec, field, mesh)?;
    let cells = field.cells();
    Ok(fluxes
        .iter()
        .enumerate()
        .map(|(face, j)| {
            (0..field.n())
                .map(|i| {
                    let u = match face {
                        0 => field.get(0, i),
                        f if f == cells => field.get(cells - 1, i),
                        f => 0.5 * (field.get(f - 1, i) + field.get(f, i)),
                    };
                    (u > 1e-10).then(|| j[i] / u)
                })
                .collect()
        })
        .collect())
}

/// Discrete residual, cell-major.
pub fn residual(
    spec: &ModelSpec,
    u_new: &StateField,
    u_old: &StateField,
    mesh: &Mesh1D,
    dt: f64,
) -> Result<Vec<f64>, SolverError> {
    u_new.check_shape(u_old)?;
    let (n, cells, dx) = (u_new.n(), u_new.cells(), mesh.dx());
    let fluxes = interface_fluxes(spec, u_new, mesh)?;
    let mut r = vec![0.0; n * cells];
    for j in 0..cells {
        for i in 0..n {
            r[j * n + i] = (u_new.get(j, i) - u_old.get(j, i)) / dt
                + (fluxes[j + 1][i] - fluxes[j][i]) / dx;
        }
    }
    Ok(r)
}

/// Discrete `L²` norm `sqrt(Δx Σ r²)`.
pub fn residual_norm(r: &[f64], mesh: &Mesh1D) -> f64 {
    (mesh.dx() * r.iter().map(|v| v * v).sum::<f64>()).sqrt()
}

/// Bandwidth of the Jacobian: neighbouring cell blocks are `n` columns apart.
pub fn jacobian_bandwidth(n: usize) -> usize {
    2 * n - 1
}

/// Exact Jacobian of [`residual`] with respect to `u_new`.
///
/// `∂M/∂û_m` comes from evaluating the diffusion matrix on dual numbers seeded
/// in direction `m`; with `P = ½ (∂M/∂û_m) Δu / Δx` and `S = (M + ηI)/Δx`
/// the face flux has `∂F/∂u_left = -P + S e_m`, `∂F/∂u_right = -P - S e_m`.
pub fn jacobian(
    spec: &ModelSpec,
    u_new: &StateField,
    mesh: &Mesh1D,
    dt: f64,
) -> Result<BandedMatrix<f64>, SolverError> {
    let (n, cells, dx) = (u_new.n(), u_new.cells(), mesh.dx());
    let bw = jacobian_bandwidth(n);
    let mut jac = BandedMatrix::zeros(n * cells, bw, bw);
    for row in 0..n * cells {
        jac.add(row, row, 1.0 / dt);
    }
    let eta = spec.eta();
    let mut mid = vec![Dual::constant(0.0); n];
    // dfl[m][i] = ∂F_i/∂u_left,m ; dfr likewise
    let mut dfl = vec![vec![0.0; n]; n];
    let mut dfr = vec![vec![0.0; n]; n];
    for face in 1..cells {
        let (l, r) = (u_new.cell(face - 1), u_new.cell(face));
        for m in 0..n {
            for i in 0..n {
                let re = 0.5 * (l[i] + r[i]);
                mid[i] = if i == m { Dual::variable(re) } else { Dual::constant(re) };
            }
            let md = diffusion_matrix_raw(spec, &mid)
                .map_err(|source| SolverError::Assembly { interface: face, source })?;
            for i in 0..n {
                let mut p = 0.0;
                for k in 0..n {
                    p += md[(i, k)].eps * (r[k] - l[k]);
                }
                let p = 0.5 * p / dx;
                let s = (md[(i, m)].re + if i == m { eta } else { 0.0 }) / dx;
                if !(p.is_finite() && s.is_finite()) {
                    return Err(SolverError::Assembly {
                        interface: face,
                        source: LinalgError::NonFinite(i, m),
                    });
                }
                dfl[m][i] = -p + s;
                dfr[m][i] = -p - s;
            }
        }
        // face sits between cells a = face-1 and b = face: R_a += F/dx, R_b -= F/dx
        let (a, b) = (face - 1, face);
        for i in 0..n {
            for m in 0..n {
                jac.add(a * n + i, a * n + m, dfl[m][i] / dx);
                jac.add(a * n + i, b * n + m, dfr[m][i] / dx);
                jac.add(b * n + i, a * n + m, -dfl[m][i] / dx);
                jac.add(b * n + i, b * n + m, -dfr[m][i] / dx);
            }
        }
    }
    Ok(jac)
}

/// Central-difference Jacobian with step `1e-7 max(1, |u|)`, coloured so that
/// unknowns three cells apart are perturbed together.
pub fn jacobian_fd(
    spec: &ModelSpec,
    u_new: &StateField,
    u_old: &StateField,
    mesh: &Mesh1D,
    dt: f64,
) -> Result<BandedMatrix<f64>, SolverError> {
    let (n, cells) = (u_new.n(), u_new.cells());
    let bw = jacobian_bandwidth(n);
    let mut jac = BandedMatrix::zeros(n * cells, bw, bw);
    for color in 0..3 {
        for m in 0..n {
            let cols: Vec<usize> = (color..cells).step_by(3).collect();
            let mut plus = u_new.as_slice().to_vec();
            let mut minus = plus.clone();
            let mut h = vec![0.0; cells];
            for &c in &cols {
                let idx = c * n + m;
                h[c] = 1e-7 * u_new.as_slice()[idx].abs().max(1.0);
                plus[idx] += h[c];
                minus[idx] -= h[c];
            }
            let rp = residual(spec, &u_new.with_data(plus), u_old, mesh, dt)?;
            let rm = residual(spec, &u_new.with_data(minus), u_old, mesh, dt)?;
            for &c in &cols {
                let lo = c.saturating_sub(1);
                let hi = (c + 1).min(cells - 1);
                for row_cell in lo..=hi {
                    for i in 0..n {
                        let row = row_cell * n + i;
                        jac.add(row, c * n + m, (rp[row] - rm[row]) / (2.0 * h[c]));
                    }
                }
            }
        }
    }
    Ok(jac)
}

/// Euclidean projection of the extended vector `(u0, u_1..u_n)` onto the
/// probability simplex (sort-based); returns the projected `u_1..u_n`.
pub fn simplex_project(u: &[f64]) -> Vec<f64> {
    let mut ext = Vec::with_capacity(u.len() + 1);
    ext.push(1.0 - u.iter().sum::<f64>());
    ext.extend_from_slice(u);
    let mut sorted = ext.clone();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut tau = 0.0;
    for (k, &v) in sorted.iter().enumerate() {
        cum += v;
        let t = (cum - 1.0) / (k + 1) as f64;
        if v - t > 0.0 {
            tau = t;
        }
    }
    ext[1..].iter().map(|v| (v - tau).max(0.0)).collect()
}

fn project_field(data: &mut [f64], n: usize) -> usize {
    let mut count = 0;
    for cell in data.chunks_mut(n) {
        let u0 = 1.0 - cell.iter().sum::<f64>();
        if u0 < 0.0 || cell.iter().any(|v| *v < 0.0) {
            let p = simplex_project(cell);
            cell.copy_from_slice(&p);
            count += 1;
        }
    }
    count
}

/// One implicit Euler step. The Newton iteration starts from `u_old`.
pub fn newton_solve(
    spec: &ModelSpec,
    u_old: &StateField,
    mesh: &Mesh1D,
    config: &SolverConfig,
    step: usize,
) -> Result<(StateField, NewtonStats), SolverError> {
    let dt = config.dt;
    let n = u_old.n();
    let mut u = u_old.clone();
    u.t = u_old.t + dt;
    let mut r = residual(spec, &u, u_old, mesh, dt)?;
    let mut norm = residual_norm(&r, mesh);
    let mut stats = NewtonStats {
        history: vec![norm],
        ..Default::default()
    };
    while norm > config.newton_tol {
        if stats.iterations == config.newton_max_iters {
            return Err(SolverError::MaxIterations {
                step,
                iterations: stats.iterations,
                residual: norm,
            });
        }
        let mut jac = match config.jacobian_mode {
            JacobianMode::Analytic => jacobian(spec, &u, mesh, dt)?,
            JacobianMode::FiniteDifference => jacobian_fd(spec, &u, u_old, mesh, dt)?,
        };
        for row in 0..jac.dim() {
            jac.add(row, row, config.jacobian_reg);
        }
        jac.factor().map_err(SolverError::Linear)?;
        let rhs: Vec<f64> = r.iter().map(|v| -v).collect();
        let delta = jac.solve(&rhs);
        stats.iterations += 1;

        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=config.max_backtracks {
            let mut trial: Vec<f64> = u
                .as_slice()
                .iter()
                .zip(&delta)
                .map(|(a, d)| a + lambda * d)
                .collect();
            let projected = if config.projection {
                project_field(&mut trial, n)
            } else {
                0
            };
            let trial = u.with_data(trial);
            if let Ok(rt) = residual(spec, &trial, u_old, mesh, dt) {
                let nt = residual_norm(&rt, mesh);
                if nt.is_finite() && nt < norm {
                    accepted = Some((trial, rt, nt, projected));
                    break;
                }
            }
            stats.backtracks += 1;
            lambda *= config.backtrack_factor;
        }
        let Some((trial, rt, nt, projected)) = accepted else {
            return Err(SolverError::LineSearchStall {
                step,
                residual: norm,
            });
        };
        stats.projections += projected;
        u = trial;
        r = rt;
        norm = nt;
        stats.history.push(norm);
    }
    stats.residual = norm;
    Ok((u, stats))
}

/// Output of [`run`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub initial: StateField,
    pub final_state: StateField,
    /// Fields at the requested snapshot times, in the order requested.
    pub snapshots: Vec<StateField>,
    /// Fields every `sample_every` steps (starting with the initial field),
    /// plus the final field.
    pub samples: Vec<StateField>,
    /// Newton iterations spent on the step that produced each sample.
    pub sample_iterations: Vec<usize>,
    pub stats: Vec<NewtonStats>,
    /// Smallest value of any `u_i` or `u0` seen along the run.
    pub min_value: f64,
}

impl Trajectory {
    pub fn max_residual(&self) -> f64 {
        self.stats.iter().map(|s| s.residual).fold(0.0, f64::max)
    }

    pub fn total_projections(&self) -> usize {
        self.stats.iter().map(|s| s.projections).sum()
    }

    pub fn total_iterations(&self) -> usize {
        self.stats.iter().map(|s| s.iterations).sum()
    }
}

/// Steps the scheme from `initial.t` over `config.t_final` with fixed `Δt`.
pub fn run(
    spec: &ModelSpec,
    mesh: &Mesh1D,
    config: &SolverConfig,
    initial: &StateField,
) -> Result<Trajectory, SolverError> {
    config.validate()?;
    if spec.is_analysis_only() {
        return Err(SolverError::NotSimulatable(spec.name.clone()));
    }
    if initial.cells() != mesh.cells() || initial.n() != spec.n() {
        return Err(SolverError::Shape(format!(
            "initial field is {}x{}, expected {}x{}",
            initial.cells(),
            initial.n(),
            mesh.cells(),
            spec.n()
        )));
    }
    let steps = config.steps();
    let snap_steps: Vec<usize> = config
        .snapshots
        .iter()
        .map(|t| ((t / config.dt).round() as usize).min(steps))
        .collect();
    let mut snapshots: Vec<Option<StateField>> = vec![None; snap_steps.len()];
    let mut samples = Vec::new();
    let mut sample_iterations = Vec::new();
    let mut stats = Vec::with_capacity(steps);
    let mut u = initial.clone();
    let mut min_value = u.min_value();
    // raw (unnormalized) data may start outside the simplex; only flag drift
    // below the initial minimum
    let drift_floor = 1e-6 - min_value.min(0.0);
    let t0 = initial.t;

    let record = |k: usize, u: &StateField, snapshots: &mut Vec<Option<StateField>>| {
        for (slot, &s) in snapshots.iter_mut().zip(&snap_steps) {
            if s == k {
                *slot = Some(u.clone());
            }
        }
    };
    record(0, &u, &mut snapshots);
    if config.sample_every > 0 {
        samples.push(u.clone());
        sample_iterations.push(0);
    }
    for k in 1..=steps {
        let (mut next, st) = newton_solve(spec, &u, mesh, config, k)?;
        next.t = t0 + k as f64 * config.dt;
        min_value = min_value.min(next.min_value());
        if !config.projection {
            if let Some((cell, value)) = next.first_violation(drift_floor) {
                return Err(SolverError::OutOfSimplex {
                    step: k,
                    cell,
                    value,
                });
            }
        }
        record(k, &next, &mut snapshots);
        if config.sample_every > 0 && (k % config.sample_every == 0 || k == steps) {
            samples.push(next.clone());
            sample_iterations.push(st.iterations);
        }
        stats.push(st);
        u = next;
    }
    Ok(Trajectory {
        initial: initial.clone(),
        snapshots: snapshots.into_iter().map(|s| s.expect("snapshot step within range")).collect(),
        final_state: u,
        samples,
        sample_iterations,
        stats,
        min_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::preset;

    #[test]
    fn mesh_rejects_small() {
        assert!(matches!(Mesh1D::new(3), Err(SolverError::Mesh(3))));
        assert_eq!(Mesh1D::new(4).unwrap().dx(), 0.25);
    }

    #[test]
    fn profile_values() {
        let p = InitialProfile {
            normalize: false,
            ..Default::default()
        };
        let [a, b] = p.raw(0.1);
        assert!((a - 0.51).abs() < 1e-15 && (b - 0.5).abs() < 1e-15);
        let [a, b] = p.raw(1e3);
        assert!((a - 0.01).abs() < 1e-15 && (b - 1.0).abs() < 1e-15);
        let exact = InitialProfile {
            eps0: 0.0,
            ..p
        };
        let f = initial_profile(&exact, &Mesh1D::new(16).unwrap()).unwrap();
        for j in 0..16 {
            assert!(f.u0(j).abs() < 1e-15);
        }
        // unnormalized default overshoots the simplex
        assert!(initial_profile(&p, &Mesh1D::new(16).unwrap()).is_err());
        let f = initial_profile(&InitialProfile::default(), &Mesh1D::new(16).unwrap()).unwrap();
        assert!(f.min_value() >= -1e-15);
    }

    #[test]
    fn constant_state_is_steady() {
        let spec = preset("tumor-jb").unwrap();
        let mesh = Mesh1D::new(8).unwrap();
        let u = StateField::constant(&[0.3, 0.4], 8);
        let r = residual(&spec, &u, &u, &mesh, 1e-3).unwrap();
        assert!(r.iter().all(|v| *v == 0.0));
        let (next, st) = newton_solve(&spec, &u, &mesh, &SolverConfig::default(), 1).unwrap();
        assert!(st.iterations <= 1);
        assert_eq!(next.as_slice(), u.as_slice());
    }

    #[test]
    fn projection_examples() {
        assert_eq!(simplex_project(&[0.2, 0.3]), vec![0.2, 0.3]);
        let p = simplex_project(&[1.2, 0.0]);
        // extended point (-0.2, 1.2, 0) projects to (0, 1, 0)
        assert!((p[0] - 1.0).abs() < 1e-15 && p[1] == 0.0);
    }
}
