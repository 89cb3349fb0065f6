//! Coefficient data of a multiphase model and the named presets.
//!
//! Every coefficient table is `(n+1)×(n+1)` with index 0 for the solvent.
//! States are passed either as the `n` reduced fractions `u` or as the
//! extended vector `ue = (u0, u1, …, un)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::linalg::Mat;
use crate::scalar::Real;

/// Components may leave `[0, 1]` by at most this much before a state is
/// treated as corrupted.
pub const TOL_NEG: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("species count must be positive")]
    ZeroSpecies,
    #[error("{what}: expected {expected} entries, got {got}")]
    Dimension {
        what: String,
        expected: usize,
        got: usize,
    },
    #[error("state component {index} = {value} lies outside [0, 1]")]
    OutOfSimplex { index: usize, value: f64 },
    #[error("{what} is not symmetric at ({i}, {j})")]
    Asymmetric { what: String, i: usize, j: usize },
    #[error("{what}: invalid entry at ({i}, {j}): {reason}")]
    InvalidEntry {
        what: String,
        i: usize,
        j: usize,
        reason: String,
    },
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: String,
        value: f64,
        reason: String,
    },
    #[error("unknown preset '{0}'")]
    UnknownPreset(String),
    #[error("operation requires {expected} drag, model has {found}")]
    WrongDragLaw { expected: String, found: String },
    #[error("operation requires a constant pressure law, model uses {0}")]
    StateDependentLaw(String),
    #[error("pressure law {law} is defined for n = {expected} only (got n = {got})")]
    LawDimension {
        law: String,
        expected: usize,
        got: usize,
    },
}

/// Drag coefficients `k_ij`, symmetric with zero diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DragLaw {
    /// `k_ij = 1` for `i ≠ j`; `K(u)` is the identity.
    Unit,
    Constant(Mat<f64>),
    /// `k_ij = 1 + eps·k*_ij·u_i·u_j`.
    Perturbed { k_star: Mat<f64>, eps: f64 },
    /// `k_ij = 1 + k*_ij·sqrt(u_i·u_j)`.
    Degenerate { k_star: Mat<f64> },
}

impl DragLaw {
    pub fn name(&self) -> &'static str {
        match self {
            DragLaw::Unit => "unit",
            DragLaw::Constant(_) => "constant",
            DragLaw::Perturbed { .. } => "perturbed",
            DragLaw::Degenerate { .. } => "degenerate",
        }
    }
}

/// Intraphase pressure law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PressureLaw {
    ConstantMatrix(Mat<f64>),
    /// `q11 = beta_c, q12 = 0, q21 = beta_m·theta·u2, q22 = beta_m` (n = 2).
    TumorJB {
        beta_c: f64,
        beta_m: f64,
        theta: f64,
    },
    /// `q1 = u1(1 + theta1·u2)`, `q2 = u2(1 + theta2·u1)` (n = 2).
    MultiphaseSKT { theta1: f64, theta2: f64 },
}

impl PressureLaw {
    pub fn name(&self) -> &'static str {
        match self {
            PressureLaw::ConstantMatrix(_) => "constant",
            PressureLaw::TumorJB { .. } => "tumor-jb",
            PressureLaw::MultiphaseSKT { .. } => "multiphase-skt",
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, PressureLaw::ConstantMatrix(_))
    }
}

/// Volume fractions of the `n` phases; the solvent fraction is derived.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexPoint<T> {
    u: Vec<T>,
    u0: T,
}

impl<T: Real> SimplexPoint<T> {
    /// Checks every component (including `u0`) against `[-TOL_NEG, 1 + TOL_NEG]`.
    pub fn new(u: Vec<T>) -> Result<Self, ModelError> {
        let p = Self::new_unchecked(u);
        p.validate()?;
        Ok(p)
    }

    pub fn new_unchecked(u: Vec<T>) -> Self {
        let u0 = u.iter().fold(T::one(), |acc, &v| acc - v);
        Self { u, u0 }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let check = |index: usize, v: T| {
            let x = v.value();
            if !(-TOL_NEG..=1.0 + TOL_NEG).contains(&x) {
                Err(ModelError::OutOfSimplex { index, value: x })
            } else {
                Ok(())
            }
        };
        check(0, self.u0)?;
        for (i, &v) in self.u.iter().enumerate() {
            check(i + 1, v)?;
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    pub fn u(&self) -> &[T] {
        &self.u
    }

    pub fn u0(&self) -> T {
        self.u0
    }

    /// `(u0, u1, …, un)`.
    pub fn extended(&self) -> Vec<T> {
        let mut ue = Vec::with_capacity(self.u.len() + 1);
        ue.push(self.u0);
        ue.extend_from_slice(&self.u);
        ue
    }

    /// True if every component including `u0` exceeds `floor`.
    pub fn is_interior(&self, floor: f64) -> bool {
        self.u0.value() > floor && self.u.iter().all(|v| v.value() > floor)
    }
}

/// Extended vector `(1 - Σu, u1, …, un)`.
pub fn extend<T: Real>(u: &[T]) -> Vec<T> {
    let mut ue = Vec::with_capacity(u.len() + 1);
    ue.push(u.iter().fold(T::one(), |acc, &v| acc - v));
    ue.extend_from_slice(u);
    ue
}

/// Full description of one cross-diffusion model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub name: String,
    n: usize,
    drag: DragLaw,
    q: PressureLaw,
    r: Mat<f64>,
    eta: f64,
    /// Set for models outside the simulator's assumptions (nonzero solvent
    /// pressure, anti-diffusive data).
    analysis_only: bool,
}

impl ModelSpec {
    /// Builds and validates a model. See [`ModelSpec::validate`].
    pub fn new(
        name: impl Into<String>,
        n: usize,
        drag: DragLaw,
        q: PressureLaw,
        r: Mat<f64>,
        eta: f64,
    ) -> Result<Self, ModelError> {
        let spec = Self {
            name: name.into(),
            n,
            drag,
            q,
            r,
            eta,
            analysis_only: false,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Like [`ModelSpec::new`] but allows a solvent row/column in the `q`
    /// table. Such models are flagged analysis-only.
    pub fn new_analysis_only(
        name: impl Into<String>,
        n: usize,
        drag: DragLaw,
        q: PressureLaw,
        r: Mat<f64>,
        eta: f64,
    ) -> Result<Self, ModelError> {
        let spec = Self {
            name: name.into(),
            n,
            drag,
            q,
            r,
            eta,
            analysis_only: true,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn drag(&self) -> &DragLaw {
        &self.drag
    }

    pub fn q_law(&self) -> &PressureLaw {
        &self.q
    }

    pub fn r_matrix(&self) -> &Mat<f64> {
        &self.r
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn is_analysis_only(&self) -> bool {
        self.analysis_only
    }

    pub fn with_eta(mut self, eta: f64) -> Result<Self, ModelError> {
        self.eta = eta;
        self.validate()?;
        Ok(self)
    }

    pub fn with_drag(mut self, drag: DragLaw) -> Result<Self, ModelError> {
        self.drag = drag;
        self.validate()?;
        Ok(self)
    }

    pub fn mark_analysis_only(mut self) -> Self {
        self.analysis_only = true;
        self
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let n = self.n;
        if n == 0 {
            return Err(ModelError::ZeroSpecies);
        }
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return Err(ModelError::InvalidParameter {
                name: "eta".into(),
                value: self.eta,
                reason: "must be finite and nonnegative".into(),
            });
        }
        check_square("r", &self.r, n + 1)?;
        check_symmetric("r", &self.r)?;
        for i in 0..=n {
            for j in 0..=n {
                let v = self.r[(i, j)];
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(invalid("r", i, j, "must be finite and nonnegative"));
                }
                if (i == 0 || j == 0 || i == j) && v != 0.0 {
                    return Err(invalid("r", i, j, "solvent row/column and diagonal must vanish"));
                }
            }
        }
        match &self.drag {
            DragLaw::Unit => {}
            DragLaw::Constant(k) => check_drag_table("k", k, n, true)?,
            DragLaw::Perturbed { k_star, eps } => {
                check_drag_table("k*", k_star, n, true)?;
                if !(*eps >= 0.0 && eps.is_finite()) {
                    return Err(ModelError::InvalidParameter {
                        name: "eps".into(),
                        value: *eps,
                        reason: "must be finite and nonnegative".into(),
                    });
                }
            }
            DragLaw::Degenerate { k_star } => check_drag_table("k*", k_star, n, true)?,
        }
        match &self.q {
            PressureLaw::ConstantMatrix(q) => {
                check_square("q", q, n + 1)?;
                for i in 0..=n {
                    for j in 0..=n {
                        let v = q[(i, j)];
                        if !(v >= 0.0 && v.is_finite()) {
                            return Err(invalid("q", i, j, "must be finite and nonnegative"));
                        }
                        if !self.analysis_only && (i == 0 || j == 0) && v != 0.0 {
                            return Err(invalid("q", i, j, "solvent row/column must vanish"));
                        }
                    }
                }
            }
            PressureLaw::TumorJB {
                beta_c,
                beta_m,
                theta,
            } => {
                if n != 2 {
                    return Err(ModelError::LawDimension {
                        law: "tumor-jb".into(),
                        expected: 2,
                        got: n,
                    });
                }
                positive("beta_c", *beta_c)?;
                positive("beta_m", *beta_m)?;
                nonnegative("theta", *theta)?;
            }
            PressureLaw::MultiphaseSKT { theta1, theta2 } => {
                if n != 2 {
                    return Err(ModelError::LawDimension {
                        law: "multiphase-skt".into(),
                        expected: 2,
                        got: n,
                    });
                }
                nonnegative("theta1", *theta1)?;
                nonnegative("theta2", *theta2)?;
            }
        }
        Ok(())
    }

    /// Drag coefficient `k_ij(u)` for extended indices `i ≠ j`.
    pub fn drag_coeff<T: Real>(&self, ue: &[T], i: usize, j: usize) -> T {
        if i == j {
            return T::zero();
        }
        match &self.drag {
            DragLaw::Unit => T::one(),
            DragLaw::Constant(k) => T::from_f64(k[(i, j)]),
            DragLaw::Perturbed { k_star, eps } => {
                T::one() + T::from_f64(eps * k_star[(i, j)]) * ue[i] * ue[j]
            }
            DragLaw::Degenerate { k_star } => {
                let p = ue[i] * ue[j];
                // the square root is not differentiable at 0; treat it as a constant there
                let s = if p.value() > 0.0 { p.sqrt() } else { T::zero() };
                T::one() + T::from_f64(k_star[(i, j)]) * s
            }
        }
    }

    /// Coefficient table `q_ij(u)`, `(n+1)×(n+1)`.
    pub fn q_coeffs<T: Real>(&self, ue: &[T]) -> Mat<T> {
        let n = self.n;
        match &self.q {
            PressureLaw::ConstantMatrix(q) => q.map(T::from_f64),
            PressureLaw::TumorJB {
                beta_c,
                beta_m,
                theta,
            } => {
                let mut m = Mat::zeros(n + 1, n + 1);
                m[(1, 1)] = T::from_f64(*beta_c);
                m[(2, 1)] = T::from_f64(beta_m * theta) * ue[2];
                m[(2, 2)] = T::from_f64(*beta_m);
                m
            }
            PressureLaw::MultiphaseSKT { theta1, theta2 } => {
                let mut m = Mat::zeros(n + 1, n + 1);
                m[(1, 1)] = T::one();
                m[(1, 2)] = T::from_f64(*theta1) * ue[1];
                m[(2, 1)] = T::from_f64(*theta2) * ue[2];
                m[(2, 2)] = T::one();
                m
            }
        }
    }

    /// `q_i(u) = Σ_j q_ij(u) u_j` for `i = 0..=n`.
    pub fn q_values<T: Real>(&self, ue: &[T]) -> Vec<T> {
        let q = self.q_coeffs(ue);
        q.matvec(ue)
    }

    /// `Q_ik = ∂q_i/∂u_k` for `i = 0..=n`, `k = 1..=n` (stored in column
    /// `k-1`), with `u0 = 1 - Σu` substituted.
    pub fn q_derivatives<T: Real>(&self, ue: &[T]) -> Mat<T> {
        let n = self.n;
        match &self.q {
            PressureLaw::ConstantMatrix(q) => {
                Mat::from_fn(n + 1, n, |i, k| T::from_f64(q[(i, k + 1)] - q[(i, 0)]))
            }
            PressureLaw::TumorJB {
                beta_c,
                beta_m,
                theta,
            } => {
                // q1 = bc u1, q2 = bm theta u1 u2 + bm u2
                let bt = T::from_f64(beta_m * theta);
                let mut m = Mat::zeros(n + 1, n);
                m[(1, 0)] = T::from_f64(*beta_c);
                m[(2, 0)] = bt * ue[2];
                m[(2, 1)] = bt * ue[1] + T::from_f64(*beta_m);
                m
            }
            PressureLaw::MultiphaseSKT { theta1, theta2 } => {
                let (t1, t2) = (T::from_f64(*theta1), T::from_f64(*theta2));
                let mut m = Mat::zeros(n + 1, n);
                m[(1, 0)] = T::one() + t1 * ue[2];
                m[(1, 1)] = t1 * ue[1];
                m[(2, 0)] = t2 * ue[2];
                m[(2, 1)] = T::one() + t2 * ue[1];
                m
            }
        }
    }

    /// `r_i(u) = Σ_j r_ij u_j` for `i = 0..=n`.
    pub fn r_values<T: Real>(&self, ue: &[T]) -> Vec<T> {
        (0..=self.n)
            .map(|i| {
                (0..=self.n).fold(T::zero(), |acc, j| acc + T::from_f64(self.r[(i, j)]) * ue[j])
            })
            .collect()
    }

    /// `∂r_i/∂u_k = r_ik - r_i0`, shape `(n+1)×n`.
    pub fn r_derivatives<T: Real>(&self) -> Mat<T> {
        Mat::from_fn(self.n + 1, self.n, |i, k| {
            T::from_f64(self.r[(i, k + 1)] - self.r[(i, 0)])
        })
    }

    /// Constant `q` table, or an error for state-dependent laws.
    pub fn constant_q(&self) -> Result<&Mat<f64>, ModelError> {
        match &self.q {
            PressureLaw::ConstantMatrix(q) => Ok(q),
            other => Err(ModelError::StateDependentLaw(other.name().into())),
        }
    }

    fn check_point<T: Real>(&self, u: &SimplexPoint<T>) -> Result<(), ModelError> {
        if u.n() != self.n {
            return Err(ModelError::Dimension {
                what: "state".into(),
                expected: self.n,
                got: u.n(),
            });
        }
        u.validate()
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "model {} (n = {})", self.name, self.n)?;
        writeln!(f, "  drag: {}", describe_drag(&self.drag))?;
        writeln!(f, "  q: {}", describe_q(&self.q))?;
        writeln!(f, "  r: {}", describe_table(&self.r))?;
        write!(f, "  eta: {}", self.eta)?;
        if self.analysis_only {
            write!(f, "\n  analysis only (not simulated by default)")?;
        }
        Ok(())
    }
}

fn describe_table(m: &Mat<f64>) -> String {
    let rows: Vec<String> = (0..m.rows())
        .map(|i| {
            let r: Vec<String> = m.row(i).iter().map(|v| format!("{v}")).collect();
            format!("[{}]", r.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

fn describe_drag(d: &DragLaw) -> String {
    match d {
        DragLaw::Unit => "unit (k_ij = 1)".into(),
        DragLaw::Constant(k) => format!("constant k = {}", describe_table(k)),
        DragLaw::Perturbed { k_star, eps } => {
            format!("perturbed eps = {eps}, k* = {}", describe_table(k_star))
        }
        DragLaw::Degenerate { k_star } => format!("degenerate k* = {}", describe_table(k_star)),
    }
}

fn describe_q(q: &PressureLaw) -> String {
    match q {
        PressureLaw::ConstantMatrix(m) => format!("constant {}", describe_table(m)),
        PressureLaw::TumorJB {
            beta_c,
            beta_m,
            theta,
        } => format!("tumor-jb beta_c = {beta_c}, beta_m = {beta_m}, theta = {theta}"),
        PressureLaw::MultiphaseSKT { theta1, theta2 } => {
            format!("multiphase-skt theta1 = {theta1}, theta2 = {theta2}")
        }
    }
}

fn invalid(what: &str, i: usize, j: usize, reason: &str) -> ModelError {
    ModelError::InvalidEntry {
        what: what.into(),
        i,
        j,
        reason: reason.into(),
    }
}

fn positive(name: &str, v: f64) -> Result<(), ModelError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter {
            name: name.into(),
            value: v,
            reason: "must be positive".into(),
        })
    }
}

fn nonnegative(name: &str, v: f64) -> Result<(), ModelError> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter {
            name: name.into(),
            value: v,
            reason: "must be nonnegative".into(),
        })
    }
}

fn check_square(what: &str, m: &Mat<f64>, size: usize) -> Result<(), ModelError> {
    if m.rows() != size || m.cols() != size {
        return Err(ModelError::Dimension {
            what: format!("{what} table ({}x{})", m.rows(), m.cols()),
            expected: size * size,
            got: m.rows() * m.cols(),
        });
    }
    Ok(())
}

fn check_symmetric(what: &str, m: &Mat<f64>) -> Result<(), ModelError> {
    for i in 0..m.rows() {
        for j in i + 1..m.cols() {
            if m[(i, j)] != m[(j, i)] {
                return Err(ModelError::Asymmetric {
                    what: what.into(),
                    i,
                    j,
                });
            }
        }
    }
    Ok(())
}

fn check_drag_table(what: &str, k: &Mat<f64>, n: usize, strict: bool) -> Result<(), ModelError> {
    check_square(what, k, n + 1)?;
    check_symmetric(what, k)?;
    for i in 0..=n {
        for j in 0..=n {
            let v = k[(i, j)];
            if i == j {
                if v != 0.0 {
                    return Err(invalid(what, i, j, "diagonal must vanish"));
                }
            } else if !(v.is_finite() && (v > 0.0 || (!strict && v == 0.0))) {
                return Err(invalid(what, i, j, "off-diagonal entries must be positive"));
            }
        }
    }
    Ok(())
}

/// Intraphase pressures `q_i(u)`, `i = 0..=n`.
pub fn pressure_q<T: Real>(spec: &ModelSpec, u: &SimplexPoint<T>) -> Result<Vec<T>, ModelError> {
    spec.check_point(u)?;
    Ok(spec.q_values(&u.extended()))
}

/// Interphase pressures `r_i(u)`, `i = 0..=n`.
pub fn pressure_r<T: Real>(spec: &ModelSpec, u: &SimplexPoint<T>) -> Result<Vec<T>, ModelError> {
    spec.check_point(u)?;
    Ok(spec.r_values(&u.extended()))
}

/// Symmetric `(n+1)×(n+1)` table from the three pairwise values of a
/// two-species model.
pub fn pair_table(k01: f64, k02: f64, k12: f64) -> Mat<f64> {
    Mat::from_rows(&[&[0.0, k01, k02], &[k01, 0.0, k12], &[k02, k12, 0.0]])
}

/// Embeds an `n×n` table of the phases into the `(n+1)×(n+1)` layout.
pub fn embed(inner: &Mat<f64>) -> Mat<f64> {
    let n = inner.rows();
    Mat::from_fn(n + 1, n + 1, |i, j| {
        if i == 0 || j == 0 {
            0.0
        } else {
            inner[(i - 1, j - 1)]
        }
    })
}

/// Parameters that presets accept as overrides.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PresetParams {
    pub theta: Option<f64>,
    pub theta1: Option<f64>,
    pub theta2: Option<f64>,
    pub beta_c: Option<f64>,
    pub beta_m: Option<f64>,
    pub eta: Option<f64>,
}

pub const PRESET_NAMES: [&str; 6] = [
    "maxwell-stefan",
    "thin-film",
    "vf-skt",
    "vf-busenberg-travis",
    "tumor-jb",
    "multiphase-skt",
];

pub const TUMOR_BETA_C: f64 = 0.2;
pub const TUMOR_BETA_M: f64 = 0.0015;
pub const TUMOR_THETA: f64 = 30.0;

/// Preset by name with default parameters.
pub fn preset(name: &str) -> Result<ModelSpec, ModelError> {
    preset_with(name, &PresetParams::default())
}

/// Preset by name with overrides. `vf-bt` is accepted as an alias.
pub fn preset_with(name: &str, p: &PresetParams) -> Result<ModelSpec, ModelError> {
    let eta = p.eta.unwrap_or(0.0);
    let zero = Mat::zeros(3, 3);
    match name {
        "maxwell-stefan" => {
            // q_i = 1: every q_ij including the solvent entries is 1
            let q = Mat::from_fn(3, 3, |_, _| 1.0);
            ModelSpec::new_analysis_only(
                name,
                2,
                DragLaw::Constant(pair_table(1.0, 2.0, 3.0)),
                PressureLaw::ConstantMatrix(q),
                zero,
                eta,
            )
        }
        "thin-film" => {
            let r = pair_table(0.0, 0.0, 1.0);
            Ok(ModelSpec::new(
                name,
                2,
                DragLaw::Unit,
                PressureLaw::ConstantMatrix(Mat::zeros(3, 3)),
                r,
                eta,
            )?
            .mark_analysis_only())
        }
        "vf-skt" => ModelSpec::new(
            name,
            2,
            DragLaw::Unit,
            PressureLaw::ConstantMatrix(embed(&Mat::from_rows(&[&[1.0, 0.5], &[0.5, 1.0]]))),
            zero,
            eta,
        ),
        "vf-busenberg-travis" | "vf-bt" => {
            // q = r = S off the diagonal; r_ii must vanish and does not enter A
            let s = embed(&Mat::from_rows(&[&[1.0, 0.25], &[0.25, 1.0]]));
            let mut r = s.clone();
            for i in 0..3 {
                r[(i, i)] = 0.0;
            }
            ModelSpec::new(
                "vf-busenberg-travis",
                2,
                DragLaw::Unit,
                PressureLaw::ConstantMatrix(s),
                r,
                eta,
            )
        }
        "tumor-jb" => ModelSpec::new(
            name,
            2,
            DragLaw::Unit,
            PressureLaw::TumorJB {
                beta_c: p.beta_c.unwrap_or(TUMOR_BETA_C),
                beta_m: p.beta_m.unwrap_or(TUMOR_BETA_M),
                theta: p.theta.unwrap_or(TUMOR_THETA),
            },
            zero,
            eta,
        ),
        "multiphase-skt" => ModelSpec::new(
            name,
            2,
            DragLaw::Unit,
            PressureLaw::MultiphaseSKT {
                theta1: p.theta1.unwrap_or(1.0),
                theta2: p.theta2.unwrap_or(10.0),
            },
            zero,
            eta,
        ),
        other => Err(ModelError::UnknownPreset(other.to_string())),
    }
}

/// One-line description for preset listings.
pub fn preset_summary(name: &str) -> Option<&'static str> {
    Some(match name {
        "maxwell-stefan" => {
            "Maxwell-Stefan gas mixture: q_i = 1, r = 0, constant drag (analysis only)"
        }
        "thin-film" => "thin-film deposition: k = 1, q = 0, r12 = 1 (analysis only)",
        "vf-skt" => "volume-filling SKT population model: k = 1, r = 0, q = [[1, 0.5], [0.5, 1]]",
        "vf-busenberg-travis" => {
            "volume-filling Busenberg-Travis: k = 1, q = r, S = [[1, 0.25], [0.25, 1]]"
        }
        "tumor-jb" => "tumor growth: n = 2, k = 1, r = 0, beta_c = 0.2, beta_m = 0.0015, theta = 30",
        "multiphase-skt" => "multiphase SKT: q1 = u1(1 + theta1 u2), q2 = u2(1 + theta2 u1), theta1 = 1, theta2 = 10",
        _ => return None,
    })
}
