//! Structure certification: definiteness and stability scans over the
//! simplex, the two-species drag classifier, the coefficient decomposition of
//! `zᵀ G z`, perturbation thresholds and the tumor trace/determinant.

use std::fmt;

use serde::Serialize;

use crate::linalg::{eigenvalues_general, LinalgError, Mat};
pub use crate::linalg::sym_eig_min;
use crate::matrices::{
    assemble_a_raw, assemble_g, assemble_k_star_raw, diffusion_matrix, hessian_hb_raw,
    MatrixError,
};
use crate::model::{extend, DragLaw, ModelError, ModelSpec, PressureLaw, SimplexPoint};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{0}")]
    NotApplicable(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stability {
    pub stable: bool,
    pub min_real_part: f64,
}

/// Positive stability: every eigenvalue has a positive real part.
///
/// 2×2 matrices use the trace and determinant; larger ones go through the
/// Hessenberg/QR eigenvalue routine.
pub fn positively_stable(m: &Mat<f64>) -> Result<Stability, LinalgError> {
    m.check_finite()?;
    let min_real_part = match m.rows() {
        0 => f64::INFINITY,
        1 => m[(0, 0)],
        2 => {
            let tr = m.trace();
            let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
            let disc = 0.25 * tr * tr - det;
            if disc >= 0.0 {
                0.5 * tr - disc.sqrt()
            } else {
                0.5 * tr
            }
        }
        _ => eigenvalues_general(m)?
            .into_iter()
            .map(|c| c.re)
            .fold(f64::INFINITY, f64::min),
    };
    Ok(Stability {
        stable: min_real_part > 0.0,
        min_real_part,
    })
}

fn active_block(m: &Mat<f64>) -> Mat<f64> {
    let n = m.rows() - 1;
    Mat::from_fn(n, n, |i, j| m[(i + 1, j + 1)])
}

/// Smallest eigenvalue of the symmetric part of `(q_ij + r_ij)_{i,j≥1}`.
/// Only defined for constant pressure laws; see [`alpha_grid_infimum`].
pub fn lemma_ha_alpha(spec: &ModelSpec) -> Result<f64, AnalysisError> {
    let q = spec.constant_q()?;
    let s = active_block(q).add(&active_block(spec.r_matrix()));
    Ok(sym_eig_min(&s)?)
}

/// Infimum of the smallest eigenvalue of `(q_ij(u) + r_ij)` over an interior
/// lattice, for any pressure law.
pub fn alpha_grid_infimum(spec: &ModelSpec, resolution: usize) -> Result<f64, AnalysisError> {
    let r = active_block(spec.r_matrix());
    let mut inf = f64::INFINITY;
    for u in simplex_lattice(spec.n(), resolution) {
        let q = active_block(&spec.q_coeffs(&extend(&u)));
        inf = inf.min(sym_eig_min(&q.add(&r))?);
    }
    Ok(inf)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Hypotheses {
    /// Grid infimum of the smallest eigenvalue of `q + r`.
    pub alpha: f64,
    /// `q_ij(u) ≥ r_ij` on the lattice.
    pub q_dominates_r: bool,
    pub holds: bool,
}

/// Checks the standing hypotheses of the equal-drag existence theory
/// (`q + r` uniformly positive definite, `q ≥ r`) on an interior lattice.
pub fn entropy_hypotheses(spec: &ModelSpec, resolution: usize) -> Result<Hypotheses, AnalysisError> {
    let alpha = alpha_grid_infimum(spec, resolution)?;
    let r = spec.r_matrix();
    let n = spec.n();
    let mut q_dominates_r = !spec.is_analysis_only();
    for u in simplex_lattice(n, resolution) {
        let q = spec.q_coeffs(&extend(&u));
        for i in 1..=n {
            for j in 1..=n {
                if q[(i, j)] < r[(i, j)] {
                    q_dominates_r = false;
                }
            }
        }
    }
    Ok(Hypotheses {
        alpha,
        q_dominates_r,
        holds: alpha > 0.0 && q_dominates_r,
    })
}

/// Trace and determinant of `A(u)` for the tumor model with coefficient
/// table `q11 = 1, q12 = 0, q21 = βθu2, q22 = β`.
///
/// `tr A = βθu1u2(2 - 3u2) + 2βu2(1 - u2) + 2u1(1 - u1)`,
/// `det A = 4β u1 u2 (1 + θu1)(1 - u1 - u2)`.
pub fn tumor_trace_det(u: [f64; 2], beta: f64, theta: f64) -> (f64, f64) {
    let [u1, u2] = u;
    let tr = beta * theta * u1 * u2 * (2.0 - 3.0 * u2)
        + 2.0 * beta * u2 * (1.0 - u2)
        + 2.0 * u1 * (1.0 - u1);
    let det = 4.0 * beta * u1 * u2 * (1.0 + theta * u1) * (1.0 - u1 - u2);
    (tr, det)
}

/// The tumor model in the scaling used by [`tumor_trace_det`].
pub fn tumor_trace_spec(beta: f64, theta: f64) -> Result<ModelSpec, ModelError> {
    ModelSpec::new(
        "tumor-jb",
        2,
        DragLaw::Unit,
        PressureLaw::TumorJB {
            beta_c: 1.0,
            beta_m: beta,
            theta,
        },
        Mat::zeros(3, 3),
        0.0,
    )
}

/// Entropy threshold `θ* = 4 sqrt(β_c / β_m)` of the tumor model.
pub fn tumor_theta_threshold(beta_c: f64, beta_m: f64) -> f64 {
    4.0 * (beta_c / beta_m).sqrt()
}

/// Cell-centred lattice on the open simplex: `u_i = (k_i + ½)/res` with
/// `u0 ≥ 1/(2 res)`. Supported for `1 ≤ n ≤ 4`.
pub fn simplex_lattice(n: usize, resolution: usize) -> Vec<Vec<f64>> {
    assert!((1..=4).contains(&n), "lattice supports 1 <= n <= 4");
    let res = resolution as f64;
    let mut out = Vec::new();
    let mut k = vec![0usize; n];
    loop {
        let u: Vec<f64> = k.iter().map(|&ki| (ki as f64 + 0.5) / res).collect();
        let u0 = 1.0 - u.iter().sum::<f64>();
        if u0 >= 0.5 / res - 1e-12 {
            out.push(u);
        }
        // odometer increment
        let mut d = 0;
        loop {
            if d == n {
                return out;
            }
            k[d] += 1;
            if k[d] < resolution {
                break;
            }
            k[d] = 0;
            d += 1;
        }
    }
}

/// Cell-centred `res × res` lattice on the box `[lo1, hi1] × [lo2, hi2]`.
pub fn box_lattice(lo: [f64; 2], hi: [f64; 2], resolution: usize) -> Vec<Vec<f64>> {
    let res = resolution as f64;
    let mut out = Vec::with_capacity(resolution * resolution);
    for i in 0..resolution {
        for j in 0..resolution {
            out.push(vec![
                lo[0] + (i as f64 + 0.5) * (hi[0] - lo[0]) / res,
                lo[1] + (j as f64 + 0.5) * (hi[1] - lo[1]) / res,
            ]);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ScanPredicate {
    /// `sym_eig_min(G(u)) > bound`.
    DefiniteG { bound: f64 },
    /// `min Re λ(K⁻¹A) > bound`.
    StableKinvA { bound: f64 },
}

impl ScanPredicate {
    pub fn positive_definite() -> Self {
        ScanPredicate::DefiniteG { bound: 0.0 }
    }

    pub fn positively_stable() -> Self {
        ScanPredicate::StableKinvA { bound: 0.0 }
    }

    fn bound(&self) -> f64 {
        match *self {
            ScanPredicate::DefiniteG { bound } | ScanPredicate::StableKinvA { bound } => bound,
        }
    }

    fn evaluate(&self, spec: &ModelSpec, u: &[f64]) -> Result<f64, AnalysisError> {
        let p = SimplexPoint::new(u.to_vec())?;
        match self {
            ScanPredicate::DefiniteG { .. } => Ok(sym_eig_min(&assemble_g(spec, &p)?)?),
            ScanPredicate::StableKinvA { .. } => {
                Ok(positively_stable(&diffusion_matrix(spec, &p)?)?.min_real_part)
            }
        }
    }
}

impl fmt::Display for ScanPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScanPredicate::DefiniteG { bound } => {
                write!(f, "positive-definite: min eig sym(G) > {bound}")
            }
            ScanPredicate::StableKinvA { bound } => {
                write!(f, "positively-stable: min Re eig(K^-1 A) > {bound}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub u: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureReport {
    pub predicate: ScanPredicate,
    pub resolution: usize,
    pub points: usize,
    pub violations: Vec<Violation>,
    pub global_min: f64,
    pub argmin: Vec<f64>,
    pub pass: bool,
}

impl fmt::Display for StructureReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "property: {}", self.predicate)?;
        writeln!(f, "resolution: {} ({} points)", self.resolution, self.points)?;
        writeln!(f, "global minimum: {:.6e} at {:?}", self.global_min, self.argmin)?;
        writeln!(f, "violations: {}", self.violations.len())?;
        write!(f, "verdict: {}", if self.pass { "PASS" } else { "FAIL" })
    }
}

/// Evaluates the predicate on the given points (in order).
pub fn scan_points(
    spec: &ModelSpec,
    points: &[Vec<f64>],
    resolution: usize,
    predicate: ScanPredicate,
) -> Result<StructureReport, AnalysisError> {
    let mut violations = Vec::new();
    let mut global_min = f64::INFINITY;
    let mut argmin = Vec::new();
    for u in points {
        let value = predicate.evaluate(spec, u)?;
        if value < global_min {
            global_min = value;
            argmin = u.clone();
        }
        if !(value > predicate.bound()) {
            violations.push(Violation {
                u: u.clone(),
                value,
            });
        }
    }
    Ok(StructureReport {
        predicate,
        resolution,
        points: points.len(),
        pass: violations.is_empty(),
        violations,
        global_min,
        argmin,
    })
}

/// Scans the interior simplex lattice (see [`simplex_lattice`]).
pub fn scan_simplex(
    spec: &ModelSpec,
    resolution: usize,
    predicate: ScanPredicate,
) -> Result<StructureReport, AnalysisError> {
    if spec.n() > 4 {
        return Err(AnalysisError::NotApplicable(format!(
            "lattice scans support n <= 4 (got {})",
            spec.n()
        )));
    }
    if resolution < 8 {
        return Err(AnalysisError::NotApplicable(format!(
            "resolution must be at least 8 (got {resolution})"
        )));
    }
    scan_points(
        spec,
        &simplex_lattice(spec.n(), resolution),
        resolution,
        predicate,
    )
}

/// Per-point table `(u, min eig sym G, min Re eig K⁻¹A)` on the interior lattice.
pub fn lattice_table(
    spec: &ModelSpec,
    resolution: usize,
) -> Result<Vec<(Vec<f64>, f64, f64)>, AnalysisError> {
    let g = ScanPredicate::positive_definite();
    let s = ScanPredicate::positively_stable();
    simplex_lattice(spec.n(), resolution)
        .into_iter()
        .map(|u| {
            let a = g.evaluate(spec, &u)?;
            let b = s.evaluate(spec, &u)?;
            Ok((u, a, b))
        })
        .collect()
}

/// The six strict orderings of `(k01, k02, k12)` covered by the classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DragCase {
    /// `k01 < k12 < k02`, `k02 ≤ k01 + k12`.
    Case1,
    /// `k02 < k01 < k12`.
    Case2,
    /// `k12 < k01 < k02`.
    Case3,
    /// `k02 < k12 < k01`, `k01 ≤ k02 + k12` (case 1 with species swapped).
    Case1Swapped,
    /// `k01 < k02 < k12`.
    Case2Swapped,
    /// `k12 < k02 < k01`.
    Case3Swapped,
}

impl DragCase {
    pub fn label(&self) -> &'static str {
        match self {
            DragCase::Case1 => "case 1: k01 < k12 < k02, k02 <= k01 + k12",
            DragCase::Case2 => "case 2: k02 < k01 < k12",
            DragCase::Case3 => "case 3: k12 < k01 < k02",
            DragCase::Case1Swapped => "case 1 (swapped): k02 < k12 < k01, k01 <= k02 + k12",
            DragCase::Case2Swapped => "case 2 (swapped): k01 < k02 < k12",
            DragCase::Case3Swapped => "case 3 (swapped): k12 < k02 < k01",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ClassVerdict {
    Classified(DragCase),
    /// Two drag coefficients coincide.
    Tie,
    /// Strict ordering outside the six covered cases (a triangle condition fails).
    Uncovered,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub verdict: ClassVerdict,
    /// Each tested inequality with its two sides.
    pub inequalities: Vec<Inequality>,
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Inequality {
    pub text: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl Classification {
    pub fn label(&self) -> &'static str {
        match self.verdict {
            ClassVerdict::Classified(c) => c.label(),
            ClassVerdict::Tie => "unclassified (tie in k ordering)",
            ClassVerdict::Uncovered => "unclassified (ordering not covered)",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.label())?;
        for ineq in &self.inequalities {
            writeln!(
                f,
                "  [{}] {}  ({:.6} > {:.6})",
                if ineq.holds { "ok" } else { "no" },
                ineq.text,
                ineq.lhs,
                ineq.rhs
            )?;
        }
        write!(
            f,
            "verdict: {}",
            if self.certified {
                "certified"
            } else if matches!(self.verdict, ClassVerdict::Classified(_)) {
                "not certified"
            } else {
                "unclassified"
            }
        )
    }
}

fn ineq(text: &str, lhs: f64, rhs: f64) -> Inequality {
    Inequality {
        text: text.to_string(),
        lhs,
        rhs,
        holds: lhs > rhs,
    }
}

// Inequalities of the three base cases, with q = [[q11, q12], [q21, q22]].
fn base_inequalities(case: u8, k01: f64, k02: f64, k12: f64, q: [[f64; 2]; 2]) -> Vec<Inequality> {
    let [[q11, q12], [q21, q22]] = q;
    let m = (2.0 * k01).min(k02 + k12);
    match case {
        1 => vec![
            ineq(
                "k12 q12 + (k01+k12-k02) q21 > 2 (k02-k12) q22",
                k12 * q12 + (k01 + k12 - k02) * q21,
                2.0 * (k02 - k12) * q22,
            ),
            ineq(
                "2 (k01+k12) q11 > k02 q12 + (2 k02-k12) q21",
                2.0 * (k01 + k12) * q11,
                k02 * q12 + (2.0 * k02 - k12) * q21,
            ),
            ineq(
                "4 k01 q22 > 2 (k12-k01) q11 + (k02+k12) q12 + (k01+k12) q21",
                4.0 * k01 * q22,
                2.0 * (k12 - k01) * q11 + (k02 + k12) * q12 + (k01 + k12) * q21,
            ),
        ],
        2 => vec![
            ineq(
                "4 k02 q11 > k02 q12 + 2 (k01+k12) q21 + 2 (k12-k02) q22",
                4.0 * k02 * q11,
                k02 * q12 + 2.0 * (k01 + k12) * q21 + 2.0 * (k12 - k02) * q22,
            ),
            ineq(
                "2 min(2 k01, k02+k12) q22 > 2 (k12-k01) q11 + (k02+k12) q12 + (k01+k12) q21",
                2.0 * m * q22,
                2.0 * (k12 - k01) * q11 + (k02 + k12) * q12 + (k01 + k12) * q21,
            ),
        ],
        _ => vec![
            ineq(
                "k12 q12 + (k01+k12-k02) q21 > 2 (k01-k12) q11 + 2 (k02-k12) q22",
                k12 * q12 + (k01 + k12 - k02) * q21,
                2.0 * (k01 - k12) * q11 + 2.0 * (k02 - k12) * q22,
            ),
            ineq(
                "2 (k01+k12) q11 > k02 q12 + (2 k02-k12) q21",
                2.0 * (k01 + k12) * q11,
                k02 * q12 + (2.0 * k02 - k12) * q21,
            ),
            ineq(
                "2 min(2 k01, k02+k12) q22 > k02 q12 + (k01+k12) q21",
                2.0 * m * q22,
                k02 * q12 + (k01 + k12) * q21,
            ),
        ],
    }
}

/// Classifies the drag ordering of a two-species model with `r = 0` and
/// evaluates the sufficient conditions for uniform positive definiteness of
/// `G(u)`. The swapped cases exchange `k01 ↔ k02`, `q12 ↔ q21`, `q11 ↔ q22`;
/// their inequality texts refer to the swapped coefficients.
pub fn prop_g_classify(
    k01: f64,
    k02: f64,
    k12: f64,
    q: [[f64; 2]; 2],
) -> Result<Classification, AnalysisError> {
    let all = [k01, k02, k12, q[0][0], q[0][1], q[1][0], q[1][1]];
    if all.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(AnalysisError::NotApplicable(
            "classifier needs positive drag and pressure coefficients".into(),
        ));
    }
    if k01 == k02 || k01 == k12 || k02 == k12 {
        return Ok(Classification {
            verdict: ClassVerdict::Tie,
            inequalities: Vec::new(),
            certified: false,
        });
    }
    let swapped_q = [[q[1][1], q[1][0]], [q[0][1], q[0][0]]];
    let case = if k01 < k12 && k12 < k02 {
        (k02 <= k01 + k12).then_some(DragCase::Case1)
    } else if k02 < k01 && k01 < k12 {
        Some(DragCase::Case2)
    } else if k12 < k01 && k01 < k02 {
        Some(DragCase::Case3)
    } else if k02 < k12 && k12 < k01 {
        (k01 <= k02 + k12).then_some(DragCase::Case1Swapped)
    } else if k01 < k02 && k02 < k12 {
        Some(DragCase::Case2Swapped)
    } else {
        // the only strict ordering left
        Some(DragCase::Case3Swapped)
    };
    let Some(case) = case else {
        return Ok(Classification {
            verdict: ClassVerdict::Uncovered,
            inequalities: Vec::new(),
            certified: false,
        });
    };
    let inequalities = match case {
        DragCase::Case1 => base_inequalities(1, k01, k02, k12, q),
        DragCase::Case2 => base_inequalities(2, k01, k02, k12, q),
        DragCase::Case3 => base_inequalities(3, k01, k02, k12, q),
        DragCase::Case1Swapped => base_inequalities(1, k02, k01, k12, swapped_q),
        DragCase::Case2Swapped => base_inequalities(2, k02, k01, k12, swapped_q),
        DragCase::Case3Swapped => base_inequalities(3, k02, k01, k12, swapped_q),
    };
    let certified = inequalities.iter().all(|i| i.holds);
    Ok(Classification {
        verdict: ClassVerdict::Classified(case),
        inequalities,
        certified,
    })
}

/// Weights of `zᵀ G z = s(u) (a z1² + b z2² + c (z1 + z2)²)` for `n = 2`,
/// `r = 0`. Each family is stored as `[[x11, x12], [x21, x22]]` and paired
/// with `q_ij`; the `c` weights carry no `q` factor of their own.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GDecomposition {
    pub a_ij: [[f64; 2]; 2],
    pub b_ij: [[f64; 2]; 2],
    pub c_ij: [[f64; 2]; 2],
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// `κ(u) = k01 k02 u0 + k01 k12 u1 + k02 k12 u2 = det K(u)`.
    pub kappa: f64,
}

impl GDecomposition {
    /// `a z1² + b z2² + c (z1 + z2)²`.
    pub fn form(&self, z: [f64; 2]) -> f64 {
        self.a * z[0] * z[0] + self.b * z[1] * z[1] + self.c * (z[0] + z[1]) * (z[0] + z[1])
    }
}

pub fn g_decompose(
    k01: f64,
    k02: f64,
    k12: f64,
    q: [[f64; 2]; 2],
    u: [f64; 2],
) -> Result<GDecomposition, AnalysisError> {
    let [u1, u2] = u;
    let u0 = 1.0 - u1 - u2;
    for (index, v) in [u0, u1, u2].into_iter().enumerate() {
        if !(v > crate::matrices::INTERIOR_FLOOR) {
            return Err(MatrixError::Boundary { index, value: v }.into());
        }
    }
    let a11 = (k01 + k12 - 2.0 * k02) * u1 + 2.0 * k02;
    let a12 = k12 * u2 - 0.5 * (k12 * (u1 + u2) + k02 * (u0 + u2) - k01 * u2)
        + k02 * u2 * (u0 + u2) / u1;
    let a21 = -0.5 * (k01 * (u0 + u1) - k02 * (u1 - 2.0 * u2) + k12 * (u1 - u2));
    let a22 = (k02 - k12) * u2;
    let b11 = (k01 - k12) * u1;
    let b12 = -0.5 * k02 + 0.5 * u1 * (-2.0 * k01 + k02 + k12) + 0.5 * u2 * (k01 - k12);
    let b21 = k01 * u1 * (u0 + u1) / u2 - 0.5 * (k01 * (u0 + u1) - (k02 + k12) * u1 + k12 * u2);
    let b22 = (k02 + k12 - 2.0 * k01) * u2 + 2.0 * k01;
    let c11 = (k12 - k01) * u1;
    let c12 = 0.5 * (k12 * (u1 + u2) + k02 * (u0 + u2) - k01 * u2);
    let c21 = 0.5 * ((k12 - k02) * u1 + k12 * u2 + k01 * (u0 + u1));
    let c22 = (k12 - k02) * u2;
    let weigh = |x: [[f64; 2]; 2]| {
        x[0][0] * q[0][0] + x[0][1] * q[0][1] + x[1][0] * q[1][0] + x[1][1] * q[1][1]
    };
    let a_ij = [[a11, a12], [a21, a22]];
    let b_ij = [[b11, b12], [b21, b22]];
    let c_ij = [[c11, c12], [c21, c22]];
    Ok(GDecomposition {
        a: weigh(a_ij),
        b: weigh(b_ij),
        c: weigh(c_ij),
        a_ij,
        b_ij,
        c_ij,
        kappa: k01 * k02 * u0 + k01 * k12 * u1 + k02 * k12 * u2,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbThreshold {
    pub alpha: f64,
    /// Lattice maximum of `‖h_B'' K*‖_F`.
    pub c1: f64,
    /// Lattice maximum of `max(‖A‖_F, ‖K*‖_F)`.
    pub c2: f64,
    pub eps0: f64,
    pub resolution: usize,
}

/// `ε0 = min(1/(2 C2), α/(4 C1 C2))` from lattice maxima of the norms in the
/// perturbation argument. For `ε ≤ ε0` the smallest eigenvalue of
/// `sym(h_B'' K⁻¹ A)` stays above `α/2` at every lattice point.
pub fn perturb_threshold(
    spec: &ModelSpec,
    resolution: usize,
) -> Result<PerturbThreshold, AnalysisError> {
    if !matches!(spec.drag(), DragLaw::Perturbed { .. }) {
        return Err(ModelError::WrongDragLaw {
            expected: "perturbed".into(),
            found: spec.drag().name().into(),
        }
        .into());
    }
    let alpha = lemma_ha_alpha(spec)?;
    if !(alpha > 0.0) {
        return Err(AnalysisError::NotApplicable(format!(
            "q + r must be positive definite (alpha = {alpha})"
        )));
    }
    let (mut c1, mut c2) = (0.0f64, 0.0f64);
    for u in simplex_lattice(spec.n(), resolution) {
        let ks = assemble_k_star_raw(spec, &u)?;
        let hb = hessian_hb_raw(&u);
        let a = assemble_a_raw(spec, &u);
        c1 = c1.max(hb.matmul(&ks).frobenius_norm());
        c2 = c2.max(a.frobenius_norm()).max(ks.frobenius_norm());
    }
    let eps0 = if c1 == 0.0 {
        0.5 / c2
    } else {
        (0.5 / c2).min(alpha / (4.0 * c1 * c2))
    };
    Ok(PerturbThreshold {
        alpha,
        c1,
        c2,
        eps0,
        resolution,
    })
}

/// Copy of a perturbed-drag model with a different `ε`.
pub fn with_eps(spec: &ModelSpec, eps: f64) -> Result<ModelSpec, AnalysisError> {
    let DragLaw::Perturbed { k_star, .. } = spec.drag() else {
        return Err(ModelError::WrongDragLaw {
            expected: "perturbed".into(),
            found: spec.drag().name().into(),
        }
        .into());
    };
    Ok(spec.clone().with_drag(DragLaw::Perturbed {
        k_star: k_star.clone(),
        eps,
    })?)
}

/// Bisects on `ε ∈ [lo, hi]` for the onset of indefiniteness of `G` on the
/// lattice. Returns `None` if `G` is still definite at `hi`; otherwise a
/// bracket `(definite, indefinite)` of width at most `tol`. Assumes the
/// violation set grows with `ε`.
pub fn perturb_bisection(
    spec: &ModelSpec,
    lo: f64,
    hi: f64,
    resolution: usize,
    tol: f64,
) -> Result<Option<(f64, f64)>, AnalysisError> {
    let definite = |eps: f64| -> Result<bool, AnalysisError> {
        let s = with_eps(spec, eps)?;
        Ok(scan_simplex(&s, resolution, ScanPredicate::positive_definite())?.pass)
    };
    if definite(hi)? {
        return Ok(None);
    }
    if !definite(lo)? {
        return Err(AnalysisError::NotApplicable(format!(
            "G is already indefinite at the lower end eps = {lo}"
        )));
    }
    let (mut a, mut b) = (lo, hi);
    while b - a > tol {
        let m = 0.5 * (a + b);
        if definite(m)? {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(Some((a, b)))
}
