#![allow(dead_code)]

use multiphase::linalg::Mat;
use multiphase::model::{ModelSpec, SimplexPoint};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point of the open simplex with every component (solvent
/// included) at least `margin`.
pub fn interior(rng: &mut impl Rng, n: usize, margin: f64) -> Vec<f64> {
    loop {
        let e: Vec<f64> = (0..=n).map(|_| -rng.gen::<f64>().max(1e-300).ln()).collect();
        let s: f64 = e.iter().sum();
        let u: Vec<f64> = e.iter().map(|v| v / s).collect();
        if u.iter().all(|v| *v >= margin) {
            return u[1..].to_vec();
        }
    }
}

pub fn pt(u: &[f64]) -> SimplexPoint<f64> {
    SimplexPoint::new(u.to_vec()).unwrap()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

/// Entrywise check `|a - b| ≤ tol · max(1, max|b|)`.
pub fn mat_close(a: &Mat<f64>, b: &Mat<f64>, tol: f64) -> bool {
    let scale = b.as_slice().iter().fold(1.0f64, |m, v| m.max(v.abs()));
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .all(|(x, y)| (x - y).abs() <= tol * scale)
}

/// Two-species `A(u)` for constant symmetric `q` and `r = 0`, written out
/// by hand. The (2,2) entry carries the factor `u2` that the `q22` term needs.
pub fn a_two_species(q11: f64, q12: f64, q22: f64, u: [f64; 2]) -> Mat<f64> {
    let [u1, u2] = u;
    Mat::from_rows(&[
        &[
            2.0 * q11 * u1 * (1.0 - u1) + q12 * u2 * (1.0 - 2.0 * u1),
            q12 * u1 * (1.0 - 2.0 * u1) - 2.0 * q22 * u1 * u2,
        ],
        &[
            q12 * u2 * (1.0 - 2.0 * u2) - 2.0 * q11 * u1 * u2,
            2.0 * q22 * u2 * (1.0 - u2) + q12 * u1 * (1.0 - 2.0 * u2),
        ],
    ])
}

/// Tumor model with `β_c = β_m = β`: the cross-diffusion form of the equations
/// `∂t u = div(A ∇u)`, with the `θ` terms of the first column carrying `βθ`.
pub fn a_tumor(beta: f64, theta: f64, u: [f64; 2]) -> Mat<f64> {
    let [u1, u2] = u;
    Mat::from_rows(&[
        &[
            2.0 * beta * u1 * (1.0 - u1) - beta * theta * u1 * u2 * u2,
            -2.0 * beta * u1 * u2 * (1.0 + theta * u1),
        ],
        &[
            beta * theta * (1.0 - u2) * u2 * u2 - 2.0 * beta * u1 * u2,
            2.0 * beta * u2 * (1.0 - u2) * (1.0 + theta * u1),
        ],
    ])
}

/// Two-species `K(u)⁻¹` in closed form, with `κ(u)`.
pub fn k_inverse_two_species(k01: f64, k02: f64, k12: f64, u: [f64; 2]) -> (Mat<f64>, f64) {
    let [u1, u2] = u;
    let u0 = 1.0 - u1 - u2;
    let kappa = k01 * k02 * u0 + k01 * k12 * u1 + k02 * k12 * u2;
    let m = Mat::from_rows(&[
        &[k02 + (k12 - k02) * u1, (k12 - k01) * u1],
        &[(k12 - k02) * u2, k01 + (k12 - k01) * u2],
    ]);
    (m.scale(1.0 / kappa), kappa)
}

/// `G(u)` for `q11 = q22 = 1`, `q12 = q21 = 10`, `k01 = k02 = 1`, `k12 = 10`.
/// The closed form below is `u1 u2 G(u)`; the division restores `G`.
pub fn g_counterexample(u: [f64; 2]) -> Mat<f64> {
    let [u1, u2] = u;
    let gamma = 2.0 / (1.0 + 9.0 * u1 + 9.0 * u2);
    let m = Mat::from_rows(&[
        &[
            (9.0 * u1 * u1 + (90.0 * u2 + 1.0) * u1 + 5.0 * u2) * u2,
            (90.0 * u1 + 9.0 * u2 + 5.0) * u1 * u2,
        ],
        &[
            (9.0 * u1 + 90.0 * u2 + 5.0) * u1 * u2,
            (9.0 * u2 * u2 + (90.0 * u1 + 1.0) * u2 + 5.0 * u1) * u1,
        ],
    ]);
    m.scale(gamma / (u1 * u2))
}

pub fn counterexample_spec() -> ModelSpec {
    use multiphase::model::{embed, pair_table, DragLaw, PressureLaw};
    ModelSpec::new(
        "counterexample",
        2,
        DragLaw::Constant(pair_table(1.0, 1.0, 10.0)),
        PressureLaw::ConstantMatrix(embed(&Mat::from_rows(&[&[1.0, 10.0], &[10.0, 1.0]]))),
        Mat::zeros(3, 3),
        0.0,
    )
    .unwrap()
}

/// Flux `J_i` from the un-reduced mass/momentum form with equal drag,
/// evaluated along the linear profile `u(x) = u + x g`. Gradients of the
/// nonlinear products are Richardson-extrapolated central differences.
pub fn flux_first_principles(spec: &ModelSpec, u: &[f64], g: &[f64]) -> Vec<f64> {
    let n = u.len();
    let ext_at = |x: f64| -> Vec<f64> {
        let v: Vec<f64> = u.iter().zip(g).map(|(a, b)| a + x * b).collect();
        multiphase::model::extend(&v)
    };
    // f(x) -> vector over the extended index
    let grad = |f: &dyn Fn(&[f64]) -> Vec<f64>| -> Vec<f64> {
        let d = |h: f64| -> Vec<f64> {
            let (p, m) = (f(&ext_at(h)), f(&ext_at(-h)));
            p.iter().zip(&m).map(|(a, b)| (a - b) / (2.0 * h)).collect()
        };
        let (d1, d2) = (d(1e-3), d(5e-4));
        d1.iter().zip(&d2).map(|(a, b)| (4.0 * b - a) / 3.0).collect()
    };
    let e0 = ext_at(0.0);
    let ge: Vec<f64> = {
        let mut v = vec![-g.iter().sum::<f64>()];
        v.extend_from_slice(g);
        v
    };
    let grad_uq = grad(&|e: &[f64]| {
        let q = spec.q_values(e);
        e.iter().zip(&q).map(|(a, b)| a * b).collect()
    });
    let r0 = spec.r_values(&e0);
    let grad_r = grad(&|e: &[f64]| spec.r_values(e));
    let sum_uq: f64 = grad_uq.iter().sum();
    let sum_r: f64 = (0..=n).map(|j| r0[j] * ge[j] - e0[j] * grad_r[j]).sum();
    (1..=n)
        .map(|i| {
            let drift = grad_uq[i] - e0[i] * sum_uq;
            let inter = r0[i] * ge[i] - e0[i] * grad_r[i] - e0[i] * sum_r;
            -(drift - inter)
        })
        .collect()
}
