//! Pointwise matrices of the model: `A(u)`, `K(u)`, `K(u)⁻¹`, `K*(u)`,
//! `h_B''(u)` and `G(u) = h_B''(u) K(u)⁻¹ A(u)`.
//!
//! The `*_raw` functions take the reduced state as a plain slice, skip all
//! validation and are generic over [`Real`], so they can be evaluated on
//! dual numbers. The checked wrappers take a [`SimplexPoint`].

use crate::linalg::{LinalgError, Lu, Mat};
use crate::model::{extend, DragLaw, ModelError, ModelSpec, SimplexPoint};
use crate::scalar::Real;

/// Floor below which a fraction counts as zero for `h_B''`.
pub const INTERIOR_FLOOR: f64 = 1e-14;

/// Condition estimate above which `K(u)` is reported as near-singular.
pub const K_COND_LIMIT: f64 = 1e14;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MatrixError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("state component {index} = {value:e} is on the simplex boundary")]
    Boundary { index: usize, value: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssembledMatrices<T> {
    pub a: Mat<T>,
    pub k: Mat<T>,
    pub k_inv: Mat<T>,
    pub hb: Mat<T>,
    pub g: Mat<T>,
}

/// Diffusion matrix with `J = -A(u) ∇u`.
///
/// Works on the extended system: with `P_j = u_j q_j(u)` and `E_jk = ∂u_j/∂u_k`
/// (`-1` for the solvent),
/// `A_ik = ∂P_i/∂u_k - u_i Σ_j ∂P_j/∂u_k - [r_i E_ik - u_i ∂r_i/∂u_k
///         - u_i Σ_j (r_j E_jk - u_j ∂r_j/∂u_k)]`.
/// Under the usual solvent assumptions this is
/// `(q_i - r_i)δ_ik + u_i(Q_ik - q_k + r_ik + r_k - Σ_l u_l (Q_lk + r_lk))`.
pub fn assemble_a_raw<T: Real>(spec: &ModelSpec, u: &[T]) -> Mat<T> {
    let n = spec.n();
    let ue = extend(u);
    let q = spec.q_values(&ue);
    let dq = spec.q_derivatives(&ue);
    let r = spec.r_values(&ue);
    let dr = spec.r_derivatives::<T>();
    let e = |j: usize, k: usize| -> T {
        if j == 0 {
            -T::one()
        } else if j == k + 1 {
            T::one()
        } else {
            T::zero()
        }
    };
    // column sums over the extended index j = 0..=n
    let mut sum_p = vec![T::zero(); n];
    let mut sum_r = vec![T::zero(); n];
    for k in 0..n {
        for j in 0..=n {
            sum_p[k] += e(j, k) * q[j] + ue[j] * dq[(j, k)];
            sum_r[k] += r[j] * e(j, k) - ue[j] * dr[(j, k)];
        }
    }
    Mat::from_fn(n, n, |a, k| {
        let i = a + 1;
        let dp = e(i, k) * q[i] + ue[i] * dq[(i, k)];
        let rp = r[i] * e(i, k) - ue[i] * dr[(i, k)] - ue[i] * sum_r[k];
        dp - ue[i] * sum_p[k] - rp
    })
}

/// Drag matrix with `K(u) J = Σ_j k_ij u_i u_j (v_i - v_j)`:
/// `K_ii = Σ_l k_il u_l + k_i0 u_i`, `K_ij = (k_i0 - k_ij) u_i`.
pub fn assemble_k_raw<T: Real>(spec: &ModelSpec, u: &[T]) -> Mat<T> {
    let n = spec.n();
    if matches!(spec.drag(), DragLaw::Unit) {
        return Mat::identity(n);
    }
    let ue = extend(u);
    Mat::from_fn(n, n, |a, b| {
        let (i, j) = (a + 1, b + 1);
        let ki0 = spec.drag_coeff(&ue, i, 0);
        if i == j {
            (0..=n).fold(T::zero(), |acc, l| acc + spec.drag_coeff(&ue, i, l) * ue[l]) + ki0 * ue[i]
        } else {
            (ki0 - spec.drag_coeff(&ue, i, j)) * ue[i]
        }
    })
}

/// `K*(u)` for perturbed drag, `K = I + eps K*`:
/// `K*_ii = Σ_l k*_il u_i u_l² + k*_i0 u0 u_i²`, `K*_ij = (k*_i0 u0 - k*_ij u_j) u_i²`.
pub fn assemble_k_star_raw<T: Real>(spec: &ModelSpec, u: &[T]) -> Result<Mat<T>, ModelError> {
    let DragLaw::Perturbed { k_star, .. } = spec.drag() else {
        return Err(ModelError::WrongDragLaw {
            expected: "perturbed".into(),
            found: spec.drag().name().into(),
        });
    };
    let n = spec.n();
    let ue = extend(u);
    let ks = |i: usize, j: usize| T::from_f64(k_star[(i, j)]);
    Ok(Mat::from_fn(n, n, |a, b| {
        let (i, j) = (a + 1, b + 1);
        if i == j {
            (0..=n).fold(T::zero(), |acc, l| acc + ks(i, l) * ue[i] * ue[l] * ue[l])
                + ks(i, 0) * ue[0] * ue[i] * ue[i]
        } else {
            (ks(i, 0) * ue[0] - ks(i, j) * ue[j]) * ue[i] * ue[i]
        }
    }))
}

/// `h_B''(u)_ij = δ_ij / u_i + 1 / u0`, without boundary checks.
pub fn hessian_hb_raw<T: Real>(u: &[T]) -> Mat<T> {
    let n = u.len();
    let u0 = extend(u)[0];
    let inv0 = T::one() / u0;
    Mat::from_fn(n, n, |i, j| if i == j { T::one() / u[i] + inv0 } else { inv0 })
}

/// `K(u)⁻¹ A(u)`, the diffusion matrix of the reduced system.
pub fn diffusion_matrix_raw<T: Real>(spec: &ModelSpec, u: &[T]) -> Result<Mat<T>, LinalgError> {
    let a = assemble_a_raw(spec, u);
    if matches!(spec.drag(), DragLaw::Unit) {
        return Ok(a);
    }
    let k = assemble_k_raw(spec, u);
    Ok(Lu::factor(&k)?.solve_mat(&a))
}

pub fn assemble_a<T: Real>(spec: &ModelSpec, u: &SimplexPoint<T>) -> Result<Mat<T>, MatrixError> {
    check(spec, u)?;
    Ok(assemble_a_raw(spec, u.u()))
}

pub fn assemble_k<T: Real>(spec: &ModelSpec, u: &SimplexPoint<T>) -> Result<Mat<T>, MatrixError> {
    check(spec, u)?;
    Ok(assemble_k_raw(spec, u.u()))
}

pub fn assemble_k_star<T: Real>(
    spec: &ModelSpec,
    u: &SimplexPoint<T>,
) -> Result<Mat<T>, MatrixError> {
    check(spec, u)?;
    Ok(assemble_k_star_raw(spec, u.u())?)
}

/// Inverts `K` by LU. Fails if the 1-norm condition estimate exceeds
/// [`K_COND_LIMIT`].
pub fn invert_k<T: Real>(k: &Mat<T>) -> Result<Mat<T>, MatrixError> {
    k.check_finite()?;
    let lu = Lu::factor(k).map_err(|e| match e {
        LinalgError::Singular(_) => LinalgError::NearSingular(f64::INFINITY),
        other => other,
    })?;
    let inv = lu.inverse();
    let cond = k.norm_1() * inv.norm_1();
    if !(cond <= K_COND_LIMIT) {
        return Err(LinalgError::NearSingular(cond).into());
    }
    Ok(inv)
}

pub fn hessian_hb<T: Real>(u: &SimplexPoint<T>) -> Result<Mat<T>, MatrixError> {
    check_interior(u)?;
    Ok(hessian_hb_raw(u.u()))
}

/// `G(u) = h_B''(u) K(u)⁻¹ A(u)`.
pub fn assemble_g<T: Real>(spec: &ModelSpec, u: &SimplexPoint<T>) -> Result<Mat<T>, MatrixError> {
    Ok(assemble_all(spec, u)?.g)
}

/// `K(u)⁻¹ A(u)` at a checked point.
pub fn diffusion_matrix<T: Real>(
    spec: &ModelSpec,
    u: &SimplexPoint<T>,
) -> Result<Mat<T>, MatrixError> {
    check(spec, u)?;
    let a = assemble_a_raw(spec, u.u());
    let k_inv = invert_k(&assemble_k_raw(spec, u.u()))?;
    Ok(k_inv.matmul(&a))
}

pub fn assemble_all<T: Real>(
    spec: &ModelSpec,
    u: &SimplexPoint<T>,
) -> Result<AssembledMatrices<T>, MatrixError> {
    check(spec, u)?;
    let hb = hessian_hb(u)?;
    let a = assemble_a_raw(spec, u.u());
    let k = assemble_k_raw(spec, u.u());
    let k_inv = invert_k(&k)?;
    let g = hb.matmul(&k_inv).matmul(&a);
    Ok(AssembledMatrices { a, k, k_inv, hb, g })
}

fn check<T: Real>(spec: &ModelSpec, u: &SimplexPoint<T>) -> Result<(), MatrixError> {
    if u.n() != spec.n() {
        return Err(ModelError::Dimension {
            what: "state".into(),
            expected: spec.n(),
            got: u.n(),
        }
        .into());
    }
    u.validate()?;
    Ok(())
}

fn check_interior<T: Real>(u: &SimplexPoint<T>) -> Result<(), MatrixError> {
    u.validate()?;
    let ue = u.extended();
    for (index, v) in ue.iter().enumerate() {
        if v.value() <= INTERIOR_FLOOR {
            return Err(MatrixError::Boundary {
                index,
                value: v.value(),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{embed, pair_table, preset, PressureLaw};

    fn pt(u: &[f64]) -> SimplexPoint<f64> {
        SimplexPoint::new(u.to_vec()).unwrap()
    }

    fn const_spec(q: [[f64; 2]; 2], k: Option<(f64, f64, f64)>) -> ModelSpec {
        let drag = match k {
            None => DragLaw::Unit,
            Some((a, b, c)) => DragLaw::Constant(pair_table(a, b, c)),
        };
        ModelSpec::new(
            "t",
            2,
            drag,
            PressureLaw::ConstantMatrix(embed(&Mat::from_rows(&[&q[0], &q[1]]))),
            Mat::zeros(3, 3),
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn a_vanishes_at_origin() {
        let spec = const_spec([[1.0, 10.0], [10.0, 1.0]], None);
        assert_eq!(assemble_a(&spec, &pt(&[0.0, 0.0])).unwrap(), Mat::zeros(2, 2));
    }

    #[test]
    fn k_closed_form_example() {
        let spec = const_spec([[1.0, 0.0], [0.0, 1.0]], Some((1.0, 1.0, 10.0)));
        let k = assemble_k(&spec, &pt(&[0.2, 0.3])).unwrap();
        let want = Mat::from_rows(&[&[3.7, -1.8], &[-2.7, 2.8]]);
        assert!(k.max_abs_diff(&want) < 1e-14);
        assert!((k.det() - 5.5).abs() < 1e-13);
    }

    #[test]
    fn unit_drag_is_identity() {
        let spec = preset("tumor-jb").unwrap();
        assert_eq!(assemble_k(&spec, &pt(&[0.3, 0.6])).unwrap(), Mat::identity(2));
    }

    #[test]
    fn hessian_examples() {
        let h = hessian_hb(&pt(&[1.0 / 3.0, 1.0 / 3.0])).unwrap();
        assert!(h.max_abs_diff(&Mat::from_rows(&[&[6.0, 3.0], &[3.0, 6.0]])) < 1e-12);
        let h1 = hessian_hb(&pt(&[0.5])).unwrap();
        assert_eq!(h1[(0, 0)], 4.0);
        assert!(matches!(
            hessian_hb(&pt(&[0.5, 0.5])),
            Err(MatrixError::Boundary { index: 0, .. })
        ));
    }

    #[test]
    fn invert_identity_and_singular() {
        assert_eq!(invert_k(&Mat::<f64>::identity(3)).unwrap(), Mat::identity(3));
        let s = Mat::<f64>::from_rows(&[&[1.0, 1.0], &[1.0, 1.0 + 1e-16]]);
        assert!(matches!(
            invert_k(&s),
            Err(MatrixError::Linalg(LinalgError::NearSingular(_)))
        ));
    }

    #[test]
    fn k_star_requires_perturbed() {
        let spec = preset("tumor-jb").unwrap();
        assert!(matches!(
            assemble_k_star(&spec, &pt(&[0.1, 0.1])),
            Err(MatrixError::Model(ModelError::WrongDragLaw { .. }))
        ));
    }

    #[test]
    fn maxwell_stefan_a_is_identity() {
        let spec = preset("maxwell-stefan").unwrap();
        let a = assemble_a(&spec, &pt(&[0.2, 0.5])).unwrap();
        assert!(a.max_abs_diff(&Mat::identity(2)) < 1e-15);
    }
}
