use super::{LinalgError, Mat};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
///
/// Only the upper triangle is read as the matrix is assumed symmetric.
pub fn sym_eigenvalues_jacobi(a: &Mat<f64>) -> Result<Vec<f64>, LinalgError> {
    let n = a.rows();
    let mut m = a.sym_part();
    let max_sweeps = 50 + 10 * n;
    let scale = m.frobenius_norm().max(f64::MIN_POSITIVE);
    for _ in 0..max_sweeps {
        let off: f64 = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum();
        if off.sqrt() <= 1e-15 * scale {
            return Ok((0..n).map(|i| m[(i, i)]).collect());
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[(k, p)];
                    let akq = m[(k, q)];
                    m[(k, p)] = c * akp - s * akq;
                    m[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[(p, k)];
                    let aqk = m[(q, k)];
                    m[(p, k)] = c * apk - s * aqk;
                    m[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    Err(LinalgError::NoConvergence(max_sweeps))
}

/// All eigenvalues of a general real square matrix.
///
/// Householder reduction to upper Hessenberg form followed by the Francis
/// double-shift QR iteration. At most `100·n` iterations are spent in total.
pub fn eigenvalues_general(a: &Mat<f64>) -> Result<Vec<Complex>, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::Dimension(format!(
            "expected square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    a.check_finite()?;
    let n = a.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = a.clone();
    hessenberg(&mut h);
    hqr(&mut h, 100 * n)
}

fn hessenberg(a: &mut Mat<f64>) {
    let n = a.rows();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let alpha: f64 = (k + 1..n).map(|i| a[(i, k)] * a[(i, k)]).sum::<f64>().sqrt();
        if alpha == 0.0 {
            continue;
        }
        let alpha = if a[(k + 1, k)] > 0.0 { -alpha } else { alpha };
        let mut v = vec![0.0; n];
        v[k + 1] = a[(k + 1, k)] - alpha;
        for i in k + 2..n {
            v[i] = a[(i, k)];
        }
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // A <- (I - 2vvᵀ/vᵀv) A (I - 2vvᵀ/vᵀv)
        for j in 0..n {
            let s: f64 = (k + 1..n).map(|i| v[i] * a[(i, j)]).sum::<f64>() * 2.0 / vnorm2;
            for i in k + 1..n {
                a[(i, j)] -= s * v[i];
            }
        }
        for i in 0..n {
            let s: f64 = (k + 1..n).map(|j| a[(i, j)] * v[j]).sum::<f64>() * 2.0 / vnorm2;
            for j in k + 1..n {
                a[(i, j)] -= s * v[j];
            }
        }
        for i in k + 2..n {
            a[(i, k)] = 0.0;
        }
    }
}

// Eigenvalues of an upper Hessenberg matrix (destroys the input).
fn hqr(a: &mut Mat<f64>, max_iter: usize) -> Result<Vec<Complex>, LinalgError> {
    let n = a.rows();
    let mut wr = vec![0.0; n];
    let mut wi = vec![0.0; n];
    let anorm: f64 = (0..n)
        .flat_map(|i| (i.saturating_sub(1)..n).map(move |j| (i, j)))
        .map(|(i, j)| a[(i, j)].abs())
        .sum();
    let mut nn = n as isize - 1;
    let mut t = 0.0;
    let mut total = 0usize;
    while nn >= 0 {
        let mut its = 0;
        loop {
            let nu = nn as usize;
            // look for a small sub-diagonal element
            let mut l = nu;
            while l >= 1 {
                let s = a[(l - 1, l - 1)].abs() + a[(l, l)].abs();
                let s = if s == 0.0 { anorm } else { s };
                if a[(l, l - 1)].abs() <= f64::EPSILON * s {
                    a[(l, l - 1)] = 0.0;
                    break;
                }
                l -= 1;
            }
            let x = a[(nu, nu)];
            if l == nu {
                wr[nu] = x + t;
                wi[nu] = 0.0;
                nn -= 1;
                break;
            }
            let y = a[(nu - 1, nu - 1)];
            let w = a[(nu, nu - 1)] * a[(nu - 1, nu)];
            if l + 1 == nu {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let z = q.abs().sqrt();
                let xx = x + t;
                if q >= 0.0 {
                    let z = p + z.copysign(p);
                    wr[nu - 1] = xx + z;
                    wr[nu] = if z != 0.0 { xx - w / z } else { xx + z };
                    wi[nu - 1] = 0.0;
                    wi[nu] = 0.0;
                } else {
                    wr[nu - 1] = xx + p;
                    wr[nu] = xx + p;
                    wi[nu - 1] = -z;
                    wi[nu] = z;
                }
                nn -= 2;
                break;
            }
            if total >= max_iter {
                return Err(LinalgError::NoConvergence(max_iter));
            }
            total += 1;
            let (mut x, mut y, mut w) = (x, y, w);
            if its == 10 || its == 20 {
                // exceptional shift
                t += x;
                for i in 0..=nu {
                    a[(i, i)] -= x;
                }
                let s = a[(nu, nu - 1)].abs() + a[(nu - 1, nu - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            let mut m = nu - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = a[(m, m)];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[(m + 1, m)] + a[(m, m + 1)];
                q = a[(m + 1, m + 1)] - z - rr - ss;
                r = a[(m + 2, m + 1)];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[(m, m - 1)].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[(m - 1, m - 1)].abs() + z.abs() + a[(m + 1, m + 1)].abs());
                if u <= f64::EPSILON * v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nu {
                a[(i, i - 2)] = 0.0;
                if i != m + 2 {
                    a[(i, i - 3)] = 0.0;
                }
            }
            let mut k = m;
            while k + 1 <= nu {
                if k != m {
                    p = a[(k, k - 1)];
                    q = a[(k + 1, k - 1)];
                    r = if k + 1 != nu { a[(k + 2, k - 1)] } else { 0.0 };
                    let xs = p.abs() + q.abs() + r.abs();
                    if xs != 0.0 {
                        p /= xs;
                        q /= xs;
                        r /= xs;
                    }
                    x = xs;
                }
                let s = (p * p + q * q + r * r).sqrt().copysign(p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a[(k, k - 1)] = -a[(k, k - 1)];
                        }
                    } else {
                        a[(k, k - 1)] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    let z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nu {
                        let mut pp = a[(k, j)] + q * a[(k + 1, j)];
                        if k + 1 != nu {
                            pp += r * a[(k + 2, j)];
                            a[(k + 2, j)] -= pp * z;
                        }
                        a[(k + 1, j)] -= pp * y;
                        a[(k, j)] -= pp * x;
                    }
                    let mmin = if nu < k + 3 { nu } else { k + 3 };
                    for i in l..=mmin {
                        let mut pp = x * a[(i, k)] + y * a[(i, k + 1)];
                        if k + 1 != nu {
                            pp += z * a[(i, k + 2)];
                            a[(i, k + 2)] -= pp * r;
                        }
                        a[(i, k + 1)] -= pp * q;
                        a[(i, k)] -= pp;
                    }
                }
                k += 1;
            }
        }
    }
    Ok(wr
        .into_iter()
        .zip(wi)
        .map(|(re, im)| Complex { re, im })
        .collect())
}
