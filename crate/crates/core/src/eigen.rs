//! Dense real nonsymmetric eigensolver.
//!
//! Parlett-Reinsch balancing, Householder reduction to upper Hessenberg form
//! and the Francis implicit double-shift QR iteration. Eigenvalues only;
//! eigenvectors for residual checks come from complex inverse iteration.
//! Everything is sequential and deterministic for identical input bits.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{Error, Result};

const RADIX: f64 = 2.0;
/// Iterations allowed per eigenvalue before giving up.
pub const MAX_ITERATIONS_PER_EIGENVALUE: usize = 60;

/// Row-major square matrix with 1-based accessors, the natural indexing of
/// the QR sweep below.
struct Work {
    n: usize,
    data: Vec<f64>,
}

impl Work {
    fn from_matrix(m: &DMatrix<f64>) -> Self {
        let n = m.nrows();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = m[(i, j)];
            }
        }
        Self { n, data }
    }

    #[inline(always)]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.data[(i - 1) * self.n + (j - 1)]
    }

    #[inline(always)]
    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[(i - 1) * self.n + (j - 1)] = v;
    }

    #[inline(always)]
    fn sub(&mut self, i: usize, j: usize, v: f64) {
        self.data[(i - 1) * self.n + (j - 1)] -= v;
    }
}

/// Balances `a` in place by diagonal similarity with powers of two.
fn balance(a: &mut Work) {
    let n = a.n;
    let sqrdx = RADIX * RADIX;
    loop {
        let mut done = true;
        for i in 1..=n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 1..=n {
                if j != i {
                    c += a.get(j, i).abs();
                    r += a.get(i, j).abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= RADIX;
                    c *= sqrdx;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 1..=n {
                        let v = a.get(i, j) * g;
                        a.set(i, j, v);
                    }
                    for j in 1..=n {
                        let v = a.get(j, i) * f;
                        a.set(j, i, v);
                    }
                }
            }
        }
        if done {
            break;
        }
    }
}

/// Householder reduction to upper Hessenberg form.
fn hessenberg(a: &mut Work) {
    let n = a.n;
    if n < 3 {
        return;
    }
    let mut ort = vec![0.0; n + 1];
    for m in 2..n {
        let scale: f64 = (m..=n).map(|i| a.get(i, m - 1).abs()).sum();
        if scale == 0.0 {
            continue;
        }
        let mut h = 0.0;
        for i in (m..=n).rev() {
            ort[i] = a.get(i, m - 1) / scale;
            h += ort[i] * ort[i];
        }
        let mut g = h.sqrt();
        if ort[m] > 0.0 {
            g = -g;
        }
        h -= ort[m] * g;
        ort[m] -= g;
        for j in m..=n {
            let f: f64 = (m..=n).rev().map(|i| ort[i] * a.get(i, j)).sum::<f64>() / h;
            for i in m..=n {
                a.sub(i, j, f * ort[i]);
            }
        }
        for i in 1..=n {
            let f: f64 = (m..=n).rev().map(|j| ort[j] * a.get(i, j)).sum::<f64>() / h;
            for j in m..=n {
                a.sub(i, j, f * ort[j]);
            }
        }
        a.set(m, m - 1, scale * g);
        for i in (m + 1)..=n {
            a.set(i, m - 1, 0.0);
        }
    }
}

/// Eigenvalues of an upper Hessenberg matrix, destroying it.
fn hessenberg_qr(a: &mut Work) -> Result<Vec<Complex64>> {
    let n = a.n;
    let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
    let mut anorm = 0.0;
    for i in 1..=n {
        for j in i.saturating_sub(1).max(1)..=n {
            anorm += a.get(i, j).abs();
        }
    }
    let mut nn = n;
    let mut shift = 0.0;
    while nn >= 1 {
        let mut its = 0;
        loop {
            let mut l = nn;
            while l >= 2 {
                let mut s = a.get(l - 1, l - 1).abs() + a.get(l, l).abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a.get(l, l - 1).abs() + s == s {
                    a.set(l, l - 1, 0.0);
                    break;
                }
                l -= 1;
            }
            let mut x = a.get(nn, nn);
            if l == nn {
                out[nn] = Complex64::new(x + shift, 0.0);
                nn -= 1;
                break;
            }
            let mut y = a.get(nn - 1, nn - 1);
            let mut w = a.get(nn, nn - 1) * a.get(nn - 1, nn);
            if l == nn - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let mut z = q.abs().sqrt();
                x += shift;
                if q >= 0.0 {
                    z = p + z.copysign(p);
                    out[nn - 1] = Complex64::new(x + z, 0.0);
                    out[nn] = Complex64::new(if z != 0.0 { x - w / z } else { x + z }, 0.0);
                } else {
                    out[nn - 1] = Complex64::new(x + p, z);
                    out[nn] = Complex64::new(x + p, -z);
                }
                nn -= 2;
                break;
            }
            if its == MAX_ITERATIONS_PER_EIGENVALUE {
                return Err(Error::NonConvergence {
                    what: "Hessenberg QR iteration",
                    iterations: its,
                });
            }
            if its > 0 && its % 10 == 0 {
                // exceptional shift
                shift += x;
                for i in 1..=nn {
                    a.sub(i, i, x);
                }
                let s = a.get(nn, nn - 1).abs() + a.get(nn - 1, nn - 2).abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;

            let mut m = nn - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = a.get(m, m);
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a.get(m + 1, m) + a.get(m, m + 1);
                q = a.get(m + 1, m + 1) - z - rr - ss;
                r = a.get(m + 2, m + 1);
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a.get(m, m - 1).abs() * (q.abs() + r.abs());
                let v = p.abs() * (a.get(m - 1, m - 1).abs() + z.abs() + a.get(m + 1, m + 1).abs());
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=nn {
                a.set(i, i - 2, 0.0);
                if i != m + 2 {
                    a.set(i, i - 3, 0.0);
                }
            }
            let mut k = m;
            while k < nn {
                if k != m {
                    p = a.get(k, k - 1);
                    q = a.get(k + 1, k - 1);
                    r = if k != nn - 1 { a.get(k + 2, k - 1) } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = (p * p + q * q + r * r).sqrt().copysign(p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            let v = -a.get(k, k - 1);
                            a.set(k, k - 1, v);
                        }
                    } else {
                        a.set(k, k - 1, -s * x);
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    let z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nn {
                        let mut pp = a.get(k, j) + q * a.get(k + 1, j);
                        if k != nn - 1 {
                            pp += r * a.get(k + 2, j);
                            a.sub(k + 2, j, pp * z);
                        }
                        a.sub(k + 1, j, pp * y);
                        a.sub(k, j, pp * x);
                    }
                    let mmin = nn.min(k + 3);
                    for i in l..=mmin {
                        let mut pp = x * a.get(i, k) + y * a.get(i, k + 1);
                        if k != nn - 1 {
                            pp += z * a.get(i, k + 2);
                            a.sub(i, k + 2, pp * r);
                        }
                        a.sub(i, k + 1, pp * q);
                        a.sub(i, k, pp);
                    }
                }
                k += 1;
            }
        }
    }
    out.remove(0);
    Ok(out)
}

/// All eigenvalues of a real square matrix.
pub fn eigenvalues(matrix: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    if matrix.nrows() != matrix.ncols() {
        return Err(Error::DimensionMismatch {
            expected: matrix.nrows(),
            found: matrix.ncols(),
        });
    }
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidConfig("matrix has non-finite entries".into()));
    }
    if matrix.nrows() == 0 {
        return Ok(Vec::new());
    }
    let mut work = Work::from_matrix(matrix);
    balance(&mut work);
    hessenberg(&mut work);
    hessenberg_qr(&mut work)
}

/// Eigenvector for an (approximate) eigenvalue by complex inverse iteration.
pub fn eigenvector(matrix: &DMatrix<f64>, lambda: Complex64) -> Option<Vec<Complex64>> {
    let n = matrix.nrows();
    let scale = matrix.iter().map(|v| v.abs()).fold(1.0, f64::max);
    // Nudge the shift off the exact eigenvalue so the factorisation is regular.
    let shift = lambda + Complex64::new(1e-10 * scale, 1e-10 * scale);
    let shifted = DMatrix::from_fn(n, n, |i, j| {
        let v = Complex64::new(matrix[(i, j)], 0.0);
        if i == j {
            v - shift
        } else {
            v
        }
    });
    let lu = shifted.lu();
    let mut v = nalgebra::DVector::from_fn(n, |i, _| Complex64::new(1.0 + (i % 7) as f64 * 0.1, 0.3 * (i % 3) as f64));
    for _ in 0..3 {
        v = lu.solve(&v)?;
        let norm = v.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return None;
        }
        v /= Complex64::new(norm, 0.0);
    }
    Some(v.as_slice().to_vec())
}

/// `‖G v − λ v‖ / ‖v‖`.
pub fn eigenpair_residual(matrix: &DMatrix<f64>, lambda: Complex64, v: &[Complex64]) -> f64 {
    let n = matrix.nrows();
    let mut res = 0.0;
    for i in 0..n {
        let mut s = -lambda * v[i];
        for j in 0..n {
            s += matrix[(i, j)] * v[j];
        }
        res += s.norm_sqr();
    }
    let vn: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    (res / vn).sqrt()
}
