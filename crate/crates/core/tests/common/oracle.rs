//! Independent weak-form right-hand side.
//!
//! Nodes come from Golub-Welsch eigenproblems, the basis from the product
//! formula, and every volume and face integral is summed term by term at the
//! nodes. Nothing here touches the crate's matrices.

use nalgebra::{DMatrix, SymmetricEigen};
use splitdg_core::{AdvectionSpeed, FluxKind, NodeFamily};

fn golub_welsch(offdiag: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = offdiag.len() + 1;
    let mut t = DMatrix::zeros(n, n);
    for (k, &b) in offdiag.iter().enumerate() {
        t[(k, k + 1)] = b;
        t[(k + 1, k)] = b;
    }
    let eig = SymmetricEigen::new(t);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

fn legendre(n: usize, x: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return 1.0;
    }
    for k in 1..n {
        let p2 = ((2 * k + 1) as f64 * x * p1 - k as f64 * p0) / (k + 1) as f64;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Nodes and weights on `[−1, 1]`.
pub fn rule(family: NodeFamily, degree: usize) -> (Vec<f64>, Vec<f64>) {
    match family {
        NodeFamily::Gauss => {
            let off: Vec<f64> = (1..=degree).map(|k| k as f64 / ((4 * k * k - 1) as f64).sqrt()).collect();
            let (x, v) = golub_welsch(&off);
            (x, v.iter().map(|v| 2.0 * v).collect())
        }
        NodeFamily::GaussLobatto => {
            let mut x = vec![-1.0];
            if degree >= 2 {
                let off: Vec<f64> = (1..degree - 1)
                    .map(|k| {
                        let k = k as f64;
                        (k * (k + 2.0) / ((2.0 * k + 1.0) * (2.0 * k + 3.0))).sqrt()
                    })
                    .collect();
                x.extend(golub_welsch(&off).0);
            }
            x.push(1.0);
            let nn = (degree * (degree + 1)) as f64;
            let w = x.iter().map(|&x| 2.0 / (nn * legendre(degree, x).powi(2))).collect();
            (x, w)
        }
    }
}

pub fn basis(nodes: &[f64], i: usize, x: f64) -> f64 {
    nodes
        .iter()
        .enumerate()
        .filter(|&(m, _)| m != i)
        .map(|(_, &xm)| (x - xm) / (nodes[i] - xm))
        .product()
}

pub fn basis_derivative(nodes: &[f64], i: usize, x: f64) -> f64 {
    let n = nodes.len();
    (0..n)
        .filter(|&m| m != i)
        .map(|m| {
            let rest: f64 = (0..n)
                .filter(|&k| k != i && k != m)
                .map(|k| (x - nodes[k]) / (nodes[i] - nodes[k]))
                .product();
            rest / (nodes[i] - nodes[m])
        })
        .sum()
}

pub struct Setup<'a> {
    pub family: NodeFamily,
    pub degree: usize,
    pub elements: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub alpha: f64,
    pub theta: f64,
    pub flux: FluxKind,
    pub speed: &'a dyn AdvectionSpeed,
}

/// `dU/dt` on a uniform periodic mesh.
pub fn rhs(s: &Setup, u: &[f64]) -> Vec<f64> {
    let (xi, w) = rule(s.family, s.degree);
    let n = xi.len();
    let k = s.elements;
    let dx = (s.x_max - s.x_min) / k as f64;
    let left_edge = |e: usize| s.x_min + e as f64 * dx;
    let trace = |e: usize, at: f64| -> f64 { (0..n).map(|j| u[e * n + j] * basis(&xi, j, at)).sum() };
    // F* at the left face of element e
    let face_flux = |e: usize| -> f64 {
        let up = (e + k - 1) % k;
        let (u_up, u_down) = (trace(up, 1.0), trace(e, -1.0));
        match s.flux {
            FluxKind::Central => 0.5 * s.speed.value(left_edge(e)) * (u_up + u_down),
            // upstream speed, which differs across the periodic seam when a(x_min) ≠ a(x_max)
            FluxKind::Upwind => s.speed.value(left_edge(up) + dx) * u_up,
        }
    };
    let mut out = vec![0.0; u.len()];
    for e in 0..k {
        let a: Vec<f64> = xi.iter().map(|&x| s.speed.value(left_edge(e) + 0.5 * (x + 1.0) * dx)).collect();
        let ue = &u[e * n..(e + 1) * n];
        let f_left = face_flux(e);
        let f_right = face_flux((e + 1) % k);
        for i in 0..n {
            let a_xi: f64 = (0..n).map(|j| a[j] * basis_derivative(&xi, j, xi[i])).sum();
            let mut conservative = 0.0;
            let mut weak_gradient = 0.0;
            for q in 0..n {
                let dl = basis_derivative(&xi, i, xi[q]);
                conservative += w[q] * a[q] * ue[q] * dl;
                weak_gradient += w[q] * ue[q] * dl;
            }
            let volume = s.alpha * conservative + (1.0 - s.alpha) * a[i] * weak_gradient
                - (1.0 - s.alpha - s.theta) * w[i] * a_xi * ue[i];
            let surface = f_right * basis(&xi, i, 1.0) - f_left * basis(&xi, i, -1.0);
            out[e * n + i] = (volume - surface) / (0.5 * dx * w[i]);
        }
    }
    out
}
