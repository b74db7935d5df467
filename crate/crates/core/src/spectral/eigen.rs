use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;

use super::skyline::SkylineCholesky;
use super::sparse::SparseSymmetric;
use crate::error::{Error, Result};

/// Default relative residual tolerance.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Matrix applications allowed per requested eigenpair.
pub const BUDGET_PER_PAIR: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub lambda: f64,
    /// Coefficients on the free degrees of freedom, `uᵀMu = 1`.
    pub coeffs: Vec<f64>,
    /// `‖Ku - λMu‖ / (λ‖Mu‖)`.
    pub residual: f64,
}

/// The `count` smallest eigenpairs of `K u = λ M u`, ascending.
///
/// Subspace iteration with `K⁻¹M` on a block of `max(2·count, count + 8)`
/// vectors and a Rayleigh–Ritz step per sweep. Starting vectors come from a
/// fixed seed, and each returned vector is signed so that its largest entry is
/// positive.
pub fn solve_eigen(k: &SparseSymmetric, m: &SparseSymmetric, count: usize, tol: f64) -> Result<Vec<EigenPair>> {
    let n = k.n;
    if count == 0 || count > n {
        return Err(Error::Precondition(format!("cannot compute {count} eigenpairs of a {n}×{n} problem")));
    }
    if m.n != n {
        return Err(Error::LinearAlgebra("K and M differ in size".into()));
    }
    let p = (2 * count).max(count + 8).min(n);
    let fact = SkylineCholesky::factor(k)?;
    let mut rng = crate::sampling::rng(0x5eed);
    let mut x: Vec<Vec<f64>> = (0..p).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    let max_iter = (BUDGET_PER_PAIR * count / p).max(50);
    let mut best = f64::INFINITY;
    for _ in 0..max_iter {
        let y: Vec<Vec<f64>> = x.par_iter().map(|xi| fact.solve(&m.mul_vec(xi))).collect();
        let ky: Vec<Vec<f64>> = y.par_iter().map(|v| k.mul_vec(v)).collect();
        let my: Vec<Vec<f64>> = y.par_iter().map(|v| m.mul_vec(v)).collect();
        let a = gram(&y, &ky);
        let b = gram(&y, &my);
        let (mu, q) = generalized_eigen(&a, &b)?;
        x = combine(&y, &q);
        let kx = combine(&ky, &q);
        let mx = combine(&my, &q);
        let res: Vec<f64> = (0..count)
            .map(|i| {
                let num: f64 = kx[i].iter().zip(&mx[i]).map(|(a, b)| (a - mu[i] * b).powi(2)).sum::<f64>().sqrt();
                let den = mu[i].abs() * norm(&mx[i]);
                num / den
            })
            .collect();
        let worst = res.iter().cloned().fold(0.0, f64::max);
        best = best.min(worst);
        if worst <= tol {
            return Ok((0..count)
                .map(|i| {
                    let mut c = x[i].clone();
                    orient_sign(&mut c);
                    EigenPair { lambda: mu[i], coeffs: c, residual: res[i] }
                })
                .collect());
        }
    }
    Err(Error::NoConvergence { iterations: max_iter, best_residual: best })
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `G_ij = u_i · v_j`, symmetrized.
fn gram(u: &[Vec<f64>], v: &[Vec<f64>]) -> DMatrix<f64> {
    let p = u.len();
    let entries: Vec<(usize, usize, f64)> = (0..p)
        .into_par_iter()
        .flat_map_iter(|i| (0..=i).map(move |j| (i, j)))
        .map(|(i, j)| (i, j, 0.5 * (dot(&u[i], &v[j]) + dot(&u[j], &v[i]))))
        .collect();
    let mut g = DMatrix::zeros(p, p);
    for (i, j, val) in entries {
        g[(i, j)] = val;
        g[(j, i)] = val;
    }
    g
}

/// Columns `Σ_k y_k q_kj`.
fn combine(y: &[Vec<f64>], q: &DMatrix<f64>) -> Vec<Vec<f64>> {
    let n = y[0].len();
    (0..q.ncols())
        .into_par_iter()
        .map(|j| {
            let mut out = vec![0.0; n];
            for (k, yk) in y.iter().enumerate() {
                let c = q[(k, j)];
                if c != 0.0 {
                    out.iter_mut().zip(yk).for_each(|(o, v)| *o += c * v);
                }
            }
            out
        })
        .collect()
}

/// Dense `A q = μ B q` with `B` positive definite; ascending, `QᵀBQ = I`.
pub fn generalized_eigen(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let chol = b
        .clone()
        .cholesky()
        .ok_or_else(|| Error::LinearAlgebra("Ritz mass matrix is not positive definite".into()))?;
    let l = chol.l();
    let linv_a = l.solve_lower_triangular(a).ok_or_else(|| Error::LinearAlgebra("singular factor".into()))?;
    let c = l
        .solve_lower_triangular(&linv_a.transpose())
        .ok_or_else(|| Error::LinearAlgebra("singular factor".into()))?;
    let c = (&c + c.transpose()) * 0.5;
    let dim = c.nrows();
    let eig = c.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let v = DMatrix::from_fn(dim, order.len(), |r, col| eig.eigenvectors[(r, order[col])]);
    let q = l
        .transpose()
        .solve_upper_triangular(&v)
        .ok_or_else(|| Error::LinearAlgebra("singular factor".into()))?;
    Ok((vals, q))
}

fn orient_sign(v: &mut [f64]) {
    let mut best = 0.0;
    let mut sign = 1.0;
    for &x in v.iter() {
        if x.abs() > best {
            best = x.abs();
            sign = x.signum();
        }
    }
    if sign < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 1D Dirichlet Laplacian on (0,1) with P1 elements.
    fn interval(n: usize) -> (SparseSymmetric, SparseSymmetric) {
        let h = 1.0 / (n + 1) as f64;
        let (mut kt, mut mt) = (Vec::new(), Vec::new());
        for i in 0..n {
            kt.push((i, i, 2.0 / h));
            mt.push((i, i, 4.0 * h / 6.0));
            if i > 0 {
                kt.push((i, i - 1, -1.0 / h));
                mt.push((i, i - 1, h / 6.0));
            }
        }
        (SparseSymmetric::from_triplets(n, &kt).unwrap(), SparseSymmetric::from_triplets(n, &mt).unwrap())
    }

    #[test]
    fn interval_spectrum() {
        let n = 200;
        let (k, m) = interval(n);
        let pairs = solve_eigen(&k, &m, 5, 1e-10).unwrap();
        let h = 1.0 / (n + 1) as f64;
        for (j, p) in pairs.iter().enumerate() {
            // exact discrete eigenvalues of the P1 pencil
            let t = (j + 1) as f64 * std::f64::consts::PI * h;
            let exact = 6.0 / (h * h) * (1.0 - t.cos()) / (2.0 + t.cos());
            assert!((p.lambda - exact).abs() < 1e-8 * exact, "{} vs {exact}", p.lambda);
            assert!(p.residual <= 1e-10);
            assert!((m.inner(&p.coeffs, &p.coeffs) - 1.0).abs() < 1e-10);
        }
        assert!(m.inner(&pairs[0].coeffs, &pairs[3].coeffs).abs() < 1e-8);
    }

    #[test]
    fn deterministic() {
        let (k, m) = interval(60);
        let a = solve_eigen(&k, &m, 3, 1e-9).unwrap();
        let b = solve_eigen(&k, &m, 3, 1e-9).unwrap();
        assert_eq!(a, b);
    }
}
