//! Envelope Cholesky factorization with reverse Cuthill–McKee ordering.

use std::collections::VecDeque;

use super::sparse::SparseSymmetric;
use crate::error::{Error, Result};

/// Reverse Cuthill–McKee ordering; `perm[new] = old`.
pub fn reverse_cuthill_mckee(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let deg: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let seed = (0..n).filter(|&i| !visited[i]).min_by_key(|&i| (deg[i], i)).unwrap();
        let start = peripheral(adj, &deg, seed);
        visited[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = adj[v].iter().copied().filter(|&w| !visited[w]).collect();
            next.sort_by_key(|&w| (deg[w], w));
            for w in next {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

/// A pseudo-peripheral vertex of the component of `seed`.
fn peripheral(adj: &[Vec<usize>], deg: &[usize], seed: usize) -> usize {
    let mut v = seed;
    let mut ecc = 0;
    for _ in 0..8 {
        let levels = bfs_levels(adj, v);
        let depth = *levels.iter().filter_map(|l| *l).collect::<Vec<_>>().iter().max().unwrap();
        if depth <= ecc {
            break;
        }
        ecc = depth;
        v = (0..adj.len()).filter(|&i| levels[i] == Some(depth)).min_by_key(|&i| (deg[i], i)).unwrap();
    }
    v
}

fn bfs_levels(adj: &[Vec<usize>], s: usize) -> Vec<Option<usize>> {
    let mut lev = vec![None; adj.len()];
    lev[s] = Some(0);
    let mut q = VecDeque::from([s]);
    while let Some(v) = q.pop_front() {
        let l = lev[v].unwrap();
        for &w in &adj[v] {
            if lev[w].is_none() {
                lev[w] = Some(l + 1);
                q.push_back(w);
            }
        }
    }
    lev
}

/// `A = L·Lᵀ` in a permuted envelope layout.
#[derive(Debug, Clone)]
pub struct SkylineCholesky {
    n: usize,
    perm: Vec<usize>,
    first: Vec<usize>,
    offsets: Vec<usize>,
    data: Vec<f64>,
}

impl SkylineCholesky {
    pub fn factor(a: &SparseSymmetric) -> Result<Self> {
        let n = a.n;
        let perm = reverse_cuthill_mckee(&a.adjacency());
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for i in 0..n {
            for (j, _) in a.row(i) {
                let (r, c) = (inv[i].max(inv[j]), inv[i].min(inv[j]));
                first[r] = first[r].min(c);
            }
        }
        let mut offsets = vec![0; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + (i - first[i] + 1);
        }
        let mut data = vec![0.0; offsets[n]];
        for i in 0..n {
            for (j, v) in a.row(i) {
                let (r, c) = (inv[i].max(inv[j]), inv[i].min(inv[j]));
                data[offsets[r] + c - first[r]] += v;
            }
        }
        for i in 0..n {
            let fi = first[i];
            for j in fi..=i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let (ri, rj) = (offsets[i], offsets[j]);
                let li = &data[ri + k0 - fi..ri + j - fi];
                let lj = &data[rj + k0 - fj..rj + j - fj];
                let dot: f64 = li.iter().zip(lj).map(|(x, y)| x * y).sum();
                let s = data[ri + j - fi] - dot;
                if j < i {
                    data[ri + j - fi] = s / data[rj + j - fj];
                } else {
                    if !(s > 0.0) {
                        return Err(Error::LinearAlgebra(format!("matrix is not positive definite (pivot {s:e} at {i})")));
                    }
                    data[ri + j - fi] = s.sqrt();
                }
            }
        }
        Ok(Self { n, perm, first, offsets, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Stored entries of the envelope.
    pub fn envelope_size(&self) -> usize {
        self.data.len()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut z: Vec<f64> = self.perm.iter().map(|&o| b[o]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.data[self.offsets[i]..self.offsets[i + 1]];
            let dot: f64 = row[..i - fi].iter().zip(&z[fi..i]).map(|(l, x)| l * x).sum();
            z[i] = (z[i] - dot) / row[i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let row = &self.data[self.offsets[i]..self.offsets[i + 1]];
            z[i] /= row[i - fi];
            let xi = z[i];
            for (k, l) in (fi..i).zip(row) {
                z[k] -= l * xi;
            }
        }
        let mut x = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = z[new];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_1d(n: usize) -> SparseSymmetric {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i > 0 {
                t.push((i, i - 1, -1.0));
            }
        }
        SparseSymmetric::from_triplets(n, &t).unwrap()
    }

    #[test]
    fn solves_tridiagonal() {
        let a = laplacian_1d(50);
        let f = SkylineCholesky::factor(&a).unwrap();
        let x_true: Vec<f64> = (0..50).map(|i| (i as f64 * 0.3).sin()).collect();
        let b = a.mul_vec(&x_true);
        let x = f.solve(&b);
        for (u, v) in x.iter().zip(&x_true) {
            assert!((u - v).abs() < 1e-11);
        }
    }

    #[test]
    fn rcm_keeps_band_of_path_graph() {
        // a shuffled path still gets a bandwidth-1 ordering
        let n = 20;
        let label: Vec<usize> = (0..n).map(|i| (i * 7) % n).collect();
        let mut t = Vec::new();
        for i in 0..n {
            t.push((label[i], label[i], 4.0));
            if i > 0 {
                t.push((label[i], label[i - 1], -1.0));
            }
        }
        let a = SparseSymmetric::from_triplets(n, &t).unwrap();
        let f = SkylineCholesky::factor(&a).unwrap();
        assert_eq!(f.envelope_size(), 2 * n - 1);
    }

    #[test]
    fn rejects_indefinite() {
        let a = SparseSymmetric::from_triplets(2, &[(0, 0, 1.0), (1, 0, 2.0), (1, 1, 1.0)]).unwrap();
        assert!(SkylineCholesky::factor(&a).is_err());
    }
}
