//! Sparse stencil operators on rectangular grids and a shift-invert block
//! Krylov eigensolver for their lowest eigenpairs.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Largest dimension handed to the dense solver.
pub const DENSE_LIMIT: usize = 1500;

/// Real symmetric operator `diag + Σ coefficient · shift` on a row-major grid
/// with zero (Dirichlet) boundary values.
#[derive(Clone, Debug)]
pub struct StencilOperator {
    dims: Vec<usize>,
    strides: Vec<usize>,
    diag: Vec<f64>,
    stencil: Vec<(Vec<isize>, f64)>,
}

impl StencilOperator {
    /// `stencil` lists off-diagonal neighbours as per-axis index shifts; it
    /// must be closed under negation with equal coefficients.
    pub fn new(dims: Vec<usize>, diag: Vec<f64>, stencil: Vec<(Vec<isize>, f64)>) -> Self {
        let mut strides = vec![1usize; dims.len()];
        for k in (0..dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }
        assert_eq!(diag.len(), dims.iter().product::<usize>());
        debug_assert!(stencil.iter().all(|(s, c)| {
            let neg: Vec<isize> = s.iter().map(|v| -v).collect();
            stencil.iter().any(|(t, d)| *t == neg && d == c)
        }));
        StencilOperator {
            dims,
            strides,
            diag,
            stencil,
        }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    fn unravel(&self, mut i: usize, out: &mut [usize]) {
        for (k, &s) in self.strides.iter().enumerate() {
            out[k] = i / s;
            i %= s;
        }
    }

    fn neighbour(&self, idx: &[usize], shift: &[isize]) -> Option<usize> {
        let mut flat = 0usize;
        for k in 0..idx.len() {
            let j = idx[k] as isize + shift[k];
            if j < 0 || j >= self.dims[k] as isize {
                return None;
            }
            flat += j as usize * self.strides[k];
        }
        Some(flat)
    }

    /// Calls `f(row, col, value)` for every non-zero off-diagonal entry.
    fn for_each_offdiag(&self, mut f: impl FnMut(usize, usize, f64)) {
        let mut idx = vec![0; self.dims.len()];
        for i in 0..self.dim() {
            self.unravel(i, &mut idx);
            for (shift, c) in &self.stencil {
                if let Some(j) = self.neighbour(&idx, shift) {
                    f(i, j, *c);
                }
            }
        }
    }

    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (yi, (d, xi)) in y.iter_mut().zip(self.diag.iter().zip(x)) {
            *yi = d * xi;
        }
        self.for_each_offdiag(|i, j, c| y[i] += c * x[j]);
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::from_diagonal(&DVector::from_column_slice(&self.diag));
        self.for_each_offdiag(|i, j, c| m[(i, j)] += c);
        m
    }

    /// Half-bandwidth in the flat row-major ordering.
    pub fn bandwidth(&self) -> usize {
        self.stencil
            .iter()
            .map(|(s, _)| {
                s.iter()
                    .zip(&self.strides)
                    .map(|(&d, &st)| d * st as isize)
                    .sum::<isize>()
                    .unsigned_abs()
            })
            .max()
            .unwrap_or(0)
    }

    /// Cholesky factor of `self − shift·1` in band storage.
    pub fn band_cholesky(&self, shift: f64) -> Result<BandCholesky> {
        let bw = self.bandwidth();
        let n = self.dim();
        let w = bw + 1;
        let mut band = vec![0.0; n * w];
        for i in 0..n {
            band[i * w + bw] = self.diag[i] - shift;
        }
        self.for_each_offdiag(|i, j, c| {
            if j < i {
                band[i * w + (j + bw - i)] += c;
            }
        });
        BandCholesky::factor(band, n, bw)
    }
}

/// Lower Cholesky factor of a symmetric positive-definite band matrix.
/// Row `i` stores columns `i−bw ..= i`.
#[derive(Clone, Debug)]
pub struct BandCholesky {
    band: Vec<f64>,
    n: usize,
    bw: usize,
}

impl BandCholesky {
    fn factor(mut band: Vec<f64>, n: usize, bw: usize) -> Result<Self> {
        let w = bw + 1;
        for i in 0..n {
            let lo_i = i.saturating_sub(bw);
            for j in lo_i..=i {
                let lo = lo_i.max(j.saturating_sub(bw));
                let (ri, rj) = (i * w + bw - i, j * w + bw - j);
                let mut s = band[ri + j];
                for k in lo..j {
                    s -= band[ri + k] * band[rj + k];
                }
                if j == i {
                    if !(s > 0.0) {
                        return Err(Error::NotPositiveDefinite {
                            matrix: "shifted Hamiltonian",
                            reason: format!("pivot {s:e} at row {i}"),
                        });
                    }
                    band[ri + i] = s.sqrt();
                } else {
                    band[ri + j] = s / band[rj + j];
                }
            }
        }
        Ok(BandCholesky { band, n, bw })
    }

    /// Solves `L Lᵀ x = b` in place.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        let (n, bw, w) = (self.n, self.bw, self.bw + 1);
        for i in 0..n {
            let r = i * w + bw - i;
            let lo = i.saturating_sub(bw);
            let mut s = x[i];
            for k in lo..i {
                s -= self.band[r + k] * x[k];
            }
            x[i] = s / self.band[r + i];
        }
        for i in (0..n).rev() {
            let r = i * w + bw - i;
            x[i] /= self.band[r + i];
            let xi = x[i];
            let lo = i.saturating_sub(bw);
            for k in lo..i {
                x[k] -= self.band[r + k] * xi;
            }
        }
    }
}

impl BandCholesky {
    /// Solves for `b` right-hand sides stored row-major (`x[i·b + c]`).
    pub fn solve_block(&self, x: &mut [f64], b: usize) {
        let (n, bw, w) = (self.n, self.bw, self.bw + 1);
        assert_eq!(x.len(), n * b);
        let mut acc = vec![0.0; b];
        for i in 0..n {
            let r = i * w + bw - i;
            let lo = i.saturating_sub(bw);
            let (done, rest) = x.split_at_mut(i * b);
            acc.copy_from_slice(&rest[..b]);
            for k in lo..i {
                let l = self.band[r + k];
                let xk = &done[k * b..(k + 1) * b];
                for (a, v) in acc.iter_mut().zip(xk) {
                    *a -= l * v;
                }
            }
            let d = self.band[r + i];
            for (dst, a) in rest[..b].iter_mut().zip(&acc) {
                *dst = a / d;
            }
        }
        for i in (0..n).rev() {
            let r = i * w + bw - i;
            let d = self.band[r + i];
            let lo = i.saturating_sub(bw);
            let (head, tail) = x.split_at_mut(i * b);
            for v in tail[..b].iter_mut() {
                *v /= d;
            }
            let xi = &tail[..b];
            for k in lo..i {
                let l = self.band[r + k];
                for (dst, v) in head[k * b..(k + 1) * b].iter_mut().zip(xi) {
                    *dst -= l * v;
                }
            }
        }
    }
}

/// Lowest eigenpairs: energies ascending, eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

/// Lowest `k` eigenpairs of `op`. `shift` must lie strictly below the
/// spectrum when the sparse path is taken.
pub fn lowest_eigenpairs(op: &StencilOperator, k: usize, shift: f64) -> Result<Eigenpairs> {
    let n = op.dim();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "requested {k} eigenpairs of a {n}-dimensional operator"
        )));
    }
    if n <= DENSE_LIMIT {
        return Ok(dense_lowest(&op.to_dense(), k));
    }
    let chol = op.band_cholesky(shift)?;
    let (theta, vectors) = block_krylov_largest(&chol, n, k)?;
    let values = theta.iter().map(|t| shift + 1.0 / t).collect();
    Ok(Eigenpairs { values, vectors })
}

pub fn dense_lowest(m: &DMatrix<f64>, k: usize) -> Eigenpairs {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order[..k].iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), k, |r, c| eig.eigenvectors[(r, order[c])]);
    Eigenpairs { values, vectors }
}

const BLOCK: usize = 8;
const RESIDUAL_TOL: f64 = 1e-10;
const MAX_RESTARTS: usize = 8;

/// Largest eigenpairs of `(L Lᵀ)⁻¹` by block Arnoldi with full
/// reorthogonalization and explicit restarts.
fn block_krylov_largest(chol: &BandCholesky, n: usize, k: usize) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0fe1_e5);
    let mut start = DMatrix::from_fn(n, BLOCK, |_, _| rng.random::<f64>() - 0.5);
    let mut m_max = (6 * k + 64).div_ceil(BLOCK) * BLOCK;
    let mut converged = 0;
    for _ in 0..MAX_RESTARTS {
        m_max = m_max.min(n);
        let (q, t) = arnoldi(chol, &start, m_max);
        let m = q.ncols();
        let eig = SymmetricEigen::new(t);
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let kk = k.min(m);
        let theta: Vec<f64> = order[..kk].iter().map(|&i| eig.eigenvalues[i]).collect();
        let y = DMatrix::from_fn(m, kk, |r, c| eig.eigenvectors[(r, order[c])]);
        let vectors = &q * &y;
        let mut applied = vectors.clone();
        apply_inverse(chol, &mut applied);
        converged = (0..kk)
            .filter(|&c| {
                let r = applied.column(c) - vectors.column(c) * theta[c];
                r.norm() <= RESIDUAL_TOL * theta[c].abs()
            })
            .count();
        if converged == k {
            return Ok((theta, vectors));
        }
        let keep = BLOCK.min(kk);
        let extra = DMatrix::from_fn(n, BLOCK - keep, |_, _| rng.random::<f64>() - 0.5);
        start = DMatrix::from_fn(n, BLOCK, |r, c| {
            if c < keep {
                vectors[(r, c)]
            } else {
                extra[(r, c - keep)]
            }
        });
        m_max = (m_max * 3 / 2).div_ceil(BLOCK) * BLOCK;
    }
    Err(Error::EigenNotConverged {
        requested: k,
        converged,
    })
}

fn apply_inverse(chol: &BandCholesky, m: &mut DMatrix<f64>) {
    // The transpose of an n×b column-major matrix is its row-major layout.
    let mut t = m.transpose();
    chol.solve_block(t.as_mut_slice(), m.ncols());
    *m = t.transpose();
}

/// Returns an orthonormal Krylov basis `Q` and the symmetrized projection
/// `T = Qᵀ A Q`.
fn arnoldi(chol: &BandCholesky, start: &DMatrix<f64>, m_max: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = start.nrows();
    let mut q = DMatrix::<f64>::zeros(n, m_max);
    let mut t = DMatrix::<f64>::zeros(m_max, m_max);
    let (mut current, _) = orthonormalize(start, &q, 0);
    let mut filled = 0;
    while current.ncols() > 0 && filled < m_max {
        let take = current.ncols().min(m_max - filled);
        let block = filled;
        q.columns_mut(block, take).copy_from(&current.columns(0, take));
        filled += take;
        let mut w = q.columns(block, take).into_owned();
        apply_inverse(chol, &mut w);
        let mut coeff = DMatrix::<f64>::zeros(filled, take);
        for _ in 0..2 {
            let c = project_out(&q, filled, &mut w);
            coeff += c;
        }
        t.view_mut((0, block), (filled, take)).copy_from(&coeff);
        if filled == m_max {
            break;
        }
        // `w` is already orthogonal to the basis after two projections.
        let (next, r) = orthonormalize(&w, &q, 0);
        let fit = next.ncols().min(m_max - filled);
        t.view_mut((filled, block), (fit, take))
            .copy_from(&r.rows(0, fit));
        current = next.columns(0, fit).into_owned();
    }
    let q = q.columns(0, filled).into_owned();
    let t = t.view((0, 0), (filled, filled)).into_owned();
    let t = (&t + t.transpose()) * 0.5;
    (q, t)
}

/// Removes the components of `w` along `q[.., ..filled]` and returns them.
fn project_out(q: &DMatrix<f64>, filled: usize, w: &mut DMatrix<f64>) -> DMatrix<f64> {
    let basis = q.columns(0, filled);
    // (wᵀ Q)ᵀ goes through the blocked matrix-product kernel.
    let c = (w.transpose() * basis).transpose();
    w.gemm(-1.0, &basis, &c, 1.0);
    c
}

/// Orthonormalizes the columns of `w` against `q[.., ..filled]` and each
/// other, dropping numerically dependent columns. Returns the new block and
/// its overlaps `R = Q_newᵀ w`.
fn orthonormalize(w: &DMatrix<f64>, q: &DMatrix<f64>, filled: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let scale = w.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut v = w.clone();
    let mut kept: Vec<DVector<f64>> = Vec::new();
    if filled > 0 {
        for _ in 0..2 {
            project_out(q, filled, &mut v);
        }
    }
    for c in 0..v.ncols() {
        let mut x = v.column(c).into_owned();
        for _ in 0..2 {
            for u in &kept {
                let d = u.dot(&x);
                x.axpy(-d, u, 1.0);
            }
        }
        let norm = x.norm();
        if norm > 1e-10 * scale.max(f64::MIN_POSITIVE) {
            kept.push(x / norm);
        }
    }
    if kept.is_empty() {
        return (DMatrix::zeros(w.nrows(), 0), DMatrix::zeros(0, w.ncols()));
    }
    let block = DMatrix::from_columns(&kept);
    let r = block.tr_mul(w);
    (block, r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_1d(n: usize, h: f64) -> StencilOperator {
        let c = -1.0 / (h * h);
        StencilOperator::new(vec![n], vec![2.0 / (h * h); n], vec![(vec![1], c), (vec![-1], c)])
    }

    fn harmonic_2d(n: usize, half: f64, mixed: f64) -> StencilOperator {
        let h = 2.0 * half / (n - 1) as f64;
        let x = |i: usize| -half + i as f64 * h;
        let mut diag = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                diag.push(2.0 / (h * h) + 2.0 / (h * h) + 0.5 * (x(i).powi(2) + x(j).powi(2)));
            }
        }
        let a = -1.0 / (h * h);
        let m = mixed / (h * h);
        let stencil = vec![
            (vec![1, 0], a),
            (vec![-1, 0], a),
            (vec![0, 1], a),
            (vec![0, -1], a),
            (vec![1, 1], -m),
            (vec![-1, -1], -m),
            (vec![1, -1], m),
            (vec![-1, 1], m),
        ];
        StencilOperator::new(vec![n, n], diag, stencil)
    }

    #[test]
    fn band_cholesky_solves() {
        let op = harmonic_2d(9, 3.0, 0.1);
        let dense = op.to_dense();
        let chol = op.band_cholesky(-1.0).unwrap();
        let b: Vec<f64> = (0..op.dim()).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut x = b.clone();
        chol.solve_in_place(&mut x);
        let shifted = &dense + DMatrix::identity(op.dim(), op.dim());
        let r = &shifted * DVector::from_column_slice(&x) - DVector::from_column_slice(&b);
        assert!(r.amax() < 1e-10, "{}", r.amax());
    }

    #[test]
    fn apply_matches_dense() {
        let op = harmonic_2d(7, 2.0, 0.3);
        let x: Vec<f64> = (0..op.dim()).map(|i| (i as f64).cos()).collect();
        let mut y = vec![0.0; op.dim()];
        op.apply(&x, &mut y);
        let yd = op.to_dense() * DVector::from_column_slice(&x);
        assert!((DVector::from_column_slice(&y) - yd).amax() < 1e-12);
        assert!(crate::linalg::is_symmetric(&op.to_dense(), 1e-14));
        assert_eq!(op.bandwidth(), 8);
    }

    #[test]
    fn dense_laplacian_spectrum() {
        let n = 50;
        let h = 1.0 / (n + 1) as f64;
        let e = lowest_eigenpairs(&laplacian_1d(n, h), 3, 0.0).unwrap();
        for (m, v) in e.values.iter().enumerate() {
            let exact = 4.0 / (h * h) * ((m + 1) as f64 * std::f64::consts::PI * h / 2.0).sin().powi(2);
            assert!((v - exact).abs() < 1e-8 * exact);
        }
    }

    #[test]
    fn sparse_matches_dense_on_coupled_oscillators() {
        let op = harmonic_2d(45, 6.0, 0.2);
        assert!(op.dim() > DENSE_LIMIT);
        let sparse = lowest_eigenpairs(&op, 20, -1.0).unwrap();
        let dense = dense_lowest(&op.to_dense(), 20);
        for (a, b) in sparse.values.iter().zip(&dense.values) {
            assert!((a - b).abs() < 1e-9 * b.abs().max(1.0), "{a} {b}");
        }
        let gram = sparse.vectors.tr_mul(&sparse.vectors);
        assert!((gram - DMatrix::identity(20, 20)).amax() < 1e-9);
        let dense_op = op.to_dense();
        for c in 0..20 {
            let v = sparse.vectors.column(c);
            let r = &dense_op * v - v * sparse.values[c];
            assert!(r.norm() < 1e-6, "residual {c}: {}", r.norm());
        }
    }

    #[test]
    fn sparse_handles_exact_degeneracy() {
        // Uncoupled identical oscillators: many exactly degenerate levels.
        let op = harmonic_2d(41, 6.0, 0.0);
        let sparse = lowest_eigenpairs(&op, 15, -1.0).unwrap();
        let dense = dense_lowest(&op.to_dense(), 15);
        for (a, b) in sparse.values.iter().zip(&dense.values) {
            assert!((a - b).abs() < 1e-9 * b.abs().max(1.0), "{a} {b}");
        }
    }
}
