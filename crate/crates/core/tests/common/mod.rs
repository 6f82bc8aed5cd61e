//! Independent reference implementations used by the integration tests.
//! Nothing here calls into the library's own dense or closure helpers.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

pub type CMatrix = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Dense `S (C ⊗ 1_n)` with `S = diag(F, Fᵀ)`, coin as the slow index.
pub fn dense_walk_operator(n: usize, coin: [[Complex64; 2]; 2]) -> CMatrix {
    let mut s = CMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        s[((j + 1) % n, j)] = c(1.0, 0.0);
        s[(n + j, n + (j + 1) % n)] = c(1.0, 0.0);
    }
    let mut coin_kron = CMatrix::zeros(2 * n, 2 * n);
    for a in 0..2 {
        for b in 0..2 {
            for j in 0..n {
                coin_kron[(a * n + j, b * n + j)] = coin[a][b];
            }
        }
    }
    s * coin_kron
}

/// Coin matrix written out from the Euler-angle formula.
pub fn coin_matrix(theta: f64, phi: f64, lam: f64) -> [[Complex64; 2]; 2] {
    let (s, co) = theta.sin_cos();
    [
        [Complex64::from_polar(co, phi), Complex64::from_polar(s, lam)],
        [-Complex64::from_polar(s, -lam), Complex64::from_polar(co, -phi)],
    ]
}

pub fn random_unit_vector<R: Rng>(rng: &mut R, len: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..len)
        .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

fn realify(m: &CMatrix) -> Vec<f64> {
    m.iter().map(|z| z.re).chain(m.iter().map(|z| z.im)).collect()
}

fn unrealify(v: &[f64], dim: usize) -> CMatrix {
    let half = dim * dim;
    CMatrix::from_iterator(dim, dim, (0..half).map(|k| c(v[k], v[half + k])))
}

/// Orthonormal basis (as matrices) of the real span of `mats`, from the
/// eigendecomposition of their Gram matrix `G_ij = Re tr(a_i† a_j)`.
///
/// nalgebra's SVD is not used: on these sparse rank-deficient inputs its
/// factors do not reconstruct the matrix.
fn span_basis(mats: &[CMatrix], dim: usize, tol: f64) -> Vec<CMatrix> {
    let vecs: Vec<Vec<f64>> = mats.iter().map(realify).collect();
    let m = vecs.len();
    let gram = DMatrix::from_fn(m, m, |i, j| vecs[i].iter().zip(&vecs[j]).map(|(x, y)| x * y).sum::<f64>());
    let eig = gram.symmetric_eigen();
    let lmax = eig.eigenvalues.max().max(1.0);
    let len = vecs[0].len();
    (0..m)
        .filter(|&k| eig.eigenvalues[k] > tol * lmax)
        .map(|k| {
            let scale = eig.eigenvalues[k].sqrt();
            let mut v = vec![0.0; len];
            for (i, vi) in vecs.iter().enumerate() {
                let w = eig.eigenvectors[(i, k)] / scale;
                for (acc, x) in v.iter_mut().zip(vi) {
                    *acc += w * x;
                }
            }
            unrealify(&v, dim)
        })
        .collect()
}

/// Lie closure dimension by brute force: bracket every pair of the current
/// basis, recompute the rank, repeat until it stops growing.
pub fn brute_force_closure_dimension(gens: &[CMatrix], tol: f64) -> usize {
    let dim = gens[0].nrows();
    let mut basis = span_basis(gens, dim, tol);
    loop {
        let mut all = basis.clone();
        for i in 0..basis.len() {
            for j in i + 1..basis.len() {
                all.push(&basis[i] * &basis[j] - &basis[j] * &basis[i]);
            }
        }
        let next = span_basis(&all, dim, tol);
        if next.len() == basis.len() {
            return basis.len();
        }
        basis = next;
    }
}
