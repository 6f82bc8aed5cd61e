//! Dense matrix helpers for the `2n × 2n` coin⊗walker space.
//!
//! Basis ordering: `e_j = |+1> ⊗ |j-1>` for `j = 1..n`, then
//! `e_{j+n} = |-1> ⊗ |j-1>`. A 2×2 coin operator `C` therefore acts as the
//! Kronecker product `C ⊗ I_n` with coin as the slow index.

use nalgebra::{DMatrix, Scalar};
use num_complex::Complex64;
use num_traits::Zero;

use crate::circulant::shift_matrix;
use crate::error::Result;

pub type CMatrix = DMatrix<Complex64>;

/// Kronecker product `a ⊗ b`.
pub fn kron<T>(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T>
where
    T: Scalar + Copy + std::ops::Mul<Output = T>,
{
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    DMatrix::from_fn(ar * br, ac * bc, |r, c| a[(r / br, c / bc)] * b[(r % br, c % bc)])
}

/// Block diagonal `diag(a, b)`.
pub fn block_diag<T>(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T>
where
    T: Scalar + Copy + Zero,
{
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = DMatrix::from_element(ar + br, ac + bc, T::zero());
    out.view_mut((0, 0), (ar, ac)).copy_from(a);
    out.view_mut((ar, ac), (br, bc)).copy_from(b);
    out
}

/// Assembles `[[tl, tr], [bl, br]]` from four equally sized square blocks.
pub fn blocks<T>(tl: &DMatrix<T>, tr: &DMatrix<T>, bl: &DMatrix<T>, br: &DMatrix<T>) -> DMatrix<T>
where
    T: Scalar + Copy + Zero,
{
    let n = tl.nrows();
    let mut out = DMatrix::from_element(2 * n, 2 * n, T::zero());
    out.view_mut((0, 0), (n, n)).copy_from(tl);
    out.view_mut((0, n), (n, n)).copy_from(tr);
    out.view_mut((n, 0), (n, n)).copy_from(bl);
    out.view_mut((n, n), (n, n)).copy_from(br);
    out
}

/// Conditional shift `S = diag(F, Fᵀ)` of the walk on the `n`-cycle.
pub fn conditional_shift(n: usize) -> Result<DMatrix<i64>> {
    let f = shift_matrix(n)?;
    Ok(block_diag(&f, &f.transpose()))
}

/// Integer power by repeated multiplication (exponents are small here).
pub fn int_power(m: &DMatrix<i64>, power: usize) -> DMatrix<i64> {
    let mut out = DMatrix::identity(m.nrows(), m.ncols());
    for _ in 0..power {
        out = &out * m;
    }
    out
}

pub fn to_complex(m: &DMatrix<i64>) -> CMatrix {
    m.map(|x| Complex64::new(x as f64, 0.0))
}

/// Complex 2×2 matrix from row-major entries.
pub fn mat2(entries: [Complex64; 4]) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &entries)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// `‖m† + m‖_F`.
pub fn skew_hermitian_defect(m: &CMatrix) -> f64 {
    (m.adjoint() + m).norm()
}

pub fn is_skew_hermitian(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && skew_hermitian_defect(m) <= tol
}

/// Real vectorization `(Re m, Im m)` in column-major order; the real inner
/// product of two such vectors is `Re tr(a† b)`.
pub fn realify(m: &CMatrix) -> Vec<f64> {
    m.iter().map(|z| z.re).chain(m.iter().map(|z| z.im)).collect()
}

/// Inverse of [`realify`] for a square matrix of side `dim`.
pub fn unrealify(v: &[f64], dim: usize) -> CMatrix {
    let half = dim * dim;
    CMatrix::from_iterator(dim, dim, (0..half).map(|k| Complex64::new(v[k], v[half + k])))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_with_identity_places_blocks() {
        let a = DMatrix::from_row_slice(2, 2, &[1i64, 2, 3, 4]);
        let k = kron(&a, &DMatrix::identity(3, 3));
        assert_eq!(k.shape(), (6, 6));
        assert_eq!(k[(0, 3)], 2);
        assert_eq!(k[(4, 1)], 3);
        assert_eq!(k[(5, 5)], 4);
        assert_eq!(k[(0, 4)], 0);
    }

    #[test]
    fn conditional_shift_moves_sectors_oppositely() {
        let s = conditional_shift(5).unwrap();
        // |+1>⊗|0> -> |+1>⊗|1>
        assert_eq!(s[(1, 0)], 1);
        // |-1>⊗|0> -> |-1>⊗|4>
        assert_eq!(s[(9, 5)], 1);
        assert_eq!(int_power(&s, 5), DMatrix::identity(10, 10));
    }

    #[test]
    fn realify_roundtrip() {
        let m = CMatrix::from_fn(3, 3, |r, c| Complex64::new(r as f64, c as f64 - 1.0));
        assert_eq!(unrealify(&realify(&m), 3), m);
    }
}
