//! Circulant matrices of order `n`, stored by the coefficients of the powers
//! of the basic cyclic permutation `F`:
//!
//! ```text
//! R = a_0 I + a_1 F + a_2 F^2 + ... + a_{n-1} F^{n-1}
//! ```
//!
//! `F` sends basis vector `e_j` to `e_{j+1 mod n}`, so the dense entry at
//! `(row, col)` is `a_{(row - col) mod n}`.
//!
//! Fourier convention: `Φ†` has entries `ω^{jk}/√n` with `ω = e^{2πi/n}`, and
//! every circulant satisfies `Φ R Φ† = diag(λ_0, ..., λ_{n-1})`. Index `k` of
//! [`Circulant::eigenvalues`] is Fourier mode `k`; the list is never sorted.

use std::f64::consts::PI;
use std::ops::{Add, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dense::CMatrix;
use crate::error::{Error, Result};

/// The basic circulant permutation matrix `F` of order `n`.
///
/// Ones sit at `(j + 1, j)` for `j = 0..n-1` and at `(0, n - 1)`. Integer
/// entries so that powers and products stay exact.
pub fn shift_matrix(n: usize) -> Result<DMatrix<i64>> {
    if n == 0 {
        return Err(Error::InvalidDimension(n));
    }
    Ok(DMatrix::from_fn(n, n, |r, c| i64::from((c + 1) % n == r)))
}

/// `ω^k` with `ω = e^{2πi/n}`; the exponent is reduced mod `n` first so large
/// products of indices do not lose precision.
pub(crate) fn root_of_unity(n: usize, k: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * (k % n) as f64 / n as f64)
}

/// Unitary Fourier matrix `Φ` of order `n`.
///
/// Only the order is stored; application is the direct O(n²) sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FourierMatrix {
    n: usize,
}

impl FourierMatrix {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension(n));
        }
        Ok(Self { n })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// Dense `Φ†`, entries `ω^{jk}/√n`.
    pub fn adjoint_dense(&self) -> CMatrix {
        let scale = 1.0 / (self.n as f64).sqrt();
        CMatrix::from_fn(self.n, self.n, |j, k| root_of_unity(self.n, j * k) * scale)
    }

    /// Dense `Φ`, entries `ω^{-jk}/√n`.
    pub fn dense(&self) -> CMatrix {
        self.adjoint_dense().adjoint()
    }

    /// `Φ v`.
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        self.transform(v, true)
    }

    /// `Φ† v`.
    pub fn apply_adjoint(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        self.transform(v, false)
    }

    fn transform(&self, v: &[Complex64], forward: bool) -> Result<Vec<Complex64>> {
        let n = self.n;
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                left: n,
                right: v.len(),
            });
        }
        let scale = 1.0 / (n as f64).sqrt();
        Ok((0..n)
            .map(|j| {
                let sum: Complex64 = v
                    .iter()
                    .enumerate()
                    .map(|(k, x)| {
                        let w = root_of_unity(n, j * k);
                        x * if forward { w.conj() } else { w }
                    })
                    .sum();
                sum * scale
            })
            .collect())
    }
}

/// An `n × n` complex circulant matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circulant {
    coeffs: Vec<Complex64>,
}

impl Circulant {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        Ok(Self { coeffs })
    }

    pub fn zero(n: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::scalar(n, Complex64::new(1.0, 0.0))
    }

    pub fn scalar(n: usize, value: Complex64) -> Result<Self> {
        let mut c = Self::zero(n)?;
        c.coeffs[0] = value;
        Ok(c)
    }

    /// `F^power` (power taken mod `n`).
    pub fn shift_power(n: usize, power: usize) -> Result<Self> {
        let mut c = Self::zero(n)?;
        c.coeffs[power % n] = Complex64::new(1.0, 0.0);
        Ok(c)
    }

    /// Rebuilds the circulant whose Fourier-mode eigenvalues are `eigs`:
    /// `Φ† diag(eigs) Φ`.
    pub fn from_eigenvalues(eigs: &[Complex64]) -> Result<Self> {
        let n = eigs.len();
        let phi = FourierMatrix::new(n)?;
        let scale = 1.0 / (n as f64).sqrt();
        let coeffs = phi
            .apply_adjoint(eigs)?
            .into_iter()
            .map(|c| c * scale)
            .collect();
        Self::new(coeffs)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `F^l` with `l` taken mod `n`.
    pub fn coeff(&self, l: usize) -> Complex64 {
        self.coeffs[l % self.order()]
    }

    pub fn to_dense(&self) -> CMatrix {
        let n = self.order();
        CMatrix::from_fn(n, n, |r, c| self.coeffs[(r + n - c) % n])
    }

    /// Product of two circulants of equal order (cyclic convolution of the
    /// coefficient lists). Circulants commute, so the order of the operands
    /// does not matter.
    pub fn mul(&self, other: &Circulant) -> Result<Circulant> {
        self.check_order(other)?;
        let n = self.order();
        let coeffs = (0..n)
            .map(|m| {
                (0..n)
                    .map(|l| self.coeffs[l] * other.coeffs[(m + n - l) % n])
                    .sum()
            })
            .collect();
        Ok(Circulant { coeffs })
    }

    /// Conjugate transpose, again circulant: coefficient `l` is `conj(a_{-l})`.
    pub fn adjoint(&self) -> Circulant {
        let n = self.order();
        Circulant {
            coeffs: (0..n).map(|l| self.coeffs[(n - l) % n].conj()).collect(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> Circulant {
        Circulant {
            coeffs: self.coeffs.iter().map(|a| a * factor).collect(),
        }
    }

    /// Eigenvalues in Fourier-mode order: `λ_k = Σ_l a_l ω^{-kl}`, the
    /// diagonal of `Φ R Φ†`.
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        let n = self.order();
        let root_n = (n as f64).sqrt();
        FourierMatrix { n }
            .apply(&self.coeffs)
            .expect("order matches by construction")
            .into_iter()
            .map(|x| x * root_n)
            .collect()
    }

    /// Checks `a_0* = -a_0` and `a_{n-l}* = -a_l` for every `l`, which is
    /// equivalent to `R† = -R`.
    pub fn is_skew_hermitian(&self, tol: f64) -> bool {
        let n = self.order();
        (0..n).all(|l| (self.coeffs[(n - l) % n].conj() + self.coeffs[l]).norm() <= tol)
    }

    /// Matrix exponential through the Fourier diagonalization,
    /// `Φ† diag(e^{λ_k}) Φ`.
    pub fn exp(&self) -> Circulant {
        let eigs: Vec<Complex64> = self.eigenvalues().into_iter().map(|l| l.exp()).collect();
        Self::from_eigenvalues(&eigs).expect("order is nonzero")
    }

    /// Dense matrix-vector product `R v` without materialising `R`.
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.order();
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                left: n,
                right: v.len(),
            });
        }
        Ok((0..n)
            .map(|r| (0..n).map(|c| self.coeffs[(r + n - c) % n] * v[c]).sum())
            .collect())
    }

    /// Largest coefficient magnitude of `self - other`.
    pub fn max_abs_diff(&self, other: &Circulant) -> Result<f64> {
        self.check_order(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    fn check_order(&self, other: &Circulant) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::DimensionMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        Ok(())
    }

    fn zip_with(&self, other: &Circulant, f: impl Fn(Complex64, Complex64) -> Complex64) -> Circulant {
        assert_eq!(self.order(), other.order(), "circulant order mismatch");
        Circulant {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        }
    }
}

impl Add for &Circulant {
    type Output = Circulant;

    fn add(self, rhs: &Circulant) -> Circulant {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &Circulant {
    type Output = Circulant;

    fn sub(self, rhs: &Circulant) -> Circulant {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &Circulant {
    type Output = Circulant;

    fn neg(self) -> Circulant {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_circulant(rng: &mut impl Rng, n: usize) -> Circulant {
        Circulant::new(
            (0..n)
                .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect(),
        )
        .unwrap()
    }

    fn random_skew(rng: &mut impl Rng, n: usize) -> Circulant {
        let a = random_circulant(rng, n);
        (&a - &a.adjoint()).scale(c(0.5, 0.0))
    }

    #[test]
    fn shift_matrix_small_orders() {
        assert_eq!(shift_matrix(1).unwrap(), DMatrix::from_row_slice(1, 1, &[1]));
        let f3 = shift_matrix(3).unwrap();
        assert_eq!(f3, DMatrix::from_row_slice(3, 3, &[0, 0, 1, 1, 0, 0, 0, 1, 0]));
        assert_eq!(shift_matrix(0), Err(Error::InvalidDimension(0)));
    }

    #[test]
    fn shift_matrix_has_order_n() {
        for n in 1..=12 {
            let f = shift_matrix(n).unwrap();
            let mut p = DMatrix::<i64>::identity(n, n);
            for _ in 0..n {
                p = &p * &f;
            }
            assert_eq!(p, DMatrix::identity(n, n), "n = {n}");
        }
    }

    #[test]
    fn dense_expansion_matches_power_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_circulant(&mut rng, 6);
        let f = shift_matrix(6).unwrap().map(|x| c(x as f64, 0.0));
        let mut power = CMatrix::identity(6, 6);
        let mut sum = CMatrix::zeros(6, 6);
        for l in 0..6 {
            sum += &power * a.coeffs()[l];
            power = &power * &f;
        }
        assert!((sum - a.to_dense()).norm() < 1e-14);
    }

    #[test]
    fn mul_identity_and_shift() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let b = random_circulant(&mut rng, 5);
        let id = Circulant::identity(5).unwrap();
        assert_eq!(id.mul(&b).unwrap(), b);

        let f = Circulant::shift_power(5, 1).unwrap();
        assert_eq!(f.mul(&f).unwrap(), Circulant::shift_power(5, 2).unwrap());
    }

    #[test]
    fn mul_matches_dense_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random_circulant(&mut rng, 5);
        let b = random_circulant(&mut rng, 5);
        let dense = a.to_dense() * b.to_dense();
        assert!((a.mul(&b).unwrap().to_dense() - dense).norm() < 1e-12);
    }

    #[test]
    fn mul_rejects_mismatched_orders() {
        let a = Circulant::identity(3).unwrap();
        let b = Circulant::identity(4).unwrap();
        assert_eq!(a.mul(&b), Err(Error::DimensionMismatch { left: 3, right: 4 }));
    }

    #[test]
    fn eigenvalues_of_identity_and_scalar() {
        for e in Circulant::identity(4).unwrap().eigenvalues() {
            assert!((e - c(1.0, 0.0)).norm() < 1e-15);
        }
        for e in Circulant::scalar(5, c(0.0, 1.0)).unwrap().eigenvalues() {
            assert!((e - c(0.0, 1.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn shift_eigenvalues_follow_mode_order() {
        // Φ F Φ† = diag(ω^{-k}).
        let f = Circulant::shift_power(3, 1).unwrap();
        let eigs = f.eigenvalues();
        for (k, e) in eigs.iter().enumerate() {
            assert!((e - root_of_unity(3, k).conj()).norm() < 1e-14);
        }

        // Dense real eigensolver sees the same spectrum as a set.
        let dense = shift_matrix(3).unwrap().map(|x| x as f64);
        let mut reference: Vec<Complex64> = dense.complex_eigenvalues().iter().copied().collect();
        for e in &eigs {
            let pos = reference
                .iter()
                .position(|r| (r - e).norm() < 1e-10)
                .expect("eigenvalue missing from dense spectrum");
            reference.remove(pos);
        }
        assert!(reference.is_empty());
    }

    #[test]
    fn eigenvalues_diagonalize_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_circulant(&mut rng, 7);
        let phi = FourierMatrix::new(7).unwrap();
        let diag = phi.dense() * a.to_dense() * phi.adjoint_dense();
        let eigs = a.eigenvalues();
        for r in 0..7 {
            for col in 0..7 {
                let expected = if r == col { eigs[r] } else { c(0.0, 0.0) };
                assert!((diag[(r, col)] - expected).norm() < 1e-12);
            }
        }
        let back = Circulant::from_eigenvalues(&eigs).unwrap();
        assert!(back.max_abs_diff(&a).unwrap() < 1e-13);
    }

    #[test]
    fn fourier_matrix_is_unitary() {
        for n in 1..=64 {
            let phi = FourierMatrix::new(n).unwrap();
            let prod = phi.adjoint_dense() * phi.dense();
            assert!((prod - CMatrix::identity(n, n)).norm() <= 1e-12, "n = {n}");
        }
    }

    #[test]
    fn skew_hermitian_predicate() {
        let tol = crate::DEFAULT_TOL;
        assert!(Circulant::scalar(4, c(0.0, 1.0)).unwrap().is_skew_hermitian(tol));
        assert!(!Circulant::identity(4).unwrap().is_skew_hermitian(tol));

        let mut coeffs = vec![c(0.0, 0.0); 5];
        coeffs[1] = c(1.0, 1.0);
        coeffs[4] = c(-1.0, 1.0);
        let a = Circulant::new(coeffs).unwrap();
        assert!(a.is_skew_hermitian(tol));
        let d = a.to_dense();
        assert!((d.adjoint() + &d).norm() < 1e-15);
    }

    #[test]
    fn exp_of_zero_and_scalar_phase() {
        let z = Circulant::zero(5).unwrap().exp();
        assert!(z.max_abs_diff(&Circulant::identity(5).unwrap()).unwrap() < 1e-15);

        let a = Circulant::scalar(5, c(0.0, PI)).unwrap().exp();
        let minus_id = Circulant::scalar(5, c(-1.0, 0.0)).unwrap();
        assert!(a.max_abs_diff(&minus_id).unwrap() < 1e-12);
    }

    #[test]
    fn exp_matches_dense_exponential() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = random_skew(&mut rng, 5);
        assert!(a.is_skew_hermitian(1e-14));
        let reference = a.to_dense().exp();
        let u = a.exp().to_dense();
        assert!((&u - reference).norm() < 1e-10);
        assert!((u.adjoint() * &u - CMatrix::identity(5, 5)).norm() < 1e-10);
    }

    #[test]
    fn apply_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_circulant(&mut rng, 6);
        let v: Vec<Complex64> = (0..6).map(|k| c(k as f64, -0.5 * k as f64)).collect();
        let dense = a.to_dense() * nalgebra::DVector::from_vec(v.clone());
        let fast = a.apply(&v).unwrap();
        for (x, y) in fast.iter().zip(dense.iter()) {
            assert!((x - y).norm() < 1e-13);
        }
    }

    fn circulant_strategy(n: usize) -> impl Strategy<Value = Circulant> {
        proptest::collection::vec((-2.0..2.0f64, -2.0..2.0f64), n)
            .prop_map(|v| Circulant::new(v.into_iter().map(|(r, i)| c(r, i)).collect()).unwrap())
    }

    proptest! {
        #[test]
        fn product_is_dense_product_and_commutes(
            (a, b) in (1usize..=32).prop_flat_map(|n| (circulant_strategy(n), circulant_strategy(n)))
        ) {
            let ab = a.mul(&b).unwrap();
            let ba = b.mul(&a).unwrap();
            prop_assert!((ab.to_dense() - a.to_dense() * b.to_dense()).norm() <= 1e-12 * (1.0 + ab.to_dense().norm()));
            prop_assert!(ab.max_abs_diff(&ba).unwrap() <= 1e-12);
        }

        #[test]
        fn exp_of_skew_hermitian_is_unitary(a in (1usize..=16).prop_flat_map(circulant_strategy)) {
            let skew = (&a - &a.adjoint()).scale(c(0.5, 0.0));
            let u = skew.exp().to_dense();
            let n = skew.order();
            prop_assert!((u.adjoint() * &u - CMatrix::identity(n, n)).norm() <= 1e-10);
        }
    }
}
