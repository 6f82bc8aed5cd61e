//! The Lie algebra generated by conjugated coin generators.
//!
//! Every element has the block form
//!
//! ```text
//! [[ R ,  Q ],
//!  [-Q†, -R ]]
//! ```
//!
//! with `R` a skew-Hermitian circulant and `Q` an arbitrary circulant, which
//! gives real dimension `3n`. The walk's one-step operators `S (C ⊗ 1)` all
//! lie in the connected group of this algebra when `n` is odd; the helpers
//! here check that numerically: the bracket closure of the conjugated
//! generators `S^j (su(2) ⊗ 1) S^{jT}` is computed directly and compared
//! with `3n`, and the shift `S` itself is rebuilt from two coin rotations.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::circulant::Circulant;
use crate::dense::{self, CMatrix};
use crate::error::{require_odd, Error, Result};
use crate::DEFAULT_TOL;

/// Rank threshold used by the closure computation unless overridden.
pub const CLOSURE_TOL: f64 = 1e-9;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// The fixed su(2) basis `{[[i,0],[0,-i]], [[0,1],[-1,0]], [[0,i],[i,0]]}`.
pub fn su2_basis() -> [CMatrix; 3] {
    let z = c(0.0, 0.0);
    [
        dense::mat2([c(0.0, 1.0), z, z, c(0.0, -1.0)]),
        dense::mat2([z, c(1.0, 0.0), c(-1.0, 0.0), z]),
        dense::mat2([z, c(0.0, 1.0), c(0.0, 1.0), z]),
    ]
}

/// `ab - ba`.
pub fn bracket(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if a.shape() != b.shape() || !a.is_square() {
        return Err(Error::DimensionMismatch {
            left: a.nrows(),
            right: b.nrows(),
        });
    }
    Ok(a * b - b * a)
}

/// An element `[[R, Q], [-Q†, -R]]` of the walk algebra.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LieElement {
    r: Circulant,
    q: Circulant,
}

impl LieElement {
    /// `r` must be skew-Hermitian (within [`DEFAULT_TOL`]) and of the same
    /// order as `q`.
    pub fn new(r: Circulant, q: Circulant) -> Result<Self> {
        if r.order() != q.order() {
            return Err(Error::DimensionMismatch {
                left: r.order(),
                right: q.order(),
            });
        }
        if !r.is_skew_hermitian(DEFAULT_TOL) {
            return Err(Error::InvalidArgument(
                "diagonal block of a Lie element must be skew-Hermitian".into(),
            ));
        }
        Ok(Self { r, q })
    }

    /// Diagonal-block element `diag(R, -R)`.
    pub fn diagonal(r: Circulant) -> Result<Self> {
        let q = Circulant::zero(r.order())?;
        Self::new(r, q)
    }

    /// Off-diagonal element `[[0, Q], [-Q†, 0]]`.
    pub fn off_diagonal(q: Circulant) -> Result<Self> {
        let r = Circulant::zero(q.order())?;
        Self::new(r, q)
    }

    pub fn order(&self) -> usize {
        self.r.order()
    }

    pub fn r(&self) -> &Circulant {
        &self.r
    }

    pub fn q(&self) -> &Circulant {
        &self.q
    }

    pub fn to_dense(&self) -> CMatrix {
        let r = self.r.to_dense();
        let q = self.q.to_dense();
        dense::blocks(&r, &q, &(-q.adjoint()), &(-&r))
    }

    /// Bracket computed on the circulant blocks. Because circulants commute,
    /// `[L, L']` has diagonal block `Q'Q† - QQ'†` and off-diagonal block
    /// `2(RQ' - R'Q)`, so the result is again of the same form.
    pub fn bracket(&self, other: &LieElement) -> Result<LieElement> {
        if self.order() != other.order() {
            return Err(Error::DimensionMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        let r = &other.q.mul(&self.q.adjoint())? - &self.q.mul(&other.q.adjoint())?;
        let q = (&self.r.mul(&other.q)? - &other.r.mul(&self.q)?).scale(c(2.0, 0.0));
        Ok(LieElement { r, q })
    }

    /// `e^L` as a dense unitary. The off-diagonal block couples the sectors,
    /// so this goes through the generic dense exponential.
    pub fn exp_dense(&self) -> CMatrix {
        self.to_dense().exp()
    }
}

/// One conjugated generator `S^j (A ⊗ 1) S^{jT}`.
#[derive(Debug, Clone)]
pub struct Generator {
    /// Conjugation power.
    pub j: usize,
    /// Index into [`su2_basis`].
    pub basis_index: usize,
    pub matrix: CMatrix,
}

/// The `3n` conjugated coin generators.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    n: usize,
    elements: Vec<Generator>,
}

impl GeneratorSet {
    pub fn order(&self) -> usize {
        self.n
    }

    pub fn elements(&self) -> &[Generator] {
        &self.elements
    }

    pub fn matrices(&self) -> Vec<CMatrix> {
        self.elements.iter().map(|g| g.matrix.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Builds `S^j (A ⊗ 1_n) S^{jT}` for each su(2) basis element `A` and
/// `j = 0..n-1`. Ordered by `j`, then by basis element.
pub fn generator_set(n: usize) -> Result<GeneratorSet> {
    require_odd(n)?;
    let s = dense::conditional_shift(n)?;
    let id = dense::identity(n);
    let basis = su2_basis();
    let mut elements = Vec::with_capacity(3 * n);
    for j in 0..n {
        let sj = dense::to_complex(&dense::int_power(&s, j));
        let sj_t = sj.transpose();
        for (basis_index, a) in basis.iter().enumerate() {
            let matrix = &sj * dense::kron(a, &id) * &sj_t;
            elements.push(Generator {
                j,
                basis_index,
                matrix,
            });
        }
    }
    Ok(GeneratorSet { n, elements })
}

/// Orthonormal real basis of vectorized matrices, grown one direction at a
/// time.
struct SpanBuilder {
    dim: usize,
    vectors: Vec<Vec<f64>>,
    tol: f64,
}

impl SpanBuilder {
    fn new(dim: usize, tol: f64) -> Self {
        Self {
            dim,
            vectors: Vec::new(),
            tol,
        }
    }

    /// Adds the direction of `m` if its normalized residual after projection
    /// exceeds the tolerance. Returns whether a direction was added.
    fn try_add(&mut self, m: &CMatrix) -> bool {
        let mut v = dense::realify(m);
        let norm = l2(&v);
        if norm <= self.tol {
            return false;
        }
        v.iter_mut().for_each(|x| *x /= norm);
        // Two Gram-Schmidt passes keep the basis orthonormal to rounding.
        for _ in 0..2 {
            for b in &self.vectors {
                let d = dot(&v, b);
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
            }
        }
        let residual = l2(&v);
        if residual <= self.tol {
            return false;
        }
        v.iter_mut().for_each(|x| *x /= residual);
        self.vectors.push(v);
        true
    }

    fn residual(&self, m: &CMatrix) -> f64 {
        let mut v = dense::realify(m);
        for b in &self.vectors {
            let d = dot(&v, b);
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
        }
        l2(&v)
    }

    fn matrix(&self, k: usize) -> CMatrix {
        dense::unrealify(&self.vectors[k], self.dim)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn l2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Orthonormal (real Frobenius inner product) basis of the smallest
/// bracket-closed real subspace containing `gens`.
///
/// Each newly added direction is bracketed against every earlier one; the
/// loop ends when a full sweep adds nothing.
pub fn closure_basis(gens: &[CMatrix], tol: f64) -> Result<Vec<CMatrix>> {
    let first = gens.first().ok_or(Error::EmptyGenerators)?;
    if !first.is_square() {
        return Err(Error::InvalidArgument("generators must be square".into()));
    }
    let dim = first.nrows();
    if let Some(bad) = gens.iter().find(|g| g.shape() != first.shape()) {
        return Err(Error::DimensionMismatch {
            left: dim,
            right: bad.nrows(),
        });
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }

    let mut span = SpanBuilder::new(dim, tol);
    for g in gens {
        span.try_add(g);
    }
    let mut elements: Vec<CMatrix> = (0..span.vectors.len()).map(|k| span.matrix(k)).collect();
    let mut i = 0;
    while i < elements.len() {
        for j in 0..i {
            let b = bracket(&elements[i], &elements[j])?;
            if span.try_add(&b) {
                elements.push(span.matrix(span.vectors.len() - 1));
            }
        }
        i += 1;
    }
    log::debug!("closure of {} generators has dimension {}", gens.len(), elements.len());
    Ok(elements)
}

/// Real dimension of the Lie closure of `gens`.
pub fn closure_dimension(gens: &[CMatrix], tol: f64) -> Result<usize> {
    closure_basis(gens, tol).map(|b| b.len())
}

/// Largest residual of `[b_i, b_j]` against the span of `basis`.
pub fn closure_defect(basis: &[CMatrix]) -> Result<f64> {
    let Some(first) = basis.first() else {
        return Err(Error::EmptyGenerators);
    };
    let mut span = SpanBuilder::new(first.nrows(), f64::MIN_POSITIVE);
    for b in basis {
        span.try_add(b);
    }
    let mut worst: f64 = 0.0;
    for (i, a) in basis.iter().enumerate() {
        for b in &basis[..i] {
            worst = worst.max(span.residual(&bracket(a, b)?));
        }
    }
    Ok(worst)
}

/// Checks that `(σ ⊗ 1) · S^m (σ' ⊗ 1) S^{mT}` equals the shift
/// `S = diag(F, Fᵀ)` exactly, where `m = (n-1)/2`, `σ = [[0,-1],[1,0]]`
/// and `σ' = [[0,1],[-1,0]]`.
///
/// Both factors are exponentials of algebra elements, so equality puts `S`
/// in the group. Integer arithmetic throughout.
pub fn verify_s_product(n: usize) -> Result<bool> {
    require_odd(n)?;
    let id = DMatrix::<i64>::identity(n, n);
    let sigma = DMatrix::from_row_slice(2, 2, &[0i64, -1, 1, 0]);
    let sigma_prime = DMatrix::from_row_slice(2, 2, &[0i64, 1, -1, 0]);
    let s = dense::conditional_shift(n)?;
    let sm = dense::int_power(&s, (n - 1) / 2);
    let conjugated = &sm * dense::kron(&sigma_prime, &id) * sm.transpose();
    let product = dense::kron(&sigma, &id) * conjugated;
    Ok(product == s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BracketFamily {
    /// `diag(F^j - F^{jT}, -(F^j - F^{jT}))`: bracket of
    /// `[[0,1],[-1,0]]` and `[[0,F^j],[-F^{jT},0]]`.
    Antisymmetric,
    /// `diag(i(F^j + F^{jT}), -i(F^j + F^{jT}))`: bracket of
    /// `[[0,F^j],[-F^{jT},0]]` and `[[0,i],[i,0]]`.
    Symmetric,
}

#[derive(Debug, Clone, Serialize)]
pub struct BracketCheck {
    pub family: BracketFamily,
    pub j: usize,
    /// Least-squares real factor with `bracket ≈ scale · target`.
    pub scale: f64,
    /// `‖bracket - scale · target‖_F`.
    pub residual: f64,
    pub skew_hermitian_defect: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BasisBracketReport {
    pub n: usize,
    pub checks: Vec<BracketCheck>,
    /// Rank of the produced diagonal-block directions; `n` when they form a
    /// basis of the abelian sector.
    pub diagonal_rank: usize,
    pub ok: bool,
}

/// Rebuilds a basis of the diagonal-block sector from brackets of
/// off-diagonal elements and records the scalar relating each bracket to
/// its target direction.
pub fn verify_basis_brackets(n: usize, tol: f64) -> Result<BasisBracketReport> {
    require_odd(n)?;
    let half = (n - 1) / 2;
    let one = Circulant::identity(n)?;
    let off = |q: Circulant| LieElement::off_diagonal(q).map(|e| e.to_dense());
    let rotation = off(one.clone())?;
    let imaginary = off(one.scale(c(0.0, 1.0)))?;

    let mut checks = Vec::with_capacity(n);
    let mut produced = Vec::with_capacity(n);
    let mut record = |family, j, b: CMatrix, target: CMatrix| {
        let (scale, residual) = fit_scale(&b, &target);
        checks.push(BracketCheck {
            family,
            j,
            scale,
            residual,
            skew_hermitian_defect: dense::skew_hermitian_defect(&b),
        });
        produced.push(b);
    };

    for j in 1..=half {
        let fj = Circulant::shift_power(n, j)?;
        let anti = &fj - &fj.adjoint();
        let target = LieElement::diagonal(anti)?.to_dense();
        let b = bracket(&rotation, &off(fj)?)?;
        record(BracketFamily::Antisymmetric, j, b, target);
    }
    for j in 0..=half {
        let fj = Circulant::shift_power(n, j)?;
        let sym = (&fj + &fj.adjoint()).scale(c(0.0, 1.0));
        let target = LieElement::diagonal(sym)?.to_dense();
        let b = bracket(&off(fj)?, &imaginary)?;
        record(BracketFamily::Symmetric, j, b, target);
    }

    let diagonal_rank = closure_dimension_linear(&produced, tol);
    let ok = diagonal_rank == n
        && checks
            .iter()
            .all(|ch| ch.residual <= tol && ch.scale.abs() > tol && ch.skew_hermitian_defect <= tol);
    Ok(BasisBracketReport {
        n,
        checks,
        diagonal_rank,
        ok,
    })
}

/// Rank of the real linear span (no brackets).
fn closure_dimension_linear(ms: &[CMatrix], tol: f64) -> usize {
    let Some(first) = ms.first() else { return 0 };
    let mut span = SpanBuilder::new(first.nrows(), tol);
    ms.iter().filter(|m| span.try_add(m)).count()
}

/// Real least-squares `s` minimizing `‖b - s·t‖_F`, with the residual.
fn fit_scale(b: &CMatrix, t: &CMatrix) -> (f64, f64) {
    let tb = dense::realify(t);
    let bb = dense::realify(b);
    let denom = dot(&tb, &tb);
    let s = if denom > 0.0 { dot(&tb, &bb) / denom } else { 0.0 };
    let residual = (b - t * c(s, 0.0)).norm();
    (s, residual)
}

#[derive(Debug, Clone, Serialize)]
pub struct TransitivityReport {
    pub n: usize,
    pub dim_walk_algebra: usize,
    pub dim_su: usize,
    pub dim_sp: usize,
    pub walk_below_sp: bool,
    pub sp_below_su: bool,
    pub walk_below_su: bool,
}

/// Dimension comparison of the walk algebra with `su(2n)` and `sp(n)`.
pub fn transitivity_report(n: usize) -> Result<TransitivityReport> {
    require_odd(n)?;
    let dim_walk_algebra = 3 * n;
    let dim_su = 4 * n * n - 1;
    let dim_sp = n * (2 * n + 1);
    Ok(TransitivityReport {
        n,
        dim_walk_algebra,
        dim_su,
        dim_sp,
        walk_below_sp: dim_walk_algebra < dim_sp,
        sp_below_su: dim_sp < dim_su,
        walk_below_su: dim_walk_algebra < dim_su,
    })
}

/// Everything the `algebra` subcommand reports for one `n`.
#[derive(Debug, Clone, Serialize)]
pub struct AlgebraReport {
    pub n: usize,
    pub closure_dimension: usize,
    pub expected_dimension: usize,
    pub s_product: bool,
    pub basis_brackets: BasisBracketReport,
    pub transitivity: TransitivityReport,
}

impl AlgebraReport {
    pub fn passed(&self) -> bool {
        self.closure_dimension == self.expected_dimension && self.s_product
    }
}

pub fn algebra_report(n: usize, tol: f64) -> Result<AlgebraReport> {
    let gens = generator_set(n)?;
    Ok(AlgebraReport {
        n,
        closure_dimension: closure_dimension(&gens.matrices(), tol)?,
        expected_dimension: 3 * n,
        s_product: verify_s_product(n)?,
        basis_brackets: verify_basis_brackets(n, tol)?,
        transitivity: transitivity_report(n)?,
    })
}
