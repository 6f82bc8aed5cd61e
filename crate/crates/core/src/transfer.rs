//! Explicit transfer of `|e_1> = |+1> ⊗ |0>` to a separable state
//! `|+1> ⊗ |w>` whose walker part is spread uniformly, `|w_h|² = 1/n`.
//!
//! The generator is diagonal-block, `L = diag(R, -R)`, with
//! `R = Φ† diag(i x_0, ..., i x_{n-1}) Φ` and quadratic phases
//! `x_l = l(l - 1)π/n`. Then `e^R e_1 = Φ† (e^{i x_l})/√n`, and the
//! magnitudes are uniform because every cyclic phase-difference sum
//! `M(p)` with `p ≠ 0 (mod n)` vanishes.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::circulant::{root_of_unity, Circulant, FourierMatrix};
use crate::error::{require_odd, Error, Result};
use crate::liealg::LieElement;
use crate::walk::{self, CoinOp, Distribution, Schedule, WalkState};

/// Uniformity tolerance for the analytic construction.
pub const ANALYTIC_TOL: f64 = 1e-10;

/// Uniformity tolerance after evolving the target for several steps.
pub const EVOLVED_TOL: f64 = 1e-9;

/// Quadratic phases `x_l = l(l-1)π/n`, `l = 0..n-1`.
pub fn uniform_phases(n: usize) -> Result<Vec<f64>> {
    require_odd(n)?;
    Ok((0..n).map(|l| (l * l.saturating_sub(1)) as f64 * PI / n as f64).collect())
}

/// `M(p)` for an arbitrary phase sequence: the sum over cyclic index pairs
/// at distance `p` of `e^{i(x_{l+p} - x_l)}`, split into the non-wrapping
/// and wrapping parts.
pub fn phase_difference_sum(phases: &[f64], p: usize) -> Result<Complex64> {
    let n = phases.len();
    if p >= n {
        return Err(Error::OutOfRange {
            what: "p",
            value: p,
            bound: n,
        });
    }
    let e = |x: f64| Complex64::from_polar(1.0, x);
    let direct: Complex64 = (0..n - p).map(|l| e(phases[l + p] - phases[l])).sum();
    let wrapped: Complex64 = (n - p..n).map(|l| e(phases[l - (n - p)] - phases[l])).sum();
    Ok(direct + wrapped)
}

/// `M(p)` for the quadratic phases; `n` at `p = 0`, zero otherwise.
pub fn m_of_p(n: usize, p: usize) -> Result<Complex64> {
    phase_difference_sum(&uniform_phases(n)?, p)
}

/// `max_{1 ≤ p < n} |M(p)|`.
pub fn m_of_p_max(n: usize) -> Result<f64> {
    let phases = uniform_phases(n)?;
    (1..n).try_fold(0.0f64, |acc, p| Ok(acc.max(phase_difference_sum(&phases, p)?.norm())))
}

/// `(1/√n) Φ† (e^{i x_0}, ..., e^{i x_{n-1}})ᵀ` for arbitrary phases.
pub fn fourier_amplitudes(phases: &[f64]) -> Result<Vec<Complex64>> {
    let n = phases.len();
    let v: Vec<Complex64> = phases.iter().map(|x| Complex64::from_polar(1.0, *x)).collect();
    let scale = 1.0 / (n as f64).sqrt();
    Ok(FourierMatrix::new(n)?
        .apply_adjoint(&v)?
        .into_iter()
        .map(|a| a * scale)
        .collect())
}

/// Walker amplitudes `r_1..r_n` of the uniform target.
pub fn uniform_amplitudes(n: usize) -> Result<Vec<Complex64>> {
    fourier_amplitudes(&uniform_phases(n)?)
}

/// Off-diagonal part of `|r_h|²` for the given phases:
/// `|r_h|² = 1/n + (1/n²) Σ_{p=1}^{n-1} Re(ω^{p(h-1)} M(p))`.
///
/// Index `h - 1` of the result corresponds to `r_h`.
pub fn cross_terms(phases: &[f64]) -> Result<Vec<f64>> {
    let n = phases.len();
    let m: Vec<Complex64> = (1..n)
        .map(|p| phase_difference_sum(phases, p))
        .collect::<Result<_>>()?;
    let scale = 1.0 / (n * n) as f64;
    Ok((0..n)
        .map(|h| {
            m.iter()
                .enumerate()
                .map(|(k, mp)| (root_of_unity(n, (k + 1) * h) * mp).re)
                .sum::<f64>()
                * scale
        })
        .collect())
}

/// `L = diag(R, -R)` with `R = Φ† diag(i x_l) Φ`.
pub fn build_transfer_generator(n: usize) -> Result<LieElement> {
    let eigs: Vec<Complex64> = uniform_phases(n)?
        .into_iter()
        .map(|x| Complex64::new(0.0, x))
        .collect();
    LieElement::diagonal(Circulant::from_eigenvalues(&eigs)?)
}

/// The transferred state `e^L |e_1>`.
#[derive(Debug, Clone)]
pub struct UniformTarget {
    pub n: usize,
    /// Walker amplitudes in the `|+1>` sector.
    pub r: Vec<Complex64>,
    /// `(r; 0, ..., 0)`.
    pub full_state: WalkState,
    pub max_uniform_deviation: f64,
}

impl UniformTarget {
    pub fn distribution(&self) -> Distribution {
        self.full_state.distribution()
    }
}

/// Computes `e^L |e_1>` through the circulant exponential: since
/// `e^L = diag(e^R, e^{-R})` and `e^R e_1` is the first column of `e^R`, the
/// upper block is the coefficient list of `exp(R)` and the lower block is 0.
///
/// Fails with [`Error::Verification`] if the result drifts from
/// [`uniform_amplitudes`] or from the uniform distribution by more than
/// [`ANALYTIC_TOL`].
pub fn apply_transfer(n: usize) -> Result<UniformTarget> {
    let generator = build_transfer_generator(n)?;
    let r = generator.r().exp().coeffs().to_vec();

    let expected = uniform_amplitudes(n)?;
    let amp_err = r
        .iter()
        .zip(&expected)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    if amp_err > ANALYTIC_TOL {
        return Err(Error::Verification(format!(
            "transferred amplitudes differ from Fourier construction by {amp_err:e}"
        )));
    }

    let mut amplitudes = r.clone();
    amplitudes.extend(std::iter::repeat_n(Complex64::new(0.0, 0.0), n));
    let full_state = WalkState::new(amplitudes)?;
    let max_uniform_deviation = full_state.distribution().max_deviation_from_uniform();
    if max_uniform_deviation > ANALYTIC_TOL {
        return Err(Error::Verification(format!(
            "transferred distribution deviates from uniform by {max_uniform_deviation:e}"
        )));
    }
    Ok(UniformTarget {
        n,
        r,
        full_state,
        max_uniform_deviation,
    })
}

/// `e^L |e_1>` through the generic dense exponential of the `2n × 2n`
/// generator. Cross-check for [`apply_transfer`].
pub fn apply_transfer_dense(n: usize) -> Result<Vec<Complex64>> {
    let u = build_transfer_generator(n)?.exp_dense();
    Ok(u.column(0).iter().copied().collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct FreezeReport {
    pub n: usize,
    pub extra_steps: usize,
    /// Deviation from uniform at `t = 0..=extra_steps`.
    pub deviations: Vec<f64>,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub ok: bool,
}

/// Starts from the uniform target and applies `extra_steps` identity-coin
/// steps. The `|+1>` sector just rotates, so the distribution should stay
/// uniform at every step.
pub fn freeze_and_verify(n: usize, extra_steps: usize) -> Result<FreezeReport> {
    let target = apply_transfer(n)?;
    let schedule = Schedule::stationary(CoinOp::identity(), extra_steps);
    let mut deviations = Vec::with_capacity(extra_steps + 1);
    walk::evolve(&target.full_state, &schedule, |_, s| {
        deviations.push(s.distribution().max_deviation_from_uniform());
    });
    let max_deviation = deviations.iter().copied().fold(0.0, f64::max);
    Ok(FreezeReport {
        n,
        extra_steps,
        deviations,
        max_deviation,
        tolerance: EVOLVED_TOL,
        ok: max_deviation <= EVOLVED_TOL,
    })
}

/// JSON report of the `transfer` subcommand.
#[derive(Debug, Clone, Serialize)]
pub struct TransferReport {
    pub n: usize,
    pub max_uniform_deviation: f64,
    pub m_of_p_max: f64,
    pub phases: Vec<f64>,
    pub amplitudes: Vec<[f64; 2]>,
    pub freeze_steps: usize,
    pub freeze_max_deviation: f64,
}

pub fn transfer_report(n: usize, freeze_steps: usize) -> Result<TransferReport> {
    let target = apply_transfer(n)?;
    let freeze = freeze_and_verify(n, freeze_steps)?;
    Ok(TransferReport {
        n,
        max_uniform_deviation: target.max_uniform_deviation,
        m_of_p_max: m_of_p_max(n)?,
        phases: uniform_phases(n)?,
        amplitudes: target.r.iter().map(|a| [a.re, a.im]).collect(),
        freeze_steps,
        freeze_max_deviation: freeze.max_deviation,
    })
}
