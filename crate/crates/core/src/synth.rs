//! Numerical search for coin schedules.
//!
//! Given an initial and a target walk state and a horizon `T`, find `T`
//! coins whose step product maps one onto the other. The objective is the
//! state fidelity `|<target| U_T ... U_1 |initial>|²` over the `3T` coin
//! angles, maximized by gradient ascent with backtracking; gradients are
//! central finite differences. Independent random restarts run in parallel
//! and the best one is kept.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transfer;
use crate::walk::{self, CoinOp, Distribution, Schedule, ScheduleDocument, WalkState};

#[derive(Debug, Clone)]
pub struct SynthesisProblem {
    pub n: usize,
    pub steps: usize,
    pub initial: WalkState,
    pub target: WalkState,
    pub seed: u64,
}

impl SynthesisProblem {
    pub fn new(steps: usize, initial: WalkState, target: WalkState, seed: u64) -> Result<Self> {
        if initial.n() != target.n() {
            return Err(Error::DimensionMismatch {
                left: initial.n(),
                right: target.n(),
            });
        }
        Ok(Self {
            n: initial.n(),
            steps,
            initial,
            target,
            seed,
        })
    }

    /// `|e_1>` to the uniform-distribution target built by
    /// [`transfer::apply_transfer`].
    pub fn uniform_target(n: usize, steps: usize, seed: u64) -> Result<Self> {
        let target = transfer::apply_transfer(n)?.full_state;
        Self::new(steps, WalkState::origin(n)?, target, seed)
    }

    /// Horizon used when none is given: `4n`.
    pub fn default_steps(n: usize) -> usize {
        4 * n
    }

    pub fn to_document(&self) -> ProblemDocument {
        ProblemDocument {
            n: self.n,
            steps: self.steps,
            initial: to_pairs(self.initial.amplitudes()),
            target: to_pairs(self.target.amplitudes()),
            seed: self.seed,
        }
    }
}

/// On-disk problem: amplitudes as `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDocument {
    pub n: usize,
    pub steps: usize,
    pub initial: Vec<[f64; 2]>,
    pub target: Vec<[f64; 2]>,
    pub seed: u64,
}

impl ProblemDocument {
    pub fn into_problem(self) -> Result<SynthesisProblem> {
        let check = |what: &str, v: &[[f64; 2]]| {
            if v.len() != 2 * self.n {
                Err(Error::InvalidArgument(format!(
                    "{what} has {} amplitudes, expected 2n = {}",
                    v.len(),
                    2 * self.n
                )))
            } else {
                Ok(())
            }
        };
        check("initial", &self.initial)?;
        check("target", &self.target)?;
        SynthesisProblem::new(
            self.steps,
            WalkState::new(from_pairs(&self.initial))?,
            WalkState::new(from_pairs(&self.target))?,
            self.seed,
        )
    }
}

pub(crate) fn to_pairs(v: &[Complex64]) -> Vec<[f64; 2]> {
    v.iter().map(|a| [a.re, a.im]).collect()
}

fn from_pairs(v: &[[f64; 2]]) -> Vec<Complex64> {
    v.iter().map(|[re, im]| Complex64::new(*re, *im)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    /// `converged` iff fidelity ≥ 1 - tol.
    pub tol: f64,
    /// Central-difference step.
    pub fd_step: f64,
    pub max_iters: usize,
    pub restarts: usize,
    pub initial_step: f64,
    /// Line search gives up below this step length.
    pub min_step: f64,
    /// Iteration stops once `1 - fidelity` drops below this.
    pub stop_gap: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            tol: 1e-3,
            fd_step: 1e-6,
            max_iters: 2000,
            restarts: 8,
            initial_step: 0.5,
            min_step: 1e-12,
            stop_gap: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SynthesisResult {
    pub schedule: Schedule,
    pub fidelity: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Seed of the restart that produced the schedule.
    pub restart_seed: u64,
    /// Fidelity after each accepted iterate, starting with the random guess.
    #[serde(skip)]
    pub history: Vec<f64>,
}

/// `|<target| U_T ... U_1 |initial>|²`, evaluated through [`walk::evolve`].
pub fn fidelity(schedule: &Schedule, initial: &WalkState, target: &WalkState) -> Result<f64> {
    if initial.n() != target.n() {
        return Err(Error::DimensionMismatch {
            left: initial.n(),
            right: target.n(),
        });
    }
    let out = walk::final_state(initial, schedule);
    Ok(target.inner(&out)?.norm_sqr().min(1.0))
}

/// Objective evaluator used inside the optimizer. Works on raw angle
/// vectors `(θ_1, φ_1, λ_1, θ_2, ...)` and does not go through `walk`.
struct Objective<'a> {
    n: usize,
    initial: &'a [Complex64],
    target: &'a [Complex64],
}

impl Objective<'_> {
    fn value(&self, params: &[f64]) -> f64 {
        let n = self.n;
        let mut cur = self.initial.to_vec();
        let mut next = vec![Complex64::new(0.0, 0.0); 2 * n];
        for angles in params.chunks_exact(3) {
            let (s, c) = angles[0].sin_cos();
            let ephi = Complex64::from_polar(1.0, angles[1]);
            let elam = Complex64::from_polar(1.0, angles[2]);
            let (m00, m01) = (ephi * c, elam * s);
            let (m10, m11) = (-elam.conj() * s, ephi.conj() * c);
            for j in 0..n {
                let (a, b) = (cur[j], cur[n + j]);
                next[if j + 1 == n { 0 } else { j + 1 }] = m00 * a + m01 * b;
                next[n + if j == 0 { n - 1 } else { j - 1 }] = m10 * a + m11 * b;
            }
            std::mem::swap(&mut cur, &mut next);
        }
        let overlap: Complex64 = self.target.iter().zip(&cur).map(|(t, x)| t.conj() * x).sum();
        overlap.norm_sqr()
    }

    fn gradient(&self, params: &[f64], h: f64) -> Vec<f64> {
        let mut work = params.to_vec();
        (0..params.len())
            .map(|k| {
                let x = work[k];
                work[k] = x + h;
                let up = self.value(&work);
                work[k] = x - h;
                let down = self.value(&work);
                work[k] = x;
                (up - down) / (2.0 * h)
            })
            .collect()
    }

    fn gradient_five_point(&self, params: &[f64], h: f64) -> Vec<f64> {
        let mut work = params.to_vec();
        (0..params.len())
            .map(|k| {
                let x = work[k];
                let mut at = |d: f64| {
                    work[k] = x + d;
                    self.value(&work)
                };
                let g = (-at(2.0 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2.0 * h)) / (12.0 * h);
                work[k] = x;
                g
            })
            .collect()
    }
}

fn objective(problem: &SynthesisProblem) -> Objective<'_> {
    Objective {
        n: problem.n,
        initial: problem.initial.amplitudes(),
        target: problem.target.amplitudes(),
    }
}

/// Central-difference gradient of the fidelity with respect to the angle
/// vector `(θ_1, φ_1, λ_1, ..., θ_T, φ_T, λ_T)`.
pub fn fd_gradient(problem: &SynthesisProblem, params: &[f64], h: f64) -> Vec<f64> {
    objective(problem).gradient(params, h)
}

/// Five-point stencil version of [`fd_gradient`].
pub fn fd_gradient_five_point(problem: &SynthesisProblem, params: &[f64], h: f64) -> Vec<f64> {
    objective(problem).gradient_five_point(params, h)
}

/// Fidelity of an angle vector, through the optimizer's evaluator.
pub fn objective_value(problem: &SynthesisProblem, params: &[f64]) -> f64 {
    objective(problem).value(params)
}

pub fn schedule_from_params(params: &[f64]) -> Schedule {
    Schedule::new(
        params
            .chunks_exact(3)
            .map(|a| CoinOp::new(a[0], a[1], a[2]))
            .collect(),
    )
}

pub fn params_from_schedule(schedule: &Schedule) -> Vec<f64> {
    schedule.coins.iter().flat_map(|c| [c.theta, c.phi, c.lam]).collect()
}

struct Ascent {
    params: Vec<f64>,
    fidelity: f64,
    iterations: usize,
    history: Vec<f64>,
}

fn ascend(obj: &Objective<'_>, mut params: Vec<f64>, config: &SynthConfig) -> Ascent {
    let mut f = obj.value(&params);
    let mut history = vec![f];
    let mut step = config.initial_step;
    let mut iterations = 0;
    while iterations < config.max_iters && 1.0 - f > config.stop_gap {
        iterations += 1;
        let g = obj.gradient(&params, config.fd_step);
        if g.iter().all(|x| x.abs() < f64::EPSILON) {
            break;
        }
        let mut accepted = false;
        while step >= config.min_step {
            let candidate: Vec<f64> = params.iter().zip(&g).map(|(p, d)| p + step * d).collect();
            let fc = obj.value(&candidate);
            if fc > f {
                params = candidate;
                f = fc;
                history.push(f);
                step *= 2.0;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Ascent {
        params,
        fidelity: f,
        iterations,
        history,
    }
}

/// Maximizes the fidelity over `3T` angles from `config.restarts` random
/// starting points (seeds `problem.seed + k`); the best restart wins, ties
/// going to the lowest seed. Deterministic for a fixed problem and config.
pub fn synthesize(problem: &SynthesisProblem, config: &SynthConfig) -> Result<SynthesisResult> {
    if problem.steps < 1 {
        return Err(Error::InvalidArgument("synthesis needs at least one step".into()));
    }
    if problem.initial.n() != problem.target.n() {
        return Err(Error::DimensionMismatch {
            left: problem.initial.n(),
            right: problem.target.n(),
        });
    }
    if config.restarts == 0 {
        return Err(Error::InvalidArgument("need at least one restart".into()));
    }
    let obj = objective(problem);
    let outcomes: Vec<(u64, Ascent)> = (0..config.restarts as u64)
        .into_par_iter()
        .map(|k| {
            let seed = problem.seed.wrapping_add(k);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let start: Vec<f64> = (0..3 * problem.steps).map(|_| rng.random_range(0.0..TAU)).collect();
            (seed, ascend(&obj, start, config))
        })
        .collect();

    // Restart order is preserved by `collect`, so the first maximum is the
    // lowest seed.
    let (restart_seed, best) = outcomes
        .into_iter()
        .reduce(|best, next| if next.1.fidelity > best.1.fidelity { next } else { best })
        .expect("at least one restart");
    log::info!(
        "synthesis: n={} T={} best fidelity {:.12} (seed {restart_seed}, {} iterations)",
        problem.n,
        problem.steps,
        best.fidelity,
        best.iterations
    );
    Ok(SynthesisResult {
        schedule: schedule_from_params(&best.params),
        fidelity: best.fidelity,
        iterations: best.iterations,
        converged: best.fidelity >= 1.0 - config.tol,
        restart_seed,
        history: best.history,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub fidelity: f64,
    pub stored_fidelity: f64,
    pub fidelity_mismatch: f64,
    pub final_distribution: Distribution,
    pub target_distribution: Distribution,
    pub max_distribution_deviation: f64,
}

/// Re-runs the schedule through the walk simulator and compares with the
/// stored fidelity and the target's position distribution.
pub fn verify_schedule(result: &SynthesisResult, problem: &SynthesisProblem) -> Result<VerificationReport> {
    let out = walk::final_state(&problem.initial, &result.schedule);
    if out.n() != problem.target.n() {
        return Err(Error::DimensionMismatch {
            left: out.n(),
            right: problem.target.n(),
        });
    }
    let fid = problem.target.inner(&out)?.norm_sqr().min(1.0);
    let final_distribution = out.distribution();
    let target_distribution = problem.target.distribution();
    Ok(VerificationReport {
        fidelity: fid,
        stored_fidelity: result.fidelity,
        fidelity_mismatch: (fid - result.fidelity).abs(),
        max_distribution_deviation: final_distribution.max_abs_diff(&target_distribution),
        final_distribution,
        target_distribution,
    })
}

/// Result file written by the `synth` subcommand.
#[derive(Debug, Clone, Serialize)]
pub struct ResultDocument {
    pub n: usize,
    pub steps: usize,
    pub seed: u64,
    pub restart_seed: u64,
    pub fidelity: f64,
    pub iterations: usize,
    pub converged: bool,
    pub schedule: ScheduleDocument,
    pub verification: VerificationReport,
}

impl ResultDocument {
    pub fn new(problem: &SynthesisProblem, result: &SynthesisResult, verification: VerificationReport) -> Self {
        Self {
            n: problem.n,
            steps: problem.steps,
            seed: problem.seed,
            restart_seed: result.restart_seed,
            fidelity: result.fidelity,
            iterations: result.iterations,
            converged: result.converged,
            schedule: ScheduleDocument::new(problem.n, &result.schedule),
            verification,
        }
    }
}
