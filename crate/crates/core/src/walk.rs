//! Coined walks on the `n`-cycle.
//!
//! The state lives in `C² ⊗ C^n`, stored as `2n` amplitudes: the first `n`
//! belong to coin `|+1>` (positions `0..n`), the last `n` to coin `|-1>`.
//! One time step applies the coin and then the conditional shift,
//! `U_t = S (C_t ⊗ 1)` with `S = diag(F, Fᵀ)`: the `|+1>` sector moves one
//! position forward and the `|-1>` sector one position back.
//!
//! Any `n ≥ 1` is accepted here; only the algebraic modules need `n` odd.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `|‖ψ‖² - 1|` when a state is constructed from outside data.
pub const NORM_TOL: f64 = 1e-10;

/// Tolerance on a distribution's total mass.
pub const MASS_TOL: f64 = 1e-10;

/// An SU(2) coin parametrized as
/// `[[e^{iφ} cos θ, e^{iλ} sin θ], [-e^{-iλ} sin θ, e^{-iφ} cos θ]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoinOp {
    pub theta: f64,
    pub phi: f64,
    #[serde(rename = "lambda")]
    pub lam: f64,
}

impl CoinOp {
    pub fn new(theta: f64, phi: f64, lam: f64) -> Self {
        Self { theta, phi, lam }
    }

    pub fn identity() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }

    /// Row-major 2×2 matrix.
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        let (s, c) = self.theta.sin_cos();
        let ephi = Complex64::from_polar(1.0, self.phi);
        let elam = Complex64::from_polar(1.0, self.lam);
        [[ephi * c, elam * s], [-elam.conj() * s, ephi.conj() * c]]
    }

    /// Conjugate transpose of [`CoinOp::matrix`].
    pub fn adjoint_matrix(&self) -> [[Complex64; 2]; 2] {
        let m = self.matrix();
        [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]]
    }
}

/// A finite sequence of coins, one per time step.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub coins: Vec<CoinOp>,
}

impl Schedule {
    pub fn new(coins: Vec<CoinOp>) -> Self {
        Self { coins }
    }

    /// The same coin repeated `steps` times.
    pub fn stationary(coin: CoinOp, steps: usize) -> Self {
        Self::new(vec![coin; steps])
    }

    pub fn len(&self) -> usize {
        self.coins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coins.is_empty()
    }
}

/// On-disk schedule: `{"n": int, "coins": [{"theta", "phi", "lambda"}, ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleDocument {
    pub n: usize,
    pub coins: Vec<CoinOp>,
}

impl ScheduleDocument {
    pub fn new(n: usize, schedule: &Schedule) -> Self {
        Self {
            n,
            coins: schedule.coins.clone(),
        }
    }

    pub fn schedule(&self) -> Schedule {
        Schedule::new(self.coins.clone())
    }
}

/// Normalized amplitudes of the coin⊗walker system.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkState {
    n: usize,
    amplitudes: Vec<Complex64>,
}

impl WalkState {
    /// Accepts `2n` amplitudes whose squared norm is 1 within [`NORM_TOL`].
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() || !amplitudes.len().is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "a walk state needs 2n amplitudes, got {}",
                amplitudes.len()
            )));
        }
        let norm = norm_sqr(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self {
            n: amplitudes.len() / 2,
            amplitudes,
        })
    }

    /// `|1> ⊗ |0>`, i.e. `e_1`.
    pub fn origin(n: usize) -> Result<Self> {
        initial_state(n, [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)], 0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    /// Amplitudes of the `|+1>` coin sector.
    pub fn upper(&self) -> &[Complex64] {
        &self.amplitudes[..self.n]
    }

    /// Amplitudes of the `|-1>` coin sector.
    pub fn lower(&self) -> &[Complex64] {
        &self.amplitudes[self.n..]
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amplitudes)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &WalkState) -> Result<Complex64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Applies `C ⊗ 1` alone, without the shift.
    pub fn apply_coin(&self, coin: &CoinOp) -> WalkState {
        apply_coin_matrix(self, &coin.matrix())
    }

    pub fn distribution(&self) -> Distribution {
        distribution(self)
    }
}

fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

/// `|ψ_coin> ⊗ |position>`.
pub fn initial_state(n: usize, coin_state: [Complex64; 2], position: usize) -> Result<WalkState> {
    if n == 0 {
        return Err(Error::InvalidDimension(0));
    }
    if position >= n {
        return Err(Error::OutOfRange {
            what: "position",
            value: position,
            bound: n,
        });
    }
    let norm = norm_sqr(&coin_state);
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(norm));
    }
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); 2 * n];
    amplitudes[position] = coin_state[0];
    amplitudes[position + n] = coin_state[1];
    Ok(WalkState { n, amplitudes })
}

fn apply_coin_matrix(state: &WalkState, m: &[[Complex64; 2]; 2]) -> WalkState {
    let n = state.n;
    let mut out = vec![Complex64::new(0.0, 0.0); 2 * n];
    for j in 0..n {
        let (a, b) = (state.amplitudes[j], state.amplitudes[j + n]);
        out[j] = m[0][0] * a + m[0][1] * b;
        out[j + n] = m[1][0] * a + m[1][1] * b;
    }
    WalkState { n, amplitudes: out }
}

/// `S (C ⊗ 1) ψ`, applied sector-wise in O(n).
pub fn step(state: &WalkState, coin: &CoinOp) -> WalkState {
    let n = state.n;
    let m = coin.matrix();
    let mut out = vec![Complex64::new(0.0, 0.0); 2 * n];
    for j in 0..n {
        let (a, b) = (state.amplitudes[j], state.amplitudes[j + n]);
        out[(j + 1) % n] = m[0][0] * a + m[0][1] * b;
        out[n + (j + n - 1) % n] = m[1][0] * a + m[1][1] * b;
    }
    WalkState { n, amplitudes: out }
}

/// Inverse of [`step`]: `(C† ⊗ 1) S† ψ`.
pub fn step_inverse(state: &WalkState, coin: &CoinOp) -> WalkState {
    let n = state.n;
    let mut shifted = vec![Complex64::new(0.0, 0.0); 2 * n];
    for j in 0..n {
        shifted[j] = state.amplitudes[(j + 1) % n];
        shifted[n + j] = state.amplitudes[n + (j + n - 1) % n];
    }
    apply_coin_matrix(
        &WalkState {
            n,
            amplitudes: shifted,
        },
        &coin.adjoint_matrix(),
    )
}

/// Position distribution `P(j) = |α_{j+1}|² + |α_{j+1+n}|²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub probs: Vec<f64>,
}

impl Distribution {
    pub fn uniform(n: usize) -> Self {
        Self {
            probs: vec![1.0 / n as f64; n],
        }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Nonnegative with unit mass within [`MASS_TOL`].
    pub fn is_valid(&self) -> bool {
        self.probs.iter().all(|p| *p >= 0.0) && (self.total() - 1.0).abs() <= MASS_TOL
    }

    /// `max_j |P(j) - 1/n|`.
    pub fn max_deviation_from_uniform(&self) -> f64 {
        let u = 1.0 / self.len() as f64;
        self.probs.iter().map(|p| (p - u).abs()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Distribution) -> f64 {
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

pub fn distribution(state: &WalkState) -> Distribution {
    let (up, down) = (state.upper(), state.lower());
    Distribution {
        probs: up
            .iter()
            .zip(down)
            .map(|(a, b)| a.norm_sqr() + b.norm_sqr())
            .collect(),
    }
}

#[derive(Debug, Clone)]
pub struct TrajectoryPoint {
    pub t: usize,
    pub state: WalkState,
    pub distribution: Distribution,
}

/// Full trajectory for `t = 0..=T`, including the initial state.
pub fn run(initial: &WalkState, schedule: &Schedule) -> Vec<TrajectoryPoint> {
    let mut out = Vec::with_capacity(schedule.len() + 1);
    evolve(initial, schedule, |t, state| {
        out.push(TrajectoryPoint {
            t,
            state: state.clone(),
            distribution: distribution(state),
        })
    });
    out
}

/// Streaming evolution: calls `visit(t, &ψ(t))` for `t = 0..=T` without
/// storing the history, and returns the final state.
pub fn evolve<F>(initial: &WalkState, schedule: &Schedule, mut visit: F) -> WalkState
where
    F: FnMut(usize, &WalkState),
{
    let mut state = initial.clone();
    visit(0, &state);
    for (k, coin) in schedule.coins.iter().enumerate() {
        state = step(&state, coin);
        visit(k + 1, &state);
    }
    state
}

/// Final state after the whole schedule.
pub fn final_state(initial: &WalkState, schedule: &Schedule) -> WalkState {
    evolve(initial, schedule, |_, _| {})
}

/// Entrywise mean of the first `t` distributions (times `0..t`).
pub fn cesaro(distributions: &[Distribution], t: usize) -> Result<Distribution> {
    if t == 0 {
        return Err(Error::InvalidArgument("Cesàro average needs t >= 1".into()));
    }
    if t > distributions.len() {
        return Err(Error::OutOfRange {
            what: "t",
            value: t,
            bound: distributions.len() + 1,
        });
    }
    let mut acc = CesaroAccumulator::new(distributions[0].len());
    for d in &distributions[..t] {
        acc.push(d)?;
    }
    acc.mean()
}

/// Running sums for Cesàro averages in streaming mode.
#[derive(Debug, Clone)]
pub struct CesaroAccumulator {
    sums: Vec<f64>,
    count: usize,
}

impl CesaroAccumulator {
    pub fn new(n: usize) -> Self {
        Self {
            sums: vec![0.0; n],
            count: 0,
        }
    }

    pub fn push(&mut self, d: &Distribution) -> Result<()> {
        if d.len() != self.sums.len() {
            return Err(Error::DimensionMismatch {
                left: self.sums.len(),
                right: d.len(),
            });
        }
        self.sums.iter_mut().zip(&d.probs).for_each(|(s, p)| *s += p);
        self.count += 1;
        Ok(())
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn mean(&self) -> Result<Distribution> {
        if self.count == 0 {
            return Err(Error::InvalidArgument("Cesàro average of nothing".into()));
        }
        let k = self.count as f64;
        Ok(Distribution {
            probs: self.sums.iter().map(|s| s / k).collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{self, CMatrix};
    use nalgebra::DVector;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn basis(n: usize, k: usize) -> WalkState {
        let mut v = vec![c(0.0, 0.0); 2 * n];
        v[k] = c(1.0, 0.0);
        WalkState::new(v).unwrap()
    }

    fn random_coin(rng: &mut impl Rng) -> CoinOp {
        CoinOp::new(
            rng.random_range(0.0..std::f64::consts::TAU),
            rng.random_range(0.0..std::f64::consts::TAU),
            rng.random_range(0.0..std::f64::consts::TAU),
        )
    }

    fn random_state(rng: &mut impl Rng, n: usize) -> WalkState {
        let v: Vec<Complex64> = (0..2 * n)
            .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let norm = norm_sqr(&v).sqrt();
        WalkState::new(v.into_iter().map(|a| a / norm).collect()).unwrap()
    }

    /// Dense `S (C ⊗ 1)`.
    fn dense_step(n: usize, coin: &CoinOp) -> CMatrix {
        let m = coin.matrix();
        let cm = dense::mat2([m[0][0], m[0][1], m[1][0], m[1][1]]);
        dense::to_complex(&dense::conditional_shift(n).unwrap()) * dense::kron(&cm, &dense::identity(n))
    }

    fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn coin_is_special_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let coin = random_coin(&mut rng);
            let m = coin.matrix();
            let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            assert!((det - c(1.0, 0.0)).norm() <= 1e-15);
            let a = coin.adjoint_matrix();
            for i in 0..2 {
                for j in 0..2 {
                    let e: Complex64 = (0..2).map(|k| a[i][k] * m[k][j]).sum();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((e - c(want, 0.0)).norm() <= 1e-15);
                }
            }
        }
    }

    #[test]
    fn initial_state_bookkeeping() {
        let s = initial_state(5, [c(1.0, 0.0), c(0.0, 0.0)], 0).unwrap();
        assert_eq!(s, basis(5, 0));
        let s = initial_state(5, [c(0.0, 0.0), c(1.0, 0.0)], 2).unwrap();
        assert_eq!(s, basis(5, 7));
        let s = initial_state(3, [c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2)], 1).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);

        assert!(matches!(
            initial_state(3, [c(1.0, 0.0), c(0.0, 0.0)], 3),
            Err(Error::OutOfRange { .. })
        ));
        assert!(matches!(
            initial_state(3, [c(1.0, 0.0), c(1.0, 0.0)], 0),
            Err(Error::NotNormalized(_))
        ));
    }

    #[test]
    fn step_with_identity_coin_shifts() {
        let n = 5;
        assert_eq!(step(&basis(n, 0), &CoinOp::identity()), basis(n, 1));
        assert_eq!(step(&basis(n, n), &CoinOp::identity()), basis(n, 2 * n - 1));
    }

    #[test]
    fn step_with_flip_coin() {
        let n = 4;
        let coin = CoinOp::new(FRAC_PI_2, 0.0, 0.0);
        let out = step(&basis(n, 0), &coin);
        let mut want = vec![c(0.0, 0.0); 2 * n];
        want[2 * n - 1] = c(-1.0, 0.0);
        assert!(max_diff(out.amplitudes(), &want) < 1e-15);

        let dense = dense_step(n, &coin) * DVector::from_vec(basis(n, 0).into_amplitudes());
        assert!(max_diff(out.amplitudes(), dense.as_slice()) < 1e-15);
    }

    #[test]
    fn sectorwise_step_matches_dense_operator() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for n in [1, 2, 3, 5, 8] {
            for _ in 0..20 {
                let coin = random_coin(&mut rng);
                let psi = random_state(&mut rng, n);
                let fast = step(&psi, &coin);
                let slow = dense_step(n, &coin) * DVector::from_vec(psi.amplitudes().to_vec());
                assert!(max_diff(fast.amplitudes(), slow.as_slice()) <= 1e-12);
            }
        }
    }

    #[test]
    fn run_lengths_and_cyclic_motion() {
        let n = 5;
        let start = WalkState::origin(n).unwrap();
        let traj = run(&start, &Schedule::default());
        assert_eq!(traj.len(), 1);
        assert_eq!(traj[0].state, start);

        let traj = run(&start, &Schedule::stationary(CoinOp::identity(), 12));
        assert_eq!(traj.len(), 13);
        for p in &traj {
            assert_eq!(p.distribution.probs[p.t % n], 1.0);
        }
    }

    #[test]
    fn hadamard_like_walk_keeps_norm() {
        let start = WalkState::origin(5).unwrap();
        for p in run(&start, &Schedule::stationary(CoinOp::new(FRAC_PI_4, 0.0, 0.0), 100)) {
            assert!((p.state.norm_sqr() - 1.0).abs() <= 1e-11);
            assert!(p.distribution.is_valid());
        }
    }

    #[test]
    fn distribution_examples() {
        let n = 4;
        assert_eq!(distribution(&basis(n, 0)).probs, vec![1.0, 0.0, 0.0, 0.0]);
        let mut v = vec![c(0.0, 0.0); 2 * n];
        v[0] = c(FRAC_1_SQRT_2, 0.0);
        v[n] = c(FRAC_1_SQRT_2, 0.0);
        let d = distribution(&WalkState::new(v).unwrap());
        assert!((d.probs[0] - 1.0).abs() < 1e-15);
        assert!(d.probs[1..].iter().all(|p| *p == 0.0));
    }

    #[test]
    fn cesaro_examples() {
        let a = Distribution { probs: vec![1.0, 0.0, 0.0] };
        let b = Distribution { probs: vec![0.0, 1.0, 0.0] };
        let list = vec![a.clone(), b];
        assert_eq!(cesaro(&list, 1).unwrap(), a);
        assert_eq!(cesaro(&list, 2).unwrap().probs, vec![0.5, 0.5, 0.0]);
        assert!(cesaro(&list, 0).is_err());
        assert!(cesaro(&list, 3).is_err());
    }

    #[test]
    fn schedule_json_shape() {
        let doc = ScheduleDocument::new(3, &Schedule::new(vec![CoinOp::new(0.5, 0.25, -1.0)]));
        let json = serde_json::to_string(&doc).unwrap();
        assert_eq!(json, r#"{"n":3,"coins":[{"theta":0.5,"phi":0.25,"lambda":-1.0}]}"#);
        let back: ScheduleDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(back, doc);
    }

    #[test]
    fn walk_state_validation() {
        assert!(WalkState::new(vec![c(1.0, 0.0)]).is_err());
        assert!(matches!(
            WalkState::new(vec![c(1.0, 0.0), c(1.0, 0.0)]),
            Err(Error::NotNormalized(_))
        ));
    }

    fn coin_strategy() -> impl Strategy<Value = CoinOp> {
        (-10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64).prop_map(|(t, p, l)| CoinOp::new(t, p, l))
    }

    proptest! {
        #[test]
        fn step_then_inverse_is_identity(
            n in 1usize..12,
            seed in any::<u64>(),
            coin in coin_strategy(),
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let psi = random_state(&mut rng, n);
            let back = step_inverse(&step(&psi, &coin), &coin);
            prop_assert!(max_diff(back.amplitudes(), psi.amplitudes()) <= 1e-12);
        }

        #[test]
        fn identity_coin_permutes_each_sector(n in 1usize..12, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let psi = random_state(&mut rng, n);
            let out = step(&psi, &CoinOp::identity());
            for j in 0..n {
                prop_assert_eq!(out.upper()[(j + 1) % n], psi.upper()[j]);
                prop_assert_eq!(out.lower()[(j + n - 1) % n], psi.lower()[j]);
            }
        }

        #[test]
        fn random_schedules_preserve_norm(
            n in 2usize..32,
            coins in proptest::collection::vec(coin_strategy(), 0..300),
        ) {
            let start = WalkState::origin(n).unwrap();
            let schedule = Schedule::new(coins);
            let mut worst: f64 = 0.0;
            evolve(&start, &schedule, |_, s| {
                worst = worst.max((s.norm_sqr() - 1.0).abs());
                assert!(distribution(s).is_valid());
            });
            prop_assert!(worst <= 1e-11);
        }
    }
}
