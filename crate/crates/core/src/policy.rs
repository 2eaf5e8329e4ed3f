//! Tabular two-time-scale natural actor-critic over an eigenvalue-slot
//! Markov decision process, with the joint-ensemble reward.
//!
//! The ensemble assigns a configuration of 𝒰₀ minimum- and 𝒱₀
//! maximum-eigenvalue slots the unnormalized density
//!
//! ```text
//! P(ζmax, ζmin) = ∏_𝓊 ∏_𝓋 |ζmax⁽𝓋⁾ − ζmin⁽𝓊⁾|^β · ∏_ζ e^{−β (𝒰₀+𝒱₀)/2 · V(ζ)}
//! ```
//!
//! and the reward pays `min(R_cap, log(1/P))`, so configurations whose
//! extreme eigenvalues crowd together earn more. The critic performs a
//! single-entry update
//!
//! ```text
//! Q_{t+1}(s,a) = Q_t(s,a) + α_t [r + ψ Q_t(s', a') − Q_t(s,a)]
//! ```
//!
//! on the visited pair only, while the actor reweights every state's
//! policy multiplicatively by `exp(β_t Q_{t+1})` (computed in the log
//! domain so large critic values cannot overflow) and the behavior policy
//! keeps the exploration floor `π̂(a|s) ≥ ε_t/|𝒜|`.

use ndarray::{Array2, Array3};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::scalar::{as_f64, r, Real};

/// Reward clamp: `reward = min(R_CAP, log(1/P))`.
pub const R_CAP: f64 = 50.0;

#[derive(Debug, Error)]
pub enum PolicyError {
    #[error("invalid ensemble: {0}")]
    BadEnsemble(String),
    #[error("invalid mdp: {0}")]
    BadSpec(String),
    #[error("invalid schedules: {0}")]
    BadSchedules(String),
    #[error("discount must lie in (0, 1), got {0}")]
    DiscountOutOfRange(f64),
    #[error("operation needs an explicit reward table, not an ensemble reward")]
    ExplicitRewardRequired,
    #[error("mdp shape {got} does not match the ensemble layout {want}")]
    LayoutMismatch { got: String, want: String },
}

/// Joint ensemble of 𝒰₀ minimum- and 𝒱₀ maximum-eigenvalue slots with
/// Dyson index β and confining potential V.
#[derive(Debug, Clone, Copy)]
pub struct EigenEnsemble<T> {
    u0: usize,
    v0: usize,
    beta: T,
    potential: fn(T) -> T,
}

fn quadratic<T: Real>(z: T) -> T {
    z * z
}

impl<T: Real> EigenEnsemble<T> {
    pub fn new(u0: usize, v0: usize, beta: T) -> Result<Self, PolicyError> {
        if u0 == 0 || v0 == 0 {
            return Err(PolicyError::BadEnsemble("need u0, v0 >= 1".into()));
        }
        if !(beta > T::zero()) || !beta.is_finite() {
            return Err(PolicyError::BadEnsemble(format!("beta must be positive, got {beta}")));
        }
        Ok(Self { u0, v0, beta, potential: quadratic })
    }

    /// The layout used throughout: 5 minimum and 7 maximum slots, β = 2.
    pub fn default_layout() -> Self {
        Self { u0: 5, v0: 7, beta: r(2.0), potential: quadratic }
    }

    pub fn with_potential(mut self, potential: fn(T) -> T) -> Self {
        self.potential = potential;
        self
    }

    pub fn u0(&self) -> usize {
        self.u0
    }

    pub fn v0(&self) -> usize {
        self.v0
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn n_slots(&self) -> usize {
        self.u0 + self.v0
    }
}

/// Log of the unnormalized joint density; −∞ when a maximum slot
/// coincides with a minimum slot.
pub fn joint_log_density<T: Real>(
    zeta_max: &[T],
    zeta_min: &[T],
    ensemble: &EigenEnsemble<T>,
) -> T {
    debug_assert_eq!(zeta_max.len(), ensemble.v0);
    debug_assert_eq!(zeta_min.len(), ensemble.u0);
    let mut log_p = T::zero();
    for &mx in zeta_max {
        for &mn in zeta_min {
            log_p += ensemble.beta * (mx - mn).abs().ln();
        }
    }
    let coeff = ensemble.beta * r::<T>(ensemble.n_slots() as f64 / 2.0);
    for &z in zeta_max.iter().chain(zeta_min.iter()) {
        log_p -= coeff * (ensemble.potential)(z);
    }
    log_p
}

/// Unnormalized joint eigenvalue density; 0 exactly when some maximum
/// slot touches some minimum slot.
pub fn joint_eig_density<T: Real>(
    zeta_max: &[T],
    zeta_min: &[T],
    ensemble: &EigenEnsemble<T>,
) -> T {
    joint_log_density(zeta_max, zeta_min, ensemble).exp()
}

/// Ensemble reward `min(R_CAP, log(1/P))`, largest when the extreme
/// eigenvalues are closest.
pub fn reward<T: Real>(zeta_max: &[T], zeta_min: &[T], ensemble: &EigenEnsemble<T>) -> T {
    let log_p = joint_log_density(zeta_max, zeta_min, ensemble);
    (-log_p).min(r(R_CAP))
}

/// How a reward is paid: a fixed per-(s, a) table, or the ensemble
/// density at the environment's evolving eigenvalue configuration.
#[derive(Debug, Clone)]
pub enum RewardSource<T> {
    Table(Array2<T>),
    Ensemble(EigenEnsemble<T>),
}

/// Finite MDP: transition tensor P(s'|s,a), discount, reward source.
#[derive(Debug, Clone)]
pub struct MdpSpec<T> {
    transitions: Array3<T>,
    discount: T,
    reward: RewardSource<T>,
}

impl<T: Real> MdpSpec<T> {
    pub fn new(
        transitions: Array3<T>,
        discount: T,
        reward: RewardSource<T>,
    ) -> Result<Self, PolicyError> {
        let (s, a, s2) = transitions.dim();
        if s == 0 || a == 0 || s != s2 {
            return Err(PolicyError::BadSpec(format!(
                "transition tensor must be S x A x S with S, A >= 1, got {s} x {a} x {s2}"
            )));
        }
        if !(discount > T::zero()) || !(discount < T::one()) {
            return Err(PolicyError::DiscountOutOfRange(as_f64(discount)));
        }
        for i in 0..s {
            for j in 0..a {
                let mut sum = T::zero();
                for k in 0..s2 {
                    let p = transitions[[i, j, k]];
                    if p < T::zero() {
                        return Err(PolicyError::BadSpec(format!(
                            "negative transition probability at ({i}, {j}, {k})"
                        )));
                    }
                    sum += p;
                }
                if (sum - T::one()).abs() > r(1e-12) {
                    return Err(PolicyError::BadSpec(format!(
                        "row ({i}, {j}) sums to {sum}, not 1"
                    )));
                }
            }
        }
        if let RewardSource::Table(t) = &reward {
            if t.dim() != (s, a) {
                return Err(PolicyError::BadSpec(format!(
                    "reward table is {:?}, transitions want ({s}, {a})",
                    t.dim()
                )));
            }
        }
        Ok(Self { transitions, discount, reward })
    }

    /// The slot-walk MDP of an eigenvalue ensemble: one state per slot,
    /// max(u0, v0) actions, and the deterministic relative-shift kernel
    /// s' = (s + a) mod (u0 + v0) used by the sampling environment.
    pub fn from_ensemble(ensemble: EigenEnsemble<T>, discount: T) -> Result<Self, PolicyError> {
        let n = ensemble.n_slots();
        let actions = ensemble.u0.max(ensemble.v0);
        let mut kernel = Array3::zeros((n, actions, n));
        for s in 0..n {
            for a in 0..actions {
                kernel[[s, a, (s + a) % n]] = T::one();
            }
        }
        Self::new(kernel, discount, RewardSource::Ensemble(ensemble))
    }

    pub fn n_states(&self) -> usize {
        self.transitions.dim().0
    }

    pub fn n_actions(&self) -> usize {
        self.transitions.dim().1
    }

    pub fn discount(&self) -> T {
        self.discount
    }

    pub fn transitions(&self) -> &Array3<T> {
        &self.transitions
    }

    pub fn reward_source(&self) -> &RewardSource<T> {
        &self.reward
    }

    pub fn reward_table(&self) -> Option<&Array2<T>> {
        match &self.reward {
            RewardSource::Table(t) => Some(t),
            RewardSource::Ensemble(_) => None,
        }
    }
}

/// A sampling environment the actor-critic interacts with.
pub trait Environment<T: Real> {
    fn n_states(&self) -> usize;
    fn n_actions(&self) -> usize;
    /// Initial state.
    fn reset(&mut self) -> usize;
    /// One transition: next state and the reward paid on the way.
    fn step(&mut self, state: usize, action: usize, rng: &mut ChaCha8Rng) -> (usize, T);
}

fn sample_categorical<T: Real>(probs: &[T], rng: &mut ChaCha8Rng) -> usize {
    let u: T = r(rng.random::<f64>());
    let mut acc = T::zero();
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

/// Environment that samples an explicit transition tensor and pays a
/// fixed reward table.
#[derive(Debug, Clone)]
pub struct TabularEnv<T> {
    transitions: Array3<T>,
    rewards: Array2<T>,
}

impl<T: Real> TabularEnv<T> {
    pub fn new(spec: &MdpSpec<T>) -> Result<Self, PolicyError> {
        let rewards = spec.reward_table().ok_or(PolicyError::ExplicitRewardRequired)?.clone();
        Ok(Self { transitions: spec.transitions().clone(), rewards })
    }
}

impl<T: Real> Environment<T> for TabularEnv<T> {
    fn n_states(&self) -> usize {
        self.transitions.dim().0
    }

    fn n_actions(&self) -> usize {
        self.transitions.dim().1
    }

    fn reset(&mut self) -> usize {
        0
    }

    fn step(&mut self, state: usize, action: usize, rng: &mut ChaCha8Rng) -> (usize, T) {
        let row: Vec<T> = (0..self.transitions.dim().2)
            .map(|k| self.transitions[[state, action, k]])
            .collect();
        (sample_categorical(&row, rng), self.rewards[[state, action]])
    }
}

/// Environment over eigenvalue slots. The discrete state is the slot
/// visited last; action a targets slot (s + a) mod (u0 + v0), proposes a
/// fresh standard-normal value for it, and accepts by the Metropolis
/// ratio of the joint density. The reward is the capped negative log
/// density of the configuration after the accept/reject decision.
#[derive(Debug, Clone)]
pub struct EigenEnsembleEnv<T> {
    ensemble: EigenEnsemble<T>,
    zeta_min: Vec<T>,
    zeta_max: Vec<T>,
    log_density: T,
}

impl<T: Real> EigenEnsembleEnv<T> {
    /// Starts from the near-modal split: minimum slots at −1/2, maximum
    /// slots at +1/2.
    pub fn new(ensemble: EigenEnsemble<T>) -> Self {
        let zeta_min = vec![r(-0.5); ensemble.u0];
        let zeta_max = vec![r(0.5); ensemble.v0];
        let log_density = joint_log_density(&zeta_max, &zeta_min, &ensemble);
        Self { ensemble, zeta_min, zeta_max, log_density }
    }

    pub fn configuration(&self) -> (&[T], &[T]) {
        (&self.zeta_max, &self.zeta_min)
    }

    fn slot(&mut self, idx: usize) -> &mut T {
        if idx < self.ensemble.u0 {
            &mut self.zeta_min[idx]
        } else {
            &mut self.zeta_max[idx - self.ensemble.u0]
        }
    }
}

/// Builds the slot-walk sampling environment of an ensemble.
pub fn markov_eigenstate_env<T: Real>(ensemble: EigenEnsemble<T>) -> EigenEnsembleEnv<T> {
    EigenEnsembleEnv::new(ensemble)
}

impl<T: Real> Environment<T> for EigenEnsembleEnv<T> {
    fn n_states(&self) -> usize {
        self.ensemble.n_slots()
    }

    fn n_actions(&self) -> usize {
        self.ensemble.u0.max(self.ensemble.v0)
    }

    fn reset(&mut self) -> usize {
        0
    }

    fn step(&mut self, state: usize, action: usize, rng: &mut ChaCha8Rng) -> (usize, T) {
        let target = (state + action) % self.ensemble.n_slots();
        let old = *self.slot(target);
        let proposal: f64 = StandardNormal.sample(rng);
        *self.slot(target) = r(proposal);
        let candidate = joint_log_density(&self.zeta_max, &self.zeta_min, &self.ensemble);
        let u: f64 = rng.random();
        if r::<T>(u.ln()) < candidate - self.log_density {
            self.log_density = candidate;
        } else {
            *self.slot(target) = old;
        }
        (target, (-self.log_density).min(r(R_CAP)))
    }
}

/// Step-size and exploration schedules.
#[derive(Debug, Clone, Copy)]
pub enum Schedules<T> {
    /// α_t = 1/(t^0.6 + 1), β_t = 1/(t^0.8 + 1), ε_t = max(0.01, 0.5/√(t+1)).
    Diminishing,
    Constant { alpha: T, beta: T, epsilon: T },
}

impl<T: Real> Schedules<T> {
    pub fn validate(&self) -> Result<(), PolicyError> {
        if let Schedules::Constant { alpha, beta, epsilon } = self {
            let fin = alpha.is_finite() && beta.is_finite() && epsilon.is_finite();
            if !fin || *alpha < T::zero() || *beta < T::zero() {
                return Err(PolicyError::BadSchedules(
                    "alpha and beta must be finite and non-negative".into(),
                ));
            }
            if *epsilon < T::zero() || *epsilon > T::one() {
                return Err(PolicyError::BadSchedules("epsilon must lie in [0, 1]".into()));
            }
        }
        Ok(())
    }

    pub fn alpha(&self, t: usize) -> T {
        match self {
            Schedules::Diminishing => T::one() / (r::<T>(t as f64).powf(r(0.6)) + T::one()),
            Schedules::Constant { alpha, .. } => *alpha,
        }
    }

    pub fn beta(&self, t: usize) -> T {
        match self {
            Schedules::Diminishing => T::one() / (r::<T>(t as f64).powf(r(0.8)) + T::one()),
            Schedules::Constant { beta, .. } => *beta,
        }
    }

    pub fn epsilon(&self, t: usize) -> T {
        match self {
            Schedules::Diminishing => {
                let decayed = r::<T>(0.5) / r::<T>((t + 1) as f64).sqrt();
                decayed.max(r(0.01))
            }
            Schedules::Constant { epsilon, .. } => *epsilon,
        }
    }
}

/// Actor-critic iterate: critic table, actor policy, exploration mixture,
/// and the (state, action) pair the next transition departs from.
#[derive(Debug, Clone)]
pub struct ActorCriticState<T> {
    pub q_table: Array2<T>,
    pub policy: Array2<T>,
    pub behavior: Array2<T>,
    pub schedules: Schedules<T>,
    pub discount: T,
    pub iteration: usize,
    pub state: usize,
    pub action: usize,
}

fn mixed_behavior<T: Real>(policy: &Array2<T>, epsilon: T) -> Array2<T> {
    let n_actions = policy.dim().1;
    let floor = epsilon / r(n_actions as f64);
    policy.mapv(|p| floor + (T::one() - epsilon) * p)
}

impl<T: Real> ActorCriticState<T> {
    /// Uniform initial policy, zero critic, behavior mixed at ε_0.
    pub fn fresh(
        n_states: usize,
        n_actions: usize,
        discount: T,
        schedules: Schedules<T>,
        initial_state: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<Self, PolicyError> {
        schedules.validate()?;
        if !(discount > T::zero()) || !(discount < T::one()) {
            return Err(PolicyError::DiscountOutOfRange(as_f64(discount)));
        }
        let uniform = T::one() / r(n_actions as f64);
        let policy = Array2::from_elem((n_states, n_actions), uniform);
        let behavior = mixed_behavior(&policy, schedules.epsilon(0));
        let row: Vec<T> = behavior.row(initial_state).to_vec();
        let action = sample_categorical(&row, rng);
        Ok(Self {
            q_table: Array2::zeros((n_states, n_actions)),
            policy,
            behavior,
            schedules,
            discount,
            iteration: 0,
            state: initial_state,
            action,
        })
    }
}

/// One actor-critic transition: critic update on the visited entry,
/// multiplicative softmax policy update on all states, behavior re-mix.
pub fn ac_step<T: Real, E: Environment<T> + ?Sized>(
    state: &mut ActorCriticState<T>,
    env: &mut E,
    rng: &mut ChaCha8Rng,
) -> T {
    let t = state.iteration;
    let alpha = state.schedules.alpha(t);
    let beta = state.schedules.beta(t);
    let epsilon = state.schedules.epsilon(t);

    let (next_state, pay) = env.step(state.state, state.action, rng);
    let row: Vec<T> = state.behavior.row(next_state).to_vec();
    let next_action = sample_categorical(&row, rng);

    // critic: only the visited (s, a) entry moves
    let q_sa = state.q_table[[state.state, state.action]];
    let target = pay + state.discount * state.q_table[[next_state, next_action]];
    state.q_table[[state.state, state.action]] = q_sa + alpha * (target - q_sa);

    // actor: log-domain multiplicative update keeps exp from overflowing
    let n_actions = state.policy.dim().1;
    for s in 0..state.policy.dim().0 {
        let mut logs: Vec<T> = (0..n_actions)
            .map(|a| state.policy[[s, a]].ln() + beta * state.q_table[[s, a]])
            .collect();
        let peak = logs.iter().cloned().fold(T::neg_infinity(), T::max);
        let mut total = T::zero();
        for l in logs.iter_mut() {
            *l = (*l - peak).exp();
            total += *l;
        }
        for a in 0..n_actions {
            state.policy[[s, a]] = logs[a] / total;
        }
    }
    state.behavior = mixed_behavior(&state.policy, epsilon);

    state.state = next_state;
    state.action = next_action;
    state.iteration = t + 1;
    pay
}

/// One row of a training trace.
#[derive(Debug, Clone, Copy)]
pub struct TraceRow<T> {
    pub iteration: usize,
    /// Mean reward over the trailing 500 transitions.
    pub avg_reward: T,
    /// ‖Q_t − Q*‖∞ / ‖Q*‖∞ against the value-iteration oracle, 0 when no
    /// oracle exists (ensemble rewards).
    pub q_error: T,
    /// Mean over states of π_t(a*(s)|s) with a* the oracle-greedy action;
    /// without an oracle, mean of max_a π_t(a|s).
    pub avg_policy: T,
}

/// Training record: one row per iteration 0..=T plus the sampled output
/// index T̂.
#[derive(Debug, Clone)]
pub struct TrainingTrace<T> {
    pub rows: Vec<TraceRow<T>>,
    pub t_hat: usize,
}

fn q_error_vs<T: Real>(q: &Array2<T>, oracle: Option<&Array2<T>>) -> T {
    let Some(q_star) = oracle else { return T::zero() };
    let mut diff = T::zero();
    let mut scale = T::zero();
    for (a, b) in q.iter().zip(q_star.iter()) {
        diff = diff.max((*a - *b).abs());
        scale = scale.max(b.abs());
    }
    if scale > T::zero() {
        diff / scale
    } else {
        diff
    }
}

fn avg_policy_mass<T: Real>(policy: &Array2<T>, oracle: Option<&Array2<T>>) -> T {
    let (s, a) = policy.dim();
    let mut acc = T::zero();
    for i in 0..s {
        let mass = match oracle {
            Some(q_star) => {
                let mut best = 0;
                for j in 1..a {
                    if q_star[[i, j]] > q_star[[i, best]] {
                        best = j;
                    }
                }
                policy[[i, best]]
            }
            None => (0..a).map(|j| policy[[i, j]]).fold(T::neg_infinity(), T::max),
        };
        acc += mass;
    }
    acc / r(s as f64)
}

/// Runs T actor-critic steps from the uniform policy and returns the
/// trace together with the output policy π̂_T̂, where T̂ is drawn up
/// front with probability proportional to β_i over i = 1..=T.
pub fn train<T: Real>(
    spec: &MdpSpec<T>,
    t_steps: usize,
    schedules: Schedules<T>,
    seed: u64,
) -> Result<(TrainingTrace<T>, Array2<T>), PolicyError> {
    schedules.validate()?;
    let oracle = match spec.reward_source() {
        RewardSource::Table(_) => Some(value_iteration_oracle(spec)?),
        RewardSource::Ensemble(_) => None,
    };
    let mut rng = crate::rng::seeded(seed);

    // the output index is committed before any learning happens
    let betas: Vec<T> = (1..=t_steps).map(|i| schedules.beta(i)).collect();
    let total: T = betas.iter().cloned().sum();
    let t_hat = if t_steps == 0 || !(total > T::zero()) {
        t_steps
    } else {
        let probs: Vec<T> = betas.iter().map(|b| *b / total).collect();
        1 + sample_categorical(&probs, &mut rng)
    };

    let run = |env: &mut dyn Environment<T>, rng: &mut ChaCha8Rng| -> Result<_, PolicyError> {
        let s0 = env.reset();
        let mut state = ActorCriticState::fresh(
            env.n_states(),
            env.n_actions(),
            spec.discount(),
            schedules,
            s0,
            rng,
        )?;
        let mut rows = Vec::with_capacity(t_steps + 1);
        let mut window: std::collections::VecDeque<T> = std::collections::VecDeque::new();
        let mut window_sum = T::zero();
        let mut output = state.behavior.clone();
        rows.push(TraceRow {
            iteration: 0,
            avg_reward: T::zero(),
            q_error: q_error_vs(&state.q_table, oracle.as_ref()),
            avg_policy: avg_policy_mass(&state.policy, oracle.as_ref()),
        });
        for t in 1..=t_steps {
            let pay = ac_step(&mut state, env, rng);
            window.push_back(pay);
            window_sum += pay;
            if window.len() > 500 {
                window_sum -= window.pop_front().unwrap();
            }
            rows.push(TraceRow {
                iteration: t,
                avg_reward: window_sum / r(window.len() as f64),
                q_error: q_error_vs(&state.q_table, oracle.as_ref()),
                avg_policy: avg_policy_mass(&state.policy, oracle.as_ref()),
            });
            if t == t_hat {
                output = state.behavior.clone();
            }
        }
        Ok((rows, output))
    };

    let (rows, output) = match spec.reward_source() {
        RewardSource::Table(_) => {
            let mut env = TabularEnv::new(spec)?;
            run(&mut env, &mut rng)?
        }
        RewardSource::Ensemble(ensemble) => {
            if spec.n_states() != ensemble.n_slots()
                || spec.n_actions() != ensemble.u0.max(ensemble.v0)
            {
                return Err(PolicyError::LayoutMismatch {
                    got: format!("{} states, {} actions", spec.n_states(), spec.n_actions()),
                    want: format!(
                        "{} states, {} actions",
                        ensemble.n_slots(),
                        ensemble.u0.max(ensemble.v0)
                    ),
                });
            }
            let mut env = EigenEnsembleEnv::new(*ensemble);
            run(&mut env, &mut rng)?
        }
    };
    Ok((TrainingTrace { rows, t_hat }, output))
}

/// Fixed point of the Bellman optimality operator, iterated until the
/// contraction guarantees a sup-norm error below 1e−10.
pub fn value_iteration_oracle<T: Real>(spec: &MdpSpec<T>) -> Result<Array2<T>, PolicyError> {
    let rewards = spec.reward_table().ok_or(PolicyError::ExplicitRewardRequired)?;
    let (s, a) = rewards.dim();
    let psi = spec.discount();
    if !(psi < T::one()) {
        return Err(PolicyError::DiscountOutOfRange(as_f64(psi)));
    }
    let mut q = Array2::<T>::zeros((s, a));
    // ‖Q_k − Q*‖ ≤ ψ/(1−ψ) ‖Q_{k+1} − Q_k‖ for a ψ-contraction
    let gate = r::<T>(1e-10) * (T::one() - psi) / psi.max(r(1e-3));
    for _ in 0..5_000_000 {
        let mut next = Array2::<T>::zeros((s, a));
        let mut change = T::zero();
        for i in 0..s {
            for j in 0..a {
                let mut future = T::zero();
                for k in 0..s {
                    let p = spec.transitions()[[i, j, k]];
                    if p > T::zero() {
                        let best = (0..a).map(|m| q[[k, m]]).fold(T::neg_infinity(), T::max);
                        future += p * best;
                    }
                }
                next[[i, j]] = rewards[[i, j]] + psi * future;
                change = change.max((next[[i, j]] - q[[i, j]]).abs());
            }
        }
        q = next;
        if change < gate {
            return Ok(q);
        }
    }
    Ok(q)
}

/// Greedy action per state.
pub fn greedy_policy<T: Real>(q: &Array2<T>) -> Vec<usize> {
    let (s, a) = q.dim();
    (0..s)
        .map(|i| {
            let mut best = 0;
            for j in 1..a {
                if q[[i, j]] > q[[i, best]] {
                    best = j;
                }
            }
            best
        })
        .collect()
}
