//! Secrecy-outage estimators, the MGF bound chain, entropy-based volumes,
//! concentration bounds, and a greedy threshold search.
//!
//! The central object is an empirical distribution of secrecy rates Λ.
//! Outage is the tail event `Λ ≥ λ`; its probability is bounded by the
//! Chernoff step
//!
//! ```text
//! e^{tλ} · ℙr(Λ ≥ λ) ≤ E{e^{tΛ}}      (t > 0)
//! ```
//!
//! and the mean is bounded by `E{Λ} ≤ (E{e^{tΛ}} − 1)/t`. The "volume" of
//! a random variable is the exponential of its differential entropy, so a
//! uniform on `[0, c]` has volume `c` and a unit Gaussian has volume
//! `sqrt(2 pi e)`. Entropy is estimated either by m-spacings with a
//! digamma correction or by a Freedman-Diaconis histogram.

use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::scalar::{as_f64, digamma, r, Real};

#[derive(Debug, Error)]
pub enum VolumeError {
    #[error("sample set must be non-empty")]
    EmptySamples,
    #[error("samples must be finite")]
    NonFiniteSample,
    #[error("weights invalid: {0}")]
    BadWeights(String),
    #[error("sample vectors must have equal length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("samples must be positive for the ratio outage estimator")]
    NonPositiveSample,
    #[error("exponent parameter t must be positive, got {0}")]
    NonPositiveT(f64),
    #[error("moment-generating function overflowed: {0}")]
    MgfOverflow(String),
    #[error("estimator needs at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("the spacing estimator does not support weighted samples")]
    WeightedSpacing,
    #[error("need at least two batches")]
    TooFewBatches,
    #[error("thresholds must be strictly increasing and non-empty")]
    BadThresholds,
    #[error("requested {requested} thresholds but only {distinct} distinct grid points")]
    GridExhausted { requested: usize, distinct: usize },
    #[error("bound undefined: probability of the conditioning event is zero")]
    UndefinedBound,
    #[error("probability must lie in (0, 1], got {0}")]
    InvalidProbability(f64),
}

/// Empirical distribution of secrecy rates, optionally weighted.
#[derive(Debug, Clone)]
pub struct EmpiricalDistribution<T> {
    samples: Vec<T>,
    weights: Option<Vec<T>>,
}

impl<T: Real> EmpiricalDistribution<T> {
    pub fn new(samples: Vec<T>) -> Result<Self, VolumeError> {
        if samples.is_empty() {
            return Err(VolumeError::EmptySamples);
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(VolumeError::NonFiniteSample);
        }
        Ok(Self { samples, weights: None })
    }

    /// Weighted variant; weights must be non-negative and sum to 1 within 1e-12.
    pub fn with_weights(samples: Vec<T>, weights: Vec<T>) -> Result<Self, VolumeError> {
        let mut dist = Self::new(samples)?;
        if weights.len() != dist.samples.len() {
            return Err(VolumeError::BadWeights(format!(
                "{} weights for {} samples",
                weights.len(),
                dist.samples.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < T::zero()) {
            return Err(VolumeError::BadWeights("negative or non-finite weight".into()));
        }
        let total: T = weights.iter().copied().sum();
        if (as_f64(total) - 1.0).abs() > 1e-12 {
            return Err(VolumeError::BadWeights(format!("weights sum to {total}, not 1")));
        }
        dist.weights = Some(weights);
        Ok(dist)
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn weights(&self) -> Option<&[T]> {
        self.weights.as_deref()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false // the constructor rejects empty sample sets
    }

    /// Weight of sample `i`: uniform `1/n` unless explicit weights are set.
    fn weight(&self, i: usize) -> T {
        match &self.weights {
            Some(w) => w[i],
            None => T::one() / r(self.samples.len() as f64),
        }
    }

    /// Weighted mean of the samples.
    pub fn mean(&self) -> T {
        (0..self.len()).map(|i| self.weight(i) * self.samples[i]).sum()
    }

    fn sorted(&self) -> Vec<T> {
        let mut s = self.samples.clone();
        s.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
        s
    }
}

/// Strictly increasing set of secrecy thresholds Δ.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdSet<T> {
    thresholds: Vec<T>,
}

impl<T: Real> ThresholdSet<T> {
    pub fn new(thresholds: Vec<T>) -> Result<Self, VolumeError> {
        if thresholds.is_empty() || thresholds.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(VolumeError::BadThresholds);
        }
        Ok(Self { thresholds })
    }

    pub fn thresholds(&self) -> &[T] {
        &self.thresholds
    }

    pub fn len(&self) -> usize {
        self.thresholds.len()
    }

    pub fn is_empty(&self) -> bool {
        false // the constructor rejects empty threshold sets
    }
}

/// Outcome of a one-sided bound check: `holds ⇔ lhs ≤ rhs + tol`.
#[derive(Debug, Clone, Copy)]
pub struct BoundReport<T> {
    pub lhs: T,
    pub rhs: T,
    pub holds: bool,
    pub slack: T,
}

impl<T: Real> BoundReport<T> {
    pub fn new(lhs: T, rhs: T) -> Self {
        Self::with_tolerance(lhs, rhs, r(1e-9))
    }

    pub fn with_tolerance(lhs: T, rhs: T, tol: T) -> Self {
        Self { lhs, rhs, holds: lhs <= rhs + tol, slack: rhs - lhs }
    }
}

/// Tail probability `ℙr(Λ ≥ λ)` under the empirical distribution.
pub fn empirical_sop<T: Real>(dist: &EmpiricalDistribution<T>, lambda: T) -> T {
    let mut p = T::zero();
    for i in 0..dist.len() {
        if dist.samples[i] >= lambda {
            p += dist.weight(i);
        }
    }
    if p > T::one() {
        T::one()
    } else {
        p
    }
}

/// Classical outage estimator: fraction of draws with `snr_b/snr_e < 2^{r_s}`.
pub fn traditional_sop<T: Real>(
    snr_b: &[T],
    snr_e: &[T],
    r_s: T,
) -> Result<T, VolumeError> {
    if snr_b.len() != snr_e.len() {
        return Err(VolumeError::LengthMismatch(snr_b.len(), snr_e.len()));
    }
    if snr_b.is_empty() {
        return Err(VolumeError::EmptySamples);
    }
    if snr_b.iter().chain(snr_e.iter()).any(|v| !(*v > T::zero()) || !v.is_finite()) {
        return Err(VolumeError::NonPositiveSample);
    }
    let gate = r::<T>(2.0).powf(r_s);
    let hits = snr_b
        .iter()
        .zip(snr_e.iter())
        .filter(|(b, e)| **b / **e < gate)
        .count();
    Ok(r::<T>(hits as f64) / r(snr_b.len() as f64))
}

/// Empirical moment-generating function `E{e^{tΛ}}`.
pub fn mgf<T: Real>(dist: &EmpiricalDistribution<T>, t: T) -> Result<T, VolumeError> {
    if !t.is_finite() {
        return Err(VolumeError::NonPositiveT(as_f64(t)));
    }
    let mut acc = T::zero();
    for i in 0..dist.len() {
        let term = dist.weight(i) * (t * dist.samples[i]).exp();
        if !term.is_finite() {
            return Err(VolumeError::MgfOverflow(format!(
                "e^(t lambda) diverged at t = {t}, lambda = {}",
                dist.samples[i]
            )));
        }
        acc += term;
    }
    if !acc.is_finite() {
        return Err(VolumeError::MgfOverflow(format!("sum diverged at t = {t}")));
    }
    Ok(acc)
}

/// Mean bound `E{Λ} ≤ (E{e^{tΛ}} − 1) / t` for `t > 0`.
///
/// For non-negative samples the bound is an exact consequence of
/// `1 + tx ≤ e^{tx}`, so `holds` is true whenever the MGF is finite.
pub fn mgf_mean_bound<T: Real>(
    dist: &EmpiricalDistribution<T>,
    t: T,
) -> Result<BoundReport<T>, VolumeError> {
    if !(t > T::zero()) {
        return Err(VolumeError::NonPositiveT(as_f64(t)));
    }
    let rhs = (mgf(dist, t)? - T::one()) / t;
    Ok(BoundReport::new(dist.mean(), rhs))
}

/// Chernoff step `e^{tλ} · ℙr(Λ ≥ λ) ≤ E{e^{tΛ}}`, reported with its gap.
///
/// Holds term by term: each sample contributes `e^{tλ}·1[λᵢ ≥ λ] ≤ e^{tλᵢ}`.
pub fn chernoff_relation<T: Real>(
    dist: &EmpiricalDistribution<T>,
    t: T,
    lambda: T,
) -> Result<BoundReport<T>, VolumeError> {
    if !(t > T::zero()) {
        return Err(VolumeError::NonPositiveT(as_f64(t)));
    }
    let rhs = mgf(dist, t)?;
    let scale = (t * lambda).exp();
    let lhs = scale * empirical_sop(dist, lambda);
    if !lhs.is_finite() {
        return Err(VolumeError::MgfOverflow(format!("e^(t lambda) diverged at lambda = {lambda}")));
    }
    Ok(BoundReport::new(lhs, rhs))
}

/// Which differential-entropy estimator backs a volume.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VolumeEstimator {
    /// m-spacing estimator, `m = ceil(sqrt(N))`, with digamma bias correction.
    Spacing,
    /// Plug-in histogram with Freedman-Diaconis bin width.
    Histogram,
}

/// Differential entropy (nats) and its exponential.
#[derive(Debug, Clone, Copy)]
pub struct VolumeEstimate<T> {
    pub entropy: T,
    pub volume: T,
    pub estimator: VolumeEstimator,
}

/// Estimates `Vol{Λ} = exp(H{Λ})` from samples.
///
/// The spacing estimator is
///
/// ```text
/// H = mean_{i=1..N−m} ln(x_(i+m) − x_(i)) + ψ(N+1) − ψ(m)
/// ```
///
/// which is exactly unbiased for the uniform distribution, since uniform
/// m-spacings are Beta(m, N+1−m) and E{ln Beta} = ψ(m) − ψ(N+1). The
/// histogram estimator uses `H = −Σ pₖ ln pₖ + ln h` with the
/// Freedman-Diaconis width `h = 2·IQR·N^{−1/3}`.
///
/// A degenerate (all-equal) sample set has entropy −∞ and volume 0.
pub fn volume_of<T: Real>(
    dist: &EmpiricalDistribution<T>,
    estimator: VolumeEstimator,
) -> Result<VolumeEstimate<T>, VolumeError> {
    let est = entropy_with_se(dist, estimator)?;
    Ok(VolumeEstimate { entropy: est.entropy, volume: est.entropy.exp(), estimator })
}

struct EntropyEstimate<T> {
    entropy: T,
    /// Monte Carlo standard error of the entropy estimate.
    se: T,
}

fn entropy_with_se<T: Real>(
    dist: &EmpiricalDistribution<T>,
    estimator: VolumeEstimator,
) -> Result<EntropyEstimate<T>, VolumeError> {
    match estimator {
        VolumeEstimator::Spacing => spacing_entropy(dist),
        VolumeEstimator::Histogram => histogram_entropy(dist),
    }
}

fn spacing_entropy<T: Real>(dist: &EmpiricalDistribution<T>) -> Result<EntropyEstimate<T>, VolumeError> {
    if dist.weights.is_some() {
        return Err(VolumeError::WeightedSpacing);
    }
    let n = dist.len();
    if n < 32 {
        return Err(VolumeError::TooFewSamples { needed: 32, got: n });
    }
    let m = (n as f64).sqrt().ceil() as usize;
    let sorted = dist.sorted();
    let terms = n - m;
    let mut acc = T::zero();
    let mut acc_sq = T::zero();
    for i in 0..terms {
        let gap = sorted[i + m] - sorted[i];
        if gap <= T::zero() {
            // a tied m-spacing pins the density estimate at an atom
            return Ok(EntropyEstimate { entropy: T::neg_infinity(), se: T::zero() });
        }
        let lg = gap.ln();
        acc += lg;
        acc_sq += lg * lg;
    }
    let count = r::<T>(terms as f64);
    let mean = acc / count;
    let var = (acc_sq / count - mean * mean).max(T::zero());
    // adjacent m-spacings overlap over a window of m samples, so the
    // effective number of independent terms is about (n - m) / m
    let se = (var * r::<T>(m as f64) / count).sqrt();
    let entropy = mean + r(digamma((n + 1) as f64) - digamma(m as f64));
    Ok(EntropyEstimate { entropy, se })
}

fn histogram_entropy<T: Real>(dist: &EmpiricalDistribution<T>) -> Result<EntropyEstimate<T>, VolumeError> {
    let n = dist.len();
    if n < 2 {
        return Err(VolumeError::TooFewSamples { needed: 2, got: n });
    }
    let q1 = weighted_quantile(dist, 0.25);
    let q3 = weighted_quantile(dist, 0.75);
    let iqr = q3 - q1;
    let sorted = dist.sorted();
    let lo = sorted[0];
    let hi = sorted[n - 1];
    if hi <= lo || iqr <= T::zero() {
        return Ok(EntropyEstimate { entropy: T::neg_infinity(), se: T::zero() });
    }
    let width = r::<T>(2.0) * iqr / r((n as f64).cbrt());
    let bins = as_f64((hi - lo) / width).ceil().max(1.0) as usize;
    let width = (hi - lo) / r(bins as f64);
    let mut mass = vec![T::zero(); bins];
    for i in 0..n {
        let mut k = as_f64((dist.samples[i] - lo) / width).floor() as usize;
        if k >= bins {
            k = bins - 1;
        }
        mass[k] += dist.weight(i);
    }
    let mut h = T::zero();
    let mut second = T::zero();
    for p in mass {
        if p > T::zero() {
            h -= p * p.ln();
            second += p * p.ln() * p.ln();
        }
    }
    // plug-in variance of -E[ln p] over the bin draw
    let se = ((second - h * h).max(T::zero()) / r(n as f64)).sqrt();
    Ok(EntropyEstimate { entropy: h + width.ln(), se })
}

fn weighted_quantile<T: Real>(dist: &EmpiricalDistribution<T>, q: f64) -> T {
    let mut order: Vec<usize> = (0..dist.len()).collect();
    order.sort_by(|&a, &b| dist.samples[a].partial_cmp(&dist.samples[b]).expect("finite"));
    let target = r::<T>(q);
    let mut acc = T::zero();
    for &i in &order {
        acc += dist.weight(i);
        if acc >= target {
            return dist.samples[i];
        }
    }
    dist.samples[*order.last().expect("non-empty")]
}

/// Mixture comparison of entropic volumes across sample batches:
/// `lhs` is the volume of the pooled batch union, `rhs` the mean of the
/// per-batch volumes. Entropy is concave, so pooling batches with a
/// common scale can only add mixing entropy and the report holds with
/// `lhs ≥ rhs` for same-scale batches.
pub fn vitale_check<T: Real>(
    batches: &[Vec<T>],
    estimator: VolumeEstimator,
) -> Result<BoundReport<T>, VolumeError> {
    if batches.len() < 2 {
        return Err(VolumeError::TooFewBatches);
    }
    let mut pooled = Vec::new();
    let mut mean_vol = T::zero();
    let mut mean_var = T::zero();
    for batch in batches {
        let dist = EmpiricalDistribution::new(batch.clone())?;
        let est = entropy_with_se(&dist, estimator)?;
        let vol = est.entropy.exp();
        mean_vol += vol;
        let sv = vol * est.se; // delta method: SE(e^H) = e^H SE(H)
        mean_var += sv * sv;
        pooled.extend_from_slice(batch);
    }
    let k = r::<T>(batches.len() as f64);
    mean_vol /= k;
    mean_var /= k * k;
    let mixture = entropy_with_se(&EmpiricalDistribution::new(pooled)?, estimator)?;
    let mix_vol = mixture.entropy.exp();
    let mix_se = mix_vol * mixture.se;
    // mean of per-batch volumes ≤ mixture volume is the claim, within
    // three Monte Carlo standard errors of the two estimates
    let tol = r::<T>(1e-9) + r::<T>(3.0) * (mean_var + mix_se * mix_se).sqrt();
    Ok(BoundReport::with_tolerance(mean_vol, mix_vol, tol))
}

/// Both readings of the threshold objective plus their comparison.
#[derive(Debug, Clone)]
pub struct DualObjective<T> {
    /// `Σ_{λ∈Δ} e^{tλ} · ℙr(Λ ≥ λ)`.
    pub product_form: T,
    /// Trapezoid integrals of `e^{tλ}` and `ℙr(Λ ≥ λ)` over Δ's span;
    /// absent when Δ has fewer than two points.
    pub sum_form: Option<T>,
    /// Largest single product term against the sum form.
    pub report: Option<BoundReport<T>>,
}

/// Evaluates the product-form objective over Δ and, when Δ spans an
/// interval, the dual sum form (an integral pair over the same span).
pub fn dual_objective<T: Real>(
    dist: &EmpiricalDistribution<T>,
    delta: &ThresholdSet<T>,
    t: T,
) -> Result<DualObjective<T>, VolumeError> {
    if !(t > T::zero()) {
        return Err(VolumeError::NonPositiveT(as_f64(t)));
    }
    let lambdas = delta.thresholds();
    let mut product_form = T::zero();
    let mut max_term = T::neg_infinity();
    let mut exps = Vec::with_capacity(lambdas.len());
    let mut tails = Vec::with_capacity(lambdas.len());
    for &lam in lambdas {
        let e = (t * lam).exp();
        if !e.is_finite() {
            return Err(VolumeError::MgfOverflow(format!("e^(t lambda) diverged at lambda = {lam}")));
        }
        let p = empirical_sop(dist, lam);
        let term = e * p;
        product_form += term;
        if term > max_term {
            max_term = term;
        }
        exps.push(e);
        tails.push(p);
    }
    if lambdas.len() < 2 {
        return Ok(DualObjective { product_form, sum_form: None, report: None });
    }
    let mut sum_form = T::zero();
    for w in 0..(lambdas.len() - 1) {
        let dx = lambdas[w + 1] - lambdas[w];
        let half = r::<T>(0.5);
        sum_form += half * dx * (exps[w] + exps[w + 1]);
        sum_form += half * dx * (tails[w] + tails[w + 1]);
    }
    let report = BoundReport::new(max_term, sum_form);
    Ok(DualObjective { product_form, sum_form: Some(sum_form), report: Some(report) })
}

/// Concentration bound `1 − e^{−ρ²}/p` with `p = ℙr(Λ ≥ 0)`, clamped to [0, 1].
pub fn talagrand_bound<T: Real>(
    dist: &EmpiricalDistribution<T>,
    rho: T,
) -> Result<T, VolumeError> {
    if rho < T::zero() {
        return Err(VolumeError::InvalidProbability(as_f64(rho)));
    }
    let p = empirical_sop(dist, T::zero());
    if !(p > T::zero()) {
        return Err(VolumeError::UndefinedBound);
    }
    let raw = T::one() - (-(rho * rho)).exp() / p;
    Ok(raw.max(T::zero()).min(T::one()))
}

/// Convex-side outage bound `e^{−ρ²}/p` for a given positive-secrecy
/// probability `p ∈ (0, 1]`.
pub fn sop_convex_bound<T: Real>(rho: T, p: T) -> Result<T, VolumeError> {
    if !(p > T::zero()) || p > T::one() {
        return Err(VolumeError::InvalidProbability(as_f64(p)));
    }
    Ok((-(rho * rho)).exp() / p)
}

/// Objective used by the greedy threshold search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchObjective {
    /// `Σ_{λ∈Δ} e^{tλ}·ℙr(Λ ≥ λ)` at t = 1: the product-form expected volume.
    ExpectedVolume,
    /// `Σ_{λ∈Δ} h(ℙr(Λ ≥ λ))` with `h` the Bernoulli entropy of the
    /// outage indicator; maximal where the tail probability is nearest 1/2.
    SopVolumeProxy,
}

/// Progress record for one greedy search run.
#[derive(Debug, Clone, Default)]
pub struct SearchTrace {
    /// Total objective evaluations performed.
    pub evaluations: usize,
    /// Accepted strict improvements.
    pub improvements: usize,
    /// Full coordinate sweeps executed.
    pub sweeps: usize,
    /// Objective value after initialization and after each accepted move.
    pub objective_history: Vec<f64>,
    /// Cumulative evaluation count at initialization and at each accepted
    /// move; aligned with `objective_history`.
    pub evaluation_history: Vec<usize>,
}

fn bernoulli_entropy<T: Real>(p: T) -> T {
    let mut h = T::zero();
    if p > T::zero() {
        h -= p * p.ln();
    }
    let q = T::one() - p;
    if q > T::zero() {
        h -= q * q.ln();
    }
    h
}

fn objective_term<T: Real>(
    dist: &EmpiricalDistribution<T>,
    objective: SearchObjective,
    lambda: T,
) -> T {
    let p = empirical_sop(dist, lambda);
    match objective {
        SearchObjective::ExpectedVolume => lambda.exp() * p,
        SearchObjective::SopVolumeProxy => bernoulli_entropy(p),
    }
}

/// Candidate grid for the search: 64 sample quantiles, deduplicated.
pub fn quantile_grid<T: Real>(dist: &EmpiricalDistribution<T>) -> Vec<T> {
    let sorted = dist.sorted();
    let n = sorted.len();
    let mut grid = Vec::with_capacity(64);
    for k in 0..64 {
        let level = (k as f64 + 0.5) / 64.0;
        let idx = ((level * n as f64).floor() as usize).min(n - 1);
        grid.push(sorted[idx]);
    }
    grid.dedup_by(|a, b| a == b);
    grid
}

/// Greedy coordinate ascent over the quantile grid.
///
/// Starting from the `n` smallest grid points, each sweep tries to move one
/// threshold at a time to any unused grid point and accepts only strict
/// improvements of the total objective, breaking ties toward the smallest
/// threshold value. Both objectives are sums of per-threshold terms, so the
/// ascent reaches the exhaustive optimum (the top-n grid points by term).
pub fn greedy_threshold_search<T: Real>(
    dist: &EmpiricalDistribution<T>,
    n: usize,
    objective: SearchObjective,
) -> Result<ThresholdSet<T>, VolumeError> {
    greedy_threshold_search_traced(dist, n, objective).map(|(set, _)| set)
}

/// As [`greedy_threshold_search`], but also reports the evaluation trace.
pub fn greedy_threshold_search_traced<T: Real>(
    dist: &EmpiricalDistribution<T>,
    n: usize,
    objective: SearchObjective,
) -> Result<(ThresholdSet<T>, SearchTrace), VolumeError> {
    if n == 0 {
        return Err(VolumeError::BadThresholds);
    }
    let grid = quantile_grid(dist);
    if n > grid.len() {
        return Err(VolumeError::GridExhausted { requested: n, distinct: grid.len() });
    }
    let mut trace = SearchTrace::default();
    // term values are reused across sweeps; count one evaluation per grid point
    let terms: Vec<T> = grid
        .iter()
        .map(|&g| {
            trace.evaluations += 1;
            objective_term(dist, objective, g)
        })
        .collect();

    // grid indices currently selected, kept sorted ascending
    let mut chosen: Vec<usize> = (0..n).collect();
    let total = |sel: &[usize]| -> T { sel.iter().map(|&i| terms[i]).sum() };
    let mut best = total(&chosen);
    trace.objective_history.push(as_f64(best));
    trace.evaluation_history.push(trace.evaluations);

    let max_sweeps = 64;
    for _ in 0..max_sweeps {
        trace.sweeps += 1;
        let mut improved = false;
        for pos in 0..n {
            let mut best_move: Option<(usize, T)> = None;
            for cand in 0..grid.len() {
                if chosen.contains(&cand) {
                    continue;
                }
                let gain = terms[cand] - terms[chosen[pos]];
                trace.evaluations += 1;
                let better = match best_move {
                    None => gain > T::zero(),
                    // strict gain first; toward the smaller threshold on ties
                    Some((bi, bg)) => gain > bg || (gain == bg && grid[cand] < grid[bi]),
                };
                if better && gain > T::zero() {
                    best_move = Some((cand, gain));
                }
            }
            if let Some((cand, _)) = best_move {
                chosen[pos] = cand;
                chosen.sort_unstable();
                best = total(&chosen);
                trace.improvements += 1;
                trace.objective_history.push(as_f64(best));
                trace.evaluation_history.push(trace.evaluations);
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    let thresholds: Vec<T> = chosen.iter().map(|&i| grid[i]).collect();
    Ok((ThresholdSet::new(thresholds)?, trace))
}

/// Draws `n` standard-normal samples (test and experiment helper).
pub fn gaussian_samples<T: Real>(n: usize, seed: u64) -> Vec<T> {
    let mut rng = crate::rng::seeded(seed);
    (0..n)
        .map(|_| {
            let v: f64 = StandardNormal.sample(&mut rng);
            r(v)
        })
        .collect()
}

/// Draws `n` unit-rate exponential samples (test and experiment helper).
pub fn exponential_samples<T: Real>(n: usize, seed: u64) -> Vec<T> {
    use rand::Rng;
    let mut rng = crate::rng::seeded(seed);
    (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            r(-(1.0 - u).ln())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn dist(vals: &[f64]) -> EmpiricalDistribution<f64> {
        EmpiricalDistribution::new(vals.to_vec()).unwrap()
    }

    #[test]
    fn sop_counts_the_tail() {
        let d = dist(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(empirical_sop(&d, 2.5), 0.5);
        assert_eq!(empirical_sop(&d, 0.5), 1.0);
        assert_eq!(empirical_sop(&d, 4.5), 0.0);
    }

    #[test]
    fn sop_respects_weights() {
        let d = EmpiricalDistribution::with_weights(
            vec![1.0f64, 2.0, 3.0, 4.0],
            vec![0.1, 0.2, 0.3, 0.4],
        )
        .unwrap();
        assert!((empirical_sop(&d, 2.5) - 0.7).abs() < 1e-15);
    }

    #[test]
    fn sop_is_non_increasing() {
        let samples = exponential_samples::<f64>(200, 5);
        let d = EmpiricalDistribution::new(samples).unwrap();
        let mut prev = 1.0;
        for k in 0..100 {
            let p = empirical_sop(&d, 0.1 * k as f64);
            assert!(p <= prev + 1e-15);
            assert!((0.0..=1.0).contains(&p));
            prev = p;
        }
    }

    #[test]
    fn bad_distributions_are_rejected() {
        assert!(matches!(
            EmpiricalDistribution::<f64>::new(vec![]),
            Err(VolumeError::EmptySamples)
        ));
        assert!(EmpiricalDistribution::new(vec![1.0, f64::NAN]).is_err());
        assert!(EmpiricalDistribution::with_weights(vec![1.0, 2.0], vec![0.5, 0.6]).is_err());
        assert!(EmpiricalDistribution::with_weights(vec![1.0, 2.0], vec![-0.2, 1.2]).is_err());
    }

    #[test]
    fn ratio_outage_against_the_rate_gate() {
        let ones = [1.0f64; 4];
        assert_eq!(traditional_sop(&[4.0, 4.0, 4.0, 4.0], &ones, 1.0).unwrap(), 0.0);
        assert_eq!(traditional_sop(&ones, &ones, 1.0).unwrap(), 1.0);
        // ratios {1,3,5,9} against 2^2 = 4: two fall below
        assert_eq!(traditional_sop(&[1.0, 3.0, 5.0, 9.0], &ones, 2.0).unwrap(), 0.5);
        assert!(traditional_sop(&[1.0, 2.0], &[1.0], 1.0).is_err());
        assert!(traditional_sop(&[1.0, -2.0], &[1.0, 1.0], 1.0).is_err());
    }

    #[test]
    fn mgf_matches_closed_forms() {
        let c = dist(&[1.0; 8]);
        assert!((mgf(&c, 0.5).unwrap() - 0.5f64.exp()).abs() < 1e-12);
        assert!((mgf(&c, 0.0).unwrap() - 1.0).abs() < 1e-15);
        // unit exponential: E e^{tX} = 1/(1−t); heavy tail, loose tolerance
        let e = EmpiricalDistribution::new(exponential_samples::<f64>(20000, 11)).unwrap();
        assert!((mgf(&e, 0.5).unwrap() - 2.0).abs() < 0.15);
    }

    #[test]
    fn mgf_overflow_is_an_error() {
        let d = dist(&[1e4]);
        assert!(matches!(mgf(&d, 1e3), Err(VolumeError::MgfOverflow(_))));
    }

    #[test]
    fn mean_bound_on_the_exponential() {
        let e = EmpiricalDistribution::new(exponential_samples::<f64>(20000, 13)).unwrap();
        let rep = mgf_mean_bound(&e, 0.5).unwrap();
        assert!((rep.lhs - 1.0).abs() < 0.05);
        assert!((rep.rhs - 2.0).abs() < 0.3);
        assert!(rep.holds);
    }

    #[test]
    fn mean_bound_edge_cases() {
        let zero = dist(&[0.0; 4]);
        let rep = mgf_mean_bound(&zero, 1.0).unwrap();
        assert_eq!(rep.lhs, 0.0);
        assert_eq!(rep.rhs, 0.0);
        assert!(rep.holds);
        assert!(mgf_mean_bound(&zero, 0.0).is_err());
        assert!(mgf_mean_bound(&zero, -1.0).is_err());
    }

    #[test]
    fn mean_bound_tightens_as_t_vanishes() {
        // constant c: rhs − lhs = (e^{tc} − 1 − tc)/t ≤ t c² for tc ≤ 1.79
        let c = 2.0;
        let d = dist(&[c; 6]);
        for &t in &[1e-2, 1e-4, 1e-6] {
            let rep = mgf_mean_bound(&d, t).unwrap();
            assert!(rep.holds);
            assert!(rep.slack >= 0.0);
            assert!(rep.slack <= t * c * c);
        }
    }

    #[test]
    fn chernoff_step_on_closed_forms() {
        let c = dist(&[2.0; 8]);
        let rep = chernoff_relation(&c, 0.7, 1.0).unwrap();
        assert!((rep.lhs - 0.7f64.exp()).abs() < 1e-12);
        assert!((rep.rhs - 1.4f64.exp()).abs() < 1e-12);
        assert!(rep.holds);

        let e = EmpiricalDistribution::new(exponential_samples::<f64>(20000, 17)).unwrap();
        let rep = chernoff_relation(&e, 0.5, 1.0).unwrap();
        // e^{0.5}·P(X ≥ 1) ≈ e^{0.5}e^{−1} ≈ 0.6065
        assert!((rep.lhs - 0.6065).abs() < 0.03);
        assert!(rep.holds);

        let above = chernoff_relation(&c, 1.0, 5.0).unwrap();
        assert_eq!(above.lhs, 0.0);
        assert!(above.holds);
    }

    proptest! {
        #[test]
        fn chernoff_step_always_holds(
            samples in proptest::collection::vec(0.0f64..10.0, 1..60),
            t in 1e-3f64..5.0,
            lambda in -1.0f64..12.0,
        ) {
            let d = EmpiricalDistribution::new(samples).unwrap();
            let rep = chernoff_relation(&d, t, lambda).unwrap();
            prop_assert!(rep.holds);
        }

        #[test]
        fn mean_bound_always_holds_for_non_negative_samples(
            samples in proptest::collection::vec(0.0f64..8.0, 1..60),
            t in 1e-3f64..5.0,
        ) {
            let d = EmpiricalDistribution::new(samples).unwrap();
            let rep = mgf_mean_bound(&d, t).unwrap();
            prop_assert!(rep.holds);
        }
    }

    fn uniform_samples(n: usize, lo: f64, hi: f64, seed: u64) -> Vec<f64> {
        let mut rng = crate::rng::seeded(seed);
        (0..n).map(|_| lo + (hi - lo) * rng.random::<f64>()).collect()
    }

    #[test]
    fn unit_uniform_has_unit_volume() {
        let d = EmpiricalDistribution::new(uniform_samples(5000, 0.0, 1.0, 23)).unwrap();
        for est in [VolumeEstimator::Spacing, VolumeEstimator::Histogram] {
            let v = volume_of(&d, est).unwrap();
            assert!(v.entropy.abs() < 0.06, "{est:?} entropy {}", v.entropy);
            assert!((v.volume - 1.0).abs() < 0.06, "{est:?} volume {}", v.volume);
            assert!((v.volume - v.entropy.exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn gaussian_volume_matches_the_closed_form() {
        let d = EmpiricalDistribution::new(gaussian_samples::<f64>(8000, 29)).unwrap();
        let expect = 4.132731354122492; // sqrt(2 pi e)
        let v = volume_of(&d, VolumeEstimator::Spacing).unwrap();
        assert!((v.volume - expect).abs() < 0.05 * expect, "volume {}", v.volume);
        let h = volume_of(&d, VolumeEstimator::Histogram).unwrap();
        assert!((h.volume - expect).abs() < 0.05 * expect, "volume {}", h.volume);
    }

    #[test]
    fn doubled_uniform_doubles_the_volume() {
        let d = EmpiricalDistribution::new(uniform_samples(5000, 0.0, 2.0, 31)).unwrap();
        let v = volume_of(&d, VolumeEstimator::Spacing).unwrap();
        assert!((v.volume - 2.0).abs() < 0.1);
    }

    #[test]
    fn volume_is_scale_covariant() {
        let base = exponential_samples::<f64>(4000, 37);
        let scaled: Vec<f64> = base.iter().map(|x| 3.0 * x).collect();
        let v1 = volume_of(
            &EmpiricalDistribution::new(base).unwrap(),
            VolumeEstimator::Spacing,
        )
        .unwrap();
        let v3 = volume_of(
            &EmpiricalDistribution::new(scaled).unwrap(),
            VolumeEstimator::Spacing,
        )
        .unwrap();
        assert!((v3.volume / v1.volume - 3.0).abs() < 0.15);
    }

    #[test]
    fn degenerate_samples_have_zero_volume() {
        let d = dist(&[0.7; 64]);
        for est in [VolumeEstimator::Spacing, VolumeEstimator::Histogram] {
            let v = volume_of(&d, est).unwrap();
            assert_eq!(v.volume, 0.0);
            assert!(v.entropy.is_infinite() && v.entropy < 0.0);
        }
    }

    #[test]
    fn estimator_preconditions() {
        let small = dist(&[1.0, 2.0, 3.0]);
        assert!(matches!(
            volume_of(&small, VolumeEstimator::Spacing),
            Err(VolumeError::TooFewSamples { needed: 32, .. })
        ));
        let weighted = EmpiricalDistribution::with_weights(
            (0..40).map(|i| i as f64).collect(),
            vec![1.0 / 40.0; 40],
        )
        .unwrap();
        assert!(matches!(
            volume_of(&weighted, VolumeEstimator::Spacing),
            Err(VolumeError::WeightedSpacing)
        ));
        assert!(volume_of(&weighted, VolumeEstimator::Histogram).is_ok());
    }

    #[test]
    fn pooling_identical_batches_changes_nothing() {
        let batch = uniform_samples(2000, 0.0, 1.0, 41);
        let rep = vitale_check(&[batch.clone(), batch.clone()], VolumeEstimator::Spacing).unwrap();
        assert!(rep.slack.abs() < 0.01);
        assert!(rep.holds);
    }

    #[test]
    fn pooling_disjoint_uniforms_adds_mixing_entropy() {
        let a = uniform_samples(2000, 0.0, 1.0, 43);
        let b = uniform_samples(2000, 10.0, 11.0, 47);
        let rep = vitale_check(&[a, b], VolumeEstimator::Spacing).unwrap();
        // mixture of two disjoint unit uniforms: entropy ln 2 above a part,
        // plus a little extra from spacing windows straddling the gap
        assert!(rep.holds);
        assert!(rep.rhs > rep.lhs * 1.8);
        assert!((rep.rhs / rep.lhs - 2.0).abs() < 0.3, "ratio {}", rep.rhs / rep.lhs);
    }

    #[test]
    fn pooling_shifted_gaussians_holds() {
        let mut batches = Vec::new();
        for k in 0..4 {
            let mut batch = gaussian_samples::<f64>(2000, 100 + k);
            let shift = k as f64 * 1.5;
            for v in batch.iter_mut() {
                *v += shift;
            }
            batches.push(batch);
        }
        let rep = vitale_check(&batches, VolumeEstimator::Spacing).unwrap();
        assert!(rep.holds);
        assert!(rep.rhs >= rep.lhs);
    }

    #[test]
    fn vitale_needs_two_viable_batches() {
        assert!(matches!(
            vitale_check(&[vec![1.0, 2.0]], VolumeEstimator::Spacing),
            Err(VolumeError::TooFewBatches)
        ));
        let tiny = vec![vec![1.0, 2.0], vec![3.0, 4.0]];
        assert!(matches!(
            vitale_check(&tiny, VolumeEstimator::Spacing),
            Err(VolumeError::TooFewSamples { .. })
        ));
    }

    #[test]
    fn dual_objective_singletons() {
        let e = EmpiricalDistribution::new(exponential_samples::<f64>(500, 53)).unwrap();
        let zero = ThresholdSet::new(vec![0.0]).unwrap();
        let out = dual_objective(&e, &zero, 1.0).unwrap();
        assert!((out.product_form - 1.0).abs() < 1e-12);
        assert!(out.sum_form.is_none());

        let c = dist(&[2.0; 16]);
        let half = ThresholdSet::new(vec![1.0]).unwrap();
        let out = dual_objective(&c, &half, 0.8).unwrap();
        assert!((out.product_form - 0.8f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn dual_objective_on_a_grid_is_finite_and_stable() {
        let e = EmpiricalDistribution::new(exponential_samples::<f64>(4000, 59)).unwrap();
        let grid: Vec<f64> = (0..20).map(|k| 4.0 * k as f64 / 19.0).collect();
        let delta = ThresholdSet::new(grid).unwrap();
        let out = dual_objective(&e, &delta, 0.25).unwrap();
        let sum = out.sum_form.unwrap();
        assert!(out.product_form.is_finite() && sum.is_finite());
        // regression pins for this seed and grid
        assert!(
            (out.product_form - 6.608915492185697).abs() < 1e-9,
            "product {:.15}",
            out.product_form
        );
        assert!((sum - 7.868082256129734).abs() < 1e-9, "sum {sum:.15}");
        assert!(out.report.unwrap().holds);
    }

    #[test]
    fn concentration_bound_cases() {
        let pos = dist(&[0.5; 10]);
        assert_eq!(talagrand_bound(&pos, 0.0).unwrap(), 0.0);

        let mut vals = vec![0.5; 99];
        vals.push(-1.0);
        let d = dist(&vals);
        // raw value 1 − e^{−0.01}/0.99 ≈ −1.5e−4 clamps to zero
        assert_eq!(talagrand_bound(&d, 0.1).unwrap(), 0.0);
        assert!((talagrand_bound(&d, 100.0).unwrap() - 1.0).abs() < 1e-12);

        let neg = dist(&[-1.0, -2.0]);
        assert!(matches!(talagrand_bound(&neg, 1.0), Err(VolumeError::UndefinedBound)));
    }

    #[test]
    fn concentration_bound_is_monotone_in_rho() {
        let mut vals = vec![1.0; 3];
        vals.extend_from_slice(&[-1.0; 1]);
        let d = dist(&vals);
        let mut prev = -1.0;
        for k in 0..40 {
            let b = talagrand_bound(&d, 0.1 * k as f64).unwrap();
            assert!(b >= prev);
            prev = b;
        }
    }

    #[test]
    fn convex_bound_values() {
        assert_eq!(sop_convex_bound(0.0, 1.0).unwrap(), 1.0);
        let v = sop_convex_bound(0.2f64, 0.5).unwrap();
        assert!((v - 1.9215788783046464).abs() < 1e-12);
        assert!(sop_convex_bound(0.2, 0.0).is_err());
        assert!(sop_convex_bound(0.2, 1.5).is_err());
    }

    #[test]
    fn proxy_search_picks_the_median() {
        // symmetric triangle-ish sample set around 5
        let mut samples = Vec::new();
        for k in 0..101 {
            samples.push(5.0 + (k as f64 - 50.0) / 20.0);
        }
        let d = EmpiricalDistribution::new(samples).unwrap();
        let found = greedy_threshold_search(&d, 1, SearchObjective::SopVolumeProxy).unwrap();
        // exhaustive scan over the same grid as the independent oracle
        let grid = quantile_grid(&d);
        let best = grid
            .iter()
            .copied()
            .max_by(|a, b| {
                bernoulli_entropy(empirical_sop(&d, *a))
                    .partial_cmp(&bernoulli_entropy(empirical_sop(&d, *b)))
                    .unwrap()
            })
            .unwrap();
        assert_eq!(found.thresholds(), &[best]);
        assert!((best - 5.0).abs() <= 0.2);
    }

    #[test]
    fn constant_distribution_returns_the_single_grid_point() {
        let d = dist(&[3.0; 50]);
        for obj in [SearchObjective::ExpectedVolume, SearchObjective::SopVolumeProxy] {
            let found = greedy_threshold_search(&d, 1, obj).unwrap();
            assert_eq!(found.thresholds(), &[3.0]);
        }
        assert!(matches!(
            greedy_threshold_search(&d, 2, SearchObjective::ExpectedVolume),
            Err(VolumeError::GridExhausted { .. })
        ));
    }

    fn exhaustive_best(
        d: &EmpiricalDistribution<f64>,
        n: usize,
        objective: SearchObjective,
    ) -> Vec<f64> {
        let grid = quantile_grid(d);
        let mut best: Option<(f64, Vec<usize>)> = None;
        let mut idx: Vec<usize> = (0..n).collect();
        loop {
            let score: f64 = idx.iter().map(|&i| objective_term(d, objective, grid[i])).sum();
            let better = match &best {
                None => true,
                Some((s, sel)) => {
                    score > *s + 1e-15
                        || ((score - *s).abs() <= 1e-15
                            && idx.iter().map(|&i| grid[i]).collect::<Vec<_>>()
                                < sel.iter().map(|&i| grid[i]).collect::<Vec<_>>())
                }
            };
            if better {
                best = Some((score, idx.clone()));
            }
            // next n-combination of grid indices in lexicographic order
            let mut pos = n;
            loop {
                if pos == 0 {
                    let (_, sel) = best.unwrap();
                    return sel.into_iter().map(|i| grid[i]).collect();
                }
                pos -= 1;
                if idx[pos] + (n - pos) <= grid.len() - 1 + 0 {
                    if idx[pos] + 1 + (n - 1 - pos) <= grid.len() - 1 {
                        idx[pos] += 1;
                        for k in (pos + 1)..n {
                            idx[k] = idx[k - 1] + 1;
                        }
                        break;
                    }
                }
            }
        }
    }

    #[test]
    fn greedy_matches_exhaustive_search_on_small_grids() {
        let samples = vec![0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 6.5, 8.0, 10.0];
        let d = EmpiricalDistribution::new(samples).unwrap();
        assert!(quantile_grid(&d).len() <= 12);
        for obj in [SearchObjective::ExpectedVolume, SearchObjective::SopVolumeProxy] {
            for n in 1..=3 {
                let greedy = greedy_threshold_search(&d, n, obj).unwrap();
                let brute = exhaustive_best(&d, n, obj);
                assert_eq!(greedy.thresholds(), brute.as_slice(), "{obj:?} n={n}");
            }
        }
    }

    #[test]
    fn greedy_output_is_strictly_increasing_and_deterministic() {
        let d = EmpiricalDistribution::new(exponential_samples::<f64>(300, 61)).unwrap();
        let (a, trace) =
            greedy_threshold_search_traced(&d, 4, SearchObjective::ExpectedVolume).unwrap();
        let b = greedy_threshold_search(&d, 4, SearchObjective::ExpectedVolume).unwrap();
        assert_eq!(a, b);
        assert!(a.thresholds().windows(2).all(|w| w[0] < w[1]));
        assert!(trace.evaluations > 0);
        assert!(trace.sweeps >= 1);
        // history is the initial value plus one entry per improvement
        assert_eq!(trace.objective_history.len(), trace.improvements + 1);
        assert_eq!(trace.evaluation_history.len(), trace.objective_history.len());
        assert!(trace.evaluation_history.windows(2).all(|w| w[0] <= w[1]));
        let h = &trace.objective_history;
        assert!(h.windows(2).all(|w| w[1] > w[0]));
    }
}
