//! Element-wise bounded-parameter projection and random-projection
//! experiments: tail bounds for Johnson-Lindenstrauss style subspace
//! projections and projected-diameter checks against the Gaussian width.
//!
//! The projection operator guards a parameter matrix θ against leaving
//! the box `[θmin, θmax]`. Its margin function
//!
//! ```text
//! f(θ) = ((θ − θmin − η)(θ − θmax + η)) / ((θmax − θmin − η) η)
//! ```
//!
//! is negative strictly inside the soft box `[θmin+η, θmax−η]`, zero on
//! its boundary, and reaches 1 at the hard bounds. An update direction Θ
//! is attenuated to `Θ(1 − f)` only when it pushes outward (`Θ f' > 0`)
//! inside the margin band, which keeps the map continuous and never flips
//! the direction's sign.

use ndarray::Array2;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::linalg::orthonormalize_rows;
use crate::scalar::{as_f64, r, Real};

#[derive(Debug, Error)]
pub enum ProjectionError {
    #[error("invalid bounds: {0}")]
    BadBounds(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("tau2 must lie in (0, 1), got {0}")]
    BadTau(f64),
    #[error("subspace dimension k = {k} must satisfy 1 <= k < n = {n}")]
    BadSubspaceDim { k: usize, n: usize },
    #[error("need at least {needed} trials, got {got}")]
    TooFewTrials { needed: usize, got: usize },
    #[error("point set must be non-empty")]
    EmptyPointSet,
    #[error("points must share one ambient dimension")]
    MixedDimensions,
    #[error("projected dimension r2 = {r2} must satisfy 1 <= r2 < r1 = {r1}")]
    BadProjectedDim { r2: usize, r1: usize },
    #[error("failed to draw an orthonormal basis after {0} attempts")]
    DegenerateDraw(usize),
}

/// Box constraints with a soft margin η.
#[derive(Debug, Clone, Copy)]
pub struct ProjectionBounds<T> {
    theta_min: T,
    theta_max: T,
    eta: T,
}

impl<T: Real> ProjectionBounds<T> {
    pub fn new(theta_min: T, theta_max: T, eta: T) -> Result<Self, ProjectionError> {
        if !(theta_min < T::zero()) || !(theta_max > T::zero()) {
            return Err(ProjectionError::BadBounds(format!(
                "need theta_min < 0 < theta_max, got [{theta_min}, {theta_max}]"
            )));
        }
        if !(eta > T::zero()) {
            return Err(ProjectionError::BadBounds("eta must be positive".into()));
        }
        let half_span = (theta_max - theta_min) / r::<T>(2.0);
        if !(eta < half_span) || !(eta < theta_max) || !(eta < -theta_min) {
            return Err(ProjectionError::BadBounds(format!(
                "eta = {eta} too large for the box [{theta_min}, {theta_max}]"
            )));
        }
        Ok(Self { theta_min, theta_max, eta })
    }

    pub fn theta_min(&self) -> T {
        self.theta_min
    }

    pub fn theta_max(&self) -> T {
        self.theta_max
    }

    pub fn eta(&self) -> T {
        self.eta
    }
}

/// Margin function: 0 on the soft boundary, 1 at the hard bounds,
/// negative strictly inside.
pub fn f_margin<T: Real>(theta: T, bounds: &ProjectionBounds<T>) -> T {
    let lo = bounds.theta_min + bounds.eta;
    let hi = bounds.theta_max - bounds.eta;
    let denom = (bounds.theta_max - bounds.theta_min - bounds.eta) * bounds.eta;
    (theta - lo) * (theta - hi) / denom
}

/// Gradient of the margin function in θ.
pub fn f_margin_grad<T: Real>(theta: T, bounds: &ProjectionBounds<T>) -> T {
    let denom = (bounds.theta_max - bounds.theta_min - bounds.eta) * bounds.eta;
    (r::<T>(2.0) * theta - bounds.theta_min - bounds.theta_max) / denom
}

/// Element-wise projection of the update direction Θ at parameter θ:
/// attenuates to `Θ(1 − f(θ))` when the parameter sits in the margin band
/// (`f > 0`) and the update points further outward (`Θ f' > 0`).
pub fn proj<T: Real>(theta: T, big_theta: T, bounds: &ProjectionBounds<T>) -> T {
    let f = f_margin(theta, bounds);
    if f > T::zero() && big_theta * f_margin_grad(theta, bounds) > T::zero() {
        big_theta - big_theta * f
    } else {
        big_theta
    }
}

/// Parameter matrix and matching update direction.
#[derive(Debug, Clone)]
pub struct ProjectedPair<T> {
    pub theta: Array2<T>,
    pub big_theta: Array2<T>,
}

impl<T: Real> ProjectedPair<T> {
    pub fn new(theta: Array2<T>, big_theta: Array2<T>) -> Result<Self, ProjectionError> {
        if theta.dim() != big_theta.dim() {
            return Err(ProjectionError::ShapeMismatch(format!(
                "theta is {:?}, update is {:?}",
                theta.dim(),
                big_theta.dim()
            )));
        }
        Ok(Self { theta, big_theta })
    }
}

/// Bounds for a matrix projection: one box for all entries, or one per entry.
#[derive(Debug, Clone)]
pub enum BoundsField<T> {
    Uniform(ProjectionBounds<T>),
    PerEntry(Array2<ProjectionBounds<T>>),
}

impl<T: Real> BoundsField<T> {
    fn at(&self, i: usize, j: usize) -> &ProjectionBounds<T> {
        match self {
            BoundsField::Uniform(b) => b,
            BoundsField::PerEntry(m) => &m[[i, j]],
        }
    }
}

/// Applies [`proj`] entry by entry.
pub fn proj_matrix<T: Real>(
    pair: &ProjectedPair<T>,
    bounds: &BoundsField<T>,
) -> Result<Array2<T>, ProjectionError> {
    if let BoundsField::PerEntry(m) = bounds {
        if m.dim() != pair.theta.dim() {
            return Err(ProjectionError::ShapeMismatch(format!(
                "bounds are {:?}, parameters are {:?}",
                m.dim(),
                pair.theta.dim()
            )));
        }
    }
    let (rows, cols) = pair.theta.dim();
    Ok(Array2::from_shape_fn((rows, cols), |(i, j)| {
        proj(pair.theta[[i, j]], pair.big_theta[[i, j]], bounds.at(i, j))
    }))
}

/// Outcome of a subspace-projection tail experiment.
#[derive(Debug, Clone, Copy)]
pub struct TailBoundReport<T> {
    /// `k ‖vᵢ − vⱼ‖²`, the scaled squared distance named in the bound.
    pub tau1: T,
    pub tau2: T,
    pub empirical_freq: T,
    /// `exp(−k τ₂² / 4)`.
    pub analytic_bound: T,
    pub holds: bool,
}

fn standard_normal<T: Real>(rng: &mut rand_chacha::ChaCha8Rng) -> T {
    let v: f64 = StandardNormal.sample(rng);
    r(v)
}

/// Draws an orthonormal basis of a uniformly random k-dimensional subspace
/// of `R^n` (rows of the result).
fn random_subspace<T: Real>(
    k: usize,
    n: usize,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<Vec<Vec<T>>, ProjectionError> {
    let attempts = 8;
    for _ in 0..attempts {
        let mut rows: Vec<Vec<T>> =
            (0..k).map(|_| (0..n).map(|_| standard_normal(rng)).collect()).collect();
        if orthonormalize_rows(&mut rows) {
            return Ok(rows);
        }
    }
    Err(ProjectionError::DegenerateDraw(attempts))
}

/// Squared norm of the projection of `d`, rescaled by `n/k` so its mean
/// equals `‖d‖²`.
fn scaled_projection_sq<T: Real>(subspace: &[Vec<T>], d: &[T]) -> T {
    let k = subspace.len();
    let n = d.len();
    let mut sum = T::zero();
    for row in subspace {
        let mut dot = T::zero();
        for i in 0..n {
            dot += row[i] * d[i];
        }
        sum += dot * dot;
    }
    sum * r::<T>(n as f64 / k as f64)
}

/// Monte Carlo check of the projection tail bound
/// `ℙr(L ≤ (1−τ₂) ‖vᵢ−vⱼ‖²) ≤ exp(−k τ₂²/4)` for one point pair,
/// where `L` is the rescaled squared distance of the projections onto a
/// uniformly random k-dimensional subspace.
pub fn jl_tail_experiment<T: Real>(
    v_i: &[T],
    v_j: &[T],
    k: usize,
    tau2: T,
    trials: usize,
    seed: u64,
) -> Result<TailBoundReport<T>, ProjectionError> {
    let n = v_i.len();
    if v_j.len() != n {
        return Err(ProjectionError::MixedDimensions);
    }
    if k == 0 || k >= n {
        return Err(ProjectionError::BadSubspaceDim { k, n });
    }
    if !(tau2 > T::zero()) || !(tau2 < T::one()) {
        return Err(ProjectionError::BadTau(as_f64(tau2)));
    }
    if trials < 10_000 {
        return Err(ProjectionError::TooFewTrials { needed: 10_000, got: trials });
    }
    let d: Vec<T> = v_i.iter().zip(v_j.iter()).map(|(a, b)| *a - *b).collect();
    let dist_sq: T = d.iter().map(|x| *x * *x).sum();
    let mut rng = crate::rng::seeded(seed);
    let gate = (T::one() - tau2) * dist_sq;
    let mut hits = 0usize;
    for _ in 0..trials {
        let q = random_subspace::<T>(k, n, &mut rng)?;
        if scaled_projection_sq(&q, &d) <= gate {
            hits += 1;
        }
    }
    Ok(tail_report(k, tau2, dist_sq, hits, trials))
}

fn tail_report<T: Real>(k: usize, tau2: T, dist_sq: T, hits: usize, trials: usize) -> TailBoundReport<T> {
    let freq = r::<T>(hits as f64 / trials as f64);
    let bound = (-(r::<T>(k as f64) * tau2 * tau2) / r(4.0)).exp();
    let se = (freq * (T::one() - freq) / r(trials as f64)).sqrt();
    TailBoundReport {
        tau1: r::<T>(k as f64) * dist_sq,
        tau2,
        empirical_freq: freq,
        analytic_bound: bound,
        holds: freq <= bound + r::<T>(3.0) * se + r(1e-9),
    }
}

/// Tail experiments over a grid of `(k, τ₂)` pairs with one fixed unit
/// displacement per ambient dimension. Subspace draws are shared across
/// the τ₂ values of each `k`, so the grid costs one sweep per `k`.
pub fn jl_tail_grid<T: Real>(
    n: usize,
    ks: &[usize],
    tau2s: &[T],
    trials: usize,
    seed: u64,
) -> Result<Vec<TailBoundReport<T>>, ProjectionError> {
    if trials < 10_000 {
        return Err(ProjectionError::TooFewTrials { needed: 10_000, got: trials });
    }
    // fixed displacement: the uniform unit vector; rotation invariance of
    // the subspace law makes the direction immaterial
    let d: Vec<T> = (0..n).map(|_| r::<T>(1.0 / (n as f64).sqrt())).collect();
    let dist_sq = T::one();
    let mut out = Vec::with_capacity(ks.len() * tau2s.len());
    for (ki, &k) in ks.iter().enumerate() {
        if k == 0 || k >= n {
            return Err(ProjectionError::BadSubspaceDim { k, n });
        }
        for &tau2 in tau2s {
            if !(tau2 > T::zero()) || !(tau2 < T::one()) {
                return Err(ProjectionError::BadTau(as_f64(tau2)));
            }
        }
        let mut rng = crate::rng::stream(seed, ki as u64);
        let mut hits = vec![0usize; tau2s.len()];
        for _ in 0..trials {
            let q = random_subspace::<T>(k, n, &mut rng)?;
            let l = scaled_projection_sq(&q, &d);
            for (ti, &tau2) in tau2s.iter().enumerate() {
                if l <= (T::one() - tau2) * dist_sq {
                    hits[ti] += 1;
                }
            }
        }
        for (ti, &tau2) in tau2s.iter().enumerate() {
            out.push(tail_report(k, tau2, dist_sq, hits[ti], trials));
        }
    }
    Ok(out)
}

/// Monte Carlo Gaussian width `E sup_{x ∈ points} ⟨x, g⟩`, clamped at 0.
pub fn gaussian_width<T: Real>(
    points: &[Vec<T>],
    draws: usize,
    seed: u64,
) -> Result<T, ProjectionError> {
    let dim = validate_points(points)?;
    let mut rng = crate::rng::seeded(seed);
    let mut acc = T::zero();
    for _ in 0..draws {
        let g: Vec<T> = (0..dim).map(|_| standard_normal(&mut rng)).collect();
        let mut sup = T::neg_infinity();
        for p in points {
            let mut dot = T::zero();
            for i in 0..dim {
                dot += p[i] * g[i];
            }
            if dot > sup {
                sup = dot;
            }
        }
        acc += sup;
    }
    Ok((acc / r(draws as f64)).max(T::zero()))
}

fn validate_points<T: Real>(points: &[Vec<T>]) -> Result<usize, ProjectionError> {
    let dim = points.first().ok_or(ProjectionError::EmptyPointSet)?.len();
    if dim == 0 || points.iter().any(|p| p.len() != dim) {
        return Err(ProjectionError::MixedDimensions);
    }
    Ok(dim)
}

fn diameter<T: Real>(points: &[Vec<T>]) -> T {
    let mut best = T::zero();
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let mut d = T::zero();
            for (a, b) in points[i].iter().zip(points[j].iter()) {
                let x = *a - *b;
                d += x * x;
            }
            let d = d.sqrt();
            if d > best {
                best = d;
            }
        }
    }
    best
}

/// Result of the projected-diameter experiment.
#[derive(Debug, Clone, Copy)]
pub struct DiameterReport<T> {
    /// Monte Carlo Gaussian width of the point set.
    pub width: T,
    pub ambient_diameter: T,
    /// Fraction of trials with `diam(Q·points) ≤ c0 (width + √(r2/r1) diam)`.
    pub holds_frequency: T,
    /// The target `1 − 2 e^{−r2}`.
    pub required_frequency: T,
    pub holds: bool,
}

/// Checks how often a random r2-dimensional projection keeps the set's
/// diameter below `c0 (w(points) + √(r2/r1) diam(points))`.
pub fn projected_diameter_check<T: Real>(
    points: &[Vec<T>],
    r2: usize,
    trials: usize,
    c0: T,
    seed: u64,
) -> Result<DiameterReport<T>, ProjectionError> {
    let r1 = validate_points(points)?;
    if r2 == 0 || r2 >= r1 {
        return Err(ProjectionError::BadProjectedDim { r2, r1 });
    }
    let width = gaussian_width(points, 10_000, seed ^ 0x9e37_79b9_7f4a_7c15)?;
    let diam = diameter(points);
    let rhs = c0 * (width + r::<T>((r2 as f64 / r1 as f64).sqrt()) * diam);
    let mut rng = crate::rng::seeded(seed);
    let mut hits = 0usize;
    for _ in 0..trials {
        let q = random_subspace::<T>(r2, r1, &mut rng)?;
        let projected: Vec<Vec<T>> = points
            .iter()
            .map(|p| {
                q.iter()
                    .map(|row| {
                        let mut dot = T::zero();
                        for i in 0..r1 {
                            dot += row[i] * p[i];
                        }
                        dot
                    })
                    .collect()
            })
            .collect();
        if diameter(&projected) <= rhs {
            hits += 1;
        }
    }
    let freq = r::<T>(hits as f64 / trials as f64);
    let required = T::one() - r::<T>(2.0) * (-r::<T>(r2 as f64)).exp();
    let se = (freq * (T::one() - freq) / r(trials as f64)).sqrt();
    Ok(DiameterReport {
        width,
        ambient_diameter: diam,
        holds_frequency: freq,
        required_frequency: required,
        holds: freq + r::<T>(3.0) * se + r(1e-9) >= required,
    })
}
