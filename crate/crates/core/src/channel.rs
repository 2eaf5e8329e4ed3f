//! Wiretap channel geometry, fading, secrecy-rate sampling, and the linear
//! plant dynamics whose outputs the two receivers observe.
//!
//! The layout is a three-node network: a transmitter (Alice), the intended
//! receiver (Bob), and an eavesdropper (Eve) sitting at distance `d` below
//! the origin. Large-scale attenuation follows a path-loss power law
//! `D^{-eps}`, small-scale fading is Rayleigh: matrix entries are circular
//! complex Gaussians with variance `1/size` before path-loss scaling.
//!
//! The secrecy rate of a draw is
//!
//! ```text
//! lambda = max(0, log2((1 + snr_b) / (1 + snr_e)))
//! ```
//!
//! with per-draw effective SNRs built from the fading gain of each link.
//! [`sample_secrecy`] turns this into i.i.d. sample sets for the bound
//! machinery in [`crate::volume`].

use ndarray::{Array1, Array2};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::linalg;
use crate::scalar::{r, Real};
use crate::C;

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),
    #[error("non-positive parameter: {0}")]
    NonPositiveParameter(String),
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("SNR must be non-negative, got {0}")]
    NegativeSnr(f64),
    #[error("link budget produced a non-finite SNR ({0})")]
    NonFiniteSnr(String),
    #[error("eigenvalue computation failed: {0}")]
    Eigen(#[from] linalg::LinalgError),
}

/// Positions of the three nodes plus the path-loss exponent.
///
/// The default layout puts Alice at `(-50, 0, 0)`, Bob at `(0, 50*sqrt(3), 0)`
/// and Eve at `(0, -d, 0)`, so `D_AB = 100` and `D_AE = sqrt(50^2 + d^2)`.
#[derive(Debug, Clone)]
pub struct NetworkGeometry<T> {
    pub alice: [T; 3],
    pub bob: [T; 3],
    pub eve_offset_d: T,
    pub path_loss_exponent: T,
}

impl<T: Real> NetworkGeometry<T> {
    pub fn new(
        alice: [T; 3],
        bob: [T; 3],
        eve_offset_d: T,
        path_loss_exponent: T,
    ) -> Result<Self, ChannelError> {
        if !(eve_offset_d > T::zero()) {
            return Err(ChannelError::NonPositiveParameter(
                "eve offset d must be positive".into(),
            ));
        }
        if !(path_loss_exponent > T::zero()) {
            return Err(ChannelError::NonPositiveParameter(
                "path-loss exponent must be positive".into(),
            ));
        }
        let geo = Self { alice, bob, eve_offset_d, path_loss_exponent };
        geo.distances()?;
        Ok(geo)
    }

    /// Default three-node layout with Eve `d` below the origin.
    pub fn default_layout(eve_offset_d: T) -> Result<Self, ChannelError> {
        Self::new(
            [r(-50.0), T::zero(), T::zero()],
            [T::zero(), r::<T>(50.0) * r::<T>(3.0).sqrt(), T::zero()],
            eve_offset_d,
            r(3.0),
        )
    }

    pub fn eve_position(&self) -> [T; 3] {
        [T::zero(), -self.eve_offset_d, T::zero()]
    }

    /// Euclidean distances `(D_AB, D_AE)`. Coincident nodes are rejected:
    /// the path-loss law diverges at zero distance.
    pub fn distances(&self) -> Result<(T, T), ChannelError> {
        let eve = self.eve_position();
        let d_ab = dist3(&self.alice, &self.bob);
        let d_ae = dist3(&self.alice, &eve);
        if d_ab == T::zero() || d_ae == T::zero() {
            return Err(ChannelError::DegenerateGeometry(
                "transmitter coincides with a receiver".into(),
            ));
        }
        Ok((d_ab, d_ae))
    }
}

fn dist3<T: Real>(a: &[T; 3], b: &[T; 3]) -> T {
    let mut acc = T::zero();
    for i in 0..3 {
        let d = a[i] - b[i];
        acc += d * d;
    }
    acc.sqrt()
}

/// Transmit power and receiver noise variances.
#[derive(Debug, Clone)]
pub struct LinkBudget<T> {
    pub transmit_power: T,
    pub noise_var_bob: T,
    pub noise_var_eve: T,
}

impl<T: Real> LinkBudget<T> {
    pub fn new(transmit_power: T, noise_var_bob: T, noise_var_eve: T) -> Result<Self, ChannelError> {
        if !(transmit_power > T::zero()) {
            return Err(ChannelError::NonPositiveParameter("transmit power".into()));
        }
        if !(noise_var_bob > T::zero()) || !(noise_var_eve > T::zero()) {
            return Err(ChannelError::NonPositiveParameter("noise variance".into()));
        }
        Ok(Self { transmit_power, noise_var_bob, noise_var_eve })
    }

    /// Mean SNRs over the two links: `P / (D^eps * sigma^2)`.
    pub fn mean_snrs(&self, geometry: &NetworkGeometry<T>) -> Result<(T, T), ChannelError> {
        let (d_ab, d_ae) = geometry.distances()?;
        let eps = geometry.path_loss_exponent;
        let snr_b = self.transmit_power / (d_ab.powf(eps) * self.noise_var_bob);
        let snr_e = self.transmit_power / (d_ae.powf(eps) * self.noise_var_eve);
        for (name, v) in [("snr_b", snr_b), ("snr_e", snr_e)] {
            if !v.is_finite() || !(v > T::zero()) {
                return Err(ChannelError::NonFiniteSnr(format!("{name} = {v}")));
            }
        }
        Ok((snr_b, snr_e))
    }
}

/// One Rayleigh fading draw for both links, after path-loss scaling.
#[derive(Debug, Clone)]
pub struct FadingDraw<T> {
    /// Alice-to-Bob matrix, scaled by `D_AB^{-eps/2}`.
    pub h: Array2<C<T>>,
    /// Alice-to-Eve matrix, scaled by `D_AE^{-eps/2}`.
    pub g: Array2<C<T>>,
    /// Variance of the unscaled entries, `1/size`.
    pub entry_variance: T,
    /// Path-loss amplitude factors applied to `h` and `g`.
    pub scale_ab: T,
    pub scale_ae: T,
}

/// Unscaled Rayleigh matrix draw: `size x size` entries, circular complex
/// Gaussian with total variance `1/size` (each part has variance
/// `1/(2*size)`).
pub fn sample_rayleigh<T: Real>(size: usize, rng: &mut ChaCha8Rng) -> Result<Array2<C<T>>, ChannelError> {
    if size == 0 {
        return Err(ChannelError::InvalidDimension("matrix size must be >= 1".into()));
    }
    let part_sd = (1.0 / (2.0 * size as f64)).sqrt();
    let mut m = Array2::from_elem((size, size), C::new(T::zero(), T::zero()));
    for i in 0..size {
        for j in 0..size {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            m[[i, j]] = C::new(r(re * part_sd), r(im * part_sd));
        }
    }
    Ok(m)
}

/// Draws the fading pair `(H, G)` with path-loss scaling applied.
pub fn sample_fading<T: Real>(
    geometry: &NetworkGeometry<T>,
    size: usize,
    rng: &mut ChaCha8Rng,
) -> Result<FadingDraw<T>, ChannelError> {
    let (d_ab, d_ae) = geometry.distances()?;
    let eps = geometry.path_loss_exponent;
    let half = r::<T>(0.5);
    let scale_ab = d_ab.powf(-eps * half);
    let scale_ae = d_ae.powf(-eps * half);
    let mut h = sample_rayleigh(size, rng)?;
    let mut g = sample_rayleigh(size, rng)?;
    for v in h.iter_mut() {
        *v = *v * C::new(scale_ab, T::zero());
    }
    for v in g.iter_mut() {
        *v = *v * C::new(scale_ae, T::zero());
    }
    Ok(FadingDraw {
        h,
        g,
        entry_variance: T::one() / r(size as f64),
        scale_ab,
        scale_ae,
    })
}

/// Secrecy rate `max(0, log2((1 + snr_b) / (1 + snr_e)))` in bits.
pub fn secrecy_rate<T: Real>(snr_b: T, snr_e: T) -> Result<T, ChannelError> {
    if snr_b < T::zero() {
        return Err(ChannelError::NegativeSnr(snr_b.to_f64().unwrap_or(f64::NAN)));
    }
    if snr_e < T::zero() {
        return Err(ChannelError::NegativeSnr(snr_e.to_f64().unwrap_or(f64::NAN)));
    }
    let ratio = (T::one() + snr_b) / (T::one() + snr_e);
    let rate = ratio.log2();
    Ok(if rate > T::zero() { rate } else { T::zero() })
}

/// How a fading matrix collapses to a scalar power gain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkGain {
    /// Squared magnitude of the `(0,0)` entry; the scalar-link convention.
    EntryMagnitude,
    /// Largest squared singular value of the matrix.
    TopSingularValue,
}

/// Sampling options for [`sample_secrecy`].
#[derive(Debug, Clone)]
pub struct SecrecySampleParams {
    pub size: usize,
    pub gain: LinkGain,
}

impl Default for SecrecySampleParams {
    fn default() -> Self {
        Self { size: 1, gain: LinkGain::EntryMagnitude }
    }
}

fn link_gain<T: Real>(m: &Array2<C<T>>, gain: LinkGain) -> Result<T, ChannelError> {
    match gain {
        LinkGain::EntryMagnitude => Ok(m[[0, 0]].norm_sqr()),
        LinkGain::TopSingularValue => {
            let n = m.nrows();
            // Gram matrix M^H M is Hermitian PSD; its top eigenvalue is
            // the squared top singular value.
            let mut gram = Array2::from_elem((n, n), C::new(T::zero(), T::zero()));
            for i in 0..n {
                for j in 0..n {
                    let mut acc = C::new(T::zero(), T::zero());
                    for k in 0..n {
                        acc = acc + m[[k, i]].conj() * m[[k, j]];
                    }
                    gram[[i, j]] = acc;
                }
            }
            let eig = linalg::complex_eigenvalues(&gram)?;
            Ok(eig
                .iter()
                .map(|c| c.re)
                .fold(T::zero(), |a, b| if b > a { b } else { a }))
        }
    }
}

/// Draws `n` i.i.d. secrecy-rate samples.
///
/// Per draw, the effective SNRs are `P/sigma^2` times the squared fading
/// gain of the path-loss-scaled link matrices, and the sample is the
/// clipped log-ratio rate. The result is a pure function of
/// `(geometry, budget, params, seed)`.
pub fn sample_secrecy<T: Real>(
    geometry: &NetworkGeometry<T>,
    budget: &LinkBudget<T>,
    params: &SecrecySampleParams,
    n: usize,
    seed: u64,
) -> Result<Vec<T>, ChannelError> {
    if n == 0 {
        return Err(ChannelError::InvalidDimension("sample count must be >= 1".into()));
    }
    budget.mean_snrs(geometry)?; // validates geometry and finiteness up front
    let mut rng = crate::rng::seeded(seed);
    let p_over_nb = budget.transmit_power / budget.noise_var_bob;
    let p_over_ne = budget.transmit_power / budget.noise_var_eve;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let draw = sample_fading(geometry, params.size, &mut rng)?;
        let gb = link_gain(&draw.h, params.gain)?;
        let ge = link_gain(&draw.g, params.gain)?;
        out.push(secrecy_rate(p_over_nb * gb, p_over_ne * ge)?);
    }
    Ok(out)
}

/// Linear plant dynamics with scalar observations at the two receivers:
///
/// ```text
/// x_{t+1} = A1 x_t + w0,   y_bob = a2^T x + w1,   y_eve = a3^T x + w2
/// ```
///
/// `noise_vars` are the variances of the white Gaussian terms (w0, w1, w2);
/// zero variance makes the corresponding term deterministic.
#[derive(Debug, Clone)]
pub struct LinearDynamics<T> {
    pub a1: Array2<T>,
    pub a2: Array1<T>,
    pub a3: Array1<T>,
    pub noise_vars: (T, T, T),
}

impl<T: Real> LinearDynamics<T> {
    pub fn new(
        a1: Array2<T>,
        a2: Array1<T>,
        a3: Array1<T>,
        noise_vars: (T, T, T),
    ) -> Result<Self, ChannelError> {
        let n = a1.nrows();
        if a1.ncols() != n {
            return Err(ChannelError::InvalidDimension(format!(
                "state matrix must be square, got {}x{}",
                a1.nrows(),
                a1.ncols()
            )));
        }
        if a2.len() != n || a3.len() != n {
            return Err(ChannelError::InvalidDimension(
                "observation maps must match the state dimension".into(),
            ));
        }
        let (w0, w1, w2) = noise_vars;
        if w0 < T::zero() || w1 < T::zero() || w2 < T::zero() {
            return Err(ChannelError::NonPositiveParameter(
                "noise variances must be non-negative".into(),
            ));
        }
        Ok(Self { a1, a2, a3, noise_vars })
    }

    /// Scalar plant `x_{t+1} = a x_t + w0` with unit observation maps.
    pub fn scalar(a: T, noise_vars: (T, T, T)) -> Result<Self, ChannelError> {
        Self::new(
            Array2::from_elem((1, 1), a),
            Array1::from_elem(1, T::one()),
            Array1::from_elem(1, T::one()),
            noise_vars,
        )
    }

    pub fn dim(&self) -> usize {
        self.a1.nrows()
    }
}

/// Spectral radius of the state matrix and whether the plant is unstable
/// (radius strictly greater than one).
pub fn spectral_radius<T: Real>(dynamics: &LinearDynamics<T>) -> Result<(T, bool), ChannelError> {
    let n = dynamics.dim();
    let m = Array2::from_shape_fn((n, n), |(i, j)| C::new(dynamics.a1[[i, j]], T::zero()));
    let eig = linalg::complex_eigenvalues(&m)?;
    let radius = eig
        .iter()
        .map(|c| c.norm())
        .fold(T::zero(), |a, b| if b > a { b } else { a });
    Ok((radius, radius > T::one()))
}

/// One dynamics step: next state plus the two scalar observations.
pub fn step_dynamics<T: Real>(
    state: &Array1<T>,
    dynamics: &LinearDynamics<T>,
    rng: &mut ChaCha8Rng,
) -> Result<(Array1<T>, T, T), ChannelError> {
    let n = dynamics.dim();
    if state.len() != n {
        return Err(ChannelError::InvalidDimension(format!(
            "state length {} vs dynamics dimension {n}",
            state.len()
        )));
    }
    let (w0, w1, w2) = dynamics.noise_vars;
    let sd0 = w0.sqrt();
    let mut next = Array1::zeros(n);
    for i in 0..n {
        let mut acc = T::zero();
        for j in 0..n {
            acc += dynamics.a1[[i, j]] * state[j];
        }
        let noise: f64 = StandardNormal.sample(rng);
        next[i] = acc + sd0 * r(noise);
    }
    let mut y_b = T::zero();
    let mut y_e = T::zero();
    for j in 0..n {
        y_b += dynamics.a2[j] * state[j];
        y_e += dynamics.a3[j] * state[j];
    }
    let nb: f64 = StandardNormal.sample(rng);
    let ne: f64 = StandardNormal.sample(rng);
    y_b += w1.sqrt() * r(nb);
    y_e += w2.sqrt() * r(ne);
    Ok((next, y_b, y_e))
}
