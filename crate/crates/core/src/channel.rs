//! Thermal lossy channel acting on the signal mode.

use crate::error::{Error, Result};
use crate::gaussian::GaussianState;
use crate::linalg::{Matrix, Vector};
use crate::math::exp;

/// Transmission `η`, bath photons `N_B` and the normalization flag.
///
/// With `normalized` set the bath carries `N_B / (1 − η²)` photons, which
/// keeps the received background constant as `η` varies.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelParams {
    pub eta: f64,
    pub n_b: f64,
    pub normalized: bool,
}

impl ChannelParams {
    pub fn new(eta: f64, n_b: f64, normalized: bool) -> Result<Self> {
        let p = ChannelParams { eta, n_b, normalized };
        p.validate()?;
        Ok(p)
    }

    pub fn unnormalized(eta: f64, n_b: f64) -> Result<Self> {
        Self::new(eta, n_b, false)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.eta) || !(self.n_b >= 0.0) || !self.n_b.is_finite() {
            return Err(Error::NonPhysicalParams);
        }
        if self.normalized && self.eta == 1.0 && self.n_b > 0.0 {
            return Err(Error::DivergentNoise);
        }
        Ok(())
    }

    pub fn with_eta(&self, eta: f64) -> Self {
        ChannelParams { eta, ..*self }
    }

    /// Additive noise `y = (1 − η²)(N_B^eff + ½)` on the signal block.
    pub fn additive_noise(&self) -> f64 {
        let t = 1.0 - self.eta * self.eta;
        if self.normalized {
            self.n_b + 0.5 * t
        } else {
            t * (self.n_b + 0.5)
        }
    }

    /// `∂_η y`.
    pub fn additive_noise_derivative(&self) -> f64 {
        if self.normalized {
            -self.eta
        } else {
            -2.0 * self.eta * (self.n_b + 0.5)
        }
    }
}

/// Bath photon number seen by the channel.
pub fn effective_noise(p: &ChannelParams) -> Result<f64> {
    p.validate()?;
    if p.normalized {
        if p.n_b == 0.0 {
            return Ok(0.0);
        }
        Ok(p.n_b / (1.0 - p.eta * p.eta))
    } else {
        Ok(p.n_b)
    }
}

/// `η = e^{−γt/2}`.
pub fn gamma_to_eta(gamma: f64, t: f64) -> f64 {
    exp(-0.5 * gamma * t)
}

/// Output state of the channel; the idler (if any) is untouched.
pub fn apply_channel(state: &GaussianState, p: &ChannelParams) -> Result<GaussianState> {
    p.validate().map_err(|_| Error::NonPhysicalParams)?;
    let eta = p.eta;
    let y = p.additive_noise();
    let n = 2 * state.modes();
    let s = state.sigma();
    let mut d = *state.d();
    d[0] *= eta;
    d[1] *= eta;
    let sigma = Matrix::from_fn(n, |i, j| match (i < 2, j < 2) {
        (true, true) => eta * eta * s[(i, j)] + if i == j { y } else { 0.0 },
        (true, false) | (false, true) => eta * s[(i, j)],
        (false, false) => s[(i, j)],
    });
    Ok(GaussianState::from_parts(d, sigma))
}

/// `(∂_η d̃, ∂_η Σ̃)` of the channel output.
pub fn channel_derivative(state: &GaussianState, p: &ChannelParams) -> Result<(Vector, Matrix)> {
    p.validate().map_err(|_| Error::NonPhysicalParams)?;
    let eta = p.eta;
    let dy = p.additive_noise_derivative();
    let n = 2 * state.modes();
    let s = state.sigma();
    let d_dot = Vector::from_fn(n, |i| if i < 2 { state.d()[i] } else { 0.0 });
    let sigma_dot = Matrix::from_fn(n, |i, j| match (i < 2, j < 2) {
        (true, true) => 2.0 * eta * s[(i, j)] + if i == j { dy } else { 0.0 },
        (true, false) | (false, true) => s[(i, j)],
        (false, false) => 0.0,
    });
    Ok((d_dot, sigma_dot))
}
