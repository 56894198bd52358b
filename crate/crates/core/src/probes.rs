//! Energy-constrained probe families and the two-mode canonical form.

use crate::error::{Error, Result};
use crate::gaussian::{purity, GaussianState};
use crate::linalg::{symmetric_eigen_2x2, Matrix, Vector};
use crate::math::{atan2, cos, sin, sqrt};

const RANGE_TOL: f64 = 1e-12;
const PURITY_TOL: f64 = 1e-6;

/// Single-mode displaced squeezed probe with `N_S` photons, a fraction `ξ`
/// of them in squeezing and displacement angle `θ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingleModeProbe {
    pub n_s: f64,
    pub xi: f64,
    pub theta: f64,
}

/// Two-mode pure probe in canonical form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoModeProbe {
    pub n_s: f64,
    pub zeta: f64,
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
}

/// Squeezing factor `r = 1 + 2N − 2√(N(N+1))` of a squeezed vacuum with `N`
/// photons, evaluated without cancellation.
pub fn squeeze_factor(n: f64) -> f64 {
    1.0 / (1.0 + 2.0 * n + 2.0 * sqrt(n * (n + 1.0)))
}

impl SingleModeProbe {
    pub fn new(n_s: f64, xi: f64, theta: f64) -> Result<Self> {
        let p = SingleModeProbe { n_s, xi, theta };
        p.validate()?;
        Ok(p)
    }

    pub fn coherent(n_s: f64) -> Self {
        SingleModeProbe { n_s, xi: 0.0, theta: 0.0 }
    }

    pub fn squeezed_vacuum(n_s: f64) -> Self {
        SingleModeProbe { n_s, xi: 1.0, theta: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n_s >= 0.0) || !self.n_s.is_finite() {
            return Err(Error::Range { name: "n_s", value: self.n_s });
        }
        if !(0.0..=1.0).contains(&self.xi) {
            return Err(Error::Range { name: "xi", value: self.xi });
        }
        if !self.theta.is_finite() {
            return Err(Error::Range { name: "theta", value: self.theta });
        }
        Ok(())
    }

    pub fn n_sq(&self) -> f64 {
        self.xi * self.n_s
    }

    pub fn n_coh(&self) -> f64 {
        (1.0 - self.xi) * self.n_s
    }

    pub fn r(&self) -> f64 {
        squeeze_factor(self.n_sq())
    }
}

/// Lower end of the allowed `r` range for given `N_S` and `ζ`.
pub fn r_min(n_s: f64, zeta: f64) -> f64 {
    squeeze_factor(n_s * zeta * zeta)
}

impl TwoModeProbe {
    pub fn new(n_s: f64, zeta: f64, r: f64, theta: f64, phi: f64) -> Result<Self> {
        let p = TwoModeProbe { n_s, zeta, r, theta, phi };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n_s >= 0.0) || !self.n_s.is_finite() {
            return Err(Error::Range { name: "n_s", value: self.n_s });
        }
        if !(0.0..=1.0).contains(&self.zeta) {
            return Err(Error::Range { name: "zeta", value: self.zeta });
        }
        let lo = r_min(self.n_s, self.zeta);
        if !(self.r >= lo * (1.0 - RANGE_TOL) && self.r <= 1.0 + RANGE_TOL) {
            return Err(Error::Range { name: "r", value: self.r });
        }
        if !self.theta.is_finite() {
            return Err(Error::Range { name: "theta", value: self.theta });
        }
        if !self.phi.is_finite() {
            return Err(Error::Range { name: "phi", value: self.phi });
        }
        Ok(())
    }

    /// Local symplectic eigenvalue `a = (2N_Sζ² + 1)/(r + 1/r)`.
    pub fn a(&self) -> f64 {
        (2.0 * self.n_s * self.zeta * self.zeta + 1.0) / (self.r + 1.0 / self.r)
    }

    /// Correlation strength `c = √(a² − ¼)`.
    pub fn c(&self) -> f64 {
        let a = self.a();
        sqrt((a * a - 0.25).max(0.0))
    }

    pub fn n_coh(&self) -> f64 {
        self.n_s * (1.0 - self.zeta * self.zeta)
    }
}

/// Pure single-mode state `Σ = diag(r/2, 1/(2r))`, `d = √(2N_coh)(cos θ, sin θ)`.
pub fn build_single_mode(p: &SingleModeProbe) -> Result<GaussianState> {
    p.validate()?;
    let r = p.r();
    let amp = sqrt(2.0 * p.n_coh());
    let d = Vector::from_slice(&[amp * cos(p.theta), amp * sin(p.theta)]);
    Ok(GaussianState::from_parts(d, Matrix::from_diagonal(&[0.5 * r, 0.5 / r])))
}

/// Pure two-mode state in canonical form.
pub fn build_two_mode(p: &TwoModeProbe) -> Result<GaussianState> {
    p.validate()?;
    let r = p.r.min(1.0);
    let a = p.a();
    let c = p.c();
    let (sr, isr) = (sqrt(r), 1.0 / sqrt(r));
    let (cp, sp) = (cos(p.phi), sin(p.phi));
    let sigma = Matrix::from_rows([
        [a * r, 0.0, c * sr * cp, c * sr * sp],
        [0.0, a / r, c * isr * sp, -c * isr * cp],
        [c * sr * cp, c * isr * sp, a, 0.0],
        [c * sr * sp, -c * isr * cp, 0.0, a],
    ]);
    let amp = sqrt(2.0 * p.n_coh());
    let d = Vector::from_slice(&[amp * cos(p.theta), amp * sin(p.theta), 0.0, 0.0]);
    Ok(GaussianState::from_parts(d, sigma))
}

/// Two-mode squeezed vacuum with `N_S` photons per mode.
pub fn tmsv(n_s: f64) -> Result<GaussianState> {
    build_two_mode(&TwoModeProbe::new(n_s, 1.0, 1.0, 0.0, 0.0)?)
}

fn rotation(angle: f64) -> Matrix {
    let (c, s) = (cos(angle), sin(angle));
    Matrix::from_rows([[c, -s], [s, c]])
}

/// Reduces a pure two-mode state to canonical probe parameters by local
/// operations that leave the channel-output QFI unchanged: idler displacement
/// is dropped, the idler is rotated and squeezed to `Σ_I ∝ I`, and the signal
/// is rotated so that `Σ_S` is diagonal with the smaller variance first.
pub fn canonicalize(state: &GaussianState) -> Result<TwoModeProbe> {
    if state.modes() != 2 {
        return Err(Error::NotTwoMode);
    }
    let mu = purity(state);
    if (mu - 1.0).abs() > PURITY_TOL {
        return Err(Error::NotPure { purity: mu });
    }
    let s = state.sigma();
    let sig_s = s.block(0, 0, 2);
    let sig_i = s.block(2, 2, 2);
    let sig_si = Matrix::from_fn(2, |i, j| s[(i, 2 + j)]);

    let (l1, l2, ang_i) = symmetric_eigen_2x2(sig_i[(0, 0)], sig_i[(0, 1)], sig_i[(1, 1)]);
    let b = sqrt(l1 * l2);
    let squeeze = Matrix::from_diagonal(&[sqrt(b / l1), sqrt(b / l2)]);
    let t_i = squeeze * rotation(ang_i).transpose();

    let (m1, m2, ang_s) = symmetric_eigen_2x2(sig_s[(0, 0)], sig_s[(0, 1)], sig_s[(1, 1)]);
    let r_s = rotation(ang_s);
    let cross = r_s.transpose() * sig_si * t_i.transpose();

    let r = sqrt(m1 / m2).min(1.0);
    let a = sqrt(m1 * m2);
    let c = sqrt((a * a - 0.25).max(0.0));
    let phi = if c > 1e-12 * a.max(1.0) {
        let m00 = cross[(0, 0)] / (sqrt(r) * c);
        let m10 = cross[(1, 0)] * sqrt(r) / c;
        atan2(m10, m00)
    } else {
        0.0
    };

    let ds = r_s.transpose().mul_vec(&Vector::from_slice(&[state.d()[0], state.d()[1]]));
    let n_coh = 0.5 * ds.norm_sq();
    let theta = if n_coh > 0.0 { atan2(ds[1], ds[0]) } else { 0.0 };
    let n_s = (0.5 * (m1 + m2) - 0.5 + n_coh).max(0.0);
    let zeta = if n_s > 0.0 { sqrt(((n_s - n_coh) / n_s).clamp(0.0, 1.0)) } else { 0.0 };
    // a and r fix ζ through the photon budget; keep r inside its range after rounding
    let r = r.max(r_min(n_s, zeta));
    Ok(TwoModeProbe { n_s, zeta, r, theta, phi })
}
