//! Error probability for telling two transmissions apart with `M` copies of a
//! probe, under equal priors.

use crate::channel::{apply_channel, ChannelParams};
use crate::error::{Error, Result};
use crate::gaussian::{one_minus_sqrt_fidelity, GaussianState};
use crate::math::{erfc, exp, sqrt};

/// Two hypotheses `η₊ > η₋` probed by `m` copies of `probe`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HypothesisSpec {
    pub eta_plus: f64,
    pub eta_minus: f64,
    pub m: u64,
    pub probe: GaussianState,
    pub channel_base: ChannelParams,
}

impl HypothesisSpec {
    pub fn new(eta_plus: f64, eta_minus: f64, m: u64, probe: GaussianState, channel_base: ChannelParams) -> Result<Self> {
        let s = HypothesisSpec { eta_plus, eta_minus, m, probe, channel_base };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta_minus >= 0.0) {
            return Err(Error::Range { name: "eta_minus", value: self.eta_minus });
        }
        if !(self.eta_plus > self.eta_minus && self.eta_plus <= 1.0) {
            return Err(Error::Range { name: "eta_plus", value: self.eta_plus });
        }
        if self.m == 0 {
            return Err(Error::Range { name: "m", value: 0.0 });
        }
        self.channel_base.with_eta(self.eta_plus).validate()?;
        self.channel_base.with_eta(self.eta_minus).validate()
    }

    /// `dη = η₊ − η₋`.
    pub fn deta(&self) -> f64 {
        self.eta_plus - self.eta_minus
    }

    /// `(η₊ + η₋)/2`, where the QFI approximations are evaluated.
    pub fn eta_mid(&self) -> f64 {
        0.5 * (self.eta_plus + self.eta_minus)
    }
}

/// Fidelity bound `½ F(ρ₊, ρ₋)^{M/2}`.
pub fn fidelity_error_bound(spec: &HypothesisSpec) -> Result<f64> {
    spec.validate()?;
    let plus = apply_channel(&spec.probe, &spec.channel_base.with_eta(spec.eta_plus))?;
    let minus = apply_channel(&spec.probe, &spec.channel_base.with_eta(spec.eta_minus))?;
    let gap = one_minus_sqrt_fidelity(&plus, &minus)?;
    // √F^M = exp(M ln(1 − gap))
    Ok(0.5 * exp(spec.m as f64 * libm::log1p(-gap.min(1.0))))
}

/// `½ exp(−M dη² I_η / 8)`.
pub fn qfi_error_approx(deta: f64, m: u64, i_eta: f64) -> f64 {
    0.5 * exp(-(m as f64) * deta * deta * i_eta / 8.0)
}

/// Threshold-strategy error `1 − erf(√(dη² I_η M / 8))`.
pub fn threshold_strategy_error(deta: f64, m: u64, i_eta: f64) -> f64 {
    erfc(sqrt((deta * deta * i_eta * m as f64 / 8.0).max(0.0)))
}
