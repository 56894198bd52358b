//! Quantum Fisher information for estimating the transmission `η` of a thermal
//! lossy bosonic channel with one- and two-mode Gaussian probes.
//!
//! The crate is `no_std` and allocation free. Everything works on fixed-size
//! covariance matrices in the quadrature ordering `(q_S, p_S, q_I, p_I)` with
//! vacuum variance `1/2`.
//!
//! Layout:
//!
//! - [`gaussian`]: state values, physicality checks, purity and fidelity.
//! - [`channel`]: the thermal attenuator and its `η`-derivative.
//! - [`probes`]: energy-constrained probe families and the two-mode canonical form.
//! - [`qfi`]: SLD, purity-form and fidelity routes plus the closed forms.
//! - [`optimize`]: probe, threshold and bandwidth optimization.
//! - [`hypothesis`]: discrimination error bounds between two transmissions.

#![no_std]
#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

#[cfg(test)]
extern crate std;

mod error;
mod math;

pub mod channel;
pub mod gaussian;
pub mod hypothesis;
pub mod linalg;
pub mod optimize;
pub mod probes;
pub mod qfi;
pub mod search;

pub use channel::{apply_channel, channel_derivative, effective_noise, gamma_to_eta, ChannelParams};
pub use error::{Error, Result};
pub use gaussian::{gaussian_fidelity, heisenberg_margin, make_state, one_minus_sqrt_fidelity, purity, GaussianState, SymplecticForm};
pub use probes::{build_single_mode, build_two_mode, canonicalize, tmsv, SingleModeProbe, TwoModeProbe};
pub use qfi::{QfiBreakdown, Route};
