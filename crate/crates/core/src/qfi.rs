//! Quantum Fisher information of the channel output.
//!
//! Three numerical routes work on any probe state: the SLD linear solve, the
//! single-mode purity form, and a finite difference of the Uhlmann fidelity.
//! The closed forms cover the idler-free, TMSV and canonical two-mode families.

use crate::channel::{apply_channel, channel_derivative, gamma_to_eta, ChannelParams};
use crate::error::{Error, Result};
use crate::gaussian::{one_minus_sqrt_fidelity, GaussianState, SymplecticForm};
use crate::linalg::{Matrix, Vector, MAX_DIM};
use crate::math::{cos, exp, sin, sqrt};
use crate::probes::{build_two_mode, squeeze_factor, TwoModeProbe};

/// Largest admissible `η` is `1 − ETA_GUARD`.
pub const ETA_GUARD: f64 = 1e-7;
/// Relative residual above which the SLD system is reported singular.
pub const SLD_RESIDUAL_TOL: f64 = 1e-8;
/// Relative eigenvalue cutoff for pseudoinverses.
pub const PINV_CUTOFF: f64 = 1e-12;
const PURE_TOL: f64 = 1e-12;
const REFINE_STEPS: usize = 2;
const CLOSED_POLE_TOL: f64 = 1e-6;
const CLOSED_CANCEL_LIMIT: f64 = 1e5;

/// Which computation produced a QFI value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Route {
    Sld,
    SingleModeForm,
    FidelityFd,
    ClosedForm,
}

/// QFI with its idler-free decomposition into displacement, squeezing and
/// shadow contributions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QfiBreakdown {
    pub total: f64,
    pub term_displacement: f64,
    pub term_squeeze: f64,
    pub term_shadow: f64,
    pub route: Route,
}

impl QfiBreakdown {
    fn closed(disp: f64, sq: f64, shadow: f64) -> Self {
        QfiBreakdown { total: disp + sq + shadow, term_displacement: disp, term_squeeze: sq, term_shadow: shadow, route: Route::ClosedForm }
    }
}

fn guard(p: &ChannelParams) -> Result<()> {
    p.validate()?;
    if p.eta > 1.0 - ETA_GUARD {
        return Err(Error::EtaTooClose { eta: p.eta });
    }
    Ok(())
}

/// QFI from the symmetric logarithmic derivative.
///
/// Solves `4Σ̃LΣ̃ + ΩLΩ = 2∂Σ̃` for symmetric `L` and returns
/// `tr(L ∂Σ̃) + ∂d̃ᵀ Σ̃⁺ ∂d̃`.
pub fn qfi_sld(probe: &GaussianState, p: &ChannelParams) -> Result<f64> {
    guard(p)?;
    let out = apply_channel(probe, p)?;
    let (d_dot, s_dot) = channel_derivative(probe, p)?;
    let trace = sld_trace_term(out.sigma(), &s_dot)?;
    let disp = out.sigma().symmetric_pinv(PINV_CUTOFF).quad_form(&d_dot);
    Ok((trace + disp).max(0.0))
}

/// `tr(L ∂Σ)` with `L` the minimum-norm solution of the SLD equation.
///
/// The unknowns are the entries of `X = Σ^{1/2} L Σ^{1/2}`, which turns the
/// equation into `4X + AXA = 2Σ^{-1/2} ∂Σ Σ^{-1/2}` with `A = Σ^{-1/2} Ω Σ^{-1/2}`.
/// Its spectrum is `4 − 1/(ν_k ν_l)` in the symplectic eigenvalues, so only
/// near-pure outputs make it ill-conditioned.
fn sld_trace_term(sigma: &Matrix, s_dot: &Matrix) -> Result<f64> {
    let n = sigma.dim();
    let omega = SymplecticForm::new(n / 2).matrix();
    let eig = sigma.symmetric_eigen();
    if !(eig.values[0] > 0.0) {
        return Err(Error::NonPhysical { margin: eig.values[0] });
    }
    let inv_sqrt = Matrix::from_fn(n, |i, j| (0..n).map(|k| eig.vectors[(i, k)] * eig.vectors[(j, k)] / sqrt(eig.values[k])).sum());
    let a = inv_sqrt * omega * inv_sqrt;
    let b = (inv_sqrt * *s_dot * inv_sqrt).symmetrized();

    let mut pairs = [(0usize, 0usize); MAX_DIM];
    let mut m = 0;
    for k in 0..n {
        for l in k..n {
            pairs[m] = (k, l);
            m += 1;
        }
    }
    // orthonormal basis of symmetric matrices; off-diagonal elements carry 1/√2
    let basis = |idx: usize| {
        let (k, l) = pairs[idx];
        let mut e = Matrix::zeros(n);
        if k == l {
            e[(k, k)] = 1.0;
        } else {
            let v = core::f64::consts::FRAC_1_SQRT_2;
            e[(k, l)] = v;
            e[(l, k)] = v;
        }
        e
    };
    let coord = |mat: &Matrix, idx: usize| {
        let (k, l) = pairs[idx];
        if k == l {
            mat[(k, k)]
        } else {
            core::f64::consts::FRAC_1_SQRT_2 * (mat[(k, l)] + mat[(l, k)])
        }
    };

    let mut sys = Matrix::zeros(m);
    for col in 0..m {
        let e = basis(col);
        let image = e.scale(4.0) + a * e * a;
        for row in 0..m {
            sys[(row, col)] = coord(&image, row);
        }
    }
    let rhs = Vector::from_fn(m, |idx| 2.0 * coord(&b, idx));
    let rhs_norm = sqrt(rhs.norm_sq());
    if rhs_norm == 0.0 {
        return Ok(0.0);
    }
    let pinv = sys.symmetric_pinv(PINV_CUTOFF);
    let mut x = pinv.mul_vec(&rhs);
    let mut residual = sqrt((rhs - sys.mul_vec(&x)).norm_sq()) / rhs_norm;
    for _ in 0..REFINE_STEPS {
        if residual <= 1e-3 * SLD_RESIDUAL_TOL {
            break;
        }
        let cand = x + pinv.mul_vec(&(rhs - sys.mul_vec(&x)));
        let res = sqrt((rhs - sys.mul_vec(&cand)).norm_sq()) / rhs_norm;
        if !(res < residual) {
            break;
        }
        x = cand;
        residual = res;
    }
    if !(residual <= SLD_RESIDUAL_TOL) {
        return Err(Error::SingularSystem { residual });
    }
    // tr(L ∂Σ) = ⟨X, B⟩ = x · rhs / 2
    Ok(0.5 * x.dot(&rhs))
}

/// Single-mode QFI from the purity form
/// `tr((Σ̃⁻¹∂Σ̃)²)/(2(1+μ²)) + 2(∂μ)²/(1−μ⁴) + ∂d̃ᵀΣ̃⁻¹∂d̃`.
pub fn qfi_single_mode_form(probe: &GaussianState, p: &ChannelParams) -> Result<f64> {
    if probe.modes() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: probe.modes() });
    }
    guard(p)?;
    let out = apply_channel(probe, p)?;
    let (d_dot, s_dot) = channel_derivative(probe, p)?;
    let sigma = out.sigma();
    let det = sigma.determinant();
    let inv = sigma.inverse().ok_or(Error::SingularSystem { residual: f64::INFINITY })?;
    let x = inv * s_dot;
    let mu = 1.0 / sqrt(4.0 * det);
    let mu2 = mu * mu;
    let first = x.trace_product(&x) / (2.0 * (1.0 + mu2));
    let one_minus_mu4 = 1.0 - mu2 * mu2;
    let second = if one_minus_mu4 <= PURE_TOL {
        0.0
    } else {
        let dmu = -2.0 * det * x.trace() / (4.0 * det * sqrt(4.0 * det));
        2.0 * dmu * dmu / one_minus_mu4
    };
    let disp = inv.quad_form(&d_dot);
    Ok((first + second + disp).max(0.0))
}

/// QFI from the fidelity between outputs at neighbouring transmissions,
/// `8(1 − √F)/dη²`.
///
/// The two points straddle `η` symmetrically; near the ends of `[0, 1]` the
/// pair is shifted to one side.
pub fn qfi_fidelity_fd(probe: &GaussianState, p: &ChannelParams, deta: f64) -> Result<f64> {
    if !(1e-6..=1e-3).contains(&deta) {
        return Err(Error::Range { name: "deta", value: deta });
    }
    guard(p)?;
    let (mut lo, mut hi) = (p.eta - 0.5 * deta, p.eta + 0.5 * deta);
    if lo < 0.0 {
        lo = p.eta;
        hi = p.eta + deta;
    } else if hi > 1.0 - ETA_GUARD {
        lo = p.eta - deta;
        hi = p.eta;
    }
    if lo < 0.0 {
        return Err(Error::Range { name: "deta", value: deta });
    }
    let a = apply_channel(probe, &p.with_eta(hi))?;
    let b = apply_channel(probe, &p.with_eta(lo))?;
    let gap = one_minus_sqrt_fidelity(&a, &b)?;
    Ok((8.0 * gap / ((hi - lo) * (hi - lo))).max(0.0))
}

/// Idler-free closed form for a probe with `N_coh` displacement photons and
/// `N_sq` squeezing photons at `θ = 0`.
pub fn qfi_if_closed(n_coh: f64, n_sq: f64, p: &ChannelParams) -> Result<QfiBreakdown> {
    guard(p)?;
    if !(n_coh >= 0.0) || !(n_sq >= 0.0) {
        return Err(Error::Range { name: if n_coh >= 0.0 { "n_sq" } else { "n_coh" }, value: n_coh.min(n_sq) });
    }
    let eta = p.eta;
    let e2 = eta * eta;
    let t = 1.0 - e2;
    let nb = p.n_b;
    let r = squeeze_factor(n_sq);
    if p.normalized {
        let disp = 4.0 * n_coh / (r * e2 + 2.0 * nb + 1.0 - e2);
        let b = nb * (nb + 1.0) + n_sq * e2 * (2.0 * nb + 1.0) - n_sq * e2 * e2;
        let sq = if b > 0.0 {
            let k = (2.0 * nb + 1.0) * (2.0 * nb + 1.0);
            4.0 * n_sq * e2 / b * ((n_sq + 1.0) * k / (2.0 * b + 1.0) - 1.0)
        } else if nb == 0.0 && n_sq > 0.0 {
            4.0 * n_sq
        } else {
            0.0
        };
        return Ok(QfiBreakdown::closed(disp, sq, 0.0));
    }
    let disp = 4.0 * n_coh / (e2 * r + t * (2.0 * nb + 1.0));
    let a = t * (nb * (nb + 1.0) + n_sq * e2 * (2.0 * nb + 1.0) - nb * nb * e2);
    if a > 0.0 {
        let m = 2.0 * nb + 1.0;
        let sq = 4.0 * n_sq * e2 * m / a * ((n_sq + 1.0) * m / (2.0 * a + 1.0) - 1.0);
        let shadow = 4.0 * nb * nb * e2 / a;
        Ok(QfiBreakdown::closed(disp, sq, shadow))
    } else if nb == 0.0 {
        // η → 0⁺ limit at zero temperature
        let sq = if n_sq > 0.0 && eta == 0.0 { 4.0 * n_sq } else { 0.0 };
        Ok(QfiBreakdown::closed(disp, sq, 0.0))
    } else {
        Err(Error::DegenerateDenominator)
    }
}

/// Coherent-state probe with `N_S` photons.
pub fn qfi_coherent(n_s: f64, p: &ChannelParams) -> Result<f64> {
    Ok(qfi_if_closed(n_s, 0.0, p)?.total)
}

/// Vacuum probe: the shadow effect `4η²N_B/((1−η²)(1+N_B(1−η²)))`.
pub fn qfi_shadow(p: &ChannelParams) -> Result<f64> {
    Ok(qfi_if_closed(0.0, 0.0, p)?.total)
}

/// Squeezed vacuum with `N_S` photons.
pub fn qfi_squeezed_vacuum(n_s: f64, p: &ChannelParams) -> Result<f64> {
    Ok(qfi_if_closed(0.0, n_s, p)?.total)
}

/// Two-mode squeezed vacuum with `N_S` photons per mode.
pub fn qfi_tmsv(n_s: f64, p: &ChannelParams) -> Result<f64> {
    guard(p)?;
    let e2 = p.eta * p.eta;
    let t = 1.0 - e2;
    let nb = p.n_b;
    if p.normalized {
        let num = 4.0 * n_s * (nb + 1.0 + n_s * (nb + 1.0 - e2));
        let den = (nb + 1.0 - e2) * (nb + 1.0 + n_s * (2.0 * nb + 1.0 - e2));
        return Ok(num / den);
    }
    let g = n_s + nb + 2.0 * n_s * nb;
    Ok(4.0 * (n_s * (n_s + 1.0) * t + e2 * g) / (t * (1.0 + t * g)))
}

/// Canonical two-mode probe, trace term plus displacement term.
///
/// The closed form covers the unnormalized channel. The normalized channel,
/// the removable pole of the trace term and points where the `1/η²` pieces
/// cancel to working precision are evaluated with the SLD solve instead.
pub fn qfi_two_mode_closed(probe: &TwoModeProbe, p: &ChannelParams) -> Result<f64> {
    guard(p)?;
    probe.validate()?;
    let a = probe.a();
    let r = probe.r;
    let trace = match ea_trace_closed(a, r, p) {
        Some(t) => t,
        None => return qfi_sld(&build_two_mode(probe)?, p),
    };
    let n_coh = probe.n_coh();
    let (c, s) = (cos(probe.theta), sin(probe.theta));
    let base = 2.0 * a * (1.0 - p.eta * p.eta) * (1.0 + 2.0 * p.n_b);
    let e2 = p.eta * p.eta;
    let disp = 8.0 * n_coh * a * (c * c / (base + r * e2) + s * s / (base + e2 / r));
    let total = trace + disp;
    if !total.is_finite() {
        return Err(Error::DegenerateDenominator);
    }
    Ok(total.max(0.0))
}

/// Trace term of the two-mode closed form, or `None` where it cannot be
/// trusted and the SLD solve has to be used.
fn ea_trace_closed(a: f64, r: f64, p: &ChannelParams) -> Option<f64> {
    if p.normalized {
        return None;
    }
    let eta = p.eta;
    let e2 = eta * eta;
    let t = 1.0 - e2;
    let nb = p.n_b;
    let a2 = 4.0 * a * a;
    let m = 1.0 + 2.0 * nb;
    let nn = nb * (nb + 1.0);
    let k = 2.0 * nb * nb + 2.0 * nb + 1.0;
    let q = a2 * m * m - 1.0;

    let pole = 1.0 - nn * (a2 - 1.0) * t * t;
    if pole.abs() < CLOSED_POLE_TOL {
        return None;
    }
    let head = (a2 + 1.0) / e2 + 2.0 * e2 / (t * t);
    let pref = r / (e2 * pole);
    let u = a2 * t + e2 + 1.0;
    let frac1 = if nn == 0.0 { 0.0 } else { t * nn * u * u * q / (2.0 * a * e2 * (1.0 + r * r) * m + r * (t * q - 2.0 * e2)) };
    let w = t * (a2 + 1.0) * k + 2.0 * e2 / t;
    let frac2 = (w * w - 4.0 * a2 * e2 * e2 * m * m) / (2.0 * a * e2 * (1.0 + r * r) * m * t + r * (t * t * (a2 + 1.0) * k + 2.0 * e2));
    let trace = head + pref * (frac1 - frac2);
    let magnitude = head.abs() + (pref * frac1).abs() + (pref * frac2).abs();
    if !(magnitude <= CLOSED_CANCEL_LIMIT * trace.abs()) {
        return None;
    }
    Some(trace)
}

/// Two-mode QFI at `θ = φ = 0` without the range checks on `ζ` and `r`.
///
/// Past `ζ = 1` the displacement energy `N_S(1 − ζ²)` turns negative and the
/// displacement term is continued linearly in it, so finite differences can
/// straddle the corner `(ζ, r) = (1, 1)`.
pub(crate) fn two_mode_continued(n_s: f64, zeta: f64, r: f64, p: &ChannelParams) -> Result<f64> {
    guard(p)?;
    let a = (2.0 * n_s * zeta * zeta + 1.0) / (r + 1.0 / r);
    let n_coh = n_s * (1.0 - zeta * zeta);
    let c = sqrt((a * a - 0.25).max(0.0));
    let (sr, isr) = (sqrt(r), 1.0 / sqrt(r));
    let sigma = Matrix::from_rows([[a * r, 0.0, c * sr, 0.0], [0.0, a / r, 0.0, -c * isr], [c * sr, 0.0, a, 0.0], [0.0, -c * isr, 0.0, a]]);
    let state = GaussianState::from_parts(Vector::zeros(4), sigma);
    let out = apply_channel(&state, p)?;
    let trace = match ea_trace_closed(a, r, p) {
        Some(t) => t,
        None => {
            let (_, s_dot) = channel_derivative(&state, p)?;
            sld_trace_term(out.sigma(), &s_dot)?
        }
    };
    // ∂d̃ = (√(2N_coh), 0, 0, 0)
    let disp = 2.0 * n_coh * out.sigma().symmetric_pinv(PINV_CUTOFF)[(0, 0)];
    Ok(trace + disp)
}

/// Classical Fisher information of homodyne detection on the in-phase
/// quadrature for the probe `d = (√(2N_coh), 0)`, `Σ = diag(r/2, 1/(2r))`.
pub fn homodyne_fisher(n_coh: f64, r: f64, p: &ChannelParams) -> Result<f64> {
    p.validate()?;
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::Range { name: "r", value: r });
    }
    let eta = p.eta;
    let var = 0.5 * eta * eta * r + p.additive_noise();
    let dvar = eta * r + p.additive_noise_derivative();
    let dmean2 = 2.0 * n_coh;
    Ok(dmean2 / var + 0.5 * dvar * dvar / (var * var))
}

/// QFI for the damping rate `γ` with `η = e^{−γt/2}`:
/// `I_γ = (t²/4) e^{−γt} I_η`.
pub fn qfi_gamma(gamma: f64, t: f64, probe: &GaussianState, p_base: &ChannelParams) -> Result<f64> {
    if !(gamma >= 0.0) {
        return Err(Error::Range { name: "gamma", value: gamma });
    }
    if !(t >= 0.0) {
        return Err(Error::Range { name: "t", value: t });
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let eta = gamma_to_eta(gamma, t);
    let i_eta = qfi_sld(probe, &p_base.with_eta(eta))?;
    Ok(0.25 * t * t * exp(-gamma * t) * i_eta)
}
