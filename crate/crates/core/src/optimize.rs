//! Probe, threshold and bandwidth optimization.

use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::math::{powi, sqrt};
use crate::probes::{r_min, TwoModeProbe};
use crate::qfi::{qfi_coherent, qfi_if_closed, qfi_tmsv, qfi_two_mode_closed, two_mode_continued};
use crate::search::{bisect, golden_max};

/// Absolute tolerance on `ξ^opt`.
pub const XI_TOL: f64 = 1e-8;
/// Points in the coarse grid that seeds the golden-section search.
pub const XI_GRID: usize = 64;
/// Step of the finite differences in [`tmsv_stationarity_check`].
pub const STATIONARITY_STEP: f64 = 1e-5;
const EDGE_STEP: f64 = 1e-4;
const ROOT_TOL: f64 = 1e-14;

/// Where the optimal `ξ` sits in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum XiBoundary {
    Interior,
    CoherentEdge,
    SqueezedEdge,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct XiOptResult {
    pub xi_opt: f64,
    pub qfi_opt: f64,
    pub boundary: XiBoundary,
}

/// Number of copies sharing the photon budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Bandwidth {
    Finite(u64),
    Infinite,
}

/// Probe families compared under a total photon budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProbeFamily {
    IdlerFree,
    Tmsv,
    Coherent,
}

/// Total QFI `M·I_η`, which diverges for `M = ∞` whenever the shadow term
/// is present.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TotalQfi {
    Finite(f64),
    Divergent,
}

impl TotalQfi {
    pub fn value(&self) -> f64 {
        match *self {
            TotalQfi::Finite(v) => v,
            TotalQfi::Divergent => f64::INFINITY,
        }
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self, TotalQfi::Divergent)
    }
}

/// Bandwidth choice for a total photon number `𝒩_S = M·N_S`.
///
/// `xi` is the squeezing fraction of the idler-free probe; it is 0 for the
/// other families.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BandwidthPlan {
    pub total_photons: f64,
    pub m: Bandwidth,
    pub total_qfi: TotalQfi,
    pub probe_family: ProbeFamily,
    pub xi: f64,
}

/// Probes accepted by [`advantage_ratio`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ProbeKind {
    Coherent,
    SqueezedVacuum,
    DisplacedSqueezed { xi: f64 },
    OptimalIdlerFree,
    Tmsv,
}

/// `(1/4N_S) ∂_ξ I^{IF}` at `ξ = 1` and `N_B = 0`.
pub fn f1(eta: f64, n_s: f64) -> f64 {
    let e2 = eta * eta;
    let t = 1.0 - e2;
    let s = 1.0 + 2.0 * n_s * e2 * t;
    let first = (t * t + e2 * e2) / (t * s * s);
    // √(N(N+1)) − N, written without cancellation
    let gap = n_s / (sqrt(n_s * (n_s + 1.0)) + n_s);
    let gap = if n_s == 0.0 { 0.0 } else { gap };
    first - 1.0 / (1.0 - 2.0 * e2 * gap)
}

/// `N̄_S(η)`: photon number below which the squeezed vacuum is the optimal
/// single-mode probe at zero temperature. Zero for `η ≤ 1/√2`.
pub fn xi_threshold_nbar(eta: f64) -> f64 {
    if !(eta > core::f64::consts::FRAC_1_SQRT_2) || !(eta < 1.0) {
        return 0.0;
    }
    let large = 1.0 / (c1_root() * (1.0 - eta));
    let small = 4.0 * powi(core::f64::consts::SQRT_2 * eta - 1.0, 2);
    let mut hi = 10.0 * large.max(small);
    while f1(eta, hi) > 0.0 {
        hi *= 2.0;
    }
    let lo = if f1(eta, 1e-9) > 0.0 { 1e-9 } else { 0.0 };
    bisect(|n| f1(eta, n), lo, hi, ROOT_TOL).unwrap_or(0.0)
}

/// Positive root of `c³ − 64c − 128`, the constant in `η̄ ≈ 1 − 1/(c N_S)`.
pub fn c1_root() -> f64 {
    bisect(|c| c * c * c - 64.0 * c - 128.0, 8.0, 16.0, ROOT_TOL).unwrap_or(f64::NAN)
}

/// Small-`η` correction: `I^{IF} = 4N_S(1 + g₁η²) + O(η⁴)` at `N_B = 0`.
pub fn g1(xi: f64, n_s: f64) -> f64 {
    let xn = xi * n_s;
    2.0 * (1.0 - xi) * sqrt(xn * (1.0 + xn)) - xi * (1.0 + 2.0 * n_s)
}

/// Small-`N_S` slope of the squeezed vacuum: `I = I_shad + 4N_S g₂ + O(N_S²)`.
///
/// At `N_B = 0` the expansion is taken at exactly zero temperature, which is
/// not the `N_B → 0⁺` limit of the finite-temperature expression.
pub fn g2(eta: f64, n_b: f64) -> f64 {
    let e2 = eta * eta;
    let t = 1.0 - e2;
    if n_b == 0.0 {
        return (t * t + e2 * e2) / t;
    }
    let m = 1.0 + 2.0 * n_b;
    let u = 1.0 + 2.0 * n_b * t;
    let w = 1.0 + n_b * t;
    2.0 * e2 * m * (e2 - 2.0 * n_b * (n_b + 1.0) * t * t) / (t * w * w * (1.0 + u * u))
}

/// Idler-free QFI with `N_S` photons and squeezing fraction `ξ`, at `θ = 0`.
pub fn qfi_idler_free(n_s: f64, xi: f64, p: &ChannelParams) -> Result<f64> {
    if !(0.0..=1.0).contains(&xi) {
        return Err(Error::Range { name: "xi", value: xi });
    }
    Ok(qfi_if_closed(n_s * (1.0 - xi), n_s * xi, p)?.total)
}

/// `∂_ξ I^{IF}` at `ξ = 1`, from `f₁` at zero temperature and a one-sided
/// second-order difference otherwise.
fn slope_at_squeezed_edge(n_s: f64, p: &ChannelParams) -> Result<f64> {
    if p.n_b == 0.0 {
        return Ok(4.0 * n_s * f1(p.eta, n_s));
    }
    let h = EDGE_STEP;
    let f0 = qfi_idler_free(n_s, 1.0, p)?;
    let f1 = qfi_idler_free(n_s, 1.0 - h, p)?;
    let f2 = qfi_idler_free(n_s, 1.0 - 2.0 * h, p)?;
    Ok((3.0 * f0 - 4.0 * f1 + f2) / (2.0 * h))
}

/// Maximizes the idler-free QFI over `ξ ∈ [0, 1]`.
///
/// A 64-point grid picks the bracket and golden-section search refines it.
/// `ξ = 1` is reported exactly when the slope there is non-negative.
pub fn optimize_xi(n_s: f64, p: &ChannelParams) -> Result<XiOptResult> {
    if !(n_s > 0.0) || !n_s.is_finite() {
        return Err(Error::Range { name: "n_s", value: n_s });
    }
    let q = |xi: f64| qfi_idler_free(n_s, xi, p);
    let q0 = q(0.0)?;
    let q1 = q(1.0)?;
    if slope_at_squeezed_edge(n_s, p)? >= 0.0 && q1 >= q0 {
        return Ok(XiOptResult { xi_opt: 1.0, qfi_opt: q1, boundary: XiBoundary::SqueezedEdge });
    }

    let step = 1.0 / (XI_GRID - 1) as f64;
    let mut best = (0usize, q0);
    for k in 1..XI_GRID {
        let v = q(k as f64 * step)?;
        if v > best.1 {
            best = (k, v);
        }
    }
    let lo = best.0.saturating_sub(1) as f64 * step;
    let hi = ((best.0 + 1).min(XI_GRID - 1)) as f64 * step;
    let (x, fx) = golden_max(|xi| q(xi).unwrap_or(f64::NEG_INFINITY), lo, hi, XI_TOL);

    let mut out = XiOptResult { xi_opt: x, qfi_opt: fx, boundary: XiBoundary::Interior };
    if best.1 > out.qfi_opt {
        out.xi_opt = best.0 as f64 * step;
        out.qfi_opt = best.1;
    }
    if q0 >= out.qfi_opt {
        out = XiOptResult { xi_opt: 0.0, qfi_opt: q0, boundary: XiBoundary::CoherentEdge };
    }
    if q1 > out.qfi_opt {
        out = XiOptResult { xi_opt: 1.0, qfi_opt: q1, boundary: XiBoundary::SqueezedEdge };
    }
    Ok(out)
}

/// Result of the exhaustive two-mode search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoModeOptimum {
    pub zeta: f64,
    pub r: f64,
    pub qfi: f64,
}

/// `ζ` at index `i` of a linear grid on `[0, 1]`.
pub fn zeta_grid(i: usize, n: usize) -> f64 {
    if i + 1 >= n {
        1.0
    } else {
        i as f64 / (n - 1) as f64
    }
}

/// `r` at index `j` of a logarithmic grid on `[r_min(N_S, ζ), 1]`.
pub fn r_grid(n_s: f64, zeta: f64, j: usize, n: usize) -> f64 {
    if j + 1 >= n {
        return 1.0;
    }
    let lo = r_min(n_s, zeta);
    let frac = 1.0 - j as f64 / (n - 1) as f64;
    libm::pow(lo, frac)
}

/// Two-mode QFI at grid point `(i, j)`, `θ = φ = 0`.
pub fn two_mode_grid_qfi(n_s: f64, p: &ChannelParams, i: usize, j: usize, grid: (usize, usize)) -> Result<TwoModeOptimum> {
    let zeta = zeta_grid(i, grid.0);
    let r = r_grid(n_s, zeta, j, grid.1);
    let qfi = qfi_two_mode_closed(&TwoModeProbe { n_s, zeta, r, theta: 0.0, phi: 0.0 }, p)?;
    Ok(TwoModeOptimum { zeta, r, qfi })
}

/// Argmax of the two-mode QFI over a `(ζ, r)` grid; ties go to larger `ζ`,
/// then larger `r`.
pub fn optimize_two_mode(n_s: f64, p: &ChannelParams, grid: (usize, usize)) -> Result<TwoModeOptimum> {
    if grid.0 < 2 || grid.1 < 2 {
        return Err(Error::Range { name: "grid", value: grid.0.min(grid.1) as f64 });
    }
    let mut best: Option<TwoModeOptimum> = None;
    for i in 0..grid.0 {
        for j in 0..grid.1 {
            let pt = two_mode_grid_qfi(n_s, p, i, j, grid)?;
            if best.is_none_or(|b| pt.qfi >= b.qfi) {
                best = Some(pt);
            }
        }
    }
    best.ok_or(Error::DegenerateDenominator)
}

/// Finite-difference derivatives of the two-mode QFI at `(ζ, r) = (1, 1)`:
/// `(∂_r I, ∂²_r I, ∂_ζ I)`, central with step [`STATIONARITY_STEP`].
pub fn tmsv_stationarity_check(n_s: f64, p: &ChannelParams) -> Result<(f64, f64, f64)> {
    let h = STATIONARITY_STEP;
    let f = |zeta: f64, r: f64| two_mode_continued(n_s, zeta, r, p);
    let c = f(1.0, 1.0)?;
    let rp = f(1.0, 1.0 + h)?;
    let rm = f(1.0, 1.0 - h)?;
    let zp = f(1.0 + h, 1.0)?;
    let zm = f(1.0 - h, 1.0)?;
    Ok(((rp - rm) / (2.0 * h), (rp - 2.0 * c + rm) / (h * h), (zp - zm) / (2.0 * h)))
}

/// Per-copy QFI of a family at `N_S` photons.
fn family_qfi(family: ProbeFamily, n_s: f64, xi: f64, p: &ChannelParams) -> Result<f64> {
    match family {
        ProbeFamily::IdlerFree => qfi_idler_free(n_s, xi, p),
        ProbeFamily::Coherent => qfi_coherent(n_s, p),
        ProbeFamily::Tmsv => qfi_tmsv(n_s, p),
    }
}

/// Total QFI `M·I_η(𝒩_S/M)`; the `M = ∞` value is the closed-form limit.
pub fn total_qfi(total_photons: f64, m: Bandwidth, family: ProbeFamily, xi: f64, p: &ChannelParams) -> Result<TotalQfi> {
    if !(total_photons >= 0.0) || !total_photons.is_finite() {
        return Err(Error::Range { name: "total_photons", value: total_photons });
    }
    if !(0.0..=1.0).contains(&xi) {
        return Err(Error::Range { name: "xi", value: xi });
    }
    match m {
        Bandwidth::Finite(0) => Err(Error::Range { name: "m", value: 0.0 }),
        Bandwidth::Finite(m) => {
            let m = m as f64;
            Ok(TotalQfi::Finite(m * family_qfi(family, total_photons / m, xi, p)?))
        }
        Bandwidth::Infinite => infinite_bandwidth_qfi(total_photons, family, xi, p),
    }
}

fn infinite_bandwidth_qfi(total: f64, family: ProbeFamily, xi: f64, p: &ChannelParams) -> Result<TotalQfi> {
    // validates η
    qfi_coherent(0.0, p)?;
    let e2 = p.eta * p.eta;
    let t = 1.0 - e2;
    let nb = p.n_b;
    if !p.normalized && nb > 0.0 {
        return Ok(TotalQfi::Divergent);
    }
    let v = if nb == 0.0 {
        match family {
            ProbeFamily::Coherent => 4.0 * total,
            ProbeFamily::Tmsv => 4.0 * total / t,
            ProbeFamily::IdlerFree => 4.0 * total * ((1.0 - xi) + xi * (t * t + e2 * e2) / t),
        }
    } else {
        match family {
            ProbeFamily::Coherent => 4.0 * total / (2.0 * nb + 1.0),
            ProbeFamily::Tmsv => 4.0 * total / (nb + 1.0 - e2),
            ProbeFamily::IdlerFree => 4.0 * total * ((1.0 - xi) / (2.0 * nb + 1.0) + 2.0 * xi * e2 / (2.0 * nb * nb + 2.0 * nb + 1.0)),
        }
    };
    Ok(TotalQfi::Finite(v))
}

/// Chooses between `M = 1` and `M = ∞` for a family; ties keep `M = 1`.
///
/// For the idler-free family `ξ` is optimized jointly: at `M = 1` by
/// [`optimize_xi`], at `M = ∞` the limit is linear in `ξ` so an edge wins.
pub fn optimize_bandwidth(total_photons: f64, p: &ChannelParams, family: ProbeFamily) -> Result<BandwidthPlan> {
    if !(total_photons > 0.0) || !total_photons.is_finite() {
        return Err(Error::Range { name: "total_photons", value: total_photons });
    }
    let (xi_one, one) = match family {
        ProbeFamily::IdlerFree => {
            let o = optimize_xi(total_photons, p)?;
            (o.xi_opt, o.qfi_opt)
        }
        _ => (0.0, family_qfi(family, total_photons, 0.0, p)?),
    };
    let xi_inf = match family {
        ProbeFamily::IdlerFree => infinite_xi(p)?,
        _ => 0.0,
    };
    let inf = infinite_bandwidth_qfi(total_photons, family, xi_inf, p)?;
    let plan = |m, total_qfi, xi| BandwidthPlan { total_photons, m, total_qfi, probe_family: family, xi };
    if inf.value() > one {
        Ok(plan(Bandwidth::Infinite, inf, xi_inf))
    } else {
        Ok(plan(Bandwidth::Finite(1), TotalQfi::Finite(one), xi_one))
    }
}

/// Edge value of `ξ` maximizing the per-photon slope at `N_S → 0`.
fn infinite_xi(p: &ChannelParams) -> Result<f64> {
    let e2 = p.eta * p.eta;
    let t = 1.0 - e2;
    let nb = p.n_b;
    if nb > 0.0 && !p.normalized {
        return Ok(if g2(p.eta, nb) > 1.0 / (1.0 + 2.0 * nb * t) { 1.0 } else { 0.0 });
    }
    let TotalQfi::Finite(sq) = infinite_bandwidth_qfi(1.0, ProbeFamily::IdlerFree, 1.0, p)? else {
        return Ok(0.0);
    };
    let TotalQfi::Finite(coh) = infinite_bandwidth_qfi(1.0, ProbeFamily::IdlerFree, 0.0, p)? else {
        return Ok(0.0);
    };
    Ok(if sq > coh { 1.0 } else { 0.0 })
}

fn kind_qfi(kind: ProbeKind, n_s: f64, p: &ChannelParams) -> Result<f64> {
    match kind {
        ProbeKind::Coherent => qfi_coherent(n_s, p),
        ProbeKind::SqueezedVacuum => qfi_idler_free(n_s, 1.0, p),
        ProbeKind::DisplacedSqueezed { xi } => qfi_idler_free(n_s, xi, p),
        ProbeKind::OptimalIdlerFree => {
            if n_s == 0.0 {
                qfi_coherent(0.0, p)
            } else {
                Ok(optimize_xi(n_s, p)?.qfi_opt)
            }
        }
        ProbeKind::Tmsv => qfi_tmsv(n_s, p),
    }
}

/// `I_a / I_b` at equal `N_S` per mode.
pub fn advantage_ratio(a: ProbeKind, b: ProbeKind, p: &ChannelParams, n_s: f64) -> Result<f64> {
    let num = kind_qfi(a, n_s, p)?;
    let den = kind_qfi(b, n_s, p)?;
    if den == 0.0 {
        return Err(Error::DivisionByZero);
    }
    Ok(num / den)
}
