//! One- and two-mode Gaussian states in the `(q_S, p_S, q_I, p_I)` ordering.

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use twofloat::TwoFloat;

use crate::math::{exp, powi, sqrt};

const SYMMETRY_TOL: f64 = 1e-12;
const HEISENBERG_TOL: f64 = -1e-10;
const DET_TOL: f64 = 1e-12;

/// Gaussian state: first moments `d` and covariance `Σ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianState {
    modes: usize,
    d: Vector,
    sigma: Matrix,
}

/// Block-diagonal symplectic form `⊕ [[0, 1], [−1, 0]]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymplecticForm {
    pub modes: usize,
}

impl SymplecticForm {
    pub fn new(modes: usize) -> Self {
        SymplecticForm { modes }
    }

    pub fn matrix(&self) -> Matrix {
        let n = 2 * self.modes;
        Matrix::from_fn(n, |i, j| {
            if i % 2 == 0 && j == i + 1 {
                1.0
            } else if i % 2 == 1 && j + 1 == i {
                -1.0
            } else {
                0.0
            }
        })
    }
}

/// Validates `(d, Σ)` and returns the state.
pub fn make_state(d: &[f64], sigma: Matrix) -> Result<GaussianState> {
    let n = sigma.dim();
    if n != 2 && n != 4 {
        return Err(Error::DimensionMismatch { expected: 4, found: n });
    }
    if d.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: d.len() });
    }
    let asym = sigma.asymmetry();
    if asym > SYMMETRY_TOL || !sigma.max_abs().is_finite() || d.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonPhysical { margin: -asym });
    }
    let modes = n / 2;
    let sigma = sigma.symmetrized();
    let margin = heisenberg_margin(&sigma);
    if margin < HEISENBERG_TOL {
        return Err(Error::NonPhysical { margin });
    }
    let floor = powi(0.25, modes as i32);
    if sigma.determinant() < floor - DET_TOL {
        return Err(Error::NonPhysical { margin });
    }
    Ok(GaussianState { modes, d: Vector::from_slice(d), sigma })
}

impl GaussianState {
    /// Builds a state without the physicality check. Used for channel outputs
    /// and probes whose construction guarantees validity.
    pub(crate) fn from_parts(d: Vector, sigma: Matrix) -> Self {
        GaussianState { modes: sigma.dim() / 2, d, sigma }
    }

    pub fn vacuum(modes: usize) -> Self {
        assert!(modes == 1 || modes == 2);
        let n = 2 * modes;
        Self::from_parts(Vector::zeros(n), Matrix::identity(n).scale(0.5))
    }

    /// Single-mode thermal state with mean photon number `n`.
    pub fn thermal(n: f64) -> Self {
        Self::from_parts(Vector::zeros(2), Matrix::identity(2).scale(n + 0.5))
    }

    #[inline]
    pub fn modes(&self) -> usize {
        self.modes
    }

    #[inline]
    pub fn d(&self) -> &Vector {
        &self.d
    }

    #[inline]
    pub fn sigma(&self) -> &Matrix {
        &self.sigma
    }

    /// Mean photon number of mode `k` (0 = signal, 1 = idler).
    pub fn mean_photons(&self, k: usize) -> f64 {
        let b = self.sigma.block(2 * k, 2 * k, 2);
        let dk = self.d[2 * k] * self.d[2 * k] + self.d[2 * k + 1] * self.d[2 * k + 1];
        0.5 * b.trace() + 0.5 * dk - 0.5
    }
}

/// Smallest eigenvalue of the Hermitian matrix `Σ + iΩ/2`.
///
/// Computed on the real symmetric embedding `[[Σ, −Ω/2], [Ω/2, Σ]]`, whose
/// spectrum is that of `Σ + iΩ/2` with every eigenvalue doubled.
pub fn heisenberg_margin(sigma: &Matrix) -> f64 {
    let n = sigma.dim();
    let half_omega = SymplecticForm::new(n / 2).matrix().scale(0.5);
    let mut emb = Matrix::zeros(2 * n);
    emb.set_block(0, 0, sigma);
    emb.set_block(n, n, sigma);
    emb.set_block(0, n, &(-half_omega));
    emb.set_block(n, 0, &half_omega);
    emb.symmetric_eigen().values[0]
}

/// Purity `μ = [4^n det Σ]^{−1/2}`.
pub fn purity(state: &GaussianState) -> f64 {
    let scale = powi(4.0, state.modes as i32);
    1.0 / sqrt(scale * state.sigma.determinant())
}

/// Uhlmann fidelity `(Tr √(√ρ σ √ρ))²` between two Gaussian states.
pub fn gaussian_fidelity(a: &GaussianState, b: &GaussianState) -> Result<f64> {
    let (q, f) = fidelity_parts(a, b)?;
    Ok(exp(-0.5 * q) * f.hi())
}

/// `1 − √F` without the cancellation of forming `F` first.
///
/// Stays accurate when the two states are so close that `F` rounds to 1,
/// which is what finite-difference QFI estimates need.
pub fn one_minus_sqrt_fidelity(a: &GaussianState, b: &GaussianState) -> Result<f64> {
    let (q, f) = fidelity_parts(a, b)?;
    let root_gauss = exp(-0.25 * q);
    let gauss_gap = -libm::expm1(-0.25 * q);
    let cov_gap = (Dd::from(1.0) - f.sqrt()).hi();
    Ok(gauss_gap + root_gauss * cov_gap)
}

type Dd = TwoFloat;

/// Returns `δᵀ(V₁+V₂)⁻¹δ` and the covariance factor of the fidelity, the latter
/// in double-double arithmetic.
fn fidelity_parts(a: &GaussianState, b: &GaussianState) -> Result<(f64, Dd)> {
    if a.modes != b.modes {
        return Err(Error::DimensionMismatch { expected: a.modes, found: b.modes });
    }
    let sum = a.sigma + b.sigma;
    let delta = b.d - a.d;
    let inv = sum.inverse().ok_or(Error::NonPhysical { margin: 0.0 })?;
    let q = inv.quad_form(&delta);

    let n = 2 * a.modes;
    let va = to_dd(&a.sigma);
    let vb = to_dd(&b.sigma);
    let mut vs = [[Dd::from(0.0); 4]; 4];
    for i in 0..n {
        for j in 0..n {
            vs[i][j] = va[i][j] + vb[i][j];
        }
    }
    let zero = Dd::from(0.0);
    let quarter = Dd::from(0.25);
    let f = if a.modes == 1 {
        let big_delta = det_dd(&vs, 2);
        let pa = max_dd(det_dd(&va, 2) - quarter, zero);
        let pb = max_dd(det_dd(&vb, 2) - quarter, zero);
        let lam = pa * pb * 4.0;
        div_dd((big_delta + lam).sqrt() + lam.sqrt(), big_delta)
    } else {
        let big_delta = det_dd(&vs, 4);
        // ΩV₁ΩV₂ − I/4, with Ω acting as a signed row/column permutation
        let omega = |m: &[[Dd; 4]; 4]| {
            let mut out = [[zero; 4]; 4];
            for i in 0..4 {
                let (partner, sign) = if i % 2 == 0 { (i + 1, 1.0) } else { (i - 1, -1.0) };
                for j in 0..4 {
                    out[i][j] = m[partner][j] * sign;
                }
            }
            out
        };
        let oa = omega(&va);
        let ob = omega(&vb);
        let mut prod = [[zero; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = zero;
                for k in 0..4 {
                    acc += oa[i][k] * ob[k][j];
                }
                prod[i][j] = if i == j { acc - quarter } else { acc };
            }
        }
        let gamma = max_dd(det_dd(&prod, 4) * 16.0, zero);
        let lam = max_dd(det_plus_i_omega(&va) * det_plus_i_omega(&vb) * 16.0, zero);
        let x = gamma.sqrt() + lam.sqrt();
        div_dd(x + max_dd(x * x - big_delta, zero).sqrt(), big_delta)
    };
    Ok((q, f))
}

fn to_dd(m: &Matrix) -> [[Dd; 4]; 4] {
    let mut out = [[Dd::from(0.0); 4]; 4];
    for (i, row) in out.iter_mut().enumerate().take(m.dim()) {
        for (j, v) in row.iter_mut().enumerate().take(m.dim()) {
            *v = Dd::from(m[(i, j)]);
        }
    }
    out
}

/// Quotient with one correction step, accurate to double-double precision.
fn div_dd(a: Dd, b: Dd) -> Dd {
    let q0 = a.hi() / b.hi();
    let rem = a - b * q0;
    let q1 = rem.hi() / b.hi();
    let q = Dd::from(q0) + q1;
    let rem = a - b * q;
    q + rem.hi() / b.hi()
}

fn max_dd(a: Dd, b: Dd) -> Dd {
    if a < b {
        b
    } else {
        a
    }
}

/// Determinant of the leading `n × n` block by LU with partial pivoting.
fn det_dd(m: &[[Dd; 4]; 4], n: usize) -> Dd {
    let mut a = *m;
    let mut det = Dd::from(1.0);
    for k in 0..n {
        let mut p = k;
        for i in (k + 1)..n {
            if a[i][k].hi().abs() > a[p][k].hi().abs() {
                p = i;
            }
        }
        if a[p][k].hi() == 0.0 {
            return Dd::from(0.0);
        }
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        det *= a[k][k];
        for i in (k + 1)..n {
            let f = div_dd(a[i][k], a[k][k]);
            for j in (k + 1)..n {
                let t = f * a[k][j];
                a[i][j] -= t;
            }
        }
    }
    det
}

/// `det(Σ + iΩ/2)` for a two-mode covariance, i.e. `(ν₁² − ¼)(ν₂² − ¼)` in
/// terms of the symplectic eigenvalues.
fn det_plus_i_omega(s: &[[Dd; 4]; 4]) -> Dd {
    let det2 = |r: usize, c: usize| s[r][c] * s[r + 1][c + 1] - s[r][c + 1] * s[r + 1][c];
    let seralian = det2(0, 0) + det2(2, 2) + det2(0, 2) * 2.0;
    det_dd(s, 4) - seralian * 0.25 + Dd::from(1.0 / 16.0)
}
