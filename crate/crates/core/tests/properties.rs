use proptest::prelude::*;

use lossfish_core::channel::{apply_channel, channel_derivative};
use lossfish_core::gaussian::{gaussian_fidelity, heisenberg_margin, make_state, purity};
use lossfish_core::hypothesis::{fidelity_error_bound, HypothesisSpec};
use lossfish_core::linalg::Matrix;
use lossfish_core::optimize::{qfi_idler_free, total_qfi, Bandwidth, ProbeFamily};
use lossfish_core::probes::{build_single_mode, build_two_mode, canonicalize, r_min, SingleModeProbe, TwoModeProbe};
use lossfish_core::qfi::{qfi_if_closed, qfi_shadow, qfi_sld, qfi_tmsv, qfi_two_mode_closed};
use lossfish_core::{ChannelParams, GaussianState};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn single_probe() -> impl Strategy<Value = SingleModeProbe> {
    (0.0..10.0f64, 0.0..=1.0f64, -3.2..3.2f64).prop_map(|(n_s, xi, theta)| SingleModeProbe { n_s, xi, theta })
}

fn two_mode_probe() -> impl Strategy<Value = TwoModeProbe> {
    (0.01..10.0f64, 0.0..=1.0f64, 0.0..=1.0f64, -3.2..3.2f64, -3.2..3.2f64).prop_map(|(n_s, zeta, u, theta, phi)| {
        let lo = r_min(n_s, zeta);
        let r = lo.powf(1.0 - u);
        TwoModeProbe { n_s, zeta, r, theta, phi }
    })
}

fn channel() -> impl Strategy<Value = ChannelParams> {
    (0.02..0.98f64, 0.0..10.0f64, any::<bool>()).prop_map(|(eta, n_b, normalized)| ChannelParams { eta, n_b, normalized })
}

fn rotation(a: f64) -> Matrix {
    Matrix::from_rows([[a.cos(), -a.sin()], [a.sin(), a.cos()]])
}

/// Local symplectic: rotation, squeeze, rotation on each mode.
fn local_symplectic(angles: [f64; 4], squeeze: [f64; 2]) -> Matrix {
    let mut s = Matrix::zeros(4);
    for m in 0..2 {
        let k = Matrix::from_diagonal(&[squeeze[m], 1.0 / squeeze[m]]);
        s.set_block(2 * m, 2 * m, &(rotation(angles[2 * m]) * k * rotation(angles[2 * m + 1])));
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn built_states_are_physical(p in single_probe(), q in two_mode_probe()) {
        let a = build_single_mode(&p).unwrap();
        let b = build_two_mode(&q).unwrap();
        prop_assert!(heisenberg_margin(a.sigma()) >= -1e-10);
        prop_assert!(heisenberg_margin(b.sigma()) >= -1e-10);
        prop_assert!(make_state(a.d().as_slice(), *a.sigma()).is_ok());
        prop_assert!(make_state(b.d().as_slice(), *b.sigma()).is_ok());
    }

    #[test]
    fn photon_number_matches_budget(p in single_probe(), q in two_mode_probe()) {
        let a = build_single_mode(&p).unwrap();
        prop_assert!((a.mean_photons(0) - p.n_s).abs() <= 1e-10 * (1.0 + p.n_s));
        let b = build_two_mode(&q).unwrap();
        prop_assert!((b.mean_photons(0) - q.n_s).abs() <= 1e-10 * (1.0 + q.n_s));
    }

    #[test]
    fn purity_is_symplectic_invariant(q in two_mode_probe(), nb in 0.0..5.0f64, eta in 0.1..0.9f64,
                                      angles in prop::array::uniform4(-3.2..3.2f64),
                                      sq in prop::array::uniform2(0.3..3.0f64)) {
        let out = apply_channel(&build_two_mode(&q).unwrap(), &ChannelParams::unnormalized(eta, nb).unwrap()).unwrap();
        let s = local_symplectic(angles, sq);
        let moved = make_state(out.d().as_slice(), (s * *out.sigma() * s.transpose()).symmetrized()).unwrap();
        prop_assert!((purity(&out) - purity(&moved)).abs() < 1e-12);
    }

    #[test]
    fn fidelity_is_symmetric_and_bounded(p in single_probe(), c1 in channel(), c2 in channel()) {
        let probe = build_single_mode(&p).unwrap();
        let a = apply_channel(&probe, &c1).unwrap();
        let b = apply_channel(&probe, &c2).unwrap();
        let ab = gaussian_fidelity(&a, &b).unwrap();
        let ba = gaussian_fidelity(&b, &a).unwrap();
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&ab));
        prop_assert!((gaussian_fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn two_mode_fidelity_is_symmetric(q in two_mode_probe(), c1 in channel(), c2 in channel()) {
        let probe = build_two_mode(&q).unwrap();
        let a = apply_channel(&probe, &c1).unwrap();
        let b = apply_channel(&probe, &c2).unwrap();
        let ab = gaussian_fidelity(&a, &b).unwrap();
        prop_assert!((ab - gaussian_fidelity(&b, &a).unwrap()).abs() < 1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&ab));
        prop_assert!((gaussian_fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn channel_preserves_physicality(q in two_mode_probe(), eta in 0.0..=1.0f64, nb in 0.0..100.0f64) {
        let out = apply_channel(&build_two_mode(&q).unwrap(), &ChannelParams::unnormalized(eta, nb).unwrap()).unwrap();
        prop_assert!(heisenberg_margin(out.sigma()) >= -1e-10);
    }

    #[test]
    fn zero_temperature_channel_composes(q in two_mode_probe(), e1 in 0.0..=1.0f64, e2 in 0.0..=1.0f64) {
        let probe = build_two_mode(&q).unwrap();
        let step = apply_channel(&apply_channel(&probe, &ChannelParams::unnormalized(e1, 0.0).unwrap()).unwrap(),
                                 &ChannelParams::unnormalized(e2, 0.0).unwrap()).unwrap();
        let once = apply_channel(&probe, &ChannelParams::unnormalized(e1 * e2, 0.0).unwrap()).unwrap();
        prop_assert!((*step.sigma() - *once.sigma()).max_abs() <= 1e-12 * (1.0 + once.sigma().max_abs()));
        prop_assert!((*step.d() - *once.d()).max_abs() <= 1e-12 * (1.0 + once.d().max_abs()));
    }

    #[test]
    fn derivative_matches_finite_difference(q in two_mode_probe(), c in channel()) {
        let probe = build_two_mode(&q).unwrap();
        let h = 1e-6;
        let (dd, ds) = channel_derivative(&probe, &c).unwrap();
        let hi = apply_channel(&probe, &c.with_eta(c.eta + h)).unwrap();
        let lo = apply_channel(&probe, &c.with_eta(c.eta - h)).unwrap();
        let fd = (*hi.sigma() - *lo.sigma()).scale(0.5 / h);
        prop_assert!((fd - ds).max_abs() <= 1e-6 * (1.0 + ds.max_abs()));
        let fdd = (*hi.d() - *lo.d()).scale(0.5 / h);
        prop_assert!((fdd - dd).max_abs() <= 1e-6 * (1.0 + dd.max_abs()));
    }

    #[test]
    fn qfi_is_nonnegative_and_closed_matches_sld(p in single_probe(), c in channel()) {
        let state = build_single_mode(&SingleModeProbe { theta: 0.0, ..p }).unwrap();
        let closed = qfi_if_closed(p.n_coh(), p.n_sq(), &c).unwrap();
        let sld = qfi_sld(&state, &c).unwrap();
        prop_assert!(closed.total >= 0.0);
        prop_assert!((closed.total - (closed.term_displacement + closed.term_squeeze + closed.term_shadow)).abs() <= 1e-12 * closed.total.max(1.0));
        prop_assert!(rel(sld, closed.total) < 1e-8 || (sld - closed.total).abs() < 1e-12);
    }

    #[test]
    fn two_mode_closed_matches_sld(q in two_mode_probe(), eta in 0.02..0.98f64, nb in 0.0..10.0f64) {
        let c = ChannelParams::unnormalized(eta, nb).unwrap();
        let closed = qfi_two_mode_closed(&q, &c).unwrap();
        let sld = qfi_sld(&build_two_mode(&q).unwrap(), &c).unwrap();
        prop_assert!(rel(closed, sld) < 1e-8, "closed {} sld {}", closed, sld);
    }

    #[test]
    fn qfi_ignores_phi(q in two_mode_probe(), c in channel(), phi in -3.2..3.2f64) {
        let a = qfi_sld(&build_two_mode(&q).unwrap(), &c).unwrap();
        let b = qfi_sld(&build_two_mode(&TwoModeProbe { phi, ..q }).unwrap(), &c).unwrap();
        prop_assert!(rel(a, b) < 1e-9);
    }

    #[test]
    fn canonical_form_keeps_qfi(q in two_mode_probe(), c in channel(),
                                angles in prop::array::uniform4(-3.2..3.2f64),
                                sq in prop::array::uniform2(0.5..2.0f64)) {
        // a local operation on the idler plus a rotation of the signal
        let state = build_two_mode(&q).unwrap();
        let mut s = local_symplectic(angles, sq);
        s.set_block(0, 0, &rotation(angles[0]));
        let moved = make_state(&(s.mul_vec(state.d())).as_slice()[..4], (s * *state.sigma() * s.transpose()).symmetrized()).unwrap();
        let canon = canonicalize(&moved).unwrap();
        let a = qfi_sld(&state, &c).unwrap();
        let b = qfi_sld(&build_two_mode(&canon).unwrap(), &c).unwrap();
        prop_assert!(rel(b, a) < 1e-9, "{} vs {}", a, b);
    }

    #[test]
    fn theta_zero_is_optimal(p in single_probe(), c in channel()) {
        let at = |theta| qfi_sld(&build_single_mode(&SingleModeProbe { theta, ..p }).unwrap(), &c).unwrap();
        let (best, other) = (at(0.0), at(p.theta));
        prop_assert!(best >= other - 1e-9 * best.max(1.0));
        // closed expression of the gap
        let eta = c.eta;
        let r = p.r();
        let y = c.additive_noise();
        let gap = 4.0 * eta * eta * (1.0 - r * r) / ((eta * eta + 2.0 * r * y) * (r * eta * eta + 2.0 * y)) * p.n_coh() * p.theta.sin().powi(2);
        prop_assert!((best - other - gap).abs() <= 1e-8 * best.max(1.0), "{} {}", best - other, gap);
    }

    #[test]
    fn two_mode_theta_zero_is_optimal(q in two_mode_probe(), c in channel()) {
        let a = qfi_sld(&build_two_mode(&TwoModeProbe { theta: 0.0, ..q }).unwrap(), &c).unwrap();
        let b = qfi_sld(&build_two_mode(&q).unwrap(), &c).unwrap();
        prop_assert!(a >= b - 1e-9 * a);
        if (q.r - 1.0).abs() < 1e-15 {
            prop_assert!(rel(a, b) < 1e-9);
        }
    }

    #[test]
    fn zero_temperature_bound(p in single_probe(), q in two_mode_probe(), eta in 0.0..0.99f64) {
        let c = ChannelParams::unnormalized(eta, 0.0).unwrap();
        let bound = |n: f64| 4.0 * n / (1.0 - eta * eta) + 1e-9;
        prop_assert!(qfi_if_closed(p.n_coh(), p.n_sq(), &c).unwrap().total <= bound(p.n_s));
        prop_assert!(qfi_two_mode_closed(&q, &c).unwrap() <= bound(q.n_s));
        prop_assert!(qfi_tmsv(q.n_s, &c).unwrap() <= bound(q.n_s));
    }

    #[test]
    fn normalized_total_bound(total in 0.01..100.0f64, m in 1u64..1000, xi in 0.0..=1.0f64, eta in 0.0..0.99f64, nb in 0.0..10.0f64) {
        let c = ChannelParams::new(eta, nb, true).unwrap();
        let bound = 4.0 * total / (nb + 1.0 - eta * eta) + 1e-9;
        for fam in [ProbeFamily::IdlerFree, ProbeFamily::Tmsv, ProbeFamily::Coherent] {
            for band in [Bandwidth::Finite(m), Bandwidth::Infinite] {
                let v = total_qfi(total, band, fam, xi, &c).unwrap().value();
                prop_assert!(v <= bound * (1.0 + 1e-12), "{:?} {:?} {} > {}", fam, band, v, bound);
            }
        }
    }

    #[test]
    fn shadow_grows_with_bath(eta in 0.01..0.99f64, nb in 0.0..100.0f64) {
        let a = qfi_shadow(&ChannelParams::unnormalized(eta, nb).unwrap()).unwrap();
        let b = qfi_shadow(&ChannelParams::unnormalized(eta, nb * 1.01 + 1e-3).unwrap()).unwrap();
        prop_assert!(b > a);
    }

    #[test]
    fn vacuum_idler_changes_nothing(n_s in 0.01..10.0f64, c in channel()) {
        let single = qfi_sld(&build_single_mode(&SingleModeProbe::coherent(n_s)).unwrap(), &c).unwrap();
        let joint = qfi_sld(&build_two_mode(&TwoModeProbe { n_s, zeta: 0.0, r: 1.0, theta: 0.0, phi: 0.0 }).unwrap(), &c).unwrap();
        prop_assert!(rel(joint, single) < 1e-9);
    }

    #[test]
    fn error_bound_shrinks_with_copies_and_separation(p in single_probe(), eta in 0.1..0.8f64, d in 0.01..0.15f64, nb in 0.0..5.0f64) {
        let probe = build_single_mode(&p).unwrap();
        let c = ChannelParams::unnormalized(eta, nb).unwrap();
        let bound = |m, d: f64| fidelity_error_bound(&HypothesisSpec::new(eta + d, eta, m, probe, c).unwrap()).unwrap();
        let b1 = bound(1, d);
        prop_assert!((0.0..=0.5).contains(&b1));
        prop_assert!(bound(2, d) <= b1);
        prop_assert!(bound(1, 1.5 * d) <= b1 + 1e-15);
    }
}

#[test]
fn concave_in_xi_at_zero_temperature() {
    for k in 1..=9 {
        let eta = 0.1 * k as f64;
        let c = ChannelParams::unnormalized(eta, 0.0).unwrap();
        for n_s in [0.01, 0.1, 1.0, 10.0, 100.0] {
            let q: Vec<f64> = (0..=100).map(|i| qfi_idler_free(n_s, i as f64 / 100.0, &c).unwrap()).collect();
            for w in q.windows(3) {
                let d2 = w[0] - 2.0 * w[1] + w[2];
                assert!(d2 <= 1e-12 * w[1], "eta {eta} n_s {n_s} d2 {d2}");
            }
        }
    }
}

#[test]
fn two_mode_pure_invariant() {
    for n_s in [0.01, 1.0, 50.0] {
        let s = *build_two_mode(&TwoModeProbe { n_s, zeta: 1.0, r: 1.0, theta: 0.0, phi: 0.0 }).unwrap().sigma();
        let sum = s.block(0, 0, 2).determinant() + s.block(2, 2, 2).determinant() + 2.0 * s.block(0, 2, 2).determinant();
        assert!((sum - 0.5).abs() < 1e-10 * (1.0 + n_s * n_s));
    }
}

#[test]
fn vacuum_state_has_unit_fidelity_only_with_itself() {
    let vac = GaussianState::vacuum(2);
    assert!((gaussian_fidelity(&vac, &vac).unwrap() - 1.0).abs() < 1e-12);
    let other = build_two_mode(&TwoModeProbe { n_s: 0.1, zeta: 1.0, r: 1.0, theta: 0.0, phi: 0.0 }).unwrap();
    assert!(gaussian_fidelity(&vac, &other).unwrap() < 1.0 - 1e-3);
}
