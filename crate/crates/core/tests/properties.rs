use std::f64::consts::PI;

use ab_kernels::angular::{solve_angular, FluxConfig, TrigPoly};
use ab_kernels::estimates::admissible;
use ab_kernels::kernels::{heat_kernel_closed, kernel_closed, kernel_series, KernelOptions};
use ab_kernels::propagators::{angle_grid, Equation, FieldState, FlowSpec, SpectralFilter};
use ab_kernels::specfun::{bessel_i, bessel_j, bessel_y};
use ab_kernels::transforms::lp_windows;
use ab_kernels::{Complex64, PolarPoint};
use approx::assert_relative_eq;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bessel_j_recurrence(nu in 1.0f64..10.0, x in 0.1f64..50.0) {
        let lhs = x * (bessel_j(nu - 1.0, x).unwrap() + bessel_j(nu + 1.0, x).unwrap());
        let rhs = 2.0 * nu * bessel_j(nu, x).unwrap();
        let scale = bessel_j(nu, x).unwrap().hypot(bessel_y(nu, x).unwrap()) * x.max(1.0);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * scale);
    }

    #[test]
    fn bessel_i_recurrence(nu in 1.0f64..8.0, re in 0.1f64..20.0, im in -10.0f64..10.0) {
        let z = Complex64::new(re, im);
        let lhs = bessel_i(nu - 1.0, z).unwrap() - bessel_i(nu + 1.0, z).unwrap();
        let rhs = bessel_i(nu, z).unwrap() * (2.0 * nu) / z;
        prop_assert!((lhs - rhs).norm() <= 1e-9 * (lhs.norm() + rhs.norm()));
    }

    #[test]
    fn admissible_pairs_satisfy_scaling(q in 2.0f64..40.0, p in 2.0f64..40.0, eta in 0.0f64..1.0) {
        let (ok, s) = admissible(q, p, eta);
        prop_assert_eq!(ok, 2.0 / q + (1.0 + eta) / p <= 0.5 * (1.0 + eta) + 1e-14);
        if let Some(s) = s {
            prop_assert!((1.0 / q + (2.0 + eta) / p - (0.5 * (2.0 + eta) - s)).abs() < 1e-12);
            prop_assert!(s >= -1e-12 && s < 0.5 * (2.0 + eta));
        }
    }

    #[test]
    fn heat_kernel_is_hermitian_and_diamagnetic(
        alpha in -1.5f64..1.5,
        t in 0.05f64..5.0,
        r1 in 0.2f64..3.0, a1 in 0.0f64..6.28,
        r2 in 0.2f64..3.0, a2 in 0.0f64..6.28,
    ) {
        let flux = FluxConfig::new(TrigPoly::new(vec![alpha, 0.15], vec![0.0, 0.1]), TrigPoly::default());
        let (x, y) = (PolarPoint::new(r1, a1), PolarPoint::new(r2, a2));
        let kxy = heat_kernel_closed(t, x, y, &flux).unwrap();
        let kyx = heat_kernel_closed(t, y, x, &flux).unwrap();
        prop_assert!((kxy - kyx.conj()).norm() <= 1e-10 * kxy.norm().max(1e-300) + 1e-300);
        let free = (-x.dist(y).powi(2) / (4.0 * t)).exp() / (4.0 * PI * t);
        prop_assert!(kxy.norm() <= free * (1.0 + 1e-9));
    }

    #[test]
    fn partition_of_unity(lambda in 0.01f64..100.0) {
        let p = lp_windows(-8, 8).unwrap();
        prop_assert!((p.inhomogeneous_sum(lambda) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn closed_and_series_agree_at_complex_time() {
    let opts = KernelOptions::default();
    let x = PolarPoint::new(1.1, 0.4);
    let y = PolarPoint::new(0.8, 2.1);
    for alpha in [0.3, 0.5, 0.7] {
        let flux = FluxConfig::constant(alpha);
        for gamma in [0.3, 0.8] {
            let tau = Complex64::from_polar(0.7, -gamma);
            let time = tau * Complex64::i();
            let c = kernel_closed(time, x, y, &flux, &opts).unwrap().value();
            let s = kernel_series(time, x, y, &flux, 80).unwrap().value();
            assert_relative_eq!(c.re, s.re, epsilon = 1e-9 * s.norm());
            assert_relative_eq!(c.im, s.im, epsilon = 1e-9 * s.norm());
        }
    }
}

#[test]
fn constant_flux_galerkin_spectrum_is_explicit() {
    let flux = FluxConfig::constant(0.37);
    let spec = solve_angular(&flux, 30).unwrap();
    for (mu, k) in spec.eigenvalues.iter().zip(&spec.labels) {
        assert!((mu - (*k as f64 + 0.37).powi(2)).abs() < 1e-10);
    }
}

fn physical_l2(state: &FieldState, flow: FlowSpec, t: f64) -> f64 {
    let radii: Vec<f64> = (1..=1200).map(|i| i as f64 * 0.05).collect();
    let thetas = angle_grid(48);
    let table = state.field_table(Some(flow), &[t], SpectralFilter::None, &radii, &thetas).unwrap();
    let dr = 0.05;
    let dth = 2.0 * PI / 48.0;
    table[0].iter().zip(&radii).map(|(row, r)| row.iter().map(|v| v.norm_sqr()).sum::<f64>() * r * dr * dth).sum()
}

#[test]
fn unitary_flows_conserve_mass() {
    let flux = FluxConfig::constant(0.5);
    let state = FieldState::gaussian(&flux, 0.0, 1.0, 1).unwrap();
    let mass = state.l2_norm_sq_spectral().unwrap();
    for eq in [Equation::Schrodinger, Equation::HalfWave, Equation::KleinGordon] {
        for t in [0.5, 3.0] {
            let m = physical_l2(&state, FlowSpec::new(eq), t);
            assert!((m / mass - 1.0).abs() < 1e-6, "{eq:?} t={t}: {m} vs {mass}");
        }
    }
}

#[test]
fn group_law_holds() {
    let flux = FluxConfig::constant(0.3);
    let state = FieldState::lp_random(&flux, 4, 0, 1).unwrap();
    let radii = [0.3, 1.0, 2.5, 4.0];
    let thetas = angle_grid(8);
    for eq in [Equation::Schrodinger, Equation::KleinGordon, Equation::Heat] {
        let flow = FlowSpec::new(eq);
        let once = state.field_table(Some(flow), &[1.5], SpectralFilter::None, &radii, &thetas).unwrap();
        let twice =
            state.evolve(flow, 0.5).field_table(Some(flow), &[1.0], SpectralFilter::None, &radii, &thetas).unwrap();
        for (a, b) in once[0].iter().flatten().zip(twice[0].iter().flatten()) {
            assert!((a - b).norm() < 1e-10, "{eq:?}: {a} vs {b}");
        }
    }
}
