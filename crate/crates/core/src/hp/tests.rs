use std::f64::consts::PI;

use super::*;
use crate::git::{price_images, price_theta, solve_gradients};
use crate::problem::{CurveFn, ExactSolution, InitialProfile};

fn eigen(horizon: f64) -> HeatStripProblem {
    HeatStripProblem::new(
        CurveFn::constant(0.0),
        CurveFn::constant(1.0),
        CurveFn::constant(0.0),
        CurveFn::constant(0.0),
        InitialProfile::Sine { amplitude: 1.0, frequency: PI, phase: 0.0 },
        horizon,
    )
}

fn moving_exponential() -> HeatStripProblem {
    HeatStripProblem::new(
        CurveFn::linear(0.0, 0.1),
        CurveFn::linear(1.0, 0.2),
        CurveFn::exponential(1.0, 1.1),
        CurveFn::exponential(1f64.exp(), 1.2),
        InitialProfile::Exponential { amplitude: 1.0, rate: 1.0 },
        0.5,
    )
}

fn zero() -> HeatStripProblem {
    HeatStripProblem::new(
        CurveFn::linear(0.0, 0.1),
        CurveFn::linear(1.0, 0.2),
        CurveFn::constant(0.0),
        CurveFn::constant(0.0),
        InitialProfile::Constant(0.0),
        0.5,
    )
}

#[test]
fn affine_data_has_an_exact_background() {
    let p = HeatStripProblem::new(
        CurveFn::constant(0.0),
        CurveFn::constant(1.0),
        CurveFn::linear(0.3, 1.0),
        CurveFn::constant(-0.2),
        InitialProfile::Affine { a: 0.3, b: -0.5 },
        1.0,
    );
    let (v, dv) = background(&p, 0.4, 0.25);
    assert!((v - 0.175).abs() < 1e-15 && (dv + 0.5).abs() < 1e-15, "{v} {dv}");
    let b = boundary_data(&p, 0.4).unwrap();
    assert!((b.phi1 - 0.4).abs() < 1e-15 && b.psi1.abs() < 1e-15, "{b:?}");
    assert!(boundary_data(&p, 0.0).is_err());
}

#[test]
fn boundary_data_sees_half_the_mass_at_an_edge() {
    let p = HeatStripProblem::new(
        CurveFn::constant(0.0),
        CurveFn::constant(1.0),
        CurveFn::constant(0.5),
        CurveFn::constant(0.5),
        InitialProfile::Constant(2.0),
        1.0,
    );
    let b = boundary_data(&p, 0.01).unwrap();
    assert!((b.phi1 + 0.75).abs() < 1e-4, "{}", b.phi1);
    let tiny = boundary_data(&p, 1e-6).unwrap();
    let direct = crate::quad::adaptive(|x| 1.5 * (-x * x / 4e-6).exp() / (2.0 * (PI * 1e-6).sqrt()), 0.0, 1.0, 1e-14);
    assert!((tiny.phi1 + direct).abs() < 1e-6);
}

#[test]
fn constants_have_zero_densities() {
    let p = HeatStripProblem::new(
        CurveFn::linear(-0.2, 0.1),
        CurveFn::linear(0.9, -0.3),
        CurveFn::constant(0.7),
        CurveFn::constant(0.7),
        InitialProfile::Constant(0.7),
        0.5,
    );
    let d = solve_densities(&p, &TimeGrid::graded(0.5, 16).unwrap()).unwrap();
    assert!(d.omega_values().iter().chain(&d.theta_values()).all(|v| v.abs() < 1e-15));
    assert!((price_hp(&p, &d, 0.3, 0.2).unwrap() - 0.7).abs() < 1e-15);
}

#[test]
fn zero_data_gives_zero_densities() {
    let p = zero();
    let d = solve_densities(&p, &TimeGrid::graded(0.5, 16).unwrap()).unwrap();
    assert!(d.omega_values().iter().chain(&d.theta_values()).all(|v| *v == 0.0));
    assert_eq!(price_hp(&p, &d, 0.3, 0.5).unwrap(), 0.0);
    let g = hp_to_git(&p, &d).unwrap();
    assert!(g.psi_values().iter().chain(&g.phi_values()).all(|v| *v == 0.0));
}

#[test]
fn eigenfunction_price() {
    let p = eigen(0.5);
    let d = solve_densities(&p, &TimeGrid::graded(0.5, 256).unwrap()).unwrap();
    let v = price_hp(&p, &d, 0.1, 0.5).unwrap();
    assert!((v - 0.372708).abs() < 1e-5, "{v}");
    for &tau in &[0.05, 0.2, 0.5] {
        for x in [0.1, 0.4, 0.8] {
            let want = (PI * x).sin() * (-PI * PI * tau).exp();
            let got = price_hp(&p, &d, tau, x).unwrap();
            assert!((got - want).abs() < 1e-5, "tau={tau} x={x} {got} {want}");
        }
    }
}

#[test]
fn small_time_price() {
    let p = eigen(0.02);
    let d = solve_densities(&p, &TimeGrid::graded(0.02, 256).unwrap()).unwrap();
    for x in [0.1, 0.5, 0.9] {
        let want = (PI * x).sin() * (-PI * PI * 0.02f64).exp();
        let got = price_hp(&p, &d, 0.02, x).unwrap();
        assert!((got - want).abs() < 1e-8, "x={x} {got} {want}");
    }
}

#[test]
fn agrees_with_gradient_route_on_moving_strip() {
    let p = moving_exponential();
    let grid = TimeGrid::graded(0.5, 512).unwrap();
    let d = solve_densities(&p, &grid).unwrap();
    let g = solve_gradients(&p, &grid).unwrap();
    let exact = ExactSolution::detect(&p).unwrap();
    for j in 1..=10 {
        let tau = 0.05 * j as f64;
        let (y, z) = (p.lower().value(tau), p.upper().value(tau));
        for k in 1..=10 {
            let x = y + (z - y) * k as f64 / 11.0;
            let a = price_hp(&p, &d, tau, x).unwrap();
            let b = price_theta(&p, &g, tau, x).unwrap();
            assert!((a - b).abs() < 1e-6, "tau={tau} x={x} {a} {b} exact {}", exact.value(tau, x));
        }
    }
}

#[test]
fn jump_of_a_unit_density() {
    let j = jump_check(|_| 1.0, &CurveFn::constant(0.0), 0.5);
    assert!((j.jump - 1.0).abs() < 1e-4, "{j:?}");
    assert!((j.above - j.formula_above).abs() < 1e-4);
    let z = jump_check(|_| 0.0, &CurveFn::constant(0.0), 0.5);
    assert_eq!((z.above, z.below), (0.0, 0.0));
}

#[test]
fn jump_on_a_moving_curve() {
    let j = jump_check(|k| k, &CurveFn::linear(0.0, 0.1), 0.4);
    assert!((j.jump - 0.4).abs() < 1e-3, "{j:?}");
    assert!((j.above - j.formula_above).abs() < 1e-3, "{j:?}");
    assert!((j.below - j.formula_below).abs() < 1e-3, "{j:?}");
}

fn derivative_oracle<F: Fn(f64) -> f64 + Copy>(omega: F, curve: &CurveFn, tau: f64, side: Approach) -> f64 {
    let y = curve.value(tau);
    let sign = if side == Approach::Above { 1.0 } else { -1.0 };
    let slope = |e: f64| {
        let h = 0.1 * e;
        let x = y + sign * e;
        let w = |x: f64| {
            let c = 1.0 / (4.0 * PI.sqrt());
            c * crate::quad::integrate_singular_end(
                |k, d| {
                    let r = x - curve.value(k);
                    r * omega(k) * (-r * r / (4.0 * d)).exp() / (d * d.sqrt())
                },
                0.0,
                tau,
                1e-15,
            )
        };
        (w(x + h) - w(x - h)) / (2.0 * h)
    };
    let e = 1e-2;
    (8.0 * slope(0.25 * e) - 6.0 * slope(0.5 * e) + slope(e)) / 3.0
}

#[test]
fn gradient_limit_of_a_unit_density() {
    let curve = CurveFn::constant(0.0);
    let g = gradient_limit(|_| 1.0, &curve, 0.5, Approach::Above, 1.0);
    assert!((g + 1.0 / (2.0 * (PI * 0.5).sqrt())).abs() < 1e-12);
    let oracle = derivative_oracle(|_| 1.0, &curve, 0.5, Approach::Above);
    assert!((g - oracle).abs() < 1e-4, "{g} {oracle}");
    assert_eq!(gradient_limit(|_| 0.0, &curve, 0.5, Approach::Below, 1.0), 0.0);
}

#[test]
fn gradient_limit_on_a_moving_curve() {
    let curve = CurveFn::linear(0.0, 0.3);
    let omega = |k: f64| 1.0 + k;
    for side in [Approach::Above, Approach::Below] {
        let g = gradient_limit(omega, &curve, 0.4, side, 1.0);
        let oracle = derivative_oracle(omega, &curve, 0.4, side);
        assert!((g - oracle).abs() < 1e-3, "{side:?} {g} {oracle}");
    }
    let above = gradient_limit(omega, &curve, 0.4, Approach::Above, 0.7);
    let below = gradient_limit(omega, &curve, 0.4, Approach::Below, 0.7);
    let want = -0.3 * omega(0.4) / 0.7f64.powi(4);
    assert!((above - below - want).abs() < 1e-12, "{}", above - below);
}

#[test]
fn both_f_forms_agree() {
    let curve = CurveFn::sinusoid(0.1, 0.2, 3.0, 0.4);
    let omega = |k: f64| (2.0 * k).cos() + k * k;
    for sigma in [1.0, 0.6] {
        for side in [Approach::Above, Approach::Below] {
            let a = gradient_limit_with(omega, &curve, 0.7, side, sigma, FForm::Direct, &[]);
            let b = gradient_limit_with(omega, &curve, 0.7, side, sigma, FForm::Differential, &[]);
            assert!((a - b).abs() < 1e-10, "{a} {b}");
        }
    }
}

#[test]
fn gradients_from_densities() {
    let p = eigen(0.5);
    let grid = TimeGrid::graded(0.5, 256).unwrap();
    let d = solve_densities(&p, &grid).unwrap();
    let g = solve_gradients(&p, &grid).unwrap();
    let h = hp_to_git(&p, &d).unwrap();
    let worst = h
        .psi_values()
        .iter()
        .zip(g.psi_values())
        .chain(h.phi_values().iter().zip(g.phi_values()))
        .skip(1)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-4, "{worst}");
}

#[test]
fn round_trip_through_gradients() {
    let p = moving_exponential();
    let d = solve_densities(&p, &TimeGrid::graded(0.5, 256).unwrap()).unwrap();
    let g = hp_to_git(&p, &d).unwrap();
    for x in [0.2, 0.6, 1.0] {
        let a = price_images(&p, &g, 0.4, x).unwrap();
        let b = price_hp(&p, &d, 0.4, x).unwrap();
        assert!((a - b).abs() < 1e-5, "x={x} {a} {b}");
    }
}
