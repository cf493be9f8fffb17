#![allow(dead_code)]

use std::f64::consts::PI;

use dbarrier_core::problem::{CurveFn, HeatStripProblem, InitialProfile};

pub fn eigen(horizon: f64) -> HeatStripProblem {
    HeatStripProblem::new(
        CurveFn::constant(0.0),
        CurveFn::constant(1.0),
        CurveFn::constant(0.0),
        CurveFn::constant(0.0),
        InitialProfile::Sine { amplitude: 1.0, frequency: PI, phase: 0.0 },
        horizon,
    )
}

pub fn eigen_exact(tau: f64, x: f64) -> f64 {
    (PI * x).sin() * (-PI * PI * tau).exp()
}

pub fn constant(c: f64) -> HeatStripProblem {
    HeatStripProblem::new(
        CurveFn::linear(-0.2, 0.1),
        CurveFn::linear(0.9, -0.3),
        CurveFn::constant(c),
        CurveFn::constant(c),
        InitialProfile::Constant(c),
        0.5,
    )
}

/// Three moving strips with linear boundaries and smooth, non-zero rebates
/// that meet the initial profile at both corners.
pub fn regression() -> Vec<(&'static str, HeatStripProblem)> {
    vec![
        (
            "call-widening",
            HeatStripProblem::new(
                CurveFn::linear(0.0, 0.1),
                CurveFn::linear(1.0, 0.2),
                CurveFn::linear(0.0, 0.05),
                CurveFn::linear(0.05, 0.1),
                InitialProfile::Call { strike: 0.95 },
                0.5,
            ),
        ),
        (
            "put-narrowing",
            HeatStripProblem::new(
                CurveFn::linear(-0.2, 0.15),
                CurveFn::linear(0.8, -0.1),
                CurveFn::linear(0.5, -0.2),
                CurveFn::linear(0.0, 0.1),
                InitialProfile::Put { strike: 0.3 },
                0.5,
            ),
        ),
        (
            "exponential-drifting",
            HeatStripProblem::new(
                CurveFn::linear(0.0, 0.05),
                CurveFn::linear(1.2, 0.3),
                CurveFn::exponential(1.0, 0.25),
                CurveFn::exponential(0.6f64.exp(), 0.3),
                InitialProfile::Exponential { amplitude: 1.0, rate: 0.5 },
                0.5,
            ),
        ),
    ]
}

/// 10 x 10 interior lattice: tau = T j / 10, x at k / 11 of the strip.
pub fn lattice(p: &HeatStripProblem) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(100);
    for j in 1..=10 {
        let tau = p.horizon() * j as f64 / 10.0;
        let (y, z) = (p.lower().value(tau), p.upper().value(tau));
        for k in 1..=10 {
            out.push((tau, y + (z - y) * k as f64 / 11.0));
        }
    }
    out
}
