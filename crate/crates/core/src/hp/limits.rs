//! One-sided limits of a single double-layer potential
//!
//! W(tau, x) = 1/(4 sigma^3 sqrt(pi)) int_0^tau (x - y(k)) Omega(k) e^{-(x - y(k))^2 / 4 sigma^2 (tau - k)} (tau - k)^{-3/2} dk
//!
//! and of its x-derivative on the curve x = y(tau), and the map from the
//! densities to the boundary gradients.

use std::f64::consts::PI;

use super::{background, PotentialPair};
use crate::error::Result;
use crate::git::{corner_start, GradientPair};
use crate::grid::Nodal;
use crate::problem::{CurveFn, HeatStripProblem};
use crate::quad::{adaptive, gl16};
use crate::MarchDiagnostics;

const TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Approach {
    /// x -> y(tau) + 0
    Above,
    /// x -> y(tau) - 0
    Below,
}

impl Approach {
    fn sign(self) -> f64 {
        match self {
            Self::Above => 1.0,
            Self::Below => -1.0,
        }
    }
}

/// Two equivalent ways of writing the coefficient f(tau) that multiplies
/// Omega(tau) in the gradient limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FForm {
    /// 1/(2 sqrt(pi tau)) +- y'/2 minus the regularised kernel integrals.
    Direct,
    /// +- y'/2 + e0/(2 sqrt(pi tau)) + int y'(k) delta e / (4 sqrt(pi) d^{3/2}),
    /// from the exact differential of e^{-delta^2/4d}/sqrt(d).
    Differential,
}

/// Limits of W on both sides of the curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpCheck {
    /// Richardson-extrapolated direct values at y(tau) + eps and y(tau) - eps.
    pub above: f64,
    pub below: f64,
    /// above - below
    pub jump: f64,
    /// The same limits from the one-sided formula.
    pub formula_above: f64,
    pub formula_below: f64,
}

/// int_0^tau g(k, d) dk through k = tau - v^2, with the v-interval split at
/// the images of `breaks` and at the extra v-points in `v_breaks`.
fn time_integral<G: FnMut(f64, f64) -> f64>(mut g: G, tau: f64, breaks: &[f64], v_breaks: &[f64]) -> f64 {
    let top = tau.sqrt();
    let mut edges: Vec<f64> = breaks
        .iter()
        .filter(|&&b| b > 0.0 && b < tau)
        .map(|&b| (tau - b).sqrt())
        .chain(v_breaks.iter().copied().filter(|&v| v > 0.0 && v < top))
        .collect();
    edges.push(0.0);
    edges.push(top);
    edges.sort_by(|a, b| a.total_cmp(b));
    edges.dedup();
    // The integrands are smooth in v but evaluated with cancellation as
    // v -> 0; the innermost stretch gets a fixed rule so that rounding noise
    // cannot drive the refinement.
    let inner = 1e-3 * edges[1];
    let mut total = gl16().integrate(0.0, inner, |v| 2.0 * v * g(tau - v * v, v * v));
    edges[0] = inner;
    for w in edges.windows(2) {
        total += adaptive(|v| 2.0 * v * g(tau - v * v, v * v), w[0], w[1], TOL);
    }
    total
}

/// W(tau, x) by direct quadrature, x off the curve.
fn potential<F: Fn(f64) -> f64>(omega: &F, curve: &CurveFn, tau: f64, x: f64, breaks: &[f64]) -> f64 {
    let gap = (x - curve.value(tau)).abs();
    let c = 1.0 / (4.0 * PI.sqrt());
    let marks: Vec<f64> = [0.125, 0.5, 2.0, 8.0].iter().map(|m| m * gap).collect();
    c * time_integral(
        |k, d| {
            let r = x - curve.value(k);
            r * omega(k) * (-r * r / (4.0 * d)).exp() / (d * d.sqrt())
        },
        tau,
        breaks,
        &marks,
    )
}

fn richardson(f: impl Fn(f64) -> f64, eps: f64) -> f64 {
    let (a, b, c) = (f(eps), f(0.5 * eps), f(0.25 * eps));
    (8.0 * c - 6.0 * b + a) / 3.0
}

/// Jump of W across x = y(tau), measured by extrapolating direct quadrature
/// from eps in {1e-2, 5e-3, 2.5e-3}, next to the one-sided formula
/// W(y +- 0) = +- Omega(tau)/2 + W(y).
pub fn jump_check<F: Fn(f64) -> f64>(omega: F, curve: &CurveFn, tau: f64) -> JumpCheck {
    let y = curve.value(tau);
    let above = richardson(|e| potential(&omega, curve, tau, y + e, &[]), 1e-2);
    let below = richardson(|e| potential(&omega, curve, tau, y - e, &[]), 1e-2);
    let c = 1.0 / (4.0 * PI.sqrt());
    let on_curve = c * time_integral(
        |k, d| {
            let r = curve.rise(tau, d);
            r * omega(k) * (-r * r / (4.0 * d)).exp() / (d * d.sqrt())
        },
        tau,
        &[],
        &[],
    );
    let half = 0.5 * omega(tau);
    JumpCheck { above, below, jump: above - below, formula_above: on_curve + half, formula_below: on_curve - half }
}

/// W_x(tau, y(tau) +- 0) for diffusivity sigma^2.
pub fn gradient_limit<F: Fn(f64) -> f64>(omega: F, curve: &CurveFn, tau: f64, side: Approach, sigma: f64) -> f64 {
    gradient_limit_with(omega, curve, tau, side, sigma, FForm::Direct, &[])
}

/// [`gradient_limit`] with a choice of f form and the times where Omega
/// has kinks.
pub fn gradient_limit_with<F: Fn(f64) -> f64>(
    omega: F,
    curve: &CurveFn,
    tau: f64,
    side: Approach,
    sigma: f64,
    form: FForm,
    breaks: &[f64],
) -> f64 {
    // x -> x / sigma turns the problem into the unit-diffusivity one with
    // y / sigma; W_x then scales by 1 / sigma^3.
    let c = 1.0 / (4.0 * PI.sqrt());
    let root = (PI * tau).sqrt();
    let w_now = omega(tau);
    let slope_now = curve.derivative(tau) / sigma;
    let delta = |d: f64| curve.rise(tau, d) / sigma;
    let core = match form {
        FForm::Direct => {
            let f = 1.0 / (2.0 * root) + side.sign() * slope_now / 2.0;
            -w_now * f
                + c * time_integral(
                    |k, d| {
                        let r = delta(d);
                        let q = r * r / (4.0 * d);
                        let w = omega(k);
                        (w * (-q).exp_m1() + (w - w_now) - 2.0 * w * (-q).exp() * q) / (d * d.sqrt())
                    },
                    tau,
                    breaks,
                    &[],
                )
        }
        FForm::Differential => {
            let r0 = delta(tau);
            let e0 = (-r0 * r0 / (4.0 * tau)).exp();
            let body = time_integral(
                |k, d| {
                    let r = delta(d);
                    let e = (-r * r / (4.0 * d)).exp();
                    let dd = d * d.sqrt();
                    let slope = curve.derivative(k) / sigma;
                    ((omega(k) - w_now) * e * (1.0 - r * r / (2.0 * d)) - w_now * slope * r * e) / dd
                },
                tau,
                breaks,
                &[],
            );
            let f = side.sign() * slope_now / 2.0 + e0 / (2.0 * root);
            -w_now * f + c * body
        }
    };
    core / sigma.powi(3)
}

/// Cross-boundary contribution to q_x at x = at from the potential on the
/// other curve: 1/(4 sqrt(pi)) int rho e (1 - r^2/2d) / d^{3/2}, r = at - c(k).
fn cross_gradient(density: &Nodal, curve: &CurveFn, grid: &[f64], tau: f64, at: f64) -> f64 {
    let c = 1.0 / (4.0 * PI.sqrt());
    let mut acc = 0.0;
    let top = tau.sqrt();
    let roots: Vec<f64> = grid.iter().filter(|&&t| t < tau).map(|t| t.sqrt()).chain([top]).collect();
    for w in roots.windows(2) {
        for (sigma, wq) in gl16().mapped(w[0], w[1]) {
            let s = sigma * sigma;
            let d = tau - s;
            let r = at - curve.value(s);
            let e = (-r * r / (4.0 * d)).exp();
            acc += 2.0 * sigma * wq * density.scaled_at_cubic(sigma) * e * (1.0 - r * r / (2.0 * d)) / (d * d.sqrt());
        }
    }
    c * acc
}

/// Boundary gradients Psi = -U_x(y+0), Phi = U_x(z-0) recovered from the
/// potential densities, on the densities' grid.
pub fn hp_to_git(problem: &HeatStripProblem, densities: &PotentialPair) -> Result<GradientPair> {
    let grid = densities.grid().clone();
    let nodes = grid.nodes();
    let (power, start) = corner_start(problem);
    let omega = |k: f64| densities.omega().scaled_at_cubic(k.max(0.0).sqrt());
    let theta = |k: f64| densities.theta().scaled_at_cubic(k.max(0.0).sqrt());
    let mut w = [vec![start[0]], vec![start[1]]];
    for (j, &tau) in nodes.iter().enumerate().skip(1) {
        let (y, z) = (problem.lower().value(tau), problem.upper().value(tau));
        let breaks = &nodes[..j];
        let qy = gradient_limit_with(omega, problem.lower(), tau, Approach::Above, 1.0, FForm::Direct, breaks)
            + cross_gradient(densities.theta(), problem.upper(), nodes, tau, y);
        let qz = gradient_limit_with(theta, problem.upper(), tau, Approach::Below, 1.0, FForm::Direct, breaks)
            + cross_gradient(densities.omega(), problem.lower(), nodes, tau, z);
        let psi = -qy - background(problem, tau, y).1;
        let phi = qz + background(problem, tau, z).1;
        let sigma = tau.sqrt();
        w[0].push(if power[0] == 0 { psi } else { psi * sigma });
        w[1].push(if power[1] == 0 { phi } else { phi * sigma });
    }
    let [w0, w1] = w;
    Ok(GradientPair::new(
        grid.clone(),
        Nodal::new(&grid, w0, power[0]),
        Nodal::new(&grid, w1, power[1]),
        MarchDiagnostics::default(),
    ))
}
