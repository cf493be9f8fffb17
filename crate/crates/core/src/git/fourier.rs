//! Sine-series view of the solution at a fixed time.
//!
//! With Y = y(tau), l = l(tau) and kappa_n = pi n / l, the homogenised
//! solution u = U - A - B x expands as sum A_n sin(kappa_n (x - Y)), and
//! each coefficient is a time integral of Psi and Phi.

use std::f64::consts::PI;

use super::price::time_nodes;
use super::system::Edge;
use super::GradientPair;
use crate::error::{Error, Result};
use crate::grid::dyadic_floor;
use crate::problem::{homogenize, HeatStripProblem, Homogenized};
use crate::quad::composite_nodes;

/// beta(tau, s, n) = f-(s) (k cos(k(y(s)-Y)) - y'(s) sin(k(y(s)-Y)))
///                 - f+(s) (k cos(k(z(s)-Y)) - z'(s) sin(k(z(s)-Y)))
/// with k = pi n / l(tau). It carries the rebates when the transform is
/// applied to U rather than to u, and vanishes at n = 0.
#[derive(Debug, Clone, Copy)]
pub struct BetaTerm<'a> {
    problem: &'a HeatStripProblem,
}

impl<'a> BetaTerm<'a> {
    pub fn new(problem: &'a HeatStripProblem) -> Self {
        Self { problem }
    }

    pub fn value(&self, tau: f64, s: f64, n: usize) -> f64 {
        if n == 0 {
            return 0.0;
        }
        let p = self.problem;
        let yt = p.lower().value(tau);
        let k = PI * n as f64 / p.width(tau);
        self.at(&Edge::at(p, s), yt, k)
    }

    #[inline]
    fn at(&self, e: &Edge, yt: f64, k: f64) -> f64 {
        let (sy, cy) = (k * (e.y - yt)).sin_cos();
        let (sz, cz) = (k * (e.z - yt)).sin_cos();
        e.fm * (k * cy - e.dy * sy) - e.fp * (k * cz - e.dz * sz)
    }

    /// F(tau, x): zero inside the strip, the rebate on each boundary.
    pub fn boundary_term(&self, tau: f64, x: f64) -> f64 {
        let p = self.problem;
        if x <= p.lower().value(tau) {
            p.rebate_lower().value(tau)
        } else if x >= p.upper().value(tau) {
            p.rebate_upper().value(tau)
        } else {
            0.0
        }
    }
}

/// Both sides of the residue identity at a real p.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidueCheck {
    pub lhs: f64,
    pub rhs: f64,
}

struct Sample {
    edge: Edge,
    /// ds weight, Psi ds and Phi ds.
    ds: f64,
    psi: f64,
    phi: f64,
    d: f64,
    s: f64,
}

fn samples(problem: &HeatStripProblem, g: &GradientPair, tau: f64, d_min: f64) -> Vec<Sample> {
    time_nodes(g.grid(), tau, d_min, true)
        .into_iter()
        .map(|(s, sigma, wq)| {
            let weight = |p: u8| wq * if p == 0 { 2.0 * sigma } else { 2.0 };
            Sample {
                edge: Edge::at(problem, s),
                ds: 2.0 * sigma * wq,
                psi: g.psi().scaled_at(sigma) * weight(g.psi().power()),
                phi: g.phi().scaled_at(sigma) * weight(g.phi().power()),
                d: tau - s,
                s,
            }
        })
        .collect()
}

fn check(problem: &HeatStripProblem, g: &GradientPair, tau: f64, n_max: usize) -> Result<Homogenized> {
    if n_max == 0 {
        return Err(Error::InvalidInput("n_max must be at least 1".into()));
    }
    if !(tau > 0.0 && tau <= g.grid().horizon() * (1.0 + 1e-12)) {
        return Err(Error::InvalidInput(format!("tau={tau} must lie in (0, {}]", g.grid().horizon())));
    }
    homogenize(problem)
}

/// Spatial nodes over the initial interval fine enough for sin(kappa x).
fn initial_nodes(problem: &HeatStripProblem, k_max: f64) -> Vec<(f64, f64)> {
    let (y0, z0) = (problem.lower().value(0.0), problem.upper().value(0.0));
    let width = (0.25 * (z0 - y0)).min(2.0 * PI / k_max);
    composite_nodes(y0, z0, &problem.initial().kinks(), width)
}

/// Coefficients A_1..A_{n_max} of u(tau, .) in sin(pi n (x - y(tau)) / l(tau)).
pub fn fourier_coefficients(problem: &HeatStripProblem, g: &GradientPair, tau: f64, n_max: usize) -> Result<Vec<f64>> {
    let h = check(problem, g, tau, n_max)?;
    let yt = problem.lower().value(tau);
    let l = problem.width(tau);
    let k_max = PI * n_max as f64 / l;
    let mut out = vec![0.0; n_max];
    for (xi, w) in initial_nodes(problem, k_max) {
        let u0 = w * h.initial(xi);
        for (n, a) in out.iter_mut().enumerate() {
            let k = PI * (n + 1) as f64 / l;
            *a += u0 * (-k * k * tau).exp() * (k * (xi - yt)).sin();
        }
    }
    for p in samples(problem, g, tau, dyadic_floor(1.0 / (64.0 * k_max * k_max))) {
        let e = &p.edge;
        let (b, a_dot, b_dot) = (h.b(p.s), h.a_dot(p.s), h.b_dot(p.s));
        for (n, a) in out.iter_mut().enumerate() {
            let k = PI * (n + 1) as f64 / l;
            let (sy, cy) = (k * (e.y - yt)).sin_cos();
            let (sz, cz) = (k * (e.z - yt)).sin_cos();
            let h1 = -b_dot / (k * k) * (sz - sy) - ((a_dot + b_dot * e.y) * cy - (a_dot + b_dot * e.z) * cz) / k;
            let body = (p.phi - b * p.ds) * sz + (p.psi + b * p.ds) * sy + h1 * p.ds;
            *a += (-k * k * p.d).exp() * body;
        }
    }
    for a in &mut out {
        *a *= 2.0 / l;
    }
    Ok(out)
}

/// Coefficients C_1..C_{n_max} of U(tau, .) itself in the same sine basis,
/// with the rebates entering through beta. They differ from A_n by the
/// sine coefficients of A + B x.
pub fn profile_coefficients(problem: &HeatStripProblem, g: &GradientPair, tau: f64, n_max: usize) -> Result<Vec<f64>> {
    check(problem, g, tau, n_max)?;
    let beta = BetaTerm::new(problem);
    let yt = problem.lower().value(tau);
    let l = problem.width(tau);
    let k_max = PI * n_max as f64 / l;
    let mut out = vec![0.0; n_max];
    for (xi, w) in initial_nodes(problem, k_max) {
        let u0 = w * problem.initial().value(xi);
        for (n, c) in out.iter_mut().enumerate() {
            let k = PI * (n + 1) as f64 / l;
            *c += u0 * (-k * k * tau).exp() * (k * (xi - yt)).sin();
        }
    }
    for p in samples(problem, g, tau, dyadic_floor(1.0 / (64.0 * k_max * k_max))) {
        let e = &p.edge;
        for (n, c) in out.iter_mut().enumerate() {
            let k = PI * (n + 1) as f64 / l;
            let body = p.phi * (k * (e.z - yt)).sin() + p.psi * (k * (e.y - yt)).sin() + beta.at(e, yt, k) * p.ds;
            *c += (-k * k * p.d).exp() * body;
        }
    }
    for c in &mut out {
        *c *= 2.0 / l;
    }
    Ok(out)
}

/// sum A_n sin(pi n (x - y) / l) + A(tau) + B(tau) x.
pub fn reconstruct(problem: &HeatStripProblem, coeffs: &[f64], tau: f64, x: f64) -> f64 {
    let (y, z) = (problem.lower().value(tau), problem.upper().value(tau));
    let l = z - y;
    let (fm, fp) = (problem.rebate_lower().value(tau), problem.rebate_upper().value(tau));
    let series: f64 = coeffs.iter().enumerate().map(|(n, a)| a * (PI * (n + 1) as f64 * (x - y) / l).sin()).sum();
    series + (fm * z - fp * y) / l + (fp - fm) / l * x
}

/// The transform at a real p, u_bar(p) / sinh(p l), against its partial
/// fraction expansion over the poles p = i pi n / l truncated at n_max.
pub fn residue_identity(
    problem: &HeatStripProblem,
    g: &GradientPair,
    tau: f64,
    p: f64,
    n_max: usize,
) -> Result<ResidueCheck> {
    let h = check(problem, g, tau, n_max)?;
    if !(p.is_finite() && p != 0.0) {
        return Err(Error::InvalidInput(format!("p={p} must be finite and non-zero")));
    }
    let coeffs = fourier_coefficients(problem, g, tau, n_max)?;
    let yt = problem.lower().value(tau);
    let l = problem.width(tau);
    let lhs: f64 = coeffs
        .iter()
        .enumerate()
        .map(|(m, a)| {
            let n = (m + 1) as f64;
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            sign * PI * n * a / (p * p + (PI * n / l).powi(2))
        })
        .sum::<f64>()
        / l;

    let mut ubar = 0.0;
    for (xi, w) in initial_nodes(problem, p.abs().max(1.0)) {
        ubar += w * h.initial(xi) * (p * p * tau).exp() * (p * (xi - yt)).sinh();
    }
    for q in samples(problem, g, tau, dyadic_floor(1.0 / (64.0 * p * p).max(1.0))) {
        let e = &q.edge;
        let (b, a_dot, b_dot) = (h.b(q.s), h.a_dot(q.s), h.b_dot(q.s));
        let (sy, cy) = ((p * (e.y - yt)).sinh(), (p * (e.y - yt)).cosh());
        let (sz, cz) = ((p * (e.z - yt)).sinh(), (p * (e.z - yt)).cosh());
        let hp = b_dot / (p * p) * (sz - sy) + ((a_dot + b_dot * e.y) * cy - (a_dot + b_dot * e.z) * cz) / p;
        let body = (q.phi - b * q.ds) * sz + (q.psi + b * q.ds) * sy + hp * q.ds;
        ubar += (p * p * q.d).exp() * body;
    }
    Ok(ResidueCheck { lhs, rhs: ubar / (p * l).sinh() })
}
