//! Price evaluation from solved boundary gradients.

use std::f64::consts::PI;

use super::system::Edge;
use super::GradientPair;
use crate::error::{Error, Result};
use crate::grid::{peak_scale, time_panels};
use crate::kernels::{image_sums, theta3_all};
use crate::problem::HeatStripProblem;
use crate::quad::gl16;

/// Below this (tau - s)/l^2 the theta series would need more than ~6000
/// terms; the same kernel values are then taken from the image sums.
const THETA_FLOOR: f64 = 1e-7;

/// A price with its x-derivatives (when requested) and the largest number
/// of series terms any kernel evaluation needed.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PricePoint {
    pub value: f64,
    pub dx: f64,
    pub dxx: f64,
    pub max_terms: usize,
}

pub(crate) enum Located {
    Boundary(f64),
    Interior { y: f64, z: f64, r: f64 },
}

pub(crate) fn locate(problem: &HeatStripProblem, tau: f64, x: f64, horizon: f64) -> Result<Located> {
    if !(tau >= 0.0 && tau <= horizon * (1.0 + 1e-12)) || !x.is_finite() {
        return Err(Error::InvalidInput(format!("tau={tau} must lie in [0, {horizon}] and x must be finite")));
    }
    let y = problem.lower().value(tau);
    let z = problem.upper().value(tau);
    let slack = 1e-12 * (1.0 + y.abs().max(z.abs()));
    if x < y - slack || x > z + slack {
        return Err(Error::OutsideStrip { tau, x });
    }
    if x <= y {
        return Ok(Located::Boundary(problem.rebate_lower().value(tau)));
    }
    if x >= z {
        return Ok(Located::Boundary(problem.rebate_upper().value(tau)));
    }
    Ok(Located::Interior { y, z, r: (x - y).min(z - x) })
}

/// Quadrature nodes in s for a time integral ending at tau, integrated in
/// sigma = sqrt(s). Returns (s, sigma, weight in sigma).
pub(crate) fn time_nodes(grid: &crate::grid::TimeGrid, tau: f64, d_min: f64, keep_last: bool) -> Vec<(f64, f64, f64)> {
    let edges = time_panels(grid, tau, d_min);
    let count = if keep_last { edges.len() - 1 } else { edges.len().saturating_sub(2) };
    let mut out = Vec::with_capacity(16 * count);
    for w in edges.windows(2).take(count) {
        for (sigma, wq) in gl16().mapped(w[0].sqrt(), w[1].sqrt()) {
            out.push((sigma * sigma, sigma, wq));
        }
    }
    out
}

/// Image-sum representation of the price, with x-derivatives when
/// `derivatives` is set.
pub fn price_images_detail(
    problem: &HeatStripProblem,
    g: &GradientPair,
    tau: f64,
    x: f64,
    derivatives: bool,
) -> Result<PricePoint> {
    let (yt, zt, r) = match locate(problem, tau, x, g.grid().horizon())? {
        Located::Boundary(v) => return Ok(PricePoint { value: v, ..Default::default() }),
        Located::Interior { y, z, r } => (y, z, r),
    };
    if tau == 0.0 {
        return Ok(PricePoint { value: problem.initial().value(x), ..Default::default() });
    }
    let l = zt - yt;
    let derivs = usize::from(derivatives);
    let mut acc = [0.0; 3];
    let mut max_terms = 0;
    for (xi, wu) in problem.initial_nodes(tau) {
        let k = image_sums(x, xi, yt, l, tau, derivs)?;
        max_terms = max_terms.max(k.terms);
        for m in 0..=2 * derivs {
            acc[m] += wu * k.upsilon[m];
        }
    }
    for (s, sigma, wq) in time_nodes(g.grid(), tau, peak_scale(r), false) {
        let d = tau - s;
        let e = Edge::at(problem, s);
        let jac = 2.0 * sigma * wq;
        let psi = g.psi().scaled_at(sigma) * wq * jacobian(g.psi().power(), sigma);
        let phi = g.phi().scaled_at(sigma) * wq * jacobian(g.phi().power(), sigma);
        let ky = image_sums(x, e.y, yt, l, d, derivs)?;
        let kz = image_sums(x, e.z, yt, l, d, derivs)?;
        max_terms = max_terms.max(ky.terms).max(kz.terms);
        let cy = psi - e.dy * e.fm * jac;
        let cz = phi + e.dz * e.fp * jac;
        for m in 0..=2 * derivs {
            acc[m] += cy * ky.upsilon[m] + cz * kz.upsilon[m] + e.fm * jac * ky.lambda[m] - e.fp * jac * kz.lambda[m];
        }
    }
    Ok(PricePoint { value: acc[0], dx: acc[1], dxx: acc[2], max_terms })
}

/// ds/dsigma divided by the sigma^p stored in a nodal series.
#[inline]
fn jacobian(power: u8, sigma: f64) -> f64 {
    if power == 0 {
        2.0 * sigma
    } else {
        2.0
    }
}

pub fn price_images(problem: &HeatStripProblem, g: &GradientPair, tau: f64, x: f64) -> Result<f64> {
    Ok(price_images_detail(problem, g, tau, x, false)?.value)
}

/// theta3(phi-) - theta3(phi+) and theta3'(phi-) + theta3'(phi+) for the
/// pair of arguments phi- = pi (x - xi) / 2l, phi+ = pi (x + xi - 2y) / 2l.
fn theta_pair(x: f64, xi: f64, y: f64, l: f64, d: f64) -> Result<(f64, f64, usize)> {
    if d / (l * l) < THETA_FLOOR {
        let k = image_sums(x, xi, y, l, d, 0)?;
        return Ok((2.0 * l * k.upsilon[0], -4.0 * l * l / PI * k.lambda[0], k.terms));
    }
    let w = (-PI * PI * d / (l * l)).exp();
    let a = theta3_all(PI * (x - xi) / (2.0 * l), w)?;
    let b = theta3_all(PI * (x + xi - 2.0 * y) / (2.0 * l), w)?;
    Ok((a.value - b.value, a.dz + b.dz, a.terms.max(b.terms)))
}

/// Theta-function representation of the price.
pub fn price_theta_detail(problem: &HeatStripProblem, g: &GradientPair, tau: f64, x: f64) -> Result<PricePoint> {
    let (yt, zt, r) = match locate(problem, tau, x, g.grid().horizon())? {
        Located::Boundary(v) => return Ok(PricePoint { value: v, ..Default::default() }),
        Located::Interior { y, z, r } => (y, z, r),
    };
    if tau == 0.0 {
        return Ok(PricePoint { value: problem.initial().value(x), ..Default::default() });
    }
    let l = zt - yt;
    let mut acc = 0.0;
    let mut max_terms = 0;
    for (xi, wu) in problem.initial_nodes(tau) {
        let (diff, _, n) = theta_pair(x, xi, yt, l, tau)?;
        max_terms = max_terms.max(n);
        acc += wu * diff;
    }
    let c = PI / (2.0 * l);
    for (s, sigma, wq) in time_nodes(g.grid(), tau, peak_scale(r), false) {
        let d = tau - s;
        let e = Edge::at(problem, s);
        let jac = 2.0 * sigma * wq;
        let psi = g.psi().scaled_at(sigma) * wq * jacobian(g.psi().power(), sigma);
        let phi = g.phi().scaled_at(sigma) * wq * jacobian(g.phi().power(), sigma);
        let (dy, sy, ny) = theta_pair(x, e.y, yt, l, d)?;
        let (dz, sz, nz) = theta_pair(x, e.z, yt, l, d)?;
        max_terms = max_terms.max(ny).max(nz);
        acc += (psi - e.dy * e.fm * jac) * dy + (phi + e.dz * e.fp * jac) * dz + c * jac * (e.fp * sz - e.fm * sy);
    }
    Ok(PricePoint { value: acc / (2.0 * l), max_terms, ..Default::default() })
}

pub fn price_theta(problem: &HeatStripProblem, g: &GradientPair, tau: f64, x: f64) -> Result<f64> {
    Ok(price_theta_detail(problem, g, tau, x)?.value)
}
