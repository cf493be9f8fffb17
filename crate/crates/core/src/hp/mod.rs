//! Heat-potential route.
//!
//! The solution is written as U = L + q + C. L = a + b x is the affine
//! function through the rebates at the two starting corners, C is the
//! free-space convolution of U(0, x) - L(x) over the starting strip and
//!
//! q(tau, x) = 1/(4 sqrt(pi)) int_0^tau [(x - y(k)) Omega(k) e_y + (x - z(k)) Theta(k) e_z] / (tau - k)^{3/2} dk
//!
//! is a pair of double-layer potentials with e_y = exp(-(x - y(k))^2 / 4(tau - k)).
//! Affine solutions, constants included, have zero densities.
//! The densities Omega, Theta follow from the jump relations on both
//! boundaries, which give a second-kind Volterra pair with diagonal +1, -1.

mod limits;

pub use limits::{gradient_limit, gradient_limit_with, hp_to_git, jump_check, Approach, FForm, JumpCheck};

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::git::price::{locate, time_nodes, Located};
use crate::grid::{peak_scale, Nodal, TimeGrid};
use crate::march::{march, MarchDiagnostics, Setup, VolterraSystem};
use crate::problem::HeatStripProblem;

/// Rebates less the background L + C, at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryData {
    pub tau: f64,
    pub phi1: f64,
    pub psi1: f64,
}

/// (a, b) of the affine lift a + b x through the starting corners.
fn lift(problem: &HeatStripProblem) -> (f64, f64) {
    let (y0, z0) = (problem.lower().value(0.0), problem.upper().value(0.0));
    let (fl, fu) = (problem.rebate_lower().value(0.0), problem.rebate_upper().value(0.0));
    let b = (fu - fl) / (z0 - y0);
    (fl - b * y0, b)
}

/// Background L(x) + (1/(2 sqrt(pi tau))) int (U0(x') - L(x')) e^{-(x - x')^2 / 4 tau} dx'
/// and its x-derivative.
pub fn background(problem: &HeatStripProblem, tau: f64, x: f64) -> (f64, f64) {
    let (a, b) = lift(problem);
    let u0 = problem.initial();
    let c = 1.0 / (2.0 * (PI * tau).sqrt());
    let mut v = 0.0;
    let mut dv = 0.0;
    for (xi, w) in problem.initial_quadrature(tau) {
        let r = x - xi;
        let e = w * (u0.value(xi) - a - b * xi) * (-r * r / (4.0 * tau)).exp();
        v += e;
        dv -= e * r / (2.0 * tau);
    }
    (a + b * x + c * v, b + c * dv)
}

pub fn boundary_data(problem: &HeatStripProblem, tau: f64) -> Result<BoundaryData> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidInput(format!("tau must be positive, got {tau}")));
    }
    let (y, z) = (problem.lower().value(tau), problem.upper().value(tau));
    Ok(BoundaryData {
        tau,
        phi1: problem.rebate_lower().value(tau) - background(problem, tau, y).0,
        psi1: problem.rebate_upper().value(tau) - background(problem, tau, z).0,
    })
}

/// Omega and Theta on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialPair {
    grid: TimeGrid,
    omega: Nodal,
    theta: Nodal,
    pub diagnostics: MarchDiagnostics,
}

impl PotentialPair {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn omega(&self) -> &Nodal {
        &self.omega
    }

    pub fn theta(&self) -> &Nodal {
        &self.theta
    }

    pub fn omega_values(&self) -> Vec<f64> {
        self.omega.node_values()
    }

    pub fn theta_values(&self) -> Vec<f64> {
        self.theta.node_values()
    }
}

struct HpSystem<'a> {
    p: &'a HeatStripProblem,
}

impl VolterraSystem for HpSystem<'_> {
    fn kernels(&self, tau: f64, _s: f64, d: f64) -> Result<[[f64; 2]; 2]> {
        let l = self.p.width(tau);
        let dy = self.p.lower().rise(tau, d);
        let dz = self.p.upper().rise(tau, d);
        let k = |r: f64| r * (-r * r / (4.0 * d)).exp() / (2.0 * PI.sqrt() * d * d.sqrt());
        Ok([[k(dy), k(dz - l)], [k(dy + l), k(dz)]])
    }

    fn free(&self, tau: f64) -> Result<[f64; 2]> {
        if !(self.p.width(tau) > 0.0) {
            return Err(Error::StripCollapse { tau });
        }
        let b = boundary_data(self.p, tau)?;
        Ok([2.0 * b.phi1, 2.0 * b.psi1])
    }
}

pub fn solve_densities(problem: &HeatStripProblem, grid: &TimeGrid) -> Result<PotentialPair> {
    problem.ensure_valid()?;
    crate::git::check_grid(problem, grid)?;
    let u0 = problem.initial();
    let (y0, z0) = (problem.lower().value(0.0), problem.upper().value(0.0));
    // The background tends to (U0 + L)/2 at the corners.
    let (a, b) = lift(problem);
    let start = [
        2.0 * problem.rebate_lower().value(0.0) - u0.value(y0) - a - b * y0,
        u0.value(z0) + a + b * z0 - 2.0 * problem.rebate_upper().value(0.0),
    ];
    let setup = Setup { diag: [1.0, -1.0], power: [0, 0], start };
    let ([w, t], diagnostics) = march(grid, &setup, &HpSystem { p: problem })?;
    Ok(PotentialPair { omega: Nodal::new(grid, w, 0), theta: Nodal::new(grid, t, 0), grid: grid.clone(), diagnostics })
}

/// U(tau, x) = q + background. Boundary points return the rebates.
pub fn price_hp(problem: &HeatStripProblem, densities: &PotentialPair, tau: f64, x: f64) -> Result<f64> {
    let r = match locate(problem, tau, x, densities.grid.horizon())? {
        Located::Boundary(v) => return Ok(v),
        Located::Interior { r, .. } => r,
    };
    if tau == 0.0 {
        return Ok(problem.initial().value(x));
    }
    let c = 1.0 / (4.0 * PI.sqrt());
    let mut q = 0.0;
    for (s, sigma, wq) in time_nodes(&densities.grid, tau, peak_scale(r), false) {
        let d = tau - s;
        let ry = x - problem.lower().value(s);
        let rz = x - problem.upper().value(s);
        let body = ry * densities.omega.scaled_at_cubic(sigma) * (-ry * ry / (4.0 * d)).exp()
            + rz * densities.theta.scaled_at_cubic(sigma) * (-rz * rz / (4.0 * d)).exp();
        q += 2.0 * sigma * wq * body / (d * d.sqrt());
    }
    Ok(c * q + background(problem, tau, x).0)
}

#[cfg(test)]
mod tests;
