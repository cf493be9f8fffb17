//! Boundary-gradient route.
//!
//! The unknowns are Psi = -U_x at the lower boundary and Phi = U_x at the
//! upper one. They solve a pair of Volterra equations whose kernels are the
//! minus/plus sums of [`crate::kernels::volterra`]; once known, the price
//! anywhere inside the strip is a single time integral, written either with
//! theta functions ([`price_theta`]) or with image Gaussians
//! ([`price_images`]).

mod fourier;
pub(crate) mod price;
mod system;

pub use fourier::{fourier_coefficients, profile_coefficients, reconstruct, residue_identity, BetaTerm, ResidueCheck};
pub use price::{price_images, price_images_detail, price_theta, price_theta_detail, PricePoint};

use crate::error::Result;
use crate::grid::{Nodal, TimeGrid};
use crate::kernels::Representation;
use crate::march::{march, MarchDiagnostics, Setup};
use crate::problem::{HeatStripProblem, Side};

/// How the rebate terms of the Volterra system are assembled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assembly {
    /// Kernel-by-kernel, with the regularised (f(s) - f(tau)) brackets.
    Direct,
    /// Rebates integrated against d eta as Stieltjes sums.
    Stieltjes,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GitOptions {
    pub representation: Representation,
    pub assembly: Assembly,
    /// Sub-intervals of the Stieltjes sums, uniform in sqrt(tau - s).
    pub stieltjes_panels: usize,
    /// Absolute tolerance of the adaptive free-term integrals.
    pub tolerance: f64,
}

impl Default for GitOptions {
    fn default() -> Self {
        Self {
            representation: Representation::Auto,
            assembly: Assembly::Direct,
            stieltjes_panels: 2048,
            tolerance: 1e-13,
        }
    }
}

/// Psi and Phi on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientPair {
    grid: TimeGrid,
    psi: Nodal,
    phi: Nodal,
    pub diagnostics: MarchDiagnostics,
}

impl GradientPair {
    pub fn new(grid: TimeGrid, psi: Nodal, phi: Nodal, diagnostics: MarchDiagnostics) -> Self {
        Self { grid, psi, phi, diagnostics }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn psi(&self) -> &Nodal {
        &self.psi
    }

    pub fn phi(&self) -> &Nodal {
        &self.phi
    }

    /// Psi at the grid nodes. At an incompatible corner the first entry is
    /// infinite.
    pub fn psi_values(&self) -> Vec<f64> {
        self.psi.node_values()
    }

    pub fn phi_values(&self) -> Vec<f64> {
        self.phi.node_values()
    }

    pub fn psi_at(&self, s: f64) -> f64 {
        self.psi.at(s)
    }

    pub fn phi_at(&self, s: f64) -> f64 {
        self.phi.at(s)
    }
}

/// Powers and starting values of the scaled unknowns. A corner where the
/// profile misses the rebate gives Psi ~ c / sqrt(tau).
pub(crate) fn corner_start(problem: &HeatStripProblem) -> ([u8; 2], [f64; 2]) {
    let sqrt_pi = std::f64::consts::PI.sqrt();
    let u0 = problem.initial();
    let (y0, z0) = (problem.lower().value(0.0), problem.upper().value(0.0));
    let (fm, fp) = (problem.rebate_lower().value(0.0), problem.rebate_upper().value(0.0));
    let lower = if problem.corner_compatible(Side::Lower) {
        (0, -u0.slope_right(y0))
    } else {
        (1, -(u0.value(y0) - fm) / sqrt_pi)
    };
    let upper = if problem.corner_compatible(Side::Upper) {
        (0, u0.slope_left(z0))
    } else {
        (1, -(u0.value(z0) - fp) / sqrt_pi)
    };
    ([lower.0, upper.0], [lower.1, upper.1])
}

pub(crate) fn check_grid(problem: &HeatStripProblem, grid: &TimeGrid) -> Result<()> {
    if grid.horizon() > problem.horizon() * (1.0 + 1e-12) {
        return Err(crate::Error::InvalidInput(format!(
            "grid horizon {} exceeds the problem horizon {}",
            grid.horizon(),
            problem.horizon()
        )));
    }
    Ok(())
}

pub fn solve_gradients(problem: &HeatStripProblem, grid: &TimeGrid) -> Result<GradientPair> {
    solve_gradients_with(problem, grid, &GitOptions::default())
}

pub fn solve_gradients_with(problem: &HeatStripProblem, grid: &TimeGrid, options: &GitOptions) -> Result<GradientPair> {
    problem.ensure_valid()?;
    check_grid(problem, grid)?;
    let grid = grid.clone();
    let (power, start) = corner_start(problem);
    let sys = system::GitSystem::new(problem, options);
    let setup = Setup { diag: [1.0, 1.0], power, start };
    let ([w_psi, w_phi], mut diagnostics) = march(&grid, &setup, &sys)?;
    let psi = Nodal::new(&grid, w_psi, power[0]);
    let phi = Nodal::new(&grid, w_phi, power[1]);
    for (name, series) in [("Psi", &psi), ("Phi", &phi)] {
        let jump = series.max_relative_jump();
        if jump > 0.5 {
            diagnostics.warnings.push(format!(
                "{name} changes by {:.0}% between consecutive nodes; the grid may be too coarse",
                100.0 * jump
            ));
        }
    }
    Ok(GradientPair { grid, psi, phi, diagnostics })
}
