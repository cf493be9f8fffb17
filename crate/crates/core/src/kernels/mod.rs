//! Special-function kernels: theta3, the image Gaussians and the Volterra
//! kernel families in image, Fourier and theta form.

pub mod images;
pub mod poisson;
pub mod theta;
pub mod volterra;

pub use images::{image_sums, lambda_image, upsilon_image, ImageSums};
pub use poisson::{poisson_pair, PoissonPair};
pub use theta::{theta3, theta3_all, theta3_d2z, theta3_dz, ThetaValues};
pub use volterra::{
    boundary_sums, eta_kernel, lambda0_kernel, lambda_kernel, term_count, upsilon0_kernel, upsilon_kernel,
    BoundarySums, Drop, Representation, AUTO_SWITCH,
};

use crate::problem::CurveFn;

/// Evaluation point of a kernel: times, source point, field point and the
/// strip geometry read from the boundary curves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelQuery {
    pub tau: f64,
    pub s: f64,
    pub xi: f64,
    /// Field point; used only by the image kernels.
    pub x: f64,
    pub y_tau: f64,
    pub l_tau: f64,
    pub y_s: f64,
    pub z_s: f64,
}

impl KernelQuery {
    pub fn new(lower: &CurveFn, upper: &CurveFn, tau: f64, s: f64, xi: f64) -> Self {
        let y_tau = lower.value(tau);
        Self {
            tau,
            s,
            xi,
            x: f64::NAN,
            y_tau,
            l_tau: upper.value(tau) - y_tau,
            y_s: lower.value(s),
            z_s: upper.value(s),
        }
    }

    pub fn with_x(self, x: f64) -> Self {
        Self { x, ..self }
    }
}
