//! Product-integration march for a pair of coupled Volterra equations of
//! the second kind,
//!
//! D_k w_k(tau) + sum_m int_0^tau K_km(tau, s) w_m(s) ds = F_k(tau),
//!
//! with each unknown stored as W_m(sigma) = sigma^p w_m(sigma^2),
//! piecewise linear in sigma = sqrt(s). Intervals close to s = tau are
//! integrated after sigma = sigma_i - u^2, which turns the inverse
//! square-root kernels into smooth integrands.

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::quad::{gl16, gl8};

/// Intervals next to the current node that use the u-substitution.
const NEAR: usize = 3;

pub(crate) trait VolterraSystem {
    /// Kernel matrix at (tau, s), with d = tau - s passed exactly.
    fn kernels(&self, tau: f64, s: f64, d: f64) -> Result<[[f64; 2]; 2]>;
    /// Right-hand side at a grid node.
    fn free(&self, tau: f64) -> Result<[f64; 2]>;
}

pub(crate) struct Setup {
    pub diag: [f64; 2],
    pub power: [u8; 2],
    /// W_m at sigma = 0.
    pub start: [f64; 2],
}

/// What the march observed while solving.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MarchDiagnostics {
    /// Smallest |determinant| of the per-step 2x2 systems.
    pub min_pivot: f64,
    /// Largest residual of the per-step 2x2 solves.
    pub max_residual: f64,
    pub kernel_evaluations: usize,
    pub warnings: Vec<String>,
}

pub(crate) fn march<S: VolterraSystem>(
    grid: &TimeGrid,
    setup: &Setup,
    sys: &S,
) -> Result<([Vec<f64>; 2], MarchDiagnostics)> {
    let n = grid.steps();
    let roots = grid.roots();
    let nodes = grid.nodes();
    let mut w = [vec![0.0; n + 1], vec![0.0; n + 1]];
    w[0][0] = setup.start[0];
    w[1][0] = setup.start[1];
    let mut diag = MarchDiagnostics { min_pivot: f64::INFINITY, ..Default::default() };
    let mut pts: Vec<(f64, f64, f64)> = Vec::with_capacity(32);

    for i in 1..=n {
        let tau = nodes[i];
        let si = roots[i];
        let mut known = [0.0; 2];
        let mut coef = [[0.0; 2]; 2];
        for j in 0..i {
            let (a, b) = (roots[j], roots[j + 1]);
            let h = b - a;
            pts.clear();
            if j + NEAR >= i {
                let (lo, hi) = ((si - b).max(0.0).sqrt(), (si - a).sqrt());
                for (u, wu) in gl16().mapped(lo, hi) {
                    let sigma = si - u * u;
                    pts.push((sigma, wu * 2.0 * u, u * u * (si + sigma)));
                }
            } else {
                pts.extend(gl8().mapped(a, b).map(|(sigma, wq)| (sigma, wq, tau - sigma * sigma)));
            }
            for &(sigma, wq, d) in &pts {
                let s = sigma * sigma;
                let k = sys.kernels(tau, s, d)?;
                diag.kernel_evaluations += 1;
                let phi_a = (b - sigma) / h;
                let phi_b = (sigma - a) / h;
                for m in 0..2 {
                    let fac = wq * 2.0 * if setup.power[m] == 0 { sigma } else { 1.0 };
                    for (row, kr) in k.iter().enumerate() {
                        let c = kr[m] * fac;
                        known[row] += c * phi_a * w[m][j];
                        if j + 1 == i {
                            coef[row][m] += c * phi_b;
                        } else {
                            known[row] += c * phi_b * w[m][j + 1];
                        }
                    }
                }
            }
        }
        for k in 0..2 {
            coef[k][k] += setup.diag[k] / if setup.power[k] == 0 { 1.0 } else { si };
        }
        let f = sys.free(tau)?;
        let rhs = [f[0] - known[0], f[1] - known[1]];
        let det = coef[0][0] * coef[1][1] - coef[0][1] * coef[1][0];
        if !(det.is_finite() && det != 0.0) || !rhs.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite(format!("Volterra step at tau={tau}")));
        }
        let x0 = (rhs[0] * coef[1][1] - coef[0][1] * rhs[1]) / det;
        let x1 = (coef[0][0] * rhs[1] - rhs[0] * coef[1][0]) / det;
        let r0 = coef[0][0] * x0 + coef[0][1] * x1 - rhs[0];
        let r1 = coef[1][0] * x0 + coef[1][1] * x1 - rhs[1];
        diag.max_residual = diag.max_residual.max(r0.abs()).max(r1.abs());
        diag.min_pivot = diag.min_pivot.min(det.abs());
        w[0][i] = x0;
        w[1][i] = x1;
    }
    Ok((w, diag))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// w(t) + int_0^t w(s)/sqrt(t-s) ds = 1 has the closed-form solution
    /// e^{pi t} erfc(sqrt(pi t)); a second, uncoupled copy checks the
    /// diagonal sign handling.
    struct Abel;

    impl VolterraSystem for Abel {
        fn kernels(&self, _tau: f64, _s: f64, d: f64) -> Result<[[f64; 2]; 2]> {
            Ok([[1.0 / d.sqrt(), 0.0], [0.0, -1.0 / d.sqrt()]])
        }
        fn free(&self, _tau: f64) -> Result<[f64; 2]> {
            Ok([1.0, -1.0])
        }
    }

    fn erfc(x: f64) -> f64 {
        let v = crate::quad::adaptive(|t| (-t * t).exp(), 0.0, x, 1e-15);
        1.0 - 2.0 / std::f64::consts::PI.sqrt() * v
    }

    #[test]
    fn abel_equation_is_solved() {
        let grid = TimeGrid::graded(1.0, 64).unwrap();
        let setup = Setup { diag: [1.0, -1.0], power: [0, 0], start: [1.0, 1.0] };
        let (w, d) = march(&grid, &setup, &Abel).unwrap();
        let pi = std::f64::consts::PI;
        for (i, &t) in grid.nodes().iter().enumerate() {
            let exact = (pi * t).exp() * erfc((pi * t).sqrt());
            assert!((w[0][i] - exact).abs() < 3e-5, "t={t} got {} want {exact}", w[0][i]);
            assert!((w[1][i] - exact).abs() < 3e-5);
        }
        assert!(d.max_residual < 1e-12);
    }

    #[test]
    fn abel_error_falls_with_refinement() {
        let pi = std::f64::consts::PI;
        let exact = pi.exp() * erfc(pi.sqrt());
        let err = |n| {
            let grid = TimeGrid::graded(1.0, n).unwrap();
            let setup = Setup { diag: [1.0, -1.0], power: [0, 0], start: [1.0, 1.0] };
            let (w, _) = march(&grid, &setup, &Abel).unwrap();
            (w[0][n] - exact).abs()
        };
        let (e1, e2) = (err(16), err(32));
        assert!(e1 / e2 > 3.0, "{e1} {e2}");
    }
}
