//! Assembly of the boundary-gradient Volterra system.
//!
//! With Y = y(tau), Z = z(tau), d = tau - s and the kernel sums evaluated
//! at a = Y - y(s) or a = Y - z(s):
//!
//! Psi + int [Psi ups-(y) + Phi ups-(z)] = -I0- + f-(tau)/sqrt(pi tau) - int G-
//! Phi - int [Psi ups+(y) + Phi ups+(z)] =  I0+ + f+(tau)/sqrt(pi tau) + int G+
//!
//! where I0 are the initial-data integrals and G collect the rebate terms.

use std::f64::consts::PI;

use super::{Assembly, GitOptions};
use crate::error::{Error, Result};
use crate::kernels::{boundary_sums, BoundarySums, Drop, Representation};
use crate::march::VolterraSystem;
use crate::problem::HeatStripProblem;
use crate::quad::integrate_singular_end_pair;

pub(crate) struct GitSystem<'a> {
    p: &'a HeatStripProblem,
    repr: Representation,
    assembly: Assembly,
    panels: usize,
    tol: f64,
}

/// Boundary data at one time.
#[derive(Clone, Copy)]
pub(crate) struct Edge {
    pub y: f64,
    pub z: f64,
    pub dy: f64,
    pub dz: f64,
    pub fm: f64,
    pub fp: f64,
}

impl Edge {
    #[inline]
    pub fn at(p: &HeatStripProblem, s: f64) -> Self {
        Self {
            y: p.lower().value(s),
            z: p.upper().value(s),
            dy: p.lower().derivative(s),
            dz: p.upper().derivative(s),
            fm: p.rebate_lower().value(s),
            fp: p.rebate_upper().value(s),
        }
    }
}

impl<'a> GitSystem<'a> {
    pub fn new(p: &'a HeatStripProblem, options: &GitOptions) -> Self {
        Self {
            p,
            repr: options.representation,
            assembly: options.assembly,
            panels: options.stieltjes_panels.max(8),
            tol: options.tolerance,
        }
    }

    fn sums(&self, a: f64, l: f64, d: f64, drop: Drop) -> Result<BoundarySums> {
        boundary_sums(a, l, d, self.repr, drop)
    }

    /// Initial-data integrals of ups-(tau | xi, 0) and ups+(tau | xi, 0).
    fn initial_terms(&self, tau: f64, yt: f64, l: f64) -> Result<[f64; 2]> {
        let mut acc = [0.0; 2];
        for (xi, wu) in self.p.initial_nodes(tau) {
            let s = self.sums(yt - xi, l, tau, Drop::None)?;
            acc[0] += wu * s.upsilon_minus;
            acc[1] += wu * s.upsilon_plus;
        }
        Ok(acc)
    }

    /// Rebate integrands G-, G+ at (tau, s).
    fn rebate_terms(&self, now: &Edge, tau: f64, s: f64, d: f64) -> Result<[f64; 2]> {
        let e = Edge::at(self.p, s);
        let l = now.z - now.y;
        let c = 1.0 / (2.0 * PI.sqrt() * d * d.sqrt());
        let delta = self.p.lower().rise(tau, d);
        let eps = self.p.upper().rise(tau, d);
        let own = |f: f64, step: f64, r: f64, slope: f64| -> f64 {
            let q = r * r / (4.0 * d);
            c * (f * (-q).exp_m1() + f * (-q).exp() * (slope * r - 2.0 * q) - step)
        };
        let sy = self.sums(delta, l, d, Drop::Minus)?;
        let sz = self.sums(eps - l, l, d, Drop::Plus)?;
        let gm = own(e.fm, self.p.rebate_lower().rise(tau, d), delta, e.dy) - e.dy * e.fm * sy.upsilon_minus
            + e.dz * e.fp * sz.upsilon_minus
            + e.fm * sy.lambda_minus
            - e.fp * sz.lambda_minus;
        let gp = -own(e.fp, self.p.rebate_upper().rise(tau, d), eps, e.dz) - e.dy * e.fm * sy.upsilon_plus
            + e.dz * e.fp * sz.upsilon_plus
            + e.fm * sy.lambda_plus
            - e.fp * sz.lambda_plus;
        Ok([gm, gp])
    }

    fn direct_free(&self, tau: f64, now: &Edge) -> Result<[f64; 2]> {
        let mut err = None;
        let g = integrate_singular_end_pair(
            |s, d| {
                if d <= 0.0 {
                    return [0.0, 0.0];
                }
                match self.rebate_terms(now, tau, s, d) {
                    Ok(v) => v,
                    Err(e) => {
                        err.get_or_insert(e);
                        [0.0, 0.0]
                    }
                }
            },
            0.0,
            tau,
            self.tol,
        );
        if let Some(e) = err {
            return Err(e);
        }
        Ok(g)
    }

    /// eta-(y(s)), eta-(z(s)), eta+(y(s)), eta+(z(s)) at (tau, s), each
    /// with the indicator subtraction on its own boundary.
    fn etas(&self, now: &Edge, tau: f64, d: f64) -> Result<[f64; 4]> {
        if d <= 0.0 {
            return Ok([0.0; 4]);
        }
        let l = now.z - now.y;
        let delta = self.p.lower().rise(tau, d);
        let eps = self.p.upper().rise(tau, d);
        let sy = self.sums(delta, l, d, Drop::Minus)?;
        let sz = self.sums(eps - l, l, d, Drop::Plus)?;
        let own = |r: f64| (-r * r / (4.0 * d)).exp_m1() / (PI * d).sqrt();
        Ok([sy.eta_minus + own(delta), sz.eta_minus, sy.eta_plus, sz.eta_plus + own(eps)])
    }

    /// The Stieltjes form: int f d eta on a grid uniform in sqrt(tau - s),
    /// plus the regularised (f(s) - f(tau)) integrals.
    fn stieltjes_free(&self, tau: f64, now: &Edge) -> Result<[f64; 2]> {
        let c = 1.0 / (2.0 * PI.sqrt());
        let diff = integrate_singular_end_pair(
            |_, d| {
                if d <= 0.0 {
                    return [0.0, 0.0];
                }
                let k = c / (d * d.sqrt());
                [-self.p.rebate_lower().rise(tau, d) * k, -self.p.rebate_upper().rise(tau, d) * k]
            },
            0.0,
            tau,
            self.tol,
        );
        let m = self.panels;
        let top = tau.sqrt();
        let node = |k: usize| {
            let v = top * (m - k) as f64 / m as f64;
            (tau - v * v, v * v)
        };
        let mut prev = self.etas(now, tau, node(0).1)?;
        let mut acc = [0.0; 2];
        for k in 1..=m {
            let d = node(k).1;
            let cur = if k == m { [0.0; 4] } else { self.etas(now, tau, d)? };
            let vm = top * (m as f64 - k as f64 + 0.5) / m as f64;
            let sm = tau - vm * vm;
            let fm = self.p.rebate_lower().value(sm);
            let fp = self.p.rebate_upper().value(sm);
            acc[0] += fm * (cur[0] - prev[0]) - fp * (cur[1] - prev[1]);
            acc[1] += fm * (cur[2] - prev[2]) - fp * (cur[3] - prev[3]);
            prev = cur;
        }
        Ok([diff[0] + acc[0], -diff[1] + acc[1]])
    }
}

impl VolterraSystem for GitSystem<'_> {
    fn kernels(&self, tau: f64, _s: f64, d: f64) -> Result<[[f64; 2]; 2]> {
        let l = self.p.width(tau);
        let sy = self.sums(self.p.lower().rise(tau, d), l, d, Drop::None)?;
        let sz = self.sums(self.p.upper().rise(tau, d) - l, l, d, Drop::None)?;
        Ok([[sy.upsilon_minus, sz.upsilon_minus], [-sy.upsilon_plus, -sz.upsilon_plus]])
    }

    fn free(&self, tau: f64) -> Result<[f64; 2]> {
        let now = Edge::at(self.p, tau);
        let l = now.z - now.y;
        if !(l > 0.0) {
            return Err(Error::StripCollapse { tau });
        }
        let i0 = self.initial_terms(tau, now.y, l)?;
        let g = match self.assembly {
            Assembly::Direct => self.direct_free(tau, &now)?,
            Assembly::Stieltjes => self.stieltjes_free(tau, &now)?,
        };
        let root = (PI * tau).sqrt();
        Ok([-i0[0] + now.fm / root - g[0], i0[1] + now.fp / root + g[1]])
    }
}
