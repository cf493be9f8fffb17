//! Crank-Nicolson oracle on the straightened strip.
//!
//! With xi = (x - y(tau)) / l(tau) and V(tau, xi) = U(tau, x) the strip
//! becomes [0, 1] and
//!
//! V_tau = V_xixi / l^2 + (y' + xi l') / l V_xi,
//!
//! which is stepped with a theta scheme and one tridiagonal solve per step.

use crate::error::{Error, Result};
use crate::problem::HeatStripProblem;

/// Spatial and temporal resolution of the finite-difference solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdGrid {
    /// Spatial intervals on [0, 1].
    pub m: usize,
    /// Time steps on [0, T].
    pub n: usize,
    /// Implicitness, 0.5 is Crank-Nicolson.
    pub theta: f64,
}

impl FdGrid {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        Self::with_theta(m, n, 0.5)
    }

    pub fn with_theta(m: usize, n: usize, theta: f64) -> Result<Self> {
        if m < 8 || n < 8 {
            return Err(Error::InvalidInput(format!("fd grid needs m, n >= 8, got {m} x {n}")));
        }
        if !(0.5..=1.0).contains(&theta) {
            return Err(Error::InvalidInput(format!("theta must lie in [0.5, 1], got {theta}")));
        }
        Ok(Self { m, n, theta })
    }
}

/// V on every (time, xi) node together with the strip geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct FdSurface {
    taus: Vec<f64>,
    lower: Vec<f64>,
    width: Vec<f64>,
    values: Vec<Vec<f64>>,
    pub warnings: Vec<String>,
}

impl FdSurface {
    pub fn taus(&self) -> &[f64] {
        &self.taus
    }

    pub fn spatial_steps(&self) -> usize {
        self.values[0].len() - 1
    }

    /// Node values at time index j, indexed by xi_i = i / m.
    pub fn row(&self, j: usize) -> &[f64] {
        &self.values[j]
    }

    /// U(tau, x): linear in time between steps, cubic Lagrange in xi.
    pub fn price(&self, tau: f64, x: f64) -> Result<f64> {
        let t_max = *self.taus.last().unwrap();
        if !(tau >= 0.0 && tau <= t_max * (1.0 + 1e-12)) {
            return Err(Error::InvalidInput(format!("tau={tau} outside [0, {t_max}]")));
        }
        let j = self.taus.partition_point(|&t| t <= tau).clamp(1, self.taus.len() - 1) - 1;
        let w = ((tau - self.taus[j]) / (self.taus[j + 1] - self.taus[j])).clamp(0.0, 1.0);
        let at = |k: usize| -> Result<f64> {
            let xi = (x - self.lower[k]) / self.width[k];
            if !(-1e-12..=1.0 + 1e-12).contains(&xi) {
                return Err(Error::OutsideStrip { tau, x });
            }
            Ok(cubic(&self.values[k], xi.clamp(0.0, 1.0)))
        };
        if w == 0.0 {
            return at(j);
        }
        if w == 1.0 {
            return at(j + 1);
        }
        Ok((1.0 - w) * at(j)? + w * at(j + 1)?)
    }
}

fn cubic(v: &[f64], xi: f64) -> f64 {
    let m = v.len() - 1;
    let h = 1.0 / m as f64;
    let i = ((xi / h).floor() as usize).min(m - 1);
    let lo = i.saturating_sub(1).min(m - 3);
    let pts: Vec<f64> = (lo..lo + 4).map(|k| k as f64 * h).collect();
    let mut acc = 0.0;
    for a in 0..4 {
        let mut basis = 1.0;
        for b in 0..4 {
            if a != b {
                basis *= (xi - pts[b]) / (pts[a] - pts[b]);
            }
        }
        acc += basis * v[lo + a];
    }
    acc
}

/// Boundary gradients from the surface, Psi = -U_x(y), Phi = U_x(z).
#[derive(Debug, Clone, PartialEq)]
pub struct FdGradients {
    pub taus: Vec<f64>,
    pub psi: Vec<f64>,
    pub phi: Vec<f64>,
}

pub fn fd_boundary_gradients(surface: &FdSurface) -> FdGradients {
    let m = surface.spatial_steps();
    let h = 1.0 / m as f64;
    let (mut psi, mut phi) = (Vec::new(), Vec::new());
    for (v, l) in surface.values.iter().zip(&surface.width) {
        psi.push(-(-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h * l));
        phi.push((3.0 * v[m] - 4.0 * v[m - 1] + v[m - 2]) / (2.0 * h * l));
    }
    FdGradients { taus: surface.taus.clone(), psi, phi }
}

/// Tridiagonal operator L at one time: (L v)_i = lo_i v_{i-1} + mid_i v_i + up_i v_{i+1}.
struct Operator {
    lo: Vec<f64>,
    mid: Vec<f64>,
    up: Vec<f64>,
}

fn operator(problem: &HeatStripProblem, tau: f64, m: usize, upwinded: &mut bool) -> Result<Operator> {
    let l = problem.width(tau);
    if !(l > 0.0) {
        return Err(Error::StripCollapse { tau });
    }
    let h = 1.0 / m as f64;
    let dy = problem.lower().derivative(tau);
    let dl = problem.upper().derivative(tau) - dy;
    let a = 1.0 / (l * l * h * h);
    let (mut lo, mut mid, mut up) = (vec![0.0; m + 1], vec![0.0; m + 1], vec![0.0; m + 1]);
    for i in 1..m {
        let c = dy + i as f64 * h * dl;
        let v = c / l;
        lo[i] = a;
        mid[i] = -2.0 * a;
        up[i] = a;
        if c.abs() * h * l > 2.0 {
            *upwinded = true;
            if v > 0.0 {
                mid[i] -= v / h;
                up[i] += v / h;
            } else {
                lo[i] -= v / h;
                mid[i] += v / h;
            }
        } else {
            lo[i] -= v / (2.0 * h);
            up[i] += v / (2.0 * h);
        }
    }
    Ok(Operator { lo, mid, up })
}

/// One theta step from `v` at `t0` to `t1`, boundary values taken at t1.
fn step(problem: &HeatStripProblem, v: &[f64], t0: f64, t1: f64, theta: f64, upwinded: &mut bool) -> Result<Vec<f64>> {
    let m = v.len() - 1;
    let dt = t1 - t0;
    let old = operator(problem, t0, m, upwinded)?;
    let new = operator(problem, t1, m, upwinded)?;
    let e = (1.0 - theta) * dt;
    let i_ = theta * dt;
    let mut rhs = vec![0.0; m + 1];
    let (mut a, mut b, mut c) = (vec![0.0; m + 1], vec![1.0; m + 1], vec![0.0; m + 1]);
    rhs[0] = problem.rebate_lower().value(t1);
    rhs[m] = problem.rebate_upper().value(t1);
    for i in 1..m {
        rhs[i] = v[i] + e * (old.lo[i] * v[i - 1] + old.mid[i] * v[i] + old.up[i] * v[i + 1]);
        a[i] = -i_ * new.lo[i];
        b[i] = 1.0 - i_ * new.mid[i];
        c[i] = -i_ * new.up[i];
    }
    Ok(thomas(&a, &b, &c, &rhs))
}

fn thomas(a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> Vec<f64> {
    let n = d.len();
    let mut cp = vec![0.0; n];
    let mut dp = vec![0.0; n];
    cp[0] = c[0] / b[0];
    dp[0] = d[0] / b[0];
    for i in 1..n {
        let den = b[i] - a[i] * cp[i - 1];
        cp[i] = c[i] / den;
        dp[i] = (d[i] - a[i] * dp[i - 1]) / den;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = dp[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = dp[i] - cp[i] * x[i + 1];
    }
    x
}

/// U(0, .) at the nodes, replaced by the cell average on cells that hold a
/// kink of the profile.
fn initial_row(problem: &HeatStripProblem, m: usize) -> Vec<f64> {
    let (y0, l0) = (problem.lower().value(0.0), problem.width(0.0));
    let h = l0 / m as f64;
    let u0 = problem.initial();
    let kinks = u0.kinks();
    (0..=m)
        .map(|i| {
            let x = y0 + h * i as f64;
            let (a, b) = (x - 0.5 * h, x + 0.5 * h);
            if i == 0 || i == m || !kinks.iter().any(|&k| k > a && k < b) {
                return u0.value(x);
            }
            crate::quad::composite(|t| u0.value(t), a, b, &kinks, h) / h
        })
        .collect()
}

/// Solves the straightened problem on `grid`. The first step is replaced
/// by two implicit half-steps when a starting corner is incompatible or the
/// initial profile has kinks inside the strip.
pub fn solve_fd(problem: &HeatStripProblem, grid: &FdGrid) -> Result<FdSurface> {
    problem.ensure_valid()?;
    let (m, n) = (grid.m, grid.n);
    let horizon = problem.horizon();
    let (y0, l0) = (problem.lower().value(0.0), problem.width(0.0));
    let inner_kink = problem.initial().kinks().iter().any(|&k| k > y0 && k < y0 + l0);
    let rough = !problem.corners_compatible() || inner_kink;
    // Rough data get steps graded quadratically towards tau = 0.
    let taus: Vec<f64> = (0..=n)
        .map(|j| {
            let r = j as f64 / n as f64;
            horizon * if rough { r * r } else { r }
        })
        .collect();
    let mut lower = Vec::with_capacity(n + 1);
    let mut width = Vec::with_capacity(n + 1);
    for &t in &taus {
        let l = problem.width(t);
        if !(l > 0.0) {
            return Err(Error::StripCollapse { tau: t });
        }
        lower.push(problem.lower().value(t));
        width.push(l);
    }

    let mut warnings = Vec::new();
    let ratio = taus
        .windows(2)
        .zip(&width)
        .map(|(t, l)| (problem.upper().derivative(t[0]) - problem.lower().derivative(t[0])).abs() / l * (t[1] - t[0]))
        .fold(0.0, f64::max);
    if ratio > 0.5 {
        warnings.push(format!("strip changes fast relative to the step: l'/l * dtau = {ratio:.3}"));
    }

    let mut v = initial_row(problem, m);
    let mut values = vec![v.clone()];
    let mut upwinded = false;
    for j in 1..=n {
        let (t0, t1) = (taus[j - 1], taus[j]);
        v = if j == 1 && rough && grid.theta < 1.0 {
            let half = 0.5 * (t0 + t1);
            let mid = step(problem, &v, t0, half, 1.0, &mut upwinded)?;
            step(problem, &mid, half, t1, 1.0, &mut upwinded)?
        } else {
            step(problem, &v, t0, t1, grid.theta, &mut upwinded)?
        };
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite(format!("fd solution at tau={t1}")));
        }
        values.push(v.clone());
    }
    if upwinded {
        warnings.push("cell Peclet number above 2, advection upwinded".into());
    }
    Ok(FdSurface { taus, lower, width, values, warnings })
}
