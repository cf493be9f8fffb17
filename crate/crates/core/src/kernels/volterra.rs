//! Kernels of the boundary-gradient Volterra system.
//!
//! With a = y(tau) - xi, d = tau - s and l = l(tau), the image terms sit at
//! r_m = a + m l for integer m. Even m build the "minus" sums and odd m the
//! "plus" sums:
//!
//! upsilon_m = -r_m e^{-r_m^2/4d} / (2 sqrt(pi) d^{3/2})
//! lambda_m  = e^{-r_m^2/4d} (1 - r_m^2/2d) / (2 sqrt(pi) d^{3/2})
//! eta_m     = e^{-r_m^2/4d} / sqrt(pi d)
//!
//! The same sums have Fourier series in w = exp(-pi^2 d / l^2), which can
//! also be written through theta3.

use std::f64::consts::PI;

use super::theta::{theta3_all, MAX_TERMS};
use super::KernelQuery;
use crate::error::{Error, Result};
use crate::problem::Side;

/// Below this value of (tau - s)/l^2 the automatic choice uses images.
pub const AUTO_SWITCH: f64 = 0.05;

const TOL: f64 = 1e-16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Representation {
    Auto,
    Image,
    Fourier,
    Theta,
}

impl Representation {
    /// The concrete series used for a given (tau - s)/l^2.
    #[inline]
    pub fn resolve(self, ratio: f64) -> Self {
        match self {
            Self::Auto if ratio < AUTO_SWITCH => Self::Image,
            Self::Auto => Self::Fourier,
            other => other,
        }
    }
}

/// Which singular image term to leave out of the sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Drop {
    None,
    /// m = 0, the n = 0 term of the minus sums.
    Minus,
    /// m = 1, the n = 0 term of the plus sums.
    Plus,
}

/// All minus/plus kernel sums at one (a, l, d).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BoundarySums {
    pub upsilon_minus: f64,
    pub upsilon_plus: f64,
    pub lambda_minus: f64,
    pub lambda_plus: f64,
    /// Without the indicator subtraction.
    pub eta_minus: f64,
    pub eta_plus: f64,
    pub terms: usize,
}

/// Evaluates every kernel sum in one pass.
pub fn boundary_sums(a: f64, l: f64, d: f64, repr: Representation, drop: Drop) -> Result<BoundarySums> {
    boundary_sums_tol(a, l, d, repr, drop, TOL)
}

pub fn boundary_sums_tol(a: f64, l: f64, d: f64, repr: Representation, drop: Drop, tol: f64) -> Result<BoundarySums> {
    if !(d > 0.0) {
        return Err(Error::InvalidInput(format!("kernel time gap must be positive, got {d}")));
    }
    if !(l > 0.0) {
        return Err(Error::InvalidInput(format!("strip width must be positive, got {l}")));
    }
    match repr.resolve(d / (l * l)) {
        Representation::Image => Ok(image_form(a, l, d, drop, tol)?),
        Representation::Fourier => {
            let mut s = fourier_form(a, l, d, tol)?;
            remove_singular(&mut s, a, l, d, drop);
            Ok(s)
        }
        _ => {
            let mut s = theta_form(a, l, d)?;
            remove_singular(&mut s, a, l, d, drop);
            Ok(s)
        }
    }
}

#[inline]
fn image_term(r: f64, d: f64) -> (f64, f64, f64) {
    let e = (-r * r / (4.0 * d)).exp();
    let c = 1.0 / (2.0 * PI.sqrt() * d * d.sqrt());
    (-r * e * c, e * (1.0 - r * r / (2.0 * d)) * c, e / (PI * d).sqrt())
}

fn remove_singular(s: &mut BoundarySums, a: f64, l: f64, d: f64, drop: Drop) {
    match drop {
        Drop::None => {}
        Drop::Minus => {
            let (u, lam, eta) = image_term(a, d);
            s.upsilon_minus -= u;
            s.lambda_minus -= lam;
            s.eta_minus -= eta;
        }
        Drop::Plus => {
            let (u, lam, eta) = image_term(a + l, d);
            s.upsilon_plus -= u;
            s.lambda_plus -= lam;
            s.eta_plus -= eta;
        }
    }
}

fn image_form(a: f64, l: f64, d: f64, drop: Drop, tol: f64) -> Result<BoundarySums> {
    let mut s = BoundarySums::default();
    let m0 = (-a / l).round() as i64;
    let reach = 3.0 * d.sqrt();
    let add = |m: i64, s: &mut BoundarySums| -> (f64, f64) {
        let r = a + m as f64 * l;
        let skip = (drop == Drop::Minus && m == 0) || (drop == Drop::Plus && m == 1);
        let (u, lam, eta) = image_term(r, d);
        let size = u.abs().max(lam.abs()).max(eta);
        if !skip {
            if m.rem_euclid(2) == 0 {
                s.upsilon_minus += u;
                s.lambda_minus += lam;
                s.eta_minus += eta;
            } else {
                s.upsilon_plus += u;
                s.lambda_plus += lam;
                s.eta_plus += eta;
            }
        }
        s.terms += 1;
        (r, size)
    };
    let mut peak = add(m0, &mut s).1;
    for dir in [1i64, -1] {
        let mut m = m0 + dir;
        loop {
            let (r, size) = add(m, &mut s);
            peak = peak.max(size);
            if r.abs() > reach && size <= tol * peak {
                break;
            }
            m += dir;
            if (m - m0).unsigned_abs() as usize > MAX_TERMS {
                return Err(Error::SeriesCap { terms: MAX_TERMS });
            }
        }
    }
    Ok(s)
}

fn fourier_form(a: f64, l: f64, d: f64, tol: f64) -> Result<BoundarySums> {
    let theta = -PI * a / l;
    let (s1, c1) = theta.sin_cos();
    let (mut sn, mut cn) = (s1, c1);
    let mut em = 0.0;
    let mut ep = 0.0;
    let mut um = 0.0;
    let mut up = 0.0;
    let mut lm = 0.0;
    let mut lp = 0.0;
    let k = PI * PI * d / (l * l);
    let mut quiet = 0;
    let mut terms = 0;
    for n in 1..=MAX_TERMS {
        let nf = n as f64;
        let w = (-k * nf * nf).exp();
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        em += w * cn;
        ep += sign * w * cn;
        um += nf * w * sn;
        up += sign * nf * w * sn;
        lm += nf * nf * w * cn;
        lp += sign * nf * nf * w * cn;
        terms = n;
        let next = (nf + 1.0) * (nf + 1.0) * (-k * (nf + 1.0) * (nf + 1.0)).exp();
        let scale = 1.0 + em.abs().max(um.abs()).max(lm.abs()).max(ep.abs()).max(up.abs()).max(lp.abs());
        if next < tol * scale {
            quiet += 1;
            if quiet >= 2 {
                break;
            }
        } else {
            quiet = 0;
        }
        if n == MAX_TERMS {
            return Err(Error::SeriesCap { terms: MAX_TERMS });
        }
        let c = cn * c1 - sn * s1;
        sn = sn * c1 + cn * s1;
        cn = c;
    }
    let u = 2.0 * PI / (l * l);
    let lam = 2.0 * PI * PI / (l * l * l);
    Ok(BoundarySums {
        eta_minus: (1.0 + 2.0 * em) / l,
        eta_plus: (1.0 + 2.0 * ep) / l,
        upsilon_minus: u * um,
        upsilon_plus: u * up,
        lambda_minus: lam * lm,
        lambda_plus: lam * lp,
        terms,
    })
}

fn theta_form(a: f64, l: f64, d: f64) -> Result<BoundarySums> {
    let omega = (-PI * PI * d / (l * l)).exp();
    let z = -PI * a / (2.0 * l);
    let m = theta3_all(z, omega)?;
    let p = theta3_all(z + 0.5 * PI, omega)?;
    let cu = -PI / (2.0 * l * l);
    let cl = -PI * PI / (4.0 * l * l * l);
    Ok(BoundarySums {
        eta_minus: m.value / l,
        eta_plus: p.value / l,
        upsilon_minus: cu * m.dz,
        upsilon_plus: cu * p.dz,
        lambda_minus: cl * m.d2z,
        lambda_plus: cl * p.d2z,
        terms: m.terms.max(p.terms),
    })
}

fn gap(q: &KernelQuery) -> Result<f64> {
    let d = q.tau - q.s;
    if !(d > 0.0) || q.s < 0.0 {
        return Err(Error::InvalidInput(format!("kernel needs 0 <= s < tau, got s={} tau={}", q.s, q.tau)));
    }
    Ok(d)
}

fn sums(q: &KernelQuery, repr: Representation, drop: Drop) -> Result<BoundarySums> {
    let d = gap(q)?;
    boundary_sums(q.y_tau - q.xi, q.l_tau, d, repr, drop)
}

fn pick(side: Side, minus: f64, plus: f64) -> f64 {
    match side {
        Side::Lower => minus,
        Side::Upper => plus,
    }
}

/// eta with the indicator subtraction applied when xi sits on the boundary
/// of its own side at time s.
pub fn eta_kernel(side: Side, q: &KernelQuery, repr: Representation) -> Result<f64> {
    let d = gap(q)?;
    let s = sums(q, repr, Drop::None)?;
    let anchor = pick(side, q.y_s, q.z_s);
    let on_boundary = (q.xi - anchor).abs() <= 1e-13 * q.l_tau.max(1.0);
    let indicator = if on_boundary { 1.0 / (PI * d).sqrt() } else { 0.0 };
    Ok(pick(side, s.eta_minus, s.eta_plus) - indicator)
}

pub fn upsilon_kernel(side: Side, q: &KernelQuery, repr: Representation) -> Result<f64> {
    let s = sums(q, repr, Drop::None)?;
    Ok(pick(side, s.upsilon_minus, s.upsilon_plus))
}

pub fn lambda_kernel(side: Side, q: &KernelQuery, repr: Representation) -> Result<f64> {
    let s = sums(q, repr, Drop::None)?;
    Ok(pick(side, s.lambda_minus, s.lambda_plus))
}

fn own_drop(side: Side) -> Drop {
    match side {
        Side::Lower => Drop::Minus,
        Side::Upper => Drop::Plus,
    }
}

/// upsilon sum without its singular n = 0 term; `q.xi` is normally y(s)
/// for the lower side and z(s) for the upper side.
pub fn upsilon0_kernel(side: Side, q: &KernelQuery, repr: Representation) -> Result<f64> {
    let s = sums(q, repr, own_drop(side))?;
    Ok(pick(side, s.upsilon_minus, s.upsilon_plus))
}

pub fn lambda0_kernel(side: Side, q: &KernelQuery, repr: Representation) -> Result<f64> {
    let s = sums(q, repr, own_drop(side))?;
    Ok(pick(side, s.lambda_minus, s.lambda_plus))
}

/// Number of series terms the given representation needs to reach `tol`.
pub fn term_count(q: &KernelQuery, repr: Representation, tol: f64) -> Result<usize> {
    let d = gap(q)?;
    if repr == Representation::Theta {
        return Err(Error::InvalidInput("term counts are reported for image and fourier forms".into()));
    }
    Ok(boundary_sums_tol(q.y_tau - q.xi, q.l_tau, d, repr, Drop::None, tol)?.terms)
}
