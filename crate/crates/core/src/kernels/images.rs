//! The Gaussian image terms of the strip Green's function and their sums.
//!
//! With g(r) = exp(-r^2 / 4d) / (2 sqrt(pi d)), d = tau - s:
//!
//! Y_n(x | xi) = g(2 n l + x - xi) - g(2 n l + x + xi - 2 y)
//! L_n(x | xi) = d/dxi Y_n(x | xi)
//!
//! with l = l(tau) and y = y(tau).

use std::f64::consts::PI;

use super::KernelQuery;
use crate::error::{Error, Result};

const MAX_IMAGES: i64 = 10_000;

fn check(q: &KernelQuery) -> Result<f64> {
    let d = q.tau - q.s;
    if !(d > 0.0) {
        return Err(Error::InvalidInput(format!("source time s={} must precede tau={}", q.s, q.tau)));
    }
    if !(q.l_tau > 0.0) {
        return Err(Error::StripCollapse { tau: q.tau });
    }
    Ok(d)
}

/// Single image term Y_n.
pub fn upsilon_image(n: i64, q: &KernelQuery) -> Result<f64> {
    let d = check(q)?;
    let a = 2.0 * n as f64 * q.l_tau + q.x - q.xi;
    let b = 2.0 * n as f64 * q.l_tau + q.x + q.xi - 2.0 * q.y_tau;
    let c = 1.0 / (2.0 * (PI * d).sqrt());
    Ok(c * ((-a * a / (4.0 * d)).exp() - (-b * b / (4.0 * d)).exp()))
}

/// Single image term L_n.
pub fn lambda_image(n: i64, q: &KernelQuery) -> Result<f64> {
    let d = check(q)?;
    let a = 2.0 * n as f64 * q.l_tau + q.x - q.xi;
    let b = 2.0 * n as f64 * q.l_tau + q.x + q.xi - 2.0 * q.y_tau;
    let c = 1.0 / (4.0 * (PI * d * d * d).sqrt());
    Ok(c * (a * (-a * a / (4.0 * d)).exp() + b * (-b * b / (4.0 * d)).exp()))
}

/// Sums over n of Y_n and L_n together with their first two x-derivatives.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ImageSums {
    /// [sum Y, d/dx sum Y, d2/dx2 sum Y]
    pub upsilon: [f64; 3],
    /// [sum L, d/dx sum L, d2/dx2 sum L]
    pub lambda: [f64; 3],
    pub terms: usize,
}

/// Gaussian g and its r-derivatives up to the third, scaled by 2 sqrt(pi d).
#[inline]
fn gauss(r: f64, inv4d: f64, inv2d: f64, derivs: usize) -> [f64; 4] {
    let e = (-r * r * inv4d).exp();
    let g1 = -r * inv2d * e;
    if derivs == 0 {
        return [e, g1, 0.0, 0.0];
    }
    let r2 = r * r * inv2d;
    let g2 = (r2 - 1.0) * inv2d * e;
    let g3 = (3.0 - r2) * r * inv2d * inv2d * e;
    [e, g1, g2, g3]
}

/// Image sums at field point x for source point xi. With `derivs == 0` only
/// the values are computed.
pub fn image_sums(x: f64, xi: f64, y: f64, l: f64, d: f64, derivs: usize) -> Result<ImageSums> {
    let inv4d = 0.25 / d;
    let inv2d = 0.5 / d;
    let c = 1.0 / (2.0 * (PI * d).sqrt());
    let mut out = ImageSums::default();
    let a0 = x - xi;
    let b0 = x + xi - 2.0 * y;
    let reach = 3.0 * d.sqrt() + a0.abs().max(b0.abs());
    let add = |n: i64, out: &mut ImageSums| -> f64 {
        let shift = 2.0 * n as f64 * l;
        let ga = gauss(shift + a0, inv4d, inv2d, derivs);
        let gb = gauss(shift + b0, inv4d, inv2d, derivs);
        out.upsilon[0] += ga[0] - gb[0];
        out.lambda[0] += -ga[1] - gb[1];
        if derivs > 0 {
            out.upsilon[1] += ga[1] - gb[1];
            out.upsilon[2] += ga[2] - gb[2];
            out.lambda[1] += -ga[2] - gb[2];
            out.lambda[2] += -ga[3] - gb[3];
        }
        out.terms += 1;
        ga.iter().chain(&gb).fold(0.0f64, |acc, v| acc.max(v.abs()))
    };
    let mut peak = add(0, &mut out);
    for dir in [1i64, -1] {
        let mut n = dir;
        loop {
            let m = add(n, &mut out);
            peak = peak.max(m);
            let far = 2.0 * (n.abs() as f64) * l > reach;
            if far && m <= 1e-17 * peak {
                break;
            }
            n += dir;
            if n.abs() > MAX_IMAGES {
                return Err(Error::SeriesCap { terms: MAX_IMAGES as usize });
            }
        }
    }
    for v in out.upsilon.iter_mut().chain(out.lambda.iter_mut()) {
        *v *= c;
    }
    Ok(out)
}
