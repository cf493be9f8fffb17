//! Both sides of the two Poisson summation identities
//!
//! sum_n e^{-pi^2 n^2 / 2b} cos(pi n a)
//!     = 2 sqrt(b / 2 pi) sum_n e^{-b (2n + a)^2 / 2}
//! sum_n pi n e^{-pi^2 n^2 / 2b} sin(pi n a)
//!     = 2 b^{3/2} / sqrt(2 pi) sum_n (2n + a) e^{-b (2n + a)^2 / 2}
//!
//! with all sums over the integers.

use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonPair {
    pub cos_lhs: f64,
    pub cos_rhs: f64,
    pub sin_lhs: f64,
    pub sin_rhs: f64,
}

const TOL: f64 = 1e-17;

pub fn poisson_pair(alpha: f64, beta: f64) -> Result<PoissonPair> {
    if !(beta > 0.0) || !beta.is_finite() || !alpha.is_finite() {
        return Err(Error::InvalidInput(format!(
            "poisson sums need beta > 0 and finite alpha, got alpha={alpha} beta={beta}"
        )));
    }
    // Left sides, paired n and -n.
    let mut cos_lhs = 1.0;
    let mut sin_lhs = 0.0;
    let mut n = 1.0f64;
    loop {
        let w = (-PI * PI * n * n / (2.0 * beta)).exp();
        cos_lhs += 2.0 * w * (PI * n * alpha).cos();
        sin_lhs += 2.0 * PI * n * w * (PI * n * alpha).sin();
        if PI * n * w < TOL {
            break;
        }
        n += 1.0;
    }
    // Right sides, outward from the centre.
    let centre = (-alpha / 2.0).round();
    let mut cos_sum = 0.0;
    let mut sin_sum = 0.0;
    for dir in [1.0f64, -1.0] {
        let mut k = if dir > 0.0 { centre } else { centre - 1.0 };
        loop {
            let r = 2.0 * k + alpha;
            let e = (-beta * r * r / 2.0).exp();
            cos_sum += e;
            sin_sum += r * e;
            if (1.0 + r.abs()) * e < TOL && (k - centre).abs() > 1.0 {
                break;
            }
            k += dir;
        }
    }
    Ok(PoissonPair {
        cos_lhs,
        cos_rhs: 2.0 * (beta / (2.0 * PI)).sqrt() * cos_sum,
        sin_lhs,
        sin_rhs: 2.0 * beta.powf(1.5) / (2.0 * PI).sqrt() * sin_sum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identities_hold() {
        for (a, b) in [(0.7, 2.0), (0.0, 0.3), (1.3, 7.0), (1.0, 50.0)] {
            let p = poisson_pair(a, b).unwrap();
            assert!((p.cos_lhs - p.cos_rhs).abs() < 1e-12, "{a} {b} {p:?}");
            assert!((p.sin_lhs - p.sin_rhs).abs() < 1e-11, "{a} {b} {p:?}");
        }
    }

    #[test]
    fn zero_alpha_sine_vanishes() {
        let p = poisson_pair(0.0, 2.0).unwrap();
        assert_eq!(p.sin_lhs, 0.0);
        assert!(p.sin_rhs.abs() < 1e-15);
    }

    #[test]
    fn rejects_nonpositive_beta() {
        assert!(poisson_pair(0.5, 0.0).is_err());
    }
}
