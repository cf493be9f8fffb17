//! Jacobi theta-3 and its first two z-derivatives.
//!
//! theta3(z, w) = 1 + 2 sum_{n>=1} w^{n^2} cos(2 n z)

use crate::error::{Error, Result};

pub const MAX_TERMS: usize = 10_000;
const EPS: f64 = 1e-16;

/// theta3 and its z-derivatives at one point, with the number of series
/// terms used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaValues {
    pub value: f64,
    pub dz: f64,
    pub d2z: f64,
    pub terms: usize,
}

fn check_nome(omega: f64) -> Result<()> {
    if (0.0..1.0).contains(&omega) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("theta nome must lie in [0, 1), got {omega}")))
    }
}

/// All three series in one pass.
pub fn theta3_all(z: f64, omega: f64) -> Result<ThetaValues> {
    check_nome(omega)?;
    let mut out = ThetaValues { value: 1.0, dz: 0.0, d2z: 0.0, terms: 0 };
    if omega == 0.0 {
        return Ok(out);
    }
    let (s1, c1) = (2.0 * z).sin_cos();
    let (mut s, mut c) = (s1, c1);
    let w2 = omega * omega;
    // w^{n^2} and w^{2n+1}
    let mut pw = omega;
    let mut step = omega * w2;
    let mut quiet = 0;
    for n in 1..=MAX_TERMS {
        let nf = n as f64;
        out.value += 2.0 * pw * c;
        out.dz -= 4.0 * nf * pw * s;
        out.d2z -= 8.0 * nf * nf * pw * c;
        out.terms = n;
        let next = pw * step;
        let m = nf + 1.0;
        let bound = 2.0 * m * (2.0 * m).max(1.0) * next;
        let scale = out.value.abs().max(out.dz.abs()).max(out.d2z.abs()) + 1.0;
        if bound < EPS * scale {
            quiet += 1;
            if quiet >= 2 {
                return Ok(out);
            }
        } else {
            quiet = 0;
        }
        pw = next;
        step *= w2;
        let cn = c * c1 - s * s1;
        s = s * c1 + c * s1;
        c = cn;
    }
    Err(Error::SeriesCap { terms: MAX_TERMS })
}

pub fn theta3(z: f64, omega: f64) -> Result<f64> {
    theta3_all(z, omega).map(|t| t.value)
}

/// theta3' = -4 sum n w^{n^2} sin(2 n z)
pub fn theta3_dz(z: f64, omega: f64) -> Result<f64> {
    theta3_all(z, omega).map(|t| t.dz)
}

/// theta3'' = -8 sum n^2 w^{n^2} cos(2 n z)
pub fn theta3_d2z(z: f64, omega: f64) -> Result<f64> {
    theta3_all(z, omega).map(|t| t.d2z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn trivial_values() {
        assert_eq!(theta3(0.7, 0.0).unwrap(), 1.0);
        assert_eq!(theta3_dz(0.0, 0.6).unwrap(), 0.0);
        // 1 + 2 (0.1 + 0.1^4 + 0.1^9 + 0.1^16)
        let v = theta3(0.0, 0.1).unwrap();
        assert!((v - 1.200_200_002).abs() < 1e-15, "{v}");
    }

    #[test]
    fn nome_out_of_range() {
        assert!(theta3(0.1, 1.0).is_err());
        assert!(theta3(0.1, -0.1).is_err());
    }

    #[test]
    fn derivatives_match_differences() {
        let (z, w) = (0.37, 0.45);
        let h = 1e-5;
        let d = (theta3(z + h, w).unwrap() - theta3(z - h, w).unwrap()) / (2.0 * h);
        assert!((d - theta3_dz(z, w).unwrap()).abs() < 1e-8);
        let d2 = (theta3_dz(z + h, w).unwrap() - theta3_dz(z - h, w).unwrap()) / (2.0 * h);
        assert!((d2 - theta3_d2z(z, w).unwrap()).abs() < 1e-7);
    }

    #[test]
    fn solves_the_heat_equation_in_nome_time() {
        // theta3(z, e^{-pi^2 t}) satisfies theta_t = (pi^2 / 4) theta_zz
        let (z, t, h) = (0.4, 0.3, 1e-4);
        let f = |t: f64| theta3(z, (-PI * PI * t).exp()).unwrap();
        let dt = (f(t + h) - f(t - h)) / (2.0 * h);
        let zz = theta3_d2z(z, (-PI * PI * t).exp()).unwrap();
        let rhs = PI * PI / 4.0 * zz;
        assert!(((dt - rhs) / rhs).abs() < 1e-6, "{dt} vs {rhs}");
    }

    #[test]
    fn near_unit_nome_converges() {
        let t = theta3_all(0.2, (-1e-6f64).exp()).unwrap();
        assert!(t.terms > 1000 && t.terms < MAX_TERMS);
        // Jacobi transform: theta3(0, e^{-pi^2 t}) ~ 1/sqrt(pi t)
        let v = theta3(0.0, (-PI * PI * 1e-4f64).exp()).unwrap();
        assert!((v - 1.0 / (PI * 1e-4f64).sqrt()).abs() < 1e-9);
    }
}
