//! The curvilinear heat strip: boundaries, rebates, initial data, checks and
//! the reduction that moves the rebates into a source term.

pub mod curve;
pub mod profile;
pub mod reduction;

use std::fmt;

pub use curve::{CubicSpline, CurveFn, CurveKind};
pub use profile::InitialProfile;

use crate::error::{Error, Result};

/// Which boundary of the strip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Lower,
    Upper,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Lower => "lower",
            Side::Upper => "upper",
        })
    }
}

/// U_t = U_xx on y(t) < x < z(t), U = f- on x = y, U = f+ on x = z.
#[derive(Debug, Clone)]
pub struct HeatStripProblem {
    lower: CurveFn,
    upper: CurveFn,
    rebate_lower: CurveFn,
    rebate_upper: CurveFn,
    initial: InitialProfile,
    horizon: f64,
}

impl HeatStripProblem {
    pub fn new(
        lower: CurveFn,
        upper: CurveFn,
        rebate_lower: CurveFn,
        rebate_upper: CurveFn,
        initial: InitialProfile,
        horizon: f64,
    ) -> Self {
        Self { lower, upper, rebate_lower, rebate_upper, initial, horizon }
    }

    pub fn lower(&self) -> &CurveFn {
        &self.lower
    }
    pub fn upper(&self) -> &CurveFn {
        &self.upper
    }
    pub fn rebate_lower(&self) -> &CurveFn {
        &self.rebate_lower
    }
    pub fn rebate_upper(&self) -> &CurveFn {
        &self.rebate_upper
    }
    pub fn initial(&self) -> &InitialProfile {
        &self.initial
    }
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn boundary(&self, side: Side) -> &CurveFn {
        match side {
            Side::Lower => &self.lower,
            Side::Upper => &self.upper,
        }
    }

    pub fn rebate(&self, side: Side) -> &CurveFn {
        match side {
            Side::Lower => &self.rebate_lower,
            Side::Upper => &self.rebate_upper,
        }
    }

    #[inline]
    pub fn width(&self, tau: f64) -> f64 {
        self.upper.value(tau) - self.lower.value(tau)
    }

    /// Same problem on a shorter horizon.
    pub fn with_horizon(&self, horizon: f64) -> Self {
        Self { horizon, ..self.clone() }
    }

    /// Checks every requirement the solvers rely on.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let t = self.horizon;
        if !(t.is_finite() && t > 0.0) {
            violations.push(Violation::InvalidHorizon(t));
            return ValidationReport { violations };
        }
        const SAMPLES: usize = 2000;
        let curves: [(&'static str, &CurveFn); 4] = [
            ("lower boundary", &self.lower),
            ("upper boundary", &self.upper),
            ("lower rebate", &self.rebate_lower),
            ("upper rebate", &self.rebate_upper),
        ];
        'curves: for (name, c) in curves {
            for k in 0..=SAMPLES {
                let tau = t * k as f64 / SAMPLES as f64;
                if !c.value(tau).is_finite() || !c.derivative(tau).is_finite() {
                    violations.push(Violation::NonFinite { what: name, tau });
                    continue 'curves;
                }
            }
        }
        if !violations.is_empty() {
            return ValidationReport { violations };
        }
        let mut prev = 0.0;
        for k in 0..=SAMPLES {
            let tau = t * k as f64 / SAMPLES as f64;
            if self.width(tau) <= 0.0 {
                let at = if k == 0 { 0.0 } else { self.collapse_time(prev, tau) };
                violations.push(Violation::StripCollapse { tau: at });
                return ValidationReport { violations };
            }
            prev = tau;
        }
        let (y0, z0) = (self.lower.value(0.0), self.upper.value(0.0));
        for k in 0..=SAMPLES {
            let x = y0 + (z0 - y0) * k as f64 / SAMPLES as f64;
            if !self.initial.value(x).is_finite() {
                violations.push(Violation::NonFinite { what: "initial profile", tau: 0.0 });
                break;
            }
        }
        for side in [Side::Lower, Side::Upper] {
            if !self.corner_compatible(side) {
                let profile = self.initial.value(self.boundary(side).value(0.0));
                let rebate = self.rebate(side).value(0.0);
                violations.push(Violation::CornerMismatch { side, profile, rebate });
            }
        }
        ValidationReport { violations }
    }

    fn collapse_time(&self, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.width(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }

    /// Errors with the first fatal violation, if any.
    pub fn ensure_valid(&self) -> Result<()> {
        match self.validate().first_fatal() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }

    /// True when the profile meets the rebate at the given starting corner.
    pub fn corner_compatible(&self, side: Side) -> bool {
        let x = self.boundary(side).value(0.0);
        let profile = self.initial.value(x);
        let rebate = self.rebate(side).value(0.0);
        (profile - rebate).abs() <= 1e-8 * (1.0 + profile.abs().max(rebate.abs()))
    }

    /// Gauss-Legendre nodes over the starting strip, resolved at the
    /// diffusion length sqrt(tau), with panels split at the profile's kinks.
    pub fn initial_quadrature(&self, tau: f64) -> Vec<(f64, f64)> {
        let (a, b) = (self.lower.value(0.0), self.upper.value(0.0));
        let width = (2.0 * tau.max(0.0).sqrt()).min(0.25 * (b - a)).max(1e-6 * (b - a));
        crate::quad::composite_nodes(a, b, &self.initial.kinks(), width)
    }

    /// [`Self::initial_quadrature`] with the weights multiplied by U(0, x).
    pub fn initial_nodes(&self, tau: f64) -> Vec<(f64, f64)> {
        self.initial_quadrature(tau).into_iter().map(|(x, w)| (x, w * self.initial.value(x))).collect()
    }

    /// True when the profile meets the rebate at both starting corners.
    pub fn corners_compatible(&self) -> bool {
        !self.validate().violations.iter().any(|v| matches!(v, Violation::CornerMismatch { .. }))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    InvalidHorizon(f64),
    NonFinite {
        what: &'static str,
        tau: f64,
    },
    StripCollapse {
        tau: f64,
    },
    /// The profile does not match the rebate at a starting corner.
    CornerMismatch {
        side: Side,
        profile: f64,
        rebate: f64,
    },
}

impl Violation {
    pub fn is_fatal(&self) -> bool {
        !matches!(self, Violation::CornerMismatch { .. })
    }

    fn to_error(&self) -> Error {
        match self {
            Violation::StripCollapse { tau } => Error::StripCollapse { tau: *tau },
            Violation::NonFinite { what, tau } => Error::NonFinite(format!("{what} at tau={tau}")),
            other => Error::InvalidInput(other.to_string()),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::InvalidHorizon(t) => write!(f, "horizon must be positive and finite, got {t}"),
            Violation::NonFinite { what, tau } => write!(f, "{what} is not finite at tau={tau}"),
            Violation::StripCollapse { tau } => write!(f, "strip collapses at tau={tau}"),
            Violation::CornerMismatch { side, profile, rebate } => {
                write!(f, "{side} corner mismatch: initial profile {profile} vs rebate {rebate}")
            }
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        !self.violations.iter().any(Violation::is_fatal)
    }

    pub fn first_fatal(&self) -> Option<Error> {
        self.violations.iter().find(|v| v.is_fatal()).map(Violation::to_error)
    }
}

/// The problem with the rebates moved into a source: u = U - A - B x has
/// zero boundary values and solves u_t = u_xx + g.
#[derive(Debug, Clone)]
pub struct Homogenized {
    problem: HeatStripProblem,
}

pub fn homogenize(problem: &HeatStripProblem) -> Result<Homogenized> {
    problem.ensure_valid()?;
    Ok(Homogenized { problem: problem.clone() })
}

impl Homogenized {
    pub fn problem(&self) -> &HeatStripProblem {
        &self.problem
    }

    /// A(t) = (f- z - f+ y) / (z - y)
    pub fn a(&self, tau: f64) -> f64 {
        let p = &self.problem;
        let (y, z) = (p.lower.value(tau), p.upper.value(tau));
        (p.rebate_lower.value(tau) * z - p.rebate_upper.value(tau) * y) / (z - y)
    }

    /// B(t) = (f+ - f-) / (z - y)
    pub fn b(&self, tau: f64) -> f64 {
        let p = &self.problem;
        (p.rebate_upper.value(tau) - p.rebate_lower.value(tau)) / p.width(tau)
    }

    pub fn a_dot(&self, tau: f64) -> f64 {
        let p = &self.problem;
        let (y, z) = (p.lower.value(tau), p.upper.value(tau));
        let (dy, dz) = (p.lower.derivative(tau), p.upper.derivative(tau));
        let (fm, fp) = (p.rebate_lower.value(tau), p.rebate_upper.value(tau));
        let (dfm, dfp) = (p.rebate_lower.derivative(tau), p.rebate_upper.derivative(tau));
        let l = z - y;
        let num = fm * z - fp * y;
        let dnum = dfm * z + fm * dz - dfp * y - fp * dy;
        (dnum * l - num * (dz - dy)) / (l * l)
    }

    pub fn b_dot(&self, tau: f64) -> f64 {
        let p = &self.problem;
        let l = p.width(tau);
        let dl = p.upper.derivative(tau) - p.lower.derivative(tau);
        let df = p.rebate_upper.value(tau) - p.rebate_lower.value(tau);
        let ddf = p.rebate_upper.derivative(tau) - p.rebate_lower.derivative(tau);
        (ddf * l - df * dl) / (l * l)
    }

    /// g(t, x) = -A'(t) - B'(t) x
    pub fn source(&self, tau: f64, x: f64) -> f64 {
        -self.a_dot(tau) - self.b_dot(tau) * x
    }

    /// u(0, x)
    pub fn initial(&self, x: f64) -> f64 {
        self.problem.initial.value(x) - self.a(0.0) - self.b(0.0) * x
    }

    pub fn shift_curve(&self) -> CurveFn {
        let (h, d) = (self.clone(), self.clone());
        CurveFn::custom(move |t| h.a(t), move |t| d.a_dot(t))
    }

    pub fn slope_curve(&self) -> CurveFn {
        let (h, d) = (self.clone(), self.clone());
        CurveFn::custom(move |t| h.b(t), move |t| d.b_dot(t))
    }
}

/// Closed-form solutions recognised from the problem data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExactSolution {
    /// amplitude * sin(frequency x + phase) * exp(-frequency^2 t)
    Eigenfunction { amplitude: f64, frequency: f64, phase: f64 },
    /// amplitude * exp(rate x + rate^2 t)
    Exponential { amplitude: f64, rate: f64 },
    /// a + b x
    Affine { a: f64, b: f64 },
}

impl ExactSolution {
    /// Recognises a closed-form solution, if the problem admits one of the
    /// supported forms.
    pub fn detect(problem: &HeatStripProblem) -> Option<Self> {
        let candidate = match *problem.initial() {
            InitialProfile::Sine { amplitude, frequency, phase } => Self::Eigenfunction { amplitude, frequency, phase },
            InitialProfile::Exponential { amplitude, rate } => Self::Exponential { amplitude, rate },
            InitialProfile::Affine { a, b } => Self::Affine { a, b },
            InitialProfile::Constant(c) => Self::Affine { a: c, b: 0.0 },
            _ => return None,
        };
        let t = problem.horizon();
        let scale = 1.0 + candidate.value(0.0, problem.lower().value(0.0)).abs();
        for k in 0..=64 {
            let tau = t * k as f64 / 64.0;
            for side in [Side::Lower, Side::Upper] {
                let x = problem.boundary(side).value(tau);
                let want = candidate.value(tau, x);
                let got = problem.rebate(side).value(tau);
                if (want - got).abs() > 1e-12 * (scale + want.abs()) {
                    return None;
                }
            }
        }
        Some(candidate)
    }

    pub fn value(&self, tau: f64, x: f64) -> f64 {
        match *self {
            Self::Eigenfunction { amplitude, frequency, phase } => {
                amplitude * (frequency * x + phase).sin() * (-frequency * frequency * tau).exp()
            }
            Self::Exponential { amplitude, rate } => amplitude * (rate * x + rate * rate * tau).exp(),
            Self::Affine { a, b } => a + b * x,
        }
    }

    pub fn dx(&self, tau: f64, x: f64) -> f64 {
        match *self {
            Self::Eigenfunction { amplitude, frequency, phase } => {
                amplitude * frequency * (frequency * x + phase).cos() * (-frequency * frequency * tau).exp()
            }
            Self::Exponential { amplitude, rate } => amplitude * rate * (rate * x + rate * rate * tau).exp(),
            Self::Affine { b, .. } => b,
        }
    }

    pub fn dxx(&self, tau: f64, x: f64) -> f64 {
        match *self {
            Self::Eigenfunction { frequency, .. } => -frequency * frequency * self.value(tau, x),
            Self::Exponential { rate, .. } => rate * rate * self.value(tau, x),
            Self::Affine { .. } => 0.0,
        }
    }

    /// (Psi, Phi) = (-U_x at the lower boundary, U_x at the upper boundary).
    pub fn gradients(&self, problem: &HeatStripProblem, tau: f64) -> (f64, f64) {
        (-self.dx(tau, problem.lower().value(tau)), self.dx(tau, problem.upper().value(tau)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn eigen() -> HeatStripProblem {
        HeatStripProblem::new(
            CurveFn::constant(0.0),
            CurveFn::constant(1.0),
            CurveFn::constant(0.0),
            CurveFn::constant(0.0),
            InitialProfile::Sine { amplitude: 1.0, frequency: PI, phase: 0.0 },
            0.5,
        )
    }

    #[test]
    fn collapse_is_located() {
        let p = HeatStripProblem::new(
            CurveFn::linear(0.0, 1.0),
            CurveFn::linear(1.0, -1.0),
            CurveFn::constant(0.0),
            CurveFn::constant(0.0),
            InitialProfile::Constant(0.0),
            1.0,
        );
        let r = p.validate();
        assert!(!r.is_valid());
        match r.violations[0] {
            Violation::StripCollapse { tau } => assert!((tau - 0.5).abs() < 1e-12),
            ref v => panic!("unexpected {v:?}"),
        }
        assert!(matches!(homogenize(&p), Err(Error::StripCollapse { .. })));
        assert!(r.violations[0].to_string().contains("collapses"));
    }

    #[test]
    fn corner_mismatch_is_only_a_warning() {
        let p = HeatStripProblem::new(
            CurveFn::constant(0.0),
            CurveFn::constant(1.0),
            CurveFn::constant(0.0),
            CurveFn::constant(0.0),
            InitialProfile::Constant(1.0),
            1.0,
        );
        let r = p.validate();
        assert!(r.is_valid());
        assert_eq!(r.violations.len(), 2);
        assert!(!p.corners_compatible());
    }

    #[test]
    fn homogenized_data_vanishes_on_the_boundary() {
        let p = HeatStripProblem::new(
            CurveFn::linear(0.1, 0.3),
            CurveFn::sinusoid(1.2, 0.1, 3.0, 0.0),
            CurveFn::exponential(0.4, 0.5),
            CurveFn::linear(-0.2, 0.7),
            InitialProfile::Constant(0.0),
            1.0,
        );
        let h = homogenize(&p).unwrap();
        for tau in [0.0, 0.4, 1.0] {
            let (y, z) = (p.lower().value(tau), p.upper().value(tau));
            assert!((h.a(tau) + h.b(tau) * y - p.rebate_lower().value(tau)).abs() < 1e-14);
            assert!((h.a(tau) + h.b(tau) * z - p.rebate_upper().value(tau)).abs() < 1e-14);
            let e = 1e-6;
            let da = (h.a(tau + e) - h.a(tau - e)) / (2.0 * e);
            let db = (h.b(tau + e) - h.b(tau - e)) / (2.0 * e);
            assert!((da - h.a_dot(tau)).abs() < 1e-8);
            assert!((db - h.b_dot(tau)).abs() < 1e-8);
        }
    }

    #[test]
    fn exact_solutions_are_detected() {
        assert!(matches!(ExactSolution::detect(&eigen()), Some(ExactSolution::Eigenfunction { .. })));
        let m = HeatStripProblem::new(
            CurveFn::linear(0.0, 0.1),
            CurveFn::linear(1.0, 0.2),
            CurveFn::exponential(1.0, 1.1),
            CurveFn::exponential((1.0f64).exp(), 1.2),
            InitialProfile::Exponential { amplitude: 1.0, rate: 1.0 },
            0.5,
        );
        assert!(matches!(ExactSolution::detect(&m), Some(ExactSolution::Exponential { .. })));
        let off = m.with_horizon(0.5);
        let bad = HeatStripProblem::new(
            off.lower().clone(),
            off.upper().clone(),
            CurveFn::constant(0.0),
            off.rebate_upper().clone(),
            off.initial().clone(),
            0.5,
        );
        assert!(ExactSolution::detect(&bad).is_none());
    }
}
