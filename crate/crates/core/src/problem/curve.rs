//! Scalar functions of heat time used for boundaries and rebates.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    Constant,
    Linear,
    Exponential,
    Sinusoid,
    TabulatedSpline,
    Custom,
}

impl CurveKind {
    pub fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "constant" => CurveKind::Constant,
            "linear" => CurveKind::Linear,
            "exponential" => CurveKind::Exponential,
            "sinusoid" => CurveKind::Sinusoid,
            "spline" | "tabulated" | "tabulated_spline" => CurveKind::TabulatedSpline,
            _ => return None,
        })
    }
}

/// A curve with an analytic (or spline) derivative.
#[derive(Clone)]
pub struct CurveFn {
    repr: Repr,
}

#[derive(Clone)]
enum Repr {
    Constant(f64),
    /// a + b t
    Linear(f64, f64),
    /// a e^{b t} + c
    Exponential(f64, f64, f64),
    /// a + b sin(w t + phi)
    Sinusoid(f64, f64, f64, f64),
    Spline(CubicSpline),
    Custom(ScalarFn, ScalarFn),
}

impl fmt::Debug for CurveFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Constant(c) => write!(f, "Constant({c})"),
            Repr::Linear(a, b) => write!(f, "Linear({a} + {b} t)"),
            Repr::Exponential(a, b, c) => write!(f, "Exponential({a} e^({b} t) + {c})"),
            Repr::Sinusoid(a, b, w, p) => write!(f, "Sinusoid({a} + {b} sin({w} t + {p}))"),
            Repr::Spline(s) => write!(f, "Spline({} knots)", s.x.len()),
            Repr::Custom(..) => write!(f, "Custom"),
        }
    }
}

impl CurveFn {
    pub fn constant(c: f64) -> Self {
        Self { repr: Repr::Constant(c) }
    }

    pub fn linear(a: f64, b: f64) -> Self {
        Self { repr: Repr::Linear(a, b) }
    }

    /// `a * exp(b t)`
    pub fn exponential(a: f64, b: f64) -> Self {
        Self { repr: Repr::Exponential(a, b, 0.0) }
    }

    /// `a * exp(b t) + c`
    pub fn exponential_shifted(a: f64, b: f64, c: f64) -> Self {
        Self { repr: Repr::Exponential(a, b, c) }
    }

    /// `a + b sin(omega t + phase)`
    pub fn sinusoid(a: f64, b: f64, omega: f64, phase: f64) -> Self {
        Self { repr: Repr::Sinusoid(a, b, omega, phase) }
    }

    /// Natural cubic spline through the given knots.
    pub fn spline(knots: &[f64], values: &[f64]) -> Result<Self> {
        Ok(Self { repr: Repr::Spline(CubicSpline::new(knots, values)?) })
    }

    pub fn custom<F, D>(value: F, derivative: D) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self { repr: Repr::Custom(Arc::new(value), Arc::new(derivative)) }
    }

    /// Builds a curve from a kind name and its flat parameter list.
    ///
    /// Parameter layouts: constant `[c]`, linear `[a, b]`, exponential
    /// `[a, b]` or `[a, b, c]`, sinusoid `[a, b, omega, phase]`, spline
    /// `[t0, v0, t1, v1, ...]`.
    pub fn from_params(kind: CurveKind, p: &[f64]) -> Result<Self> {
        let need = |n: usize| -> Result<()> {
            if p.len() == n {
                Ok(())
            } else {
                Err(Error::InvalidInput(format!("{kind:?} curve takes {n} parameters, got {}", p.len())))
            }
        };
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("curve parameters must be finite".into()));
        }
        match kind {
            CurveKind::Constant => {
                need(1)?;
                Ok(Self::constant(p[0]))
            }
            CurveKind::Linear => {
                need(2)?;
                Ok(Self::linear(p[0], p[1]))
            }
            CurveKind::Exponential => {
                if p.len() == 2 {
                    Ok(Self::exponential(p[0], p[1]))
                } else {
                    need(3)?;
                    Ok(Self::exponential_shifted(p[0], p[1], p[2]))
                }
            }
            CurveKind::Sinusoid => {
                need(4)?;
                Ok(Self::sinusoid(p[0], p[1], p[2], p[3]))
            }
            CurveKind::TabulatedSpline => {
                if !p.len().is_multiple_of(2) {
                    return Err(Error::InvalidInput("spline parameters are (t, value) pairs".into()));
                }
                let t: Vec<f64> = p.iter().step_by(2).copied().collect();
                let v: Vec<f64> = p.iter().skip(1).step_by(2).copied().collect();
                Self::spline(&t, &v)
            }
            CurveKind::Custom => Err(Error::InvalidInput("custom curves cannot be built from parameters".into())),
        }
    }

    pub fn kind(&self) -> CurveKind {
        match self.repr {
            Repr::Constant(_) => CurveKind::Constant,
            Repr::Linear(..) => CurveKind::Linear,
            Repr::Exponential(..) => CurveKind::Exponential,
            Repr::Sinusoid(..) => CurveKind::Sinusoid,
            Repr::Spline(_) => CurveKind::TabulatedSpline,
            Repr::Custom(..) => CurveKind::Custom,
        }
    }

    /// Value at `t`; NaN outside a spline's knot range.
    #[inline]
    pub fn value(&self, t: f64) -> f64 {
        match &self.repr {
            Repr::Constant(c) => *c,
            Repr::Linear(a, b) => a + b * t,
            Repr::Exponential(a, b, c) => a * (b * t).exp() + c,
            Repr::Sinusoid(a, b, w, p) => a + b * (w * t + p).sin(),
            Repr::Spline(s) => s.value(t),
            Repr::Custom(f, _) => f(t),
        }
    }

    #[inline]
    pub fn derivative(&self, t: f64) -> f64 {
        match &self.repr {
            Repr::Constant(_) => 0.0,
            Repr::Linear(_, b) => *b,
            Repr::Exponential(a, b, _) => a * b * (b * t).exp(),
            Repr::Sinusoid(_, b, w, p) => b * w * (w * t + p).cos(),
            Repr::Spline(s) => s.derivative(t),
            Repr::Custom(_, d) => d(t),
        }
    }

    /// value(t) - value(t - d), accurate for small d where the plain
    /// difference loses its relative precision.
    pub fn rise(&self, t: f64, d: f64) -> f64 {
        match &self.repr {
            Repr::Constant(_) => 0.0,
            Repr::Linear(_, b) => b * d,
            Repr::Exponential(a, b, _) => -a * (b * t).exp() * (-b * d).exp_m1(),
            _ if d <= 1e-2 => crate::quad::gl8().integrate(t - d, t, |s| self.derivative(s)),
            _ => self.value(t) - self.value(t - d),
        }
    }

    pub fn try_value(&self, t: f64) -> Result<f64> {
        let v = self.value(t);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite(format!("curve value at t={t}")))
        }
    }

    /// Time span over which the curve is defined.
    pub fn domain(&self) -> (f64, f64) {
        match &self.repr {
            Repr::Spline(s) => (s.x[0], s.x[s.x.len() - 1]),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.repr, Repr::Constant(_))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Constant(c) if c == 0.0)
    }
}

/// Natural cubic spline.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn new(x: &[f64], y: &[f64]) -> Result<Self> {
        let n = x.len();
        if n < 2 || y.len() != n {
            return Err(Error::InvalidInput("spline needs at least two knots and matching values".into()));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("spline knots must increase".into()));
        }
        if x.iter().chain(y).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("spline data must be finite".into()));
        }
        let mut m = vec![0.0; n];
        if n > 2 {
            // Thomas solve for interior second derivatives.
            let k = n - 2;
            let mut diag = vec![0.0; k];
            let mut rhs = vec![0.0; k];
            let mut upper = vec![0.0; k];
            for i in 0..k {
                let h0 = x[i + 1] - x[i];
                let h1 = x[i + 2] - x[i + 1];
                diag[i] = 2.0 * (h0 + h1);
                upper[i] = h1;
                rhs[i] = 6.0 * ((y[i + 2] - y[i + 1]) / h1 - (y[i + 1] - y[i]) / h0);
            }
            for i in 1..k {
                let lower = x[i + 1] - x[i];
                let w = lower / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            m[k] = rhs[k - 1] / diag[k - 1];
            for i in (0..k - 1).rev() {
                m[i + 1] = (rhs[i] - upper[i] * m[i + 2]) / diag[i];
            }
        }
        Ok(Self { x: x.to_vec(), y: y.to_vec(), m })
    }

    fn locate(&self, t: f64) -> Option<usize> {
        let n = self.x.len();
        let span = self.x[n - 1] - self.x[0];
        let slack = 1e-12 * span.max(1.0);
        if !(t >= self.x[0] - slack && t <= self.x[n - 1] + slack) {
            return None;
        }
        let i = self.x.partition_point(|&k| k <= t);
        Some(i.clamp(1, n - 1) - 1)
    }

    pub fn value(&self, t: f64) -> f64 {
        let Some(i) = self.locate(t) else { return f64::NAN };
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let Some(i) = self.locate(t) else { return f64::NAN };
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        (self.y[i + 1] - self.y[i]) / h
            + ((1.0 - 3.0 * a * a) * self.m[i] + (3.0 * b * b - 1.0) * self.m[i + 1]) * h / 6.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_derivatives_match_differences() {
        let curves = [
            CurveFn::linear(0.2, -0.3),
            CurveFn::exponential_shifted(0.5, 1.3, 0.1),
            CurveFn::sinusoid(0.1, 0.05, 4.0, 0.3),
        ];
        for c in &curves {
            for t in [0.0, 0.3, 0.9] {
                let h = 1e-6;
                let fd = (c.value(t + h) - c.value(t - h)) / (2.0 * h);
                assert!((fd - c.derivative(t)).abs() < 1e-8, "{c:?} at {t}");
            }
        }
    }

    #[test]
    fn spline_reproduces_lines_and_rejects_outside() {
        let s = CurveFn::spline(&[0.0, 0.5, 1.0, 2.0], &[1.0, 2.0, 3.0, 5.0]).unwrap();
        assert!((s.value(0.75) - 2.5).abs() < 1e-14);
        assert!((s.derivative(1.5) - 2.0).abs() < 1e-13);
        assert!(s.value(2.5).is_nan());
        assert!(matches!(s.try_value(-1.0), Err(Error::NonFinite(_))));
    }

    #[test]
    fn spline_interpolates_knots() {
        let t = [0.0, 0.1, 0.4, 0.7, 1.0];
        let v = [0.0, 0.3, -0.2, 0.5, 0.1];
        let s = CurveFn::spline(&t, &v).unwrap();
        for (a, b) in t.iter().zip(v) {
            assert!((s.value(*a) - b).abs() < 1e-14);
        }
    }

    #[test]
    fn parameter_arity_is_checked() {
        assert!(CurveFn::from_params(CurveKind::Linear, &[1.0]).is_err());
        assert!(CurveFn::from_params(CurveKind::Sinusoid, &[1.0, 2.0, 3.0, 4.0]).is_ok());
        assert!(CurveFn::from_params(CurveKind::Constant, &[f64::NAN]).is_err());
    }
}
