//! Initial data U(0, x) on the starting strip.

use std::fmt;
use std::sync::Arc;

use super::curve::CubicSpline;
use crate::error::{Error, Result};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum InitialProfile {
    Constant(f64),
    /// a + b x
    Affine {
        a: f64,
        b: f64,
    },
    /// amplitude * sin(frequency x + phase)
    Sine {
        amplitude: f64,
        frequency: f64,
        phase: f64,
    },
    /// amplitude * exp(rate x)
    Exponential {
        amplitude: f64,
        rate: f64,
    },
    /// (x - strike)+
    Call {
        strike: f64,
    },
    /// (strike - x)+
    Put {
        strike: f64,
    },
    /// (e^x - strike)+
    ExpCall {
        strike: f64,
    },
    /// (strike - e^x)+
    ExpPut {
        strike: f64,
    },
    Tabulated(CubicSpline),
    Custom {
        value: ScalarFn,
        derivative: ScalarFn,
        kinks: Vec<f64>,
    },
}

impl fmt::Debug for InitialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(c) => write!(f, "Constant({c})"),
            Self::Affine { a, b } => write!(f, "Affine({a} + {b} x)"),
            Self::Sine { amplitude, frequency, phase } => {
                write!(f, "Sine({amplitude} sin({frequency} x + {phase}))")
            }
            Self::Exponential { amplitude, rate } => write!(f, "Exponential({amplitude} e^({rate} x))"),
            Self::Call { strike } => write!(f, "Call({strike})"),
            Self::Put { strike } => write!(f, "Put({strike})"),
            Self::ExpCall { strike } => write!(f, "ExpCall({strike})"),
            Self::ExpPut { strike } => write!(f, "ExpPut({strike})"),
            Self::Tabulated(_) => write!(f, "Tabulated"),
            Self::Custom { kinks, .. } => write!(f, "Custom(kinks={kinks:?})"),
        }
    }
}

impl InitialProfile {
    pub fn custom<F, D>(value: F, derivative: D, kinks: Vec<f64>) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::Custom { value: Arc::new(value), derivative: Arc::new(derivative), kinks }
    }

    pub fn tabulated(x: &[f64], values: &[f64]) -> Result<Self> {
        Ok(Self::Tabulated(CubicSpline::new(x, values)?))
    }

    /// Builds a profile from a kind name and flat parameters.
    ///
    /// constant `[c]`, affine `[a, b]`, sine `[amplitude, frequency, phase]`,
    /// exponential `[amplitude, rate]`, call/put/exp_call/exp_put `[strike]`,
    /// tabulated `[x0, v0, x1, v1, ...]`.
    pub fn from_params(kind: &str, p: &[f64]) -> Result<Self> {
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("profile parameters must be finite".into()));
        }
        let need = |n: usize| -> Result<()> {
            if p.len() == n {
                Ok(())
            } else {
                Err(Error::InvalidInput(format!("{kind} profile takes {n} parameters, got {}", p.len())))
            }
        };
        Ok(match kind {
            "constant" => {
                need(1)?;
                Self::Constant(p[0])
            }
            "affine" => {
                need(2)?;
                Self::Affine { a: p[0], b: p[1] }
            }
            "sine" => {
                need(3)?;
                Self::Sine { amplitude: p[0], frequency: p[1], phase: p[2] }
            }
            "exponential" => {
                need(2)?;
                Self::Exponential { amplitude: p[0], rate: p[1] }
            }
            "call" => {
                need(1)?;
                Self::Call { strike: p[0] }
            }
            "put" => {
                need(1)?;
                Self::Put { strike: p[0] }
            }
            "exp_call" => {
                need(1)?;
                Self::ExpCall { strike: p[0] }
            }
            "exp_put" => {
                need(1)?;
                Self::ExpPut { strike: p[0] }
            }
            "tabulated" => {
                if !p.len().is_multiple_of(2) {
                    return Err(Error::InvalidInput("tabulated profile takes (x, value) pairs".into()));
                }
                let x: Vec<f64> = p.iter().step_by(2).copied().collect();
                let v: Vec<f64> = p.iter().skip(1).step_by(2).copied().collect();
                Self::tabulated(&x, &v)?
            }
            other => return Err(Error::InvalidInput(format!("unknown profile kind `{other}`"))),
        })
    }

    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        match self {
            Self::Constant(c) => *c,
            Self::Affine { a, b } => a + b * x,
            Self::Sine { amplitude, frequency, phase } => amplitude * (frequency * x + phase).sin(),
            Self::Exponential { amplitude, rate } => amplitude * (rate * x).exp(),
            Self::Call { strike } => (x - strike).max(0.0),
            Self::Put { strike } => (strike - x).max(0.0),
            Self::ExpCall { strike } => (x.exp() - strike).max(0.0),
            Self::ExpPut { strike } => (strike - x.exp()).max(0.0),
            Self::Tabulated(s) => s.value(x),
            Self::Custom { value, .. } => value(x),
        }
    }

    /// Derivative from the right at `x`.
    pub fn slope_right(&self, x: f64) -> f64 {
        self.slope(x, true)
    }

    /// Derivative from the left at `x`.
    pub fn slope_left(&self, x: f64) -> f64 {
        self.slope(x, false)
    }

    fn slope(&self, x: f64, right: bool) -> f64 {
        let pick = |inside: bool| if inside { 1.0 } else { 0.0 };
        match self {
            Self::Constant(_) => 0.0,
            Self::Affine { b, .. } => *b,
            Self::Sine { amplitude, frequency, phase } => amplitude * frequency * (frequency * x + phase).cos(),
            Self::Exponential { amplitude, rate } => amplitude * rate * (rate * x).exp(),
            Self::Call { strike } => pick(if right { x >= *strike } else { x > *strike }),
            Self::Put { strike } => -pick(if right { x < *strike } else { x <= *strike }),
            Self::ExpCall { strike } => {
                let k = strike.max(f64::MIN_POSITIVE).ln();
                x.exp() * pick(*strike <= 0.0 || if right { x >= k } else { x > k })
            }
            Self::ExpPut { strike } => {
                if *strike <= 0.0 {
                    return 0.0;
                }
                let k = strike.ln();
                -x.exp() * pick(if right { x < k } else { x <= k })
            }
            Self::Tabulated(s) => s.derivative(x),
            Self::Custom { derivative, .. } => derivative(x),
        }
    }

    /// Points where the profile is not smooth.
    pub fn kinks(&self) -> Vec<f64> {
        match self {
            Self::Call { strike } | Self::Put { strike } => vec![*strike],
            Self::ExpCall { strike } | Self::ExpPut { strike } if *strike > 0.0 => vec![strike.ln()],
            Self::Custom { kinks, .. } => kinks.clone(),
            _ => Vec::new(),
        }
    }
}
