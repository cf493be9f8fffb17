//! Maps from market models to the heat strip and back.
//!
//! Prices satisfy V = e^{-R(t)} U(tau(t), x(t, S)) with
//! x = a(t) phi(S) + b(t), where phi = ln for Black-Scholes and the identity
//! for Ornstein-Uhlenbeck.

use super::curve::{CubicSpline, CurveFn};
use super::profile::InitialProfile;
use super::HeatStripProblem;
use crate::error::{Error, Result};
use crate::quad::gl8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    HeatNative,
    BsTimeDep,
    OuTimeDep,
}

impl ModelKind {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "heat-native" | "heat" => Ok(Self::HeatNative),
            "bs-timedep" | "black-scholes" => Ok(Self::BsTimeDep),
            "ou-timedep" | "ou" => Ok(Self::OuTimeDep),
            other => Err(Error::Unsupported(format!("model `{other}`"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::HeatNative => "heat-native",
            Self::BsTimeDep => "bs-timedep",
            Self::OuTimeDep => "ou-timedep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Payoff {
    Call { strike: f64 },
    Put { strike: f64 },
}

/// Barrier contract in calendar time t in [0, maturity].
#[derive(Debug, Clone)]
pub struct BarrierContract {
    pub maturity: f64,
    pub lower_barrier: CurveFn,
    pub upper_barrier: CurveFn,
    pub rebate_lower: CurveFn,
    pub rebate_upper: CurveFn,
    pub payoff: Payoff,
}

#[derive(Debug, Clone)]
pub enum ModelSpec {
    HeatNative(HeatStripProblem),
    BlackScholes { rate: CurveFn, vol: CurveFn, contract: BarrierContract },
    OrnsteinUhlenbeck { rate: CurveFn, kappa: CurveFn, theta: CurveFn, vol: CurveFn, contract: BarrierContract },
}

impl ModelSpec {
    pub fn kind(&self) -> ModelKind {
        match self {
            Self::HeatNative(_) => ModelKind::HeatNative,
            Self::BlackScholes { .. } => ModelKind::BsTimeDep,
            Self::OrnsteinUhlenbeck { .. } => ModelKind::OuTimeDep,
        }
    }
}

#[derive(Debug, Clone)]
enum Clock {
    Identity {
        horizon: f64,
    },
    /// Constant r, sigma under Black-Scholes.
    ConstantBs {
        maturity: f64,
        r: f64,
        sigma: f64,
    },
    Table(Box<ClockTable>),
}

#[derive(Debug, Clone)]
struct ClockTable {
    maturity: f64,
    discount: CubicSpline,
    tau: CubicSpline,
    slope: CubicSpline,
    shift: CubicSpline,
    time_of_tau: CubicSpline,
}

const TABLE_SIZE: usize = 2000;

/// Option value and spot sensitivities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketValue {
    pub price: f64,
    pub delta: f64,
    pub gamma: f64,
}

/// d/dt of ln c(t), tau(t), a(t) and b(t).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClockRates {
    pub log_scaling: f64,
    pub tau: f64,
    pub slope: f64,
    pub shift: f64,
}

#[derive(Debug, Clone)]
pub struct ReductionMap {
    kind: ModelKind,
    clock: Clock,
}

impl ReductionMap {
    pub fn identity(horizon: f64) -> Self {
        Self { kind: ModelKind::HeatNative, clock: Clock::Identity { horizon } }
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    /// Calendar maturity (the heat horizon for the identity map).
    pub fn maturity(&self) -> f64 {
        match &self.clock {
            Clock::Identity { horizon } => *horizon,
            Clock::ConstantBs { maturity, .. } => *maturity,
            Clock::Table(t) => t.maturity,
        }
    }

    /// Heat time for calendar time t.
    pub fn tau(&self, t: f64) -> f64 {
        match &self.clock {
            Clock::Identity { .. } => t,
            Clock::ConstantBs { maturity, sigma, .. } => 0.5 * sigma * sigma * (maturity - t),
            Clock::Table(c) => c.tau.value(t),
        }
    }

    /// Calendar time for heat time tau.
    pub fn time(&self, tau: f64) -> f64 {
        match &self.clock {
            Clock::Identity { .. } => tau,
            Clock::ConstantBs { maturity, sigma, .. } => maturity - 2.0 * tau / (sigma * sigma),
            Clock::Table(c) => c.time_of_tau.value(tau),
        }
    }

    fn discount_integral(&self, t: f64) -> f64 {
        match &self.clock {
            Clock::Identity { .. } => 0.0,
            Clock::ConstantBs { maturity, r, .. } => r * (maturity - t),
            Clock::Table(c) => c.discount.value(t),
        }
    }

    fn slope(&self, t: f64) -> f64 {
        match &self.clock {
            Clock::Table(c) => c.slope.value(t),
            _ => 1.0,
        }
    }

    fn shift(&self, t: f64) -> f64 {
        match &self.clock {
            Clock::Identity { .. } => 0.0,
            Clock::ConstantBs { maturity, r, sigma } => (r - 0.5 * sigma * sigma) * (maturity - t),
            Clock::Table(c) => c.shift.value(t),
        }
    }

    /// Time derivatives of the map at calendar time t.
    pub fn rates(&self, t: f64) -> ClockRates {
        match &self.clock {
            Clock::Identity { .. } => ClockRates { log_scaling: 0.0, tau: 1.0, slope: 0.0, shift: 0.0 },
            Clock::ConstantBs { r, sigma, .. } => {
                ClockRates { log_scaling: *r, tau: -0.5 * sigma * sigma, slope: 0.0, shift: -(r - 0.5 * sigma * sigma) }
            }
            Clock::Table(c) => ClockRates {
                log_scaling: -c.discount.derivative(t),
                tau: c.tau.derivative(t),
                slope: c.slope.derivative(t),
                shift: c.shift.derivative(t),
            },
        }
    }

    /// Calendar theta dV/dt at fixed spot from the heat value and its
    /// derivatives.
    pub fn market_theta(&self, u: f64, ux: f64, utau: f64, t: f64, s: f64) -> f64 {
        let k = self.rates(t);
        let phi = if self.logarithmic() { s.ln() } else { s };
        self.scaling(t) * (k.log_scaling * u + utau * k.tau + ux * (k.slope * phi + k.shift))
    }

    /// Factor c(t) with price = c(t) U.
    pub fn scaling(&self, t: f64) -> f64 {
        (-self.discount_integral(t)).exp()
    }

    fn logarithmic(&self) -> bool {
        self.kind == ModelKind::BsTimeDep
    }

    /// (t, S) to (tau, x).
    pub fn forward(&self, t: f64, s: f64) -> (f64, f64) {
        let phi = if self.logarithmic() { s.ln() } else { s };
        (self.tau(t), self.slope(t) * phi + self.shift(t))
    }

    /// Spot S for heat coordinate x at calendar time t.
    pub fn spot(&self, t: f64, x: f64) -> f64 {
        let phi = (x - self.shift(t)) / self.slope(t);
        if self.logarithmic() {
            phi.exp()
        } else {
            phi
        }
    }

    /// (tau, x) to (t, S).
    pub fn inverse(&self, tau: f64, x: f64) -> (f64, f64) {
        let t = self.time(tau);
        (t, self.spot(t, x))
    }

    /// Price, delta and gamma from the heat value and its x-derivatives.
    pub fn map_back(&self, u: f64, ux: f64, uxx: f64, t: f64, s: f64) -> Result<MarketValue> {
        if self.logarithmic() && s <= 0.0 {
            return Err(Error::OutsideStrip { tau: self.tau(t), x: f64::NAN });
        }
        let c = self.scaling(t);
        let a = self.slope(t);
        let (d1, d2) = if self.logarithmic() { (1.0 / s, -1.0 / (s * s)) } else { (1.0, 0.0) };
        Ok(MarketValue { price: c * u, delta: c * ux * a * d1, gamma: c * (uxx * a * a * d1 * d1 + ux * a * d2) })
    }
}

/// Builds the heat-strip problem of a market model together with the map
/// back to prices.
pub fn reduce_model(spec: &ModelSpec) -> Result<(HeatStripProblem, ReductionMap)> {
    match spec {
        ModelSpec::HeatNative(p) => Ok((p.clone(), ReductionMap::identity(p.horizon()))),
        ModelSpec::BlackScholes { rate, vol, contract } => {
            check_contract(contract)?;
            check_positive(vol, contract.maturity, "volatility")?;
            let clock = if rate.is_constant() && vol.is_constant() {
                Clock::ConstantBs { maturity: contract.maturity, r: rate.value(0.0), sigma: vol.value(0.0) }
            } else {
                Clock::Table(Box::new(tabulate(contract.maturity, |u| {
                    let s = vol.value(u);
                    Coefficients { r: rate.value(u), var: s * s, kappa: 0.0, drift: rate.value(u) - 0.5 * s * s }
                })?))
            };
            let map = ReductionMap { kind: ModelKind::BsTimeDep, clock };
            let initial = match contract.payoff {
                Payoff::Call { strike } => InitialProfile::ExpCall { strike },
                Payoff::Put { strike } => InitialProfile::ExpPut { strike },
            };
            Ok((heat_problem(&map, contract, initial, true)?, map))
        }
        ModelSpec::OrnsteinUhlenbeck { rate, kappa, theta, vol, contract } => {
            check_contract(contract)?;
            check_positive(vol, contract.maturity, "volatility")?;
            let table = tabulate(contract.maturity, |u| {
                let s = vol.value(u);
                let k = kappa.value(u);
                Coefficients { r: rate.value(u), var: s * s, kappa: k, drift: k * theta.value(u) }
            })?;
            let map = ReductionMap { kind: ModelKind::OuTimeDep, clock: Clock::Table(Box::new(table)) };
            let initial = match contract.payoff {
                Payoff::Call { strike } => InitialProfile::Call { strike },
                Payoff::Put { strike } => InitialProfile::Put { strike },
            };
            Ok((heat_problem(&map, contract, initial, false)?, map))
        }
    }
}

fn check_contract(c: &BarrierContract) -> Result<()> {
    if !(c.maturity.is_finite() && c.maturity > 0.0) {
        return Err(Error::InvalidInput(format!("maturity must be positive, got {}", c.maturity)));
    }
    Ok(())
}

fn check_positive(curve: &CurveFn, maturity: f64, what: &str) -> Result<()> {
    for k in 0..=1000 {
        let t = maturity * k as f64 / 1000.0;
        let v = curve.value(t);
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::InvalidInput(format!("{what} must be positive, got {v} at t={t}")));
        }
    }
    Ok(())
}

struct Coefficients {
    r: f64,
    /// sigma^2
    var: f64,
    /// Mean-reversion speed; zero for Black-Scholes.
    kappa: f64,
    /// Drift of the shift: r - sigma^2/2 (BS) or kappa theta (OU).
    drift: f64,
}

/// Integrates the clock backward from maturity on a uniform calendar grid.
fn tabulate<F: Fn(f64) -> Coefficients>(maturity: f64, coef: F) -> Result<ClockTable> {
    let m = TABLE_SIZE;
    let h = maturity / m as f64;
    let t: Vec<f64> = (0..=m).map(|k| h * k as f64).collect();
    let mut disc = vec![0.0; m + 1];
    let mut tau = vec![0.0; m + 1];
    let mut log_a = vec![0.0; m + 1];
    let mut shift = vec![0.0; m + 1];
    let rule = gl8();
    for k in (0..m).rev() {
        let (lo, hi) = (t[k], t[k + 1]);
        let mut dr = 0.0;
        let mut dk = 0.0;
        let mut dtau = 0.0;
        let mut db = 0.0;
        for (u, w) in rule.mapped(lo, hi) {
            let c = coef(u);
            // log a(u) relative to log a(hi)
            let inner = -rule.integrate(u, hi, |v| coef(v).kappa);
            let a = (log_a[k + 1] + inner).exp();
            dr += w * c.r;
            dk += w * c.kappa;
            dtau += w * 0.5 * c.var * a * a;
            db += w * c.drift * a;
        }
        disc[k] = disc[k + 1] + dr;
        log_a[k] = log_a[k + 1] - dk;
        tau[k] = tau[k + 1] + dtau;
        shift[k] = shift[k + 1] + db;
        if !(tau[k] > tau[k + 1]) {
            return Err(Error::InvalidInput("heat time must increase with time to maturity".into()));
        }
    }
    if disc.iter().chain(&tau).chain(&shift).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("model coefficients".into()));
    }
    let slope: Vec<f64> = log_a.iter().map(|v| v.exp()).collect();
    let tau_rev: Vec<f64> = tau.iter().rev().copied().collect();
    let t_rev: Vec<f64> = t.iter().rev().copied().collect();
    Ok(ClockTable {
        maturity,
        discount: CubicSpline::new(&t, &disc)?,
        tau: CubicSpline::new(&t, &tau)?,
        slope: CubicSpline::new(&t, &slope)?,
        shift: CubicSpline::new(&t, &shift)?,
        time_of_tau: CubicSpline::new(&tau_rev, &t_rev)?,
    })
}

fn heat_problem(
    map: &ReductionMap,
    c: &BarrierContract,
    initial: InitialProfile,
    log: bool,
) -> Result<HeatStripProblem> {
    let horizon = map.tau(0.0);
    if let Clock::ConstantBs { r, sigma, .. } = map.clock {
        let lin = |b: &CurveFn| -> Option<CurveFn> {
            if !b.is_constant() {
                return None;
            }
            let l = b.value(0.0);
            // y(tau) = ln L + (r - sigma^2/2)(T - t), T - t = 2 tau / sigma^2
            Some(CurveFn::linear(l.ln(), (2.0 * r / (sigma * sigma)) - 1.0))
        };
        let reb = |f: &CurveFn| -> Option<CurveFn> {
            f.is_constant().then(|| CurveFn::exponential(f.value(0.0), 2.0 * r / (sigma * sigma)))
        };
        let lower = lin(&c.lower_barrier);
        let upper = lin(&c.upper_barrier);
        let fl = reb(&c.rebate_lower);
        let fu = reb(&c.rebate_upper);
        return Ok(HeatStripProblem::new(
            lower.unwrap_or_else(|| image_curve(map, &c.lower_barrier, log)),
            upper.unwrap_or_else(|| image_curve(map, &c.upper_barrier, log)),
            fl.unwrap_or_else(|| rebate_curve(map, &c.rebate_lower)),
            fu.unwrap_or_else(|| rebate_curve(map, &c.rebate_upper)),
            initial,
            horizon,
        ));
    }
    let (knots, ys, zs, fls, fus) = sample_images(map, c, log);
    Ok(HeatStripProblem::new(
        CurveFn::spline(&knots, &ys)?,
        CurveFn::spline(&knots, &zs)?,
        CurveFn::spline(&knots, &fls)?,
        CurveFn::spline(&knots, &fus)?,
        initial,
        horizon,
    ))
}

type Samples = (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>);

fn sample_images(map: &ReductionMap, c: &BarrierContract, log: bool) -> Samples {
    let m = TABLE_SIZE;
    let mut out: Samples = Default::default();
    for k in (0..=m).rev() {
        let t = c.maturity * k as f64 / m as f64;
        let phi = |s: f64| if log { s.ln() } else { s };
        let a = map.slope(t);
        let b = map.shift(t);
        let growth = map.discount_integral(t).exp();
        out.0.push(map.tau(t));
        out.1.push(a * phi(c.lower_barrier.value(t)) + b);
        out.2.push(a * phi(c.upper_barrier.value(t)) + b);
        out.3.push(growth * c.rebate_lower.value(t));
        out.4.push(growth * c.rebate_upper.value(t));
    }
    out
}

fn image_curve(map: &ReductionMap, barrier: &CurveFn, log: bool) -> CurveFn {
    let (m1, m2, b1, b2) = (map.clone(), map.clone(), barrier.clone(), barrier.clone());
    let phi = move |s: f64| if log { s.ln() } else { s };
    CurveFn::custom(
        move |tau| {
            let t = m1.time(tau);
            m1.slope(t) * phi(b1.value(t)) + m1.shift(t)
        },
        move |tau| {
            // Constant-coefficient BS only: dt/dtau = -2/sigma^2.
            let Clock::ConstantBs { r, sigma, .. } = m2.clock else { return f64::NAN };
            let t = m2.time(tau);
            let dphi = b2.derivative(t) / b2.value(t);
            (dphi - (r - 0.5 * sigma * sigma)) * (-2.0 / (sigma * sigma))
        },
    )
}

fn rebate_curve(map: &ReductionMap, rebate: &CurveFn) -> CurveFn {
    let (m1, m2, f1, f2) = (map.clone(), map.clone(), rebate.clone(), rebate.clone());
    CurveFn::custom(
        move |tau| {
            let t = m1.time(tau);
            m1.discount_integral(t).exp() * f1.value(t)
        },
        move |tau| {
            let Clock::ConstantBs { r, sigma, .. } = m2.clock else { return f64::NAN };
            let t = m2.time(tau);
            let g = m2.discount_integral(t).exp();
            (g * (f2.derivative(t) - r * f2.value(t))) * (-2.0 / (sigma * sigma))
        },
    )
}
