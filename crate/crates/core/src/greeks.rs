//! Sensitivities.
//!
//! Spatial derivatives come from differentiating the image-sum price under
//! the integral sign; the Gaussian kernels have closed-form x-derivatives
//! and the quadrature nodes are shared with the price. Time derivatives
//! follow from the heat equation, U_tau = U_xx, and the reduction map.
//! Vega and rho are bump-and-reprice in market coordinates.

use crate::error::{Error, Result};
use crate::git::{price_images, price_images_detail, solve_gradients, GradientPair};
use crate::grid::TimeGrid;
use crate::problem::reduction::{reduce_model, MarketValue, ModelSpec, ReductionMap};
use crate::problem::{CurveFn, HeatStripProblem};

/// Relative bump for vega and rho.
pub const BUMP: f64 = 0.01;

/// What to do at points closer than l/100 to a boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NearBoundary {
    /// One-sided differences of the price.
    #[default]
    Fallback,
    Reject,
}

/// Heat-coordinate derivatives and their market counterparts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreekSet {
    pub u: f64,
    /// dU/dx
    pub ux: f64,
    /// d2U/dx2, also dU/dtau
    pub uxx: f64,
    pub price: f64,
    pub delta: f64,
    pub gamma: f64,
    /// dV/dt at fixed spot, calendar time.
    pub theta: f64,
}

/// (dU/dx, d2U/dx2) at an interior point.
pub fn spatial_greeks(problem: &HeatStripProblem, g: &GradientPair, tau: f64, x: f64) -> Result<(f64, f64)> {
    spatial_greeks_with(problem, g, tau, x, NearBoundary::Fallback)
}

pub fn spatial_greeks_with(
    problem: &HeatStripProblem,
    g: &GradientPair,
    tau: f64,
    x: f64,
    near: NearBoundary,
) -> Result<(f64, f64)> {
    let (y, z) = (problem.lower().value(tau), problem.upper().value(tau));
    let l = z - y;
    if tau > 0.0 && x - y >= 0.01 * l && z - x >= 0.01 * l {
        let p = price_images_detail(problem, g, tau, x, true)?;
        return Ok((p.dx, p.dxx));
    }
    if near == NearBoundary::Reject {
        return Err(Error::InvalidInput(format!("x={x} is within l/100 of a boundary at tau={tau}")));
    }
    if tau == 0.0 {
        let u0 = problem.initial();
        return Ok((u0.slope_right(x), f64::NAN));
    }
    let h = 1e-3 * l;
    let dir = if x - y < z - x { 1.0 } else { -1.0 };
    let u = |k: f64| price_images(problem, g, tau, x + dir * k * h);
    let (u0, u1, u2, u3) = (u(0.0)?, u(1.0)?, u(2.0)?, u(3.0)?);
    let ux = dir * (-11.0 * u0 + 18.0 * u1 - 9.0 * u2 + 2.0 * u3) / (6.0 * h);
    let uxx = (2.0 * u0 - 5.0 * u1 + 4.0 * u2 - u3) / (h * h);
    Ok((ux, uxx))
}

/// Calendar theta dV/dt through U_tau = U_xx and the chain rule.
pub fn calendar_theta(
    problem: &HeatStripProblem,
    g: &GradientPair,
    map: &ReductionMap,
    tau: f64,
    x: f64,
) -> Result<f64> {
    Ok(greeks(problem, g, map, tau, x)?.theta)
}

pub fn greeks(problem: &HeatStripProblem, g: &GradientPair, map: &ReductionMap, tau: f64, x: f64) -> Result<GreekSet> {
    let u = price_images(problem, g, tau, x)?;
    let (ux, uxx) = spatial_greeks(problem, g, tau, x)?;
    let (t, s) = map.inverse(tau, x);
    let MarketValue { price, delta, gamma } = map.map_back(u, ux, uxx, t, s)?;
    let theta = map.market_theta(u, ux, uxx, t, s);
    Ok(GreekSet { u, ux, uxx, price, delta, gamma, theta })
}

/// Market price, delta and gamma at (t, S) from a fresh solve with `steps`
/// march steps.
pub fn market_value(spec: &ModelSpec, t: f64, s: f64, steps: usize) -> Result<MarketValue> {
    let (problem, map) = reduce_model(spec)?;
    let g = solve_gradients(&problem, &TimeGrid::graded(problem.horizon(), steps)?)?;
    let (tau, x) = map.forward(t, s);
    let p = price_images_detail(&problem, &g, tau, x, true)?;
    map.map_back(p.value, p.dx, p.dxx, t, s)
}

/// Central bump-and-reprice sensitivities to volatility and rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bumped {
    pub vega: f64,
    pub rho: f64,
}

fn shifted(c: &CurveFn, by: f64) -> CurveFn {
    if c.is_constant() {
        return CurveFn::constant(c.value(0.0) + by);
    }
    let (v, d) = (c.clone(), c.clone());
    CurveFn::custom(move |t| v.value(t) + by, move |t| d.derivative(t))
}

/// Vega and rho at (t, S). Each curve is shifted in parallel by +-1% of its
/// value at t (1e-4 when that value is zero) and the price differenced
/// centrally.
pub fn bump_sensitivities(spec: &ModelSpec, t: f64, s: f64, steps: usize) -> Result<Bumped> {
    let size = |c: &CurveFn| {
        let v = BUMP * c.value(t).abs();
        if v > 0.0 {
            v
        } else {
            1e-4
        }
    };
    let reprice = |vol_by: f64, rate_by: f64| -> Result<f64> {
        let bumped = match spec {
            ModelSpec::HeatNative(_) => return Err(Error::Unsupported("vega and rho of a heat-native problem".into())),
            ModelSpec::BlackScholes { rate, vol, contract } => ModelSpec::BlackScholes {
                rate: shifted(rate, rate_by),
                vol: shifted(vol, vol_by),
                contract: contract.clone(),
            },
            ModelSpec::OrnsteinUhlenbeck { rate, kappa, theta, vol, contract } => ModelSpec::OrnsteinUhlenbeck {
                rate: shifted(rate, rate_by),
                kappa: kappa.clone(),
                theta: theta.clone(),
                vol: shifted(vol, vol_by),
                contract: contract.clone(),
            },
        };
        Ok(market_value(&bumped, t, s, steps)?.price)
    };
    let (rate, vol) = match spec {
        ModelSpec::HeatNative(_) => return Err(Error::Unsupported("vega and rho of a heat-native problem".into())),
        ModelSpec::BlackScholes { rate, vol, .. } | ModelSpec::OrnsteinUhlenbeck { rate, vol, .. } => (rate, vol),
    };
    let (dv, dr) = (size(vol), size(rate));
    Ok(Bumped {
        vega: (reprice(dv, 0.0)? - reprice(-dv, 0.0)?) / (2.0 * dv),
        rho: (reprice(0.0, dr)? - reprice(0.0, -dr)?) / (2.0 * dr),
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::problem::reduction::{BarrierContract, Payoff};
    use crate::problem::InitialProfile;

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

    fn call_on_moving_strip() -> HeatStripProblem {
        HeatStripProblem::new(
            CurveFn::linear(0.0, 0.1),
            CurveFn::linear(1.0, 0.2),
            CurveFn::linear(0.0, 0.05),
            CurveFn::constant(0.05),
            InitialProfile::Call { strike: 0.95 },
            0.5,
        )
    }

    fn solve(p: &HeatStripProblem, n: usize) -> GradientPair {
        solve_gradients(p, &TimeGrid::graded(p.horizon(), n).unwrap()).unwrap()
    }

    #[test]
    fn eigenfunction_derivatives() {
        let p = eigen();
        let g = solve(&p, 256);
        let (ux, _) = spatial_greeks(&p, &g, 0.1, 0.5).unwrap();
        assert!(ux.abs() < 1e-6, "{ux}");
        for x in [0.2, 0.5, 0.7] {
            let u = price_images(&p, &g, 0.1, x).unwrap();
            let (_, uxx) = spatial_greeks(&p, &g, 0.1, x).unwrap();
            assert!((uxx + PI * PI * u).abs() < 1e-5, "{uxx} {u}");
        }
        let map = ReductionMap::identity(0.5);
        let th = calendar_theta(&p, &g, &map, 0.1, 0.5).unwrap();
        assert!((th + PI * PI * price_images(&p, &g, 0.1, 0.5).unwrap()).abs() < 1e-5, "{th}");
    }

    #[test]
    fn constant_solution_has_no_greeks() {
        let p = HeatStripProblem::new(
            CurveFn::linear(-0.2, 0.1),
            CurveFn::linear(0.9, -0.3),
            CurveFn::constant(0.7),
            CurveFn::constant(0.7),
            InitialProfile::Constant(0.7),
            0.5,
        );
        let g = solve(&p, 32);
        let s = greeks(&p, &g, &ReductionMap::identity(0.5), 0.3, 0.2).unwrap();
        assert!(s.ux.abs() < 1e-9 && s.uxx.abs() < 1e-9 && s.theta.abs() < 1e-9, "{s:?}");
    }

    #[test]
    fn analytic_matches_bumps() {
        let p = call_on_moving_strip();
        let g = solve(&p, 128);
        for (tau, x) in [(0.1, 0.5), (0.3, 0.8), (0.45, 0.3)] {
            let l = p.width(tau);
            let h = 1e-4 * l;
            let u = |x: f64| price_images(&p, &g, tau, x).unwrap();
            let dx = (u(x + h) - u(x - h)) / (2.0 * h);
            let dxx = (u(x + h) - 2.0 * u(x) + u(x - h)) / (h * h);
            let (ux, uxx) = spatial_greeks(&p, &g, tau, x).unwrap();
            assert!((ux - dx).abs() < 1e-5, "{ux} {dx}");
            assert!((uxx - dxx).abs() < 1e-5, "{uxx} {dxx}");
        }
    }

    #[test]
    fn near_boundary_fallback() {
        let p = eigen();
        let g = solve(&p, 256);
        let x = 0.004;
        assert!(spatial_greeks_with(&p, &g, 0.1, x, NearBoundary::Reject).is_err());
        let (ux, uxx) = spatial_greeks(&p, &g, 0.1, x).unwrap();
        let e = (-PI * PI * 0.1f64).exp();
        assert!((ux - PI * (PI * x).cos() * e).abs() < 1e-4, "{ux}");
        assert!((uxx + PI * PI * (PI * x).sin() * e).abs() < 1e-3, "{uxx}");
        let (ux, _) = spatial_greeks(&p, &g, 0.1, 0.998).unwrap();
        assert!((ux - PI * (PI * 0.998).cos() * e).abs() < 1e-4, "{ux}");
    }

    #[test]
    fn pde_residual() {
        let p = call_on_moving_strip();
        let g = solve(&p, 256);
        for (tau, x) in [(0.1, 0.5), (0.3, 0.8), (0.45, 0.3)] {
            let h = 1e-4;
            let ut =
                (price_images(&p, &g, tau + h, x).unwrap() - price_images(&p, &g, tau - h, x).unwrap()) / (2.0 * h);
            let (_, uxx) = spatial_greeks(&p, &g, tau, x).unwrap();
            let u = price_images(&p, &g, tau, x).unwrap();
            assert!((ut - uxx).abs() < 1e-5 * (1.0 + u.abs()), "{ut} {uxx}");
        }
    }

    fn bs_spec(rate: f64, vol: f64) -> ModelSpec {
        ModelSpec::BlackScholes {
            rate: CurveFn::constant(rate),
            vol: CurveFn::constant(vol),
            contract: BarrierContract {
                maturity: 0.5,
                lower_barrier: CurveFn::constant(80.0),
                upper_barrier: CurveFn::constant(130.0),
                rebate_lower: CurveFn::constant(0.0),
                rebate_upper: CurveFn::constant(0.0),
                payoff: Payoff::Call { strike: 100.0 },
            },
        }
    }

    #[test]
    fn market_theta_matches_calendar_differences() {
        let spec = bs_spec(0.03, 0.25);
        let (p, map) = reduce_model(&spec).unwrap();
        let g = solve(&p, 256);
        let (t, s) = (0.2, 105.0);
        let (tau, x) = map.forward(t, s);
        let set = greeks(&p, &g, &map, tau, x).unwrap();
        let v = |t: f64| {
            let (tau, x) = map.forward(t, s);
            map.scaling(t) * price_images(&p, &g, tau, x).unwrap()
        };
        let h = 1e-4;
        let want = (v(t + h) - v(t - h)) / (2.0 * h);
        assert!((set.theta - want).abs() < 1e-4 * (1.0 + want.abs()), "{} {want}", set.theta);
        let mv = market_value(&spec, t, s, 256).unwrap();
        assert!((mv.price - set.price).abs() < 1e-12);
    }

    #[test]
    fn bumps_are_finite_and_heat_native_is_rejected() {
        let b = bump_sensitivities(&bs_spec(0.03, 0.25), 0.0, 100.0, 64).unwrap();
        assert!(b.vega.is_finite() && b.rho.is_finite());
        let h = ModelSpec::HeatNative(eigen());
        assert!(matches!(bump_sensitivities(&h, 0.0, 0.5, 64), Err(Error::Unsupported(_))));
    }
}
