//! Time grids for the Volterra marches and nodal functions on them.
//!
//! Unknown boundary functions are stored in the variable sigma = sqrt(tau):
//! a nodal series holds W(sigma_j) and represents w(s) = W(sqrt s) / sqrt(s)^p,
//! with W piecewise linear in sigma. The power p = 1 absorbs the
//! 1/sqrt(tau) blow-up at a corner where the initial profile misses the
//! rebate.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spacing {
    /// tau_j = T j / N
    Uniform,
    /// tau_j = T (j / N)^2, uniform in sqrt(tau)
    Graded,
}

impl Spacing {
    pub fn parse(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "uniform" => Some(Self::Uniform),
            "graded" => Some(Self::Graded),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    nodes: Vec<f64>,
    roots: Vec<f64>,
    spacing: Spacing,
}

impl TimeGrid {
    pub fn new(spacing: Spacing, horizon: f64, steps: usize) -> Result<Self> {
        if steps < 2 {
            return Err(Error::InvalidInput(format!("time grid needs at least 2 steps, got {steps}")));
        }
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::InvalidInput(format!("grid horizon must be positive, got {horizon}")));
        }
        let n = steps as f64;
        let nodes: Vec<f64> = (0..=steps)
            .map(|j| {
                let r = j as f64 / n;
                match spacing {
                    Spacing::Uniform => horizon * r,
                    Spacing::Graded => horizon * r * r,
                }
            })
            .collect();
        let mut grid = Self { roots: nodes.iter().map(|t| t.sqrt()).collect(), nodes, spacing };
        // pin the end exactly
        grid.nodes[steps] = horizon;
        grid.roots[steps] = horizon.sqrt();
        Ok(grid)
    }

    pub fn uniform(horizon: f64, steps: usize) -> Result<Self> {
        Self::new(Spacing::Uniform, horizon, steps)
    }

    pub fn graded(horizon: f64, steps: usize) -> Result<Self> {
        Self::new(Spacing::Graded, horizon, steps)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// sqrt of every node.
    pub fn roots(&self) -> &[f64] {
        &self.roots
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    /// Number of steps N (the grid has N + 1 nodes).
    pub fn steps(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn horizon(&self) -> f64 {
        self.nodes[self.steps()]
    }

    /// Index k of the interval [tau_k, tau_{k+1}] containing tau, clamped
    /// to the grid.
    pub fn locate(&self, tau: f64) -> usize {
        let n = self.steps();
        match self.nodes.binary_search_by(|p| p.total_cmp(&tau)) {
            Ok(k) => k.min(n - 1),
            Err(k) => k.saturating_sub(1).min(n - 1),
        }
    }
}

/// A function of time known at the grid nodes through W(sigma_j).
#[derive(Debug, Clone, PartialEq)]
pub struct Nodal {
    roots: Vec<f64>,
    w: Vec<f64>,
    power: u8,
}

impl Nodal {
    pub fn new(grid: &TimeGrid, w: Vec<f64>, power: u8) -> Self {
        debug_assert_eq!(grid.roots.len(), w.len());
        Self { roots: grid.roots.clone(), w, power }
    }

    pub fn power(&self) -> u8 {
        self.power
    }

    /// Stored nodal values W(sigma_j).
    pub fn scaled(&self) -> &[f64] {
        &self.w
    }

    /// Value at node j; for p = 1 the node at the origin is infinite.
    pub fn node_value(&self, j: usize) -> f64 {
        self.unscale(self.w[j], self.roots[j])
    }

    pub fn node_values(&self) -> Vec<f64> {
        (0..self.w.len()).map(|j| self.node_value(j)).collect()
    }

    #[inline]
    fn unscale(&self, w: f64, sigma: f64) -> f64 {
        match self.power {
            0 => w,
            _ => w / sigma,
        }
    }

    /// W interpolated linearly in sigma.
    #[inline]
    pub fn scaled_at(&self, sigma: f64) -> f64 {
        let r = &self.roots;
        let last = r.len() - 1;
        let k = match r.binary_search_by(|p| p.total_cmp(&sigma)) {
            Ok(k) => return self.w[k],
            Err(k) => k.clamp(1, last),
        };
        let (a, b) = (r[k - 1], r[k]);
        let t = (sigma - a) / (b - a);
        self.w[k - 1] + t * (self.w[k] - self.w[k - 1])
    }

    /// W from the cubic through the four nodes around sigma (three at the
    /// ends of the grid).
    pub fn scaled_at_cubic(&self, sigma: f64) -> f64 {
        let r = &self.roots;
        let last = r.len() - 1;
        if last < 3 {
            return self.scaled_at(sigma);
        }
        let k = match r.binary_search_by(|p| p.total_cmp(&sigma)) {
            Ok(k) => return self.w[k],
            Err(k) => k.clamp(1, last),
        };
        let lo = k.saturating_sub(2).min(last - 3);
        let mut acc = 0.0;
        for i in lo..lo + 4 {
            let mut basis = 1.0;
            for j in lo..lo + 4 {
                if j != i {
                    basis *= (sigma - r[j]) / (r[i] - r[j]);
                }
            }
            acc += basis * self.w[i];
        }
        acc
    }

    /// w(s) for s in (0, T].
    #[inline]
    pub fn at(&self, s: f64) -> f64 {
        let sigma = s.max(0.0).sqrt();
        self.unscale(self.scaled_at(sigma), sigma)
    }

    /// Largest relative jump between consecutive finite node values, used
    /// to flag a grid too coarse for the data.
    pub fn max_relative_jump(&self) -> f64 {
        let v = self.node_values();
        let scale = v.iter().filter(|x| x.is_finite()).fold(0.0f64, |m, x| m.max(x.abs()));
        let floor = 0.1 * scale.max(1e-300);
        v.windows(2)
            .skip(usize::from(self.power > 0))
            .filter(|p| p[0].is_finite() && p[1].is_finite())
            .map(|p| (p[1] - p[0]).abs() / p[0].abs().max(floor))
            .fold(0.0, f64::max)
    }
}

/// Edges in s of the panels used for time integrals ending at tau: the
/// grid nodes below tau together with the dyadic sequence tau - d_min 2^k,
/// so that panels shrink geometrically towards s = tau. The last panel is
/// [tau - d_min, tau].
pub fn time_panels(grid: &TimeGrid, tau: f64, d_min: f64) -> Vec<f64> {
    let d_min = d_min.min(tau);
    let mut edges: Vec<f64> = grid.nodes().iter().copied().filter(|&t| t < tau).collect();
    let mut d = d_min;
    while d < tau {
        edges.push(tau - d);
        d *= 2.0;
    }
    edges.push(tau);
    edges.sort_by(|a, b| a.total_cmp(b));
    edges.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * tau.max(1e-300));
    edges
}

/// Kernel peak scale for a field point at distance r from the nearest
/// boundary. Below it the strip kernels are smaller than e^{-50}.
pub fn peak_scale(r: f64) -> f64 {
    dyadic_floor(r * r / 200.0)
}

/// Largest power of two not above v.
pub fn dyadic_floor(v: f64) -> f64 {
    if v <= 0.0 || !v.is_finite() {
        return f64::MIN_POSITIVE;
    }
    2f64.powi(v.log2().floor() as i32)
}
