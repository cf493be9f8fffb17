//! Gauss-Legendre rules and a few composite integrators built on them.

use std::sync::OnceLock;

#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Rule with `n` points on [-1, 1], nodes by Newton iteration on P_n.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one point");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes.iter().zip(&self.weights).map(move |(&x, &w)| (c + h * x, h * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

macro_rules! cached_rule {
    ($name:ident, $n:expr) => {
        pub fn $name() -> &'static GaussLegendre {
            static RULE: OnceLock<GaussLegendre> = OnceLock::new();
            RULE.get_or_init(|| GaussLegendre::new($n))
        }
    };
}

cached_rule!(gl8, 8);
cached_rule!(gl16, 16);
cached_rule!(gl32, 32);

/// Adaptive Gauss-Legendre: a GL16 panel is accepted when it agrees with
/// the sum of its two halves. The number of panels is capped, after which
/// the best available estimate is returned.
pub fn adaptive<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> f64 {
    let rule = gl16();
    let mut mass = 0.0;
    let whole = rule.integrate(a, b, |x| {
        let v = f(x);
        mass += v.abs();
        v
    });
    let floor = 1e-15 * mass * (b - a).abs() / 16.0;
    let mut budget = 4000usize;
    adaptive_rec(&mut f, rule, a, b, whole, tol.max(floor), floor, &mut budget)
}

fn adaptive_rec<F: FnMut(f64) -> f64>(
    f: &mut F,
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    floor: f64,
    budget: &mut usize,
) -> f64 {
    let m = 0.5 * (a + b);
    let left = rule.integrate(a, m, &mut *f);
    let right = rule.integrate(m, b, &mut *f);
    let refined = left + right;
    *budget = budget.saturating_sub(2);
    let err = (refined - whole).abs();
    if !(err > tol.max(1e-15 * refined.abs())) || *budget == 0 || m <= a || m >= b {
        return refined;
    }
    let half = (0.5 * tol).max(floor);
    adaptive_rec(f, rule, a, m, left, half, floor, budget) + adaptive_rec(f, rule, m, b, right, half, floor, budget)
}

/// [`adaptive`] for a pair of integrands sharing their evaluation points.
pub fn adaptive_pair<F: FnMut(f64) -> [f64; 2]>(mut f: F, a: f64, b: f64, tol: f64) -> [f64; 2] {
    let rule = gl16();
    let mut mass = 0.0;
    let whole = pair_rule(rule, a, b, &mut |x| {
        let v = f(x);
        mass += v[0].abs().max(v[1].abs());
        v
    });
    let floor = 1e-15 * mass * (b - a).abs() / 16.0;
    let mut budget = 4000usize;
    pair_rec(&mut f, rule, a, b, whole, tol.max(floor), floor, &mut budget)
}

fn pair_rule<F: FnMut(f64) -> [f64; 2]>(rule: &GaussLegendre, a: f64, b: f64, f: &mut F) -> [f64; 2] {
    let mut acc = [0.0; 2];
    for (x, w) in rule.mapped(a, b) {
        let v = f(x);
        acc[0] += w * v[0];
        acc[1] += w * v[1];
    }
    acc
}

fn pair_rec<F: FnMut(f64) -> [f64; 2]>(
    f: &mut F,
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    whole: [f64; 2],
    tol: f64,
    floor: f64,
    budget: &mut usize,
) -> [f64; 2] {
    let m = 0.5 * (a + b);
    let left = pair_rule(rule, a, m, f);
    let right = pair_rule(rule, m, b, f);
    let refined = [left[0] + right[0], left[1] + right[1]];
    *budget = budget.saturating_sub(2);
    let converged = (0..2).all(|k| !((refined[k] - whole[k]).abs() > tol.max(1e-15 * refined[k].abs())));
    if converged || *budget == 0 || m <= a || m >= b {
        return refined;
    }
    let half = (0.5 * tol).max(floor);
    let l = pair_rec(f, rule, a, m, left, half, floor, budget);
    let r = pair_rec(f, rule, m, b, right, half, floor, budget);
    [l[0] + r[0], l[1] + r[1]]
}

/// [`integrate_singular_end`] for a pair of integrands.
pub fn integrate_singular_end_pair<F: FnMut(f64, f64) -> [f64; 2]>(mut f: F, a: f64, b: f64, tol: f64) -> [f64; 2] {
    let top = (b - a).max(0.0).sqrt();
    adaptive_pair(
        |v| {
            let r = f(b - v * v, v * v);
            [2.0 * v * r[0], 2.0 * v * r[1]]
        },
        0.0,
        top,
        tol,
    )
}

/// Integral over [a, b] of an integrand with an inverse square-root
/// singularity at `b`, through s = b - v^2. The integrand receives both `s`
/// and the gap `b - s = v^2`.
pub fn integrate_singular_end<F: FnMut(f64, f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> f64 {
    let top = (b - a).max(0.0).sqrt();
    adaptive(|v| 2.0 * v * f(b - v * v, v * v), 0.0, top, tol)
}

/// Composite GL16 over panels of width at most `max_width`, with forced
/// breakpoints inside (a, b).
pub fn composite<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, breaks: &[f64], max_width: f64) -> f64 {
    let rule = gl16();
    let mut edges = vec![a];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&c| c > a && c < b).collect();
    inner.sort_by(|p, q| p.total_cmp(q));
    edges.extend(inner);
    edges.push(b);
    let mut total = 0.0;
    for w in edges.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi <= lo {
            continue;
        }
        let pieces = ((hi - lo) / max_width).ceil().max(1.0) as usize;
        let h = (hi - lo) / pieces as f64;
        for k in 0..pieces {
            let p = lo + h * k as f64;
            let q = if k + 1 == pieces { hi } else { p + h };
            total += rule.integrate(p, q, &mut f);
        }
    }
    total
}

/// Nodes and weights of composite GL16 over panels of width at most
/// `max_width`, with forced breakpoints inside (a, b).
pub fn composite_nodes(a: f64, b: f64, breaks: &[f64], max_width: f64) -> Vec<(f64, f64)> {
    let rule = gl16();
    let mut edges = vec![a];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&c| c > a && c < b).collect();
    inner.sort_by(|p, q| p.total_cmp(q));
    edges.extend(inner);
    edges.push(b);
    let mut out = Vec::new();
    for w in edges.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi <= lo {
            continue;
        }
        let pieces = ((hi - lo) / max_width).ceil().max(1.0) as usize;
        let h = (hi - lo) / pieces as f64;
        for k in 0..pieces {
            let p = lo + h * k as f64;
            let q = if k + 1 == pieces { hi } else { p + h };
            out.extend(rule.mapped(p, q));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        for n in [1, 2, 5, 8, 16, 32, 64] {
            let r = GaussLegendre::new(n);
            let s: f64 = r.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-14, "n={n} sum={s}");
        }
    }

    #[test]
    fn exact_for_high_degree_polynomials() {
        let r = GaussLegendre::new(8);
        let v = r.integrate(0.0, 2.0, |x| x.powi(15));
        assert!((v - 2f64.powi(16) / 16.0).abs() < 1e-9);
    }

    #[test]
    fn adaptive_handles_peaks() {
        let v = adaptive(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, 1e-12);
        let exact = 2.0 * (1.0 / 1e-2) * (1.0f64 / 1e-2).atan();
        assert!((v - exact).abs() < 1e-8 * exact);
    }

    #[test]
    fn singular_end_point() {
        let v = integrate_singular_end(|_, gap| 1.0 / gap.sqrt(), 0.0, 1.0, 1e-14);
        assert!((v - 2.0).abs() < 1e-13);
    }

    #[test]
    fn composite_nodes_match_composite() {
        let f = |x: f64| (3.0 * x).sin() * (x - 0.3).abs();
        let direct = composite(f, 0.0, 1.0, &[0.3], 0.2);
        let nodes: f64 = composite_nodes(0.0, 1.0, &[0.3], 0.2).iter().map(|&(x, w)| w * f(x)).sum();
        assert!((direct - nodes).abs() < 1e-15);
    }

    #[test]
    fn pair_matches_scalar() {
        let p = integrate_singular_end_pair(|s, gap| [1.0 / gap.sqrt(), s / gap.sqrt()], 0.0, 1.0, 1e-14);
        assert!((p[0] - 2.0).abs() < 1e-13);
        assert!((p[1] - 4.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn composite_with_kink() {
        let v = composite(|x: f64| (x - 0.3).abs(), 0.0, 1.0, &[0.3], 0.5);
        assert!((v - (0.045 + 0.245)).abs() < 1e-14);
    }
}
