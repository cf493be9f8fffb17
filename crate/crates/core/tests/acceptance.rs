//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

mod common;

use std::time::Instant;

use dbarrier_core::fd::{solve_fd, FdGrid};
use dbarrier_core::git::{price_images, price_images_detail, price_theta, solve_gradients};
use dbarrier_core::greeks::spatial_greeks;
use dbarrier_core::hp::{hp_to_git, jump_check, price_hp, solve_densities};
use dbarrier_core::kernels::{
    eta_kernel, lambda_kernel, poisson_pair, term_count, upsilon_kernel, KernelQuery, Representation,
};
use dbarrier_core::problem::{CurveFn, ExactSolution, HeatStripProblem, InitialProfile, Side};
use dbarrier_core::TimeGrid;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use common::{constant, eigen, eigen_exact, lattice, regression};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn sup<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    it.into_iter().fold(0.0, |m, v| if v.is_nan() { f64::NAN } else { m.max(v.abs()) })
}

fn graded(p: &HeatStripProblem, n: usize) -> TimeGrid {
    TimeGrid::graded(p.horizon(), n).unwrap()
}

/// U = e^{x + tau} on a widening, drifting strip.
fn moving_exponential() -> HeatStripProblem {
    HeatStripProblem::new(
        CurveFn::linear(0.0, 0.1),
        CurveFn::linear(1.0, 0.2),
        CurveFn::exponential(1.0, 1.1),
        CurveFn::exponential(1f64.exp(), 1.2),
        InitialProfile::Exponential { amplitude: 1.0, rate: 1.0 },
        0.5,
    )
}

fn eigenfunction() -> Outcome {
    let start = Instant::now();
    let p = eigen(0.5);
    let grid = graded(&p, 256);
    let g = solve_gradients(&p, &grid).map_err(|e| e.to_string())?;
    let d = solve_densities(&p, &grid).map_err(|e| e.to_string())?;
    let pts = lattice(&p);
    let err = |f: &dyn Fn(f64, f64) -> f64| sup(pts.iter().map(|&(t, x)| f(t, x) - eigen_exact(t, x)));
    let theta = err(&|t, x| price_theta(&p, &g, t, x).unwrap());
    let images = err(&|t, x| price_images(&p, &g, t, x).unwrap());
    let hp = err(&|t, x| price_hp(&p, &d, t, x).unwrap());
    let secs = start.elapsed().as_secs_f64();
    check(
        theta.max(images).max(hp) <= 1e-5 && secs < 5.0,
        format!("theta {theta:.1e}, images {images:.1e}, hp {hp:.1e}, {secs:.2} s"),
    )
}

fn constants() -> Outcome {
    let mut worst: f64 = 0.0;
    for c in [0.7, -2.5, 1e3] {
        let p = constant(c);
        let grid = graded(&p, 64);
        let g = solve_gradients(&p, &grid).map_err(|e| e.to_string())?;
        let d = solve_densities(&p, &grid).map_err(|e| e.to_string())?;
        let f = solve_fd(&p, &FdGrid::new(50, 50).unwrap()).map_err(|e| e.to_string())?;
        for (t, x) in lattice(&p) {
            let vals = [
                price_theta(&p, &g, t, x).unwrap(),
                price_images(&p, &g, t, x).unwrap(),
                price_hp(&p, &d, t, x).unwrap(),
                f.price(t, x).unwrap(),
            ];
            worst = worst.max(sup(vals.iter().map(|v| (v - c) / c.abs().max(1.0))));
        }
    }
    check(worst <= 1e-9, format!("worst relative deviation {worst:.1e}"))
}

fn interchangeable() -> Outcome {
    let (mut hp_gap, mut fd_gap): (f64, f64) = (0.0, 0.0);
    for (_, p) in regression() {
        let grid = graded(&p, 512);
        let g = solve_gradients(&p, &grid).map_err(|e| e.to_string())?;
        let d = solve_densities(&p, &grid).map_err(|e| e.to_string())?;
        let f = solve_fd(&p, &FdGrid::new(400, 400).unwrap()).map_err(|e| e.to_string())?;
        for (t, x) in lattice(&p) {
            let u = price_theta(&p, &g, t, x).unwrap();
            hp_gap = hp_gap.max((u - price_hp(&p, &d, t, x).unwrap()).abs());
            fd_gap = fd_gap.max((u - f.price(t, x).unwrap()).abs());
        }
    }
    check(hp_gap <= 1e-6 && fd_gap <= 1e-3, format!("git-hp {hp_gap:.1e}, git-fd {fd_gap:.1e}"))
}

fn random_query(rng: &mut StdRng) -> KernelQuery {
    let l = rng.gen_range(0.5..2.0);
    let ratio = 10f64.powf(rng.gen_range(-2.0..0.5));
    let y_tau = rng.gen_range(-1.0..1.0);
    let y_s = y_tau + rng.gen_range(-0.3..0.3);
    let z_s = y_s + l * rng.gen_range(0.7..1.3);
    let tau = 100.0;
    KernelQuery { tau, s: tau - ratio * l * l, xi: rng.gen_range(y_s..z_s), x: f64::NAN, y_tau, l_tau: l, y_s, z_s }
}

fn kernel_forms() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    let mut kernel_gap: f64 = 0.0;
    for i in 0..1000 {
        let q = random_query(&mut rng);
        let side = if i % 2 == 0 { Side::Lower } else { Side::Upper };
        type Kernel = fn(Side, &KernelQuery, Representation) -> dbarrier_core::Result<f64>;
        for k in [eta_kernel as Kernel, upsilon_kernel, lambda_kernel] {
            let v = [Representation::Image, Representation::Fourier, Representation::Theta]
                .map(|r| k(side, &q, r).map_err(|e| e.to_string()));
            let [a, b, c] = [v[0].clone()?, v[1].clone()?, v[2].clone()?];
            let scale = a.abs().max(1.0);
            kernel_gap = kernel_gap.max((a - b).abs().max((a - c).abs()) / scale);
        }
    }
    let mut poisson_gap: f64 = 0.0;
    for _ in 0..100 {
        let alpha = rng.gen_range(-2.0..2.0);
        let beta = 10f64.powf(rng.gen_range(-0.5..1.5));
        let p = poisson_pair(alpha, beta).map_err(|e| e.to_string())?;
        poisson_gap = poisson_gap
            .max((p.cos_lhs - p.cos_rhs).abs() / p.cos_lhs.abs().max(1.0))
            .max((p.sin_lhs - p.sin_rhs).abs() / p.sin_lhs.abs().max(1.0));
    }
    check(
        kernel_gap <= 1e-11 && poisson_gap <= 1e-12,
        format!("kernels {kernel_gap:.1e} over 1000 queries, poisson {poisson_gap:.1e} over 100 pairs"),
    )
}

fn term_ordering() -> Outcome {
    let mut rng = StdRng::seed_from_u64(11);
    let (mut small_ok, mut large_ok) = (0, 0);
    for band in [(-4.0, -2.0), (0.0, 1.0)] {
        for _ in 0..50 {
            let mut q = random_query(&mut rng);
            let ratio = 10f64.powf(rng.gen_range(band.0..band.1));
            q.s = q.tau - ratio * q.l_tau * q.l_tau;
            let im = term_count(&q, Representation::Image, 1e-14).map_err(|e| e.to_string())?;
            let fo = term_count(&q, Representation::Fourier, 1e-14).map_err(|e| e.to_string())?;
            if band.0 < 0.0 && im < fo {
                small_ok += 1;
            }
            if band.0 >= 0.0 && im > fo {
                large_ok += 1;
            }
        }
    }
    check(
        small_ok == 50 && large_ok == 50,
        format!("images fewer at small gaps {small_ok}/50, more at large gaps {large_ok}/50"),
    )
}

fn jump_relation() -> Outcome {
    type Density = fn(f64) -> f64;
    let cases: [(Density, CurveFn, f64); 10] = [
        (|_| 1.0, CurveFn::constant(0.0), 0.5),
        (|k| 1.0 + k, CurveFn::linear(0.0, 0.3), 0.4),
        (|k| (2.0 * k).cos(), CurveFn::linear(0.2, -0.5), 0.6),
        (|k| k * k, CurveFn::sinusoid(0.0, 0.2, 3.0, 0.1), 0.5),
        (|k| (-k).exp(), CurveFn::exponential(1.0, 0.5), 0.3),
        (|k| 2.0 - k, CurveFn::linear(-0.3, 1.0), 0.7),
        (|k| (3.0 * k).sin() + 0.5, CurveFn::constant(1.0), 0.8),
        (|k| k.sqrt(), CurveFn::linear(0.0, 0.1), 0.5),
        (|k| 1.0 / (1.0 + k), CurveFn::sinusoid(0.5, -0.1, 5.0, 0.0), 0.45),
        (|k| -0.7 + k * k * k, CurveFn::exponential(0.5, -0.4), 0.9),
    ];
    let mut worst: f64 = 0.0;
    for (omega, curve, tau) in cases {
        let j = jump_check(omega, &curve, tau);
        worst = worst.max((j.jump - omega(tau)).abs());
    }
    check(worst <= 1e-3, format!("worst |jump - density| {worst:.1e} over 10 pairs"))
}

fn bridge() -> Outcome {
    let p = eigen(0.5);
    let grid = graded(&p, 256);
    let g = solve_gradients(&p, &grid).map_err(|e| e.to_string())?;
    let d = solve_densities(&p, &grid).map_err(|e| e.to_string())?;
    let h = hp_to_git(&p, &d).map_err(|e| e.to_string())?;
    let gradient_gap = sup(h
        .psi_values()
        .iter()
        .zip(g.psi_values())
        .chain(h.phi_values().iter().zip(g.phi_values()))
        .map(|(a, b)| a - b));
    let mut round_trip: f64 = 0.0;
    for (_, p) in regression() {
        let d = solve_densities(&p, &graded(&p, 256)).map_err(|e| e.to_string())?;
        let h = hp_to_git(&p, &d).map_err(|e| e.to_string())?;
        for (t, x) in lattice(&p) {
            round_trip = round_trip.max((price_images(&p, &h, t, x).unwrap() - price_hp(&p, &d, t, x).unwrap()).abs());
        }
    }
    check(
        gradient_gap <= 1e-4 && round_trip <= 1e-5,
        format!("eigenfunction gradients {gradient_gap:.1e}, round-trip price {round_trip:.1e}"),
    )
}

fn orders() -> Outcome {
    let p = moving_exponential();
    let exact = ExactSolution::detect(&p).ok_or("no exact solution")?;
    let pts = lattice(&p);
    let sizes = [16, 32, 64, 128];
    let mut git = Vec::new();
    let mut hp = Vec::new();
    for n in sizes {
        let grid = graded(&p, n);
        let g = solve_gradients(&p, &grid).map_err(|e| e.to_string())?;
        let d = solve_densities(&p, &grid).map_err(|e| e.to_string())?;
        git.push(sup(pts.iter().map(|&(t, x)| price_theta(&p, &g, t, x).unwrap() - exact.value(t, x))));
        hp.push(sup(pts.iter().map(|&(t, x)| price_hp(&p, &d, t, x).unwrap() - exact.value(t, x))));
    }
    let ratios = |e: &[f64]| e.windows(2).map(|w| w[0] / w[1]).fold(f64::INFINITY, f64::min);
    let (rg, rh) = (ratios(&git), ratios(&hp));
    let fd: Vec<Vec<f64>> = [50, 100, 200]
        .iter()
        .map(|&m| {
            let f = solve_fd(&p, &FdGrid::new(m, m).unwrap()).unwrap();
            pts.iter().map(|&(t, x)| f.price(t, x).unwrap()).collect()
        })
        .collect();
    let diff = |a: &[f64], b: &[f64]| sup(a.iter().zip(b).map(|(u, v)| u - v));
    let order = (diff(&fd[1], &fd[0]) / diff(&fd[2], &fd[1])).log2();
    check(
        rg >= 1.8 && rh >= 1.8 && order >= 1.9,
        format!("min halving ratio git {rg:.2}, hp {rh:.2}; fd self-convergence order {order:.2}"),
    )
}

fn greeks_checks() -> Outcome {
    let (mut bump_gap, mut residual): (f64, f64) = (0.0, 0.0);
    let mut timing = Vec::new();
    for (_, p) in regression() {
        let g = solve_gradients(&p, &graded(&p, 256)).map_err(|e| e.to_string())?;
        for (tau, x) in lattice(&p).into_iter().filter(|&(t, _)| t > 0.1 && t < p.horizon()).step_by(3) {
            let h = 1e-4 * p.width(tau);
            let u = |x: f64| price_images(&p, &g, tau, x).unwrap();
            let dx = (u(x + h) - u(x - h)) / (2.0 * h);
            let dxx = (u(x + h) - 2.0 * u(x) + u(x - h)) / (h * h);
            let (ux, uxx) = spatial_greeks(&p, &g, tau, x).map_err(|e| e.to_string())?;
            bump_gap = bump_gap.max((ux - dx).abs()).max((uxx - dxx).abs());
            let k = 1e-4;
            let ut =
                (price_images(&p, &g, tau + k, x).unwrap() - price_images(&p, &g, tau - k, x).unwrap()) / (2.0 * k);
            residual = residual.max((ut - uxx).abs() / (1.0 + u(x).abs()));
        }
        let pts = lattice(&p);
        let run = |derivs: bool| {
            let start = Instant::now();
            for &(t, x) in &pts {
                price_images_detail(&p, &g, t, x, derivs).unwrap();
            }
            start.elapsed().as_secs_f64()
        };
        let mut plain: Vec<f64> = (0..5).map(|_| run(false)).collect();
        let mut with: Vec<f64> = (0..5).map(|_| run(true)).collect();
        plain.sort_by(f64::total_cmp);
        with.sort_by(f64::total_cmp);
        timing.push(with[2] / plain[2]);
    }
    let ratio = timing.iter().cloned().fold(0.0, f64::max);
    check(
        bump_gap <= 1e-5 && residual <= 1e-5 && ratio <= 1.5,
        format!("bump gap {bump_gap:.1e}, pde residual {residual:.1e}, price+greeks / price {ratio:.2}"),
    )
}

fn performance_report() -> Outcome {
    let p = regression().remove(0).1;
    let time = |f: &dyn Fn()| {
        let start = Instant::now();
        f();
        start.elapsed().as_secs_f64()
    };
    let git = time(&|| {
        solve_gradients(&p, &graded(&p, 256)).unwrap();
    });
    let hp = time(&|| {
        solve_densities(&p, &graded(&p, 256)).unwrap();
    });
    let fd = time(&|| {
        solve_fd(&p, &FdGrid::new(400, 400).unwrap()).unwrap();
    });
    Ok(format!("git N=256 {git:.3} s, hp N=256 {hp:.3} s, fd 400x400 {fd:.3} s (report only)"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("eigenfunction reproduction", eigenfunction),
        ("constant preservation", constants),
        ("method interchangeability", interchangeable),
        ("kernel representations and poisson identities", kernel_forms),
        ("series complementarity", term_ordering),
        ("double-layer jump relation", jump_relation),
        ("density to gradient bridge", bridge),
        ("convergence orders", orders),
        ("greeks", greeks_checks),
        ("relative performance", performance_report),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(run)
            .unwrap_or_else(|e| Err(e.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".into())));
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
