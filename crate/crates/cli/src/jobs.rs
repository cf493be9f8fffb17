//! The four commands, each producing a table.

use std::time::Instant;

use dbarrier_core::fd::{solve_fd, FdGrid, FdSurface};
use dbarrier_core::git::{price_images, price_images_detail, price_theta, solve_gradients, GradientPair};
use dbarrier_core::greeks::greeks;
use dbarrier_core::hp::{price_hp, solve_densities, PotentialPair};
use dbarrier_core::kernels::{term_count, KernelQuery, Representation as Series};
use dbarrier_core::problem::{ExactSolution, HeatStripProblem};
use dbarrier_core::{Error, TimeGrid};

use crate::config::Job;
use crate::table::{Cell, Table};

/// Splits `items` into contiguous chunks over `threads` workers and
/// returns the results in input order.
pub fn par_map<T, R, F>(items: &[T], threads: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let threads = threads.max(1).min(items.len().max(1));
    if threads == 1 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(threads);
    std::thread::scope(|scope| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|c| {
                let f = &f;
                scope.spawn(move || c.iter().map(f).collect::<Vec<R>>())
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

fn grid(job: &Job, steps: usize) -> Result<TimeGrid, Error> {
    TimeGrid::new(job.spacing, job.problem.horizon(), steps)
}

struct Solved {
    git: Option<GradientPair>,
    hp: Option<PotentialPair>,
    fd: Option<FdSurface>,
}

fn solve_all(job: &Job) -> Result<Solved, Error> {
    let s = &job.config.solver;
    let r = job.representation;
    let p = &job.problem;
    let git =
        if r.theta() || r.images() || s.greeks { Some(solve_gradients(p, &grid(job, s.git_steps)?)?) } else { None };
    let hp = if r.hp() { Some(solve_densities(p, &grid(job, s.hp_steps)?)?) } else { None };
    let fd = if s.fd { Some(solve_fd(p, &FdGrid::new(s.fd_space, s.fd_time)?)?) } else { None };
    Ok(Solved { git, hp, fd })
}

pub const PRICE_HEADER: [&str; 15] = [
    "tau",
    "x",
    "price_git_theta",
    "price_git_images",
    "price_hp",
    "price_fd",
    "dudx",
    "d2udx2",
    "dudtau",
    "t",
    "spot",
    "value",
    "delta",
    "gamma",
    "theta",
];

pub fn price(job: &Job, threads: usize) -> Result<Table, Error> {
    let solved = solve_all(job)?;
    let r = job.representation;
    let p = &job.problem;
    let want_greeks = job.config.solver.greeks;
    let rows = par_map(&job.points, threads, |&(tau, x)| -> Result<Vec<Cell>, Error> {
        let g = solved.git.as_ref();
        let theta = match (r.theta(), g) {
            (true, Some(g)) => Cell::Num(price_theta(p, g, tau, x)?),
            _ => Cell::Empty,
        };
        let images = match (r.images(), g) {
            (true, Some(g)) => Cell::Num(price_images(p, g, tau, x)?),
            _ => Cell::Empty,
        };
        let hp = match &solved.hp {
            Some(d) => Cell::Num(price_hp(p, d, tau, x)?),
            None => Cell::Empty,
        };
        let fd = match &solved.fd {
            Some(f) => Cell::Num(f.price(tau, x)?),
            None => Cell::Empty,
        };
        let (t, spot) = job.map.inverse(tau, x);
        let mut row = vec![Cell::Num(tau), Cell::Num(x), theta.clone(), images.clone(), hp.clone(), fd];
        match (want_greeks, g) {
            (true, Some(g)) => {
                let set = greeks(p, g, &job.map, tau, x)?;
                row.extend(
                    [set.ux, set.uxx, set.uxx, t, spot, set.price, set.delta, set.gamma, set.theta].map(Cell::Num),
                );
            }
            _ => {
                let u = [&images, &theta, &hp].into_iter().find_map(|c| match c {
                    Cell::Num(v) => Some(*v),
                    _ => None,
                });
                row.extend([Cell::Empty, Cell::Empty, Cell::Empty, Cell::Num(t), Cell::Num(spot)]);
                row.push(u.map_or(Cell::Empty, |u| Cell::Num(job.map.scaling(t) * u)));
                row.extend([Cell::Empty, Cell::Empty, Cell::Empty]);
            }
        }
        Ok(row)
    });
    Ok(Table { header: PRICE_HEADER.to_vec(), rows: rows.into_iter().collect::<Result<_, _>>()? })
}

pub const CONVERGE_HEADER: [&str; 8] =
    ["section", "method", "size", "error", "order", "gap_ratio", "image_terms", "fourier_terms"];

/// Sup-norm error of each method against the exact solution, or against a
/// Richardson extrapolation of its two finest sizes.
pub fn converge(job: &Job, threads: usize) -> Result<Table, Error> {
    let p = &job.problem;
    let s = &job.config.solver;
    let r = job.representation;
    let exact = ExactSolution::detect(p);
    let pts = &job.points;
    let mut rows = Vec::new();

    type Run<'a> = Box<dyn Fn(usize) -> Result<Vec<f64>, Error> + Sync + 'a>;
    let mut methods: Vec<(&str, Vec<usize>, Run)> = Vec::new();
    if r.theta() || r.images() {
        let use_theta = r.theta();
        methods.push((
            if use_theta { "git_theta" } else { "git_images" },
            s.converge_steps.clone(),
            Box::new(move |n| {
                let g = solve_gradients(p, &grid(job, n)?)?;
                par_map(
                    pts,
                    threads,
                    |&(t, x)| {
                        if use_theta {
                            price_theta(p, &g, t, x)
                        } else {
                            price_images(p, &g, t, x)
                        }
                    },
                )
                .into_iter()
                .collect()
            }),
        ));
    }
    if r.hp() {
        methods.push((
            "hp",
            s.converge_steps.clone(),
            Box::new(move |n| {
                let d = solve_densities(p, &grid(job, n)?)?;
                par_map(pts, threads, |&(t, x)| price_hp(p, &d, t, x)).into_iter().collect()
            }),
        ));
    }
    if s.fd {
        methods.push((
            "fd",
            s.fd_converge.clone(),
            Box::new(move |n| {
                let f = solve_fd(p, &FdGrid::new(n, n)?)?;
                pts.iter().map(|&(t, x)| f.price(t, x)).collect()
            }),
        ));
    }

    for (name, sizes, run) in &methods {
        let values: Vec<Vec<f64>> = sizes.iter().map(|&n| run(n)).collect::<Result<_, _>>()?;
        let reference: Vec<f64> = match &exact {
            Some(e) => pts.iter().map(|&(t, x)| e.value(t, x)).collect(),
            None => {
                let k = values.len();
                let ratio = sizes[k - 1] as f64 / sizes[k - 2] as f64;
                let f = ratio * ratio - 1.0;
                values[k - 1].iter().zip(&values[k - 2]).map(|(a, b)| a + (a - b) / f).collect()
            }
        };
        // Errors at round-off level carry no order.
        let floor = 1e-12 * reference.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let mut prev: Option<(usize, f64)> = None;
        for (n, v) in sizes.iter().zip(&values) {
            let err = v.iter().zip(&reference).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            let order = match prev {
                Some((m, e)) if err > floor && e > floor => Cell::Num((e / err).ln() / (*n as f64 / m as f64).ln()),
                _ => Cell::Empty,
            };
            rows.push(vec![
                Cell::Text("order".into()),
                Cell::Text(name.to_string()),
                Cell::Int(*n as i64),
                Cell::Num(err),
                order,
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
            ]);
            prev = Some((*n, err));
        }
    }

    let l = p.width(p.horizon());
    for ratio in [1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0] {
        let d = ratio * l * l;
        let q = KernelQuery { tau: d, s: 0.0, xi: 0.37 * l, x: f64::NAN, y_tau: 0.0, l_tau: l, y_s: 0.0, z_s: l };
        rows.push(vec![
            Cell::Text("terms".into()),
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            Cell::Num(ratio),
            Cell::Int(term_count(&q, Series::Image, 1e-14)? as i64),
            Cell::Int(term_count(&q, Series::Fourier, 1e-14)? as i64),
        ]);
    }
    Ok(Table { header: CONVERGE_HEADER.to_vec(), rows })
}

pub const BENCH_HEADER: [&str; 4] = ["metric", "size", "median_seconds", "repeats"];

fn median<F: FnMut() -> Result<(), Error>>(repeats: usize, mut f: F) -> Result<f64, Error> {
    let mut times = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let start = Instant::now();
        f()?;
        times.push(start.elapsed().as_secs_f64());
    }
    times.sort_by(|a, b| a.total_cmp(b));
    Ok(times[times.len() / 2])
}

/// Median wall-clock times of the solves and of pricing with and without
/// Greeks, single-threaded.
pub fn bench(job: &Job) -> Result<Table, Error> {
    let p = &job.problem;
    let s = &job.config.solver;
    let reps = s.bench_repeats;
    let mut rows = Vec::new();
    let mut push = |metric: &str, size: usize, secs: f64| {
        rows.push(vec![Cell::Text(metric.into()), Cell::Int(size as i64), Cell::Num(secs), Cell::Int(reps as i64)]);
    };
    let git_grid = grid(job, s.git_steps)?;
    push("git_solve", s.git_steps, median(reps, || solve_gradients(p, &git_grid).map(drop))?);
    let hp_grid = grid(job, s.hp_steps)?;
    push("hp_solve", s.hp_steps, median(reps, || solve_densities(p, &hp_grid).map(drop))?);
    let fd_grid = FdGrid::new(s.fd_space, s.fd_time)?;
    push("fd_solve", s.fd_space * s.fd_time, median(reps, || solve_fd(p, &fd_grid).map(drop))?);

    let g = solve_gradients(p, &git_grid)?;
    let interior: Vec<(f64, f64)> = job.points.iter().copied().filter(|&(t, x)| interior(p, t, x)).collect();
    let count = interior.len().max(1);
    let plain = median(reps, || {
        for &(t, x) in &interior {
            price_images_detail(p, &g, t, x, false)?;
        }
        Ok(())
    })?;
    let with = median(reps, || {
        for &(t, x) in &interior {
            price_images_detail(p, &g, t, x, true)?;
        }
        Ok(())
    })?;
    push("price_point", interior.len(), plain / count as f64);
    push("price_greeks_point", interior.len(), with / count as f64);
    rows.push(vec![
        Cell::Text("greeks_ratio".into()),
        Cell::Int(interior.len() as i64),
        Cell::Num(if plain > 0.0 { with / plain } else { f64::NAN }),
        Cell::Int(reps as i64),
    ]);
    Ok(Table { header: BENCH_HEADER.to_vec(), rows })
}

fn interior(p: &HeatStripProblem, tau: f64, x: f64) -> bool {
    let (y, z) = (p.lower().value(tau), p.upper().value(tau));
    tau > 0.0 && x - y >= 0.01 * (z - y) && z - x >= 0.01 * (z - y)
}

/// Validation report lines, and whether the problem is usable.
pub fn validate(job: &Job) -> (Vec<String>, bool) {
    let report = job.problem.validate();
    let mut lines = vec![format!("model {} with heat horizon {}", job.map.kind().name(), job.problem.horizon())];
    for v in &report.violations {
        lines.push(format!("{}: {v}", if v.is_fatal() { "error" } else { "warning" }));
    }
    lines.push(format!("{} evaluation points", job.points.len()));
    (lines, report.is_valid())
}
