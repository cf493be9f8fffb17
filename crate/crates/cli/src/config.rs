//! Job configuration: a TOML document with `[problem]`, `[solver]` and
//! `[output]` sections.

use std::fmt;
use std::path::{Path, PathBuf};

use dbarrier_core::problem::reduction::{reduce_model, BarrierContract, ModelKind, ModelSpec, Payoff, ReductionMap};
use dbarrier_core::problem::{CurveFn, CurveKind, HeatStripProblem, InitialProfile};
use dbarrier_core::Spacing;
use serde::Deserialize;

/// A config problem tied to a line of the source file.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: PathBuf,
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.path.display(), self.line, self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub problem: ProblemSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    pub kind: String,
    #[serde(default)]
    pub params: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PayoffSpec {
    pub kind: String,
    pub strike: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    #[serde(default = "default_model")]
    pub model: String,
    /// Heat horizon for heat-native problems, calendar maturity otherwise.
    pub horizon: f64,
    pub lower: CurveSpec,
    pub upper: CurveSpec,
    pub rebate_lower: Option<CurveSpec>,
    pub rebate_upper: Option<CurveSpec>,
    pub initial: Option<CurveSpec>,
    pub payoff: Option<PayoffSpec>,
    pub rate: Option<CurveSpec>,
    pub vol: Option<CurveSpec>,
    pub kappa: Option<CurveSpec>,
    pub theta: Option<CurveSpec>,
}

fn default_model() -> String {
    "heat-native".into()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub git_steps: usize,
    pub hp_steps: usize,
    pub fd_space: usize,
    pub fd_time: usize,
    pub fd: bool,
    pub spacing: String,
    pub representation: String,
    pub greeks: bool,
    pub converge_steps: Vec<usize>,
    pub fd_converge: Vec<usize>,
    pub bench_repeats: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            git_steps: 256,
            hp_steps: 256,
            fd_space: 400,
            fd_time: 400,
            fd: true,
            spacing: "graded".into(),
            representation: "auto".into(),
            greeks: true,
            converge_steps: vec![16, 32, 64, 128],
            fd_converge: vec![50, 100, 200, 400],
            bench_repeats: 5,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub tau_count: usize,
    pub x_count: usize,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub csv: Option<PathBuf>,
    /// (tau, x) in heat coordinates.
    pub points: Vec<[f64; 2]>,
    /// (t, S) in market coordinates.
    pub spots: Vec<[f64; 2]>,
    pub lattice: Option<LatticeSpec>,
}

/// Which semi-analytic price columns a job fills.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Representation {
    Auto,
    Theta,
    Images,
    Hp,
}

impl Representation {
    fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "auto" => Self::Auto,
            "theta" => Self::Theta,
            "images" => Self::Images,
            "hp" => Self::Hp,
            _ => return None,
        })
    }

    pub fn theta(self) -> bool {
        matches!(self, Self::Auto | Self::Theta)
    }

    pub fn images(self) -> bool {
        matches!(self, Self::Auto | Self::Images)
    }

    pub fn hp(self) -> bool {
        matches!(self, Self::Auto | Self::Hp)
    }
}

/// A parsed and checked job.
#[derive(Debug, Clone)]
pub struct Job {
    pub config: JobConfig,
    pub problem: HeatStripProblem,
    pub map: ReductionMap,
    pub spacing: Spacing,
    pub representation: Representation,
    /// Evaluation points in heat coordinates.
    pub points: Vec<(f64, f64)>,
}

struct Source<'a> {
    path: &'a Path,
    text: &'a str,
}

impl Source<'_> {
    fn line_of_offset(&self, offset: usize) -> usize {
        self.text[..offset.min(self.text.len())].matches('\n').count() + 1
    }

    /// First line that assigns `key` or opens a table named `key`.
    fn line_of(&self, key: &str) -> usize {
        for (i, raw) in self.text.lines().enumerate() {
            let line = raw.trim_start();
            let hit = line
                .strip_prefix(key)
                .map(|rest| rest.trim_start().starts_with('=') || rest.trim_start().starts_with('.'))
                .unwrap_or(false)
                || line.trim_end() == format!("[{key}]")
                || line.trim_end() == format!("[problem.{key}]");
            if hit {
                return i + 1;
            }
        }
        1
    }

    fn err(&self, key: &str, message: impl Into<String>) -> ConfigError {
        ConfigError { path: self.path.to_path_buf(), line: self.line_of(key), message: message.into() }
    }
}

pub fn load(path: &Path) -> Result<Job, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
        path: path.to_path_buf(),
        line: 0,
        message: format!("cannot read config: {e}"),
    })?;
    parse(path, &text)
}

pub fn parse(path: &Path, text: &str) -> Result<Job, ConfigError> {
    let src = Source { path, text };
    let config: JobConfig = toml::from_str(text).map_err(|e| ConfigError {
        path: path.to_path_buf(),
        line: e.span().map(|s| src.line_of_offset(s.start)).unwrap_or(1),
        message: e.message().to_string(),
    })?;
    check_finite(&src, &config)?;

    let s = &config.solver;
    for (key, v, min) in [
        ("git_steps", s.git_steps, 1),
        ("hp_steps", s.hp_steps, 1),
        ("fd_space", s.fd_space, 8),
        ("fd_time", s.fd_time, 8),
        ("bench_repeats", s.bench_repeats, 5),
    ] {
        if v < min {
            return Err(src.err(key, format!("{key} must be at least {min}, got {v}")));
        }
    }
    if s.converge_steps.len() < 2 || s.converge_steps.contains(&0) {
        return Err(src.err("converge_steps", "converge_steps needs at least two positive sizes"));
    }
    if s.fd_converge.len() < 2 || s.fd_converge.iter().any(|&n| n < 8) {
        return Err(src.err("fd_converge", "fd_converge needs at least two sizes of 8 or more"));
    }
    let spacing =
        Spacing::parse(&s.spacing).ok_or_else(|| src.err("spacing", format!("unknown spacing `{}`", s.spacing)))?;
    let representation = Representation::parse(&s.representation)
        .ok_or_else(|| src.err("representation", format!("unknown representation `{}`", s.representation)))?;

    let (problem, map) = build_problem(&src, &config.problem)?;
    let report = problem.validate();
    if let Some(v) = report.violations.iter().find(|v| v.is_fatal()) {
        let key = match v {
            dbarrier_core::problem::Violation::StripCollapse { .. } => "upper",
            dbarrier_core::problem::Violation::InvalidHorizon(_) => "horizon",
            _ => "problem",
        };
        return Err(src.err(key, v.to_string()));
    }

    let points = eval_points(&src, &config.output, &problem, &map)?;
    Ok(Job { config, problem, map, spacing, representation, points })
}

fn check_finite(src: &Source, c: &JobConfig) -> Result<(), ConfigError> {
    let p = &c.problem;
    let mut curves: Vec<(&str, &CurveSpec)> = vec![("lower", &p.lower), ("upper", &p.upper)];
    for (k, v) in [
        ("rebate_lower", &p.rebate_lower),
        ("rebate_upper", &p.rebate_upper),
        ("initial", &p.initial),
        ("rate", &p.rate),
        ("vol", &p.vol),
        ("kappa", &p.kappa),
        ("theta", &p.theta),
    ] {
        if let Some(v) = v {
            curves.push((k, v));
        }
    }
    if !p.horizon.is_finite() {
        return Err(src.err("horizon", "horizon must be finite"));
    }
    for (k, v) in curves {
        if v.params.iter().any(|x| !x.is_finite()) {
            return Err(src.err(k, format!("{k} parameters must be finite")));
        }
    }
    if let Some(pay) = &p.payoff {
        if !pay.strike.is_finite() {
            return Err(src.err("payoff", "strike must be finite"));
        }
    }
    let o = &c.output;
    if o.points.iter().chain(&o.spots).flatten().any(|x| !x.is_finite()) {
        return Err(src.err("points", "evaluation points must be finite"));
    }
    Ok(())
}

fn curve(src: &Source, key: &str, spec: &CurveSpec) -> Result<CurveFn, ConfigError> {
    let kind = CurveKind::parse(&spec.kind)
        .ok_or_else(|| src.err(key, format!("unknown curve kind `{}` for {key}", spec.kind)))?;
    CurveFn::from_params(kind, &spec.params).map_err(|e| src.err(key, format!("{key}: {e}")))
}

fn optional_curve(src: &Source, key: &str, spec: &Option<CurveSpec>) -> Result<CurveFn, ConfigError> {
    match spec {
        Some(s) => curve(src, key, s),
        None => Ok(CurveFn::constant(0.0)),
    }
}

fn required<'a, T>(src: &Source, key: &str, v: &'a Option<T>, model: &str) -> Result<&'a T, ConfigError> {
    v.as_ref().ok_or_else(|| src.err("model", format!("model `{model}` needs `{key}`")))
}

fn build_problem(src: &Source, p: &ProblemSection) -> Result<(HeatStripProblem, ReductionMap), ConfigError> {
    let kind = ModelKind::parse(&p.model).map_err(|e| src.err("model", e.to_string()))?;
    if p.horizon.is_nan() || p.horizon <= 0.0 {
        return Err(src.err("horizon", format!("horizon must be positive, got {}", p.horizon)));
    }
    let lower = curve(src, "lower", &p.lower)?;
    let upper = curve(src, "upper", &p.upper)?;
    let rebate_lower = optional_curve(src, "rebate_lower", &p.rebate_lower)?;
    let rebate_upper = optional_curve(src, "rebate_upper", &p.rebate_upper)?;
    if kind == ModelKind::HeatNative {
        for (key, present) in [("payoff", p.payoff.is_some()), ("rate", p.rate.is_some()), ("vol", p.vol.is_some())] {
            if present {
                return Err(src.err(key, format!("`{key}` is not used by heat-native problems")));
            }
        }
        let init = required(src, "initial", &p.initial, &p.model)?;
        let initial = InitialProfile::from_params(&init.kind, &init.params)
            .map_err(|e| src.err("initial", format!("initial: {e}")))?;
        let problem = HeatStripProblem::new(lower, upper, rebate_lower, rebate_upper, initial, p.horizon);
        return Ok((problem, ReductionMap::identity(p.horizon)));
    }
    if p.initial.is_some() {
        return Err(src.err("initial", "market models take `payoff`, not `initial`"));
    }
    let pay = required(src, "payoff", &p.payoff, &p.model)?;
    let payoff = match pay.kind.as_str() {
        "call" => Payoff::Call { strike: pay.strike },
        "put" => Payoff::Put { strike: pay.strike },
        other => return Err(src.err("payoff", format!("unknown payoff `{other}`"))),
    };
    let contract = BarrierContract {
        maturity: p.horizon,
        lower_barrier: lower,
        upper_barrier: upper,
        rebate_lower,
        rebate_upper,
        payoff,
    };
    let rate = curve(src, "rate", required(src, "rate", &p.rate, &p.model)?)?;
    let vol = curve(src, "vol", required(src, "vol", &p.vol, &p.model)?)?;
    let spec = match kind {
        ModelKind::BsTimeDep => ModelSpec::BlackScholes { rate, vol, contract },
        _ => ModelSpec::OrnsteinUhlenbeck {
            rate,
            kappa: curve(src, "kappa", required(src, "kappa", &p.kappa, &p.model)?)?,
            theta: curve(src, "theta", required(src, "theta", &p.theta, &p.model)?)?,
            vol,
            contract,
        },
    };
    let (problem, map) = reduce_model(&spec).map_err(|e| src.err("model", e.to_string()))?;
    Ok((problem, map))
}

fn eval_points(
    src: &Source,
    out: &OutputSection,
    problem: &HeatStripProblem,
    map: &ReductionMap,
) -> Result<Vec<(f64, f64)>, ConfigError> {
    let horizon = problem.horizon();
    let mut pts: Vec<(f64, f64)> = out.points.iter().map(|p| (p[0], p[1])).collect();
    for s in &out.spots {
        if !(s[0] >= 0.0 && s[0] <= map.maturity()) {
            return Err(src.err("spots", format!("spot time {} outside [0, {}]", s[0], map.maturity())));
        }
        pts.push(map.forward(s[0], s[1]));
    }
    let lattice = match (&out.lattice, pts.is_empty()) {
        (Some(l), _) => Some((l.tau_count, l.x_count)),
        (None, true) => Some((10, 10)),
        (None, false) => None,
    };
    if let Some((nt, nx)) = lattice {
        if nt == 0 || nx == 0 {
            return Err(src.err("lattice", "lattice counts must be positive"));
        }
        for j in 1..=nt {
            let tau = horizon * j as f64 / nt as f64;
            let (y, z) = (problem.lower().value(tau), problem.upper().value(tau));
            for k in 1..=nx {
                pts.push((tau, y + (z - y) * k as f64 / (nx + 1) as f64));
            }
        }
    }
    for &(tau, x) in &pts {
        if !(0.0..=horizon * (1.0 + 1e-12)).contains(&tau) {
            return Err(src.err("points", format!("tau={tau} outside [0, {horizon}]")));
        }
        let (y, z) = (problem.lower().value(tau), problem.upper().value(tau));
        if x < y || x > z {
            return Err(src.err("points", format!("x={x} outside the strip [{y}, {z}] at tau={tau}")));
        }
    }
    Ok(pts)
}
