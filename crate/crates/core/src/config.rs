//! Line-oriented experiment configuration.
//!
//! ```text
//! # comment
//! problem.initial  = gaussian
//! problem.reaction = clamped_logistic(2)
//! grid.dx    = 0.05
//! grid.alpha = 0.25
//! testfn.bump.centre = 0, 0.5, 1, 0.4, 1
//! ```
//!
//! Every key is known in advance; unknown or repeated keys are errors. Exactly
//! one of `grid.dt` and `grid.alpha` must be given.

use std::collections::BTreeMap;
use std::path::PathBuf;

use thiserror::Error;

use crate::grid::{make_grid, required_depth, GridSpec};
use crate::harness::Window;
use crate::initial::InitialData;
use crate::reactions::{make_builtin, ReactionTerm};
use crate::scheme::ProblemSpec;
use crate::testfn::BumpTestFunction;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    pub dx: f64,
    pub dt: f64,
    pub alpha: f64,
    pub x_window: f64,
    pub t_final: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceChoice {
    Oracle,
    Finest,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergeConfig {
    pub dx_list: Vec<f64>,
    pub alpha: f64,
    pub window: Window,
    pub reference: ReferenceChoice,
    pub order_range: Option<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnstableConfig {
    pub alpha: f64,
    pub steps: usize,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    pub csv: bool,
    pub json: bool,
    pub level_stride: usize,
    pub column_stride: usize,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    pub grid: GridConfig,
    pub tbar: f64,
    /// Labelled bumps, ordered by label.
    pub bumps: Vec<(String, BumpTestFunction)>,
    pub converge: Option<ConvergeConfig>,
    pub unstable: Option<UnstableConfig>,
    pub output: OutputConfig,
}

impl ExperimentConfig {
    /// Grid covering `[-X, X] x [0, T]`.
    pub fn grid_spec(&self, allow_unstable: bool) -> crate::error::Result<GridSpec> {
        let g = &self.grid;
        let depth = required_depth(g.x_window, g.t_final, g.dx, g.dt)?;
        make_grid(g.dx, g.dt, depth, self.problem.diffusion, allow_unstable)
    }
}

struct Entry {
    line: usize,
    value: String,
}

const KEYS: &[&str] = &[
    "problem.initial",
    "problem.reaction",
    "problem.diffusion",
    "problem.sup_bound",
    "problem.lipschitz",
    "grid.dx",
    "grid.dt",
    "grid.alpha",
    "grid.x_window",
    "grid.t_final",
    "estimates.tbar",
    "converge.dx_list",
    "converge.alpha",
    "converge.x_window",
    "converge.t_eval",
    "converge.stride",
    "converge.reference",
    "converge.order_min",
    "converge.order_max",
    "unstable.alpha",
    "unstable.steps",
    "unstable.epsilon",
    "output.dir",
    "output.formats",
    "output.level_stride",
    "output.column_stride",
];

const BUMP_PREFIX: &str = "testfn.bump.";

struct Table {
    entries: BTreeMap<String, Entry>,
}

impl Table {
    fn take(&mut self, key: &str) -> Option<Entry> {
        self.entries.remove(key)
    }

    fn number(&mut self, key: &str) -> Result<Option<(f64, usize)>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some(e) => parse_number(&e.value)
                .map(|v| Some((v, e.line)))
                .map_err(|message| ConfigError::Line { line: e.line, message: format!("{key}: {message}") }),
        }
    }

    fn required_number(&mut self, key: &str) -> Result<(f64, usize), ConfigError> {
        self.number(key)?
            .ok_or_else(|| ConfigError::Invalid(format!("missing required key `{key}`")))
    }

    fn count(&mut self, key: &str) -> Result<Option<usize>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some(e) => e.value.trim().parse::<usize>().map(Some).map_err(|_| ConfigError::Line {
                line: e.line,
                message: format!("{key}: expected a nonnegative integer, got `{}`", e.value),
            }),
        }
    }
}

fn parse_number(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("expected a number, got `{}`", s.trim()))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("expected a finite number, got `{}`", s.trim()))
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(parse_number).collect()
}

/// `name` or `name(p1, p2, ...)`.
fn parse_call(s: &str) -> Result<(String, Vec<f64>), String> {
    let s = s.trim();
    match s.find('(') {
        None => Ok((s.to_string(), Vec::new())),
        Some(open) => {
            let inner = s[open + 1..]
                .strip_suffix(')')
                .ok_or_else(|| format!("unbalanced parentheses in `{s}`"))?;
            let params = if inner.trim().is_empty() { Vec::new() } else { parse_list(inner)? };
            Ok((s[..open].trim().to_string(), params))
        }
    }
}

fn line_err(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError::Line { line, message: message.into() }
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut entries = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| line_err(line, format!("expected `key = value`, got `{content}`")))?;
        let key = key.trim().to_string();
        let known = KEYS.contains(&key.as_str())
            || key
                .strip_prefix(BUMP_PREFIX)
                .is_some_and(|l| !l.is_empty() && l.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-'));
        if !known {
            return Err(line_err(line, format!("unknown key `{key}`")));
        }
        if let Some(prev) = entries.get(&key) {
            let Entry { line: first, .. } = prev;
            return Err(line_err(line, format!("duplicate key `{key}` (first set on line {first})")));
        }
        entries.insert(key, Entry { line, value: value.trim().to_string() });
    }
    let mut table = Table { entries };

    // problem
    let initial_entry = table
        .take("problem.initial")
        .ok_or_else(|| ConfigError::Invalid("missing required key `problem.initial`".into()))?;
    let (name, params) = parse_call(&initial_entry.value).map_err(|m| line_err(initial_entry.line, m))?;
    let initial = InitialData::parse(&name, &params).map_err(|e| line_err(initial_entry.line, e.to_string()))?;

    let reaction = match table.take("problem.reaction") {
        None => ReactionTerm::zero(),
        Some(e) => {
            let (name, params) = parse_call(&e.value).map_err(|m| line_err(e.line, m))?;
            make_builtin(&name, &params).map_err(|err| line_err(e.line, err.to_string()))?
        }
    };
    let diffusion = match table.number("problem.diffusion")? {
        None => 1.0,
        Some((d, _)) if d > 0.0 => d,
        Some((d, line)) => return Err(line_err(line, format!("problem.diffusion must be positive, got {d}"))),
    };
    let sup_bound = table.number("problem.sup_bound")?;
    let lipschitz = table.number("problem.lipschitz")?;
    let m = match (sup_bound, initial.sup_bound()) {
        (Some((v, _)), _) => v,
        (None, Some(v)) => v,
        (None, None) => return Err(ConfigError::Invalid("problem.sup_bound is required for this initial datum".into())),
    };
    let l = match (lipschitz, initial.lipschitz()) {
        (Some((v, _)), _) => v,
        (None, Some(v)) => v,
        (None, None) => return Err(ConfigError::Invalid("problem.lipschitz is required for this initial datum".into())),
    };
    let problem = ProblemSpec::with_bounds(diffusion, reaction, initial, m, l)
        .map_err(|e| ConfigError::Invalid(e.to_string()))?;

    // grid
    let (dx, dx_line) = table.required_number("grid.dx")?;
    if dx <= 0.0 {
        return Err(line_err(dx_line, "grid.dx must be positive"));
    }
    let (dt, alpha) = match (table.number("grid.dt")?, table.number("grid.alpha")?) {
        (Some((_, a)), Some((_, b))) => {
            return Err(line_err(a.max(b), "give either grid.dt or grid.alpha, not both"));
        }
        (Some((dt, line)), None) => {
            if dt <= 0.0 {
                return Err(line_err(line, "grid.dt must be positive"));
            }
            (dt, diffusion * dt / (dx * dx))
        }
        (None, Some((alpha, line))) => {
            if alpha <= 0.0 {
                return Err(line_err(line, "grid.alpha must be positive"));
            }
            (alpha * dx * dx / diffusion, alpha)
        }
        (None, None) => return Err(ConfigError::Invalid("one of grid.dt or grid.alpha is required".into())),
    };
    let x_window = table.number("grid.x_window")?.map_or(2.0, |v| v.0);
    let t_final = table.number("grid.t_final")?.map_or(1.0, |v| v.0);
    if x_window < 0.0 || t_final < 0.0 {
        return Err(ConfigError::Invalid("grid.x_window and grid.t_final must be nonnegative".into()));
    }
    let grid = GridConfig { dx, dt, alpha, x_window, t_final };

    let tbar = match table.number("estimates.tbar")? {
        None => t_final,
        Some((v, _)) if v > 0.0 && v <= t_final => v,
        Some((v, line)) => return Err(line_err(line, format!("estimates.tbar must lie in (0, {t_final}], got {v}"))),
    };

    // bumps
    let bump_keys: Vec<String> = table.entries.keys().filter(|k| k.starts_with(BUMP_PREFIX)).cloned().collect();
    let mut bumps = Vec::new();
    for key in bump_keys {
        let e = table.take(&key).expect("listed");
        let v = parse_list(&e.value).map_err(|m| line_err(e.line, m))?;
        if v.len() != 5 {
            return Err(line_err(e.line, "a bump is `x_center, t_center, x_radius, t_radius, amplitude`"));
        }
        if v[2] <= 0.0 || v[3] <= 0.0 {
            return Err(line_err(e.line, "bump radii must be positive"));
        }
        bumps.push((key[BUMP_PREFIX.len()..].to_string(), BumpTestFunction::new(v[0], v[1], v[2], v[3], v[4])));
    }

    // convergence study
    let converge = match table.take("converge.dx_list") {
        None => None,
        Some(e) => {
            let dx_list = parse_list(&e.value).map_err(|m| line_err(e.line, m))?;
            let alpha = table.number("converge.alpha")?.map_or(alpha, |v| v.0);
            let window = Window {
                x_half: table.number("converge.x_window")?.map_or(x_window, |v| v.0),
                t_eval: table.number("converge.t_eval")?.map_or(t_final, |v| v.0),
                stride: table.count("converge.stride")?.unwrap_or(1),
            };
            let reference = match table.take("converge.reference") {
                None => ReferenceChoice::Oracle,
                Some(r) => match r.value.as_str() {
                    "oracle" => ReferenceChoice::Oracle,
                    "finest" => ReferenceChoice::Finest,
                    other => return Err(line_err(r.line, format!("converge.reference must be `oracle` or `finest`, got `{other}`"))),
                },
            };
            let order_range = match (table.number("converge.order_min")?, table.number("converge.order_max")?) {
                (None, None) => None,
                (lo, hi) => Some((lo.map_or(f64::NEG_INFINITY, |v| v.0), hi.map_or(f64::INFINITY, |v| v.0))),
            };
            Some(ConvergeConfig { dx_list, alpha, window, reference, order_range })
        }
    };

    let unstable = match table.number("unstable.alpha")? {
        None => None,
        Some((alpha, _)) => Some(UnstableConfig {
            alpha,
            steps: table.count("unstable.steps")?.unwrap_or(50),
            epsilon: table.number("unstable.epsilon")?.map_or(1e-6, |v| v.0),
        }),
    };

    let (csv, json) = match table.take("output.formats") {
        None => (true, true),
        Some(e) => {
            let mut csv = false;
            let mut json = false;
            for f in e.value.split(',').map(str::trim) {
                match f {
                    "csv" => csv = true,
                    "json" => json = true,
                    other => return Err(line_err(e.line, format!("unknown output format `{other}`"))),
                }
            }
            (csv, json)
        }
    };
    let output = OutputConfig {
        dir: table.take("output.dir").map(|e| PathBuf::from(e.value)),
        csv,
        json,
        level_stride: table.count("output.level_stride")?.unwrap_or(1).max(1),
        column_stride: table.count("output.column_stride")?.unwrap_or(1).max(1),
    };

    // keys that only make sense inside a section that was not enabled
    if let Some((key, e)) = table.entries.iter().next() {
        return Err(line_err(e.line, format!("`{key}` has no effect without its section's main key")));
    }

    Ok(ExperimentConfig { problem, grid, tbar, bumps, converge, unstable, output })
}
