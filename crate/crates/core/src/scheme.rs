//! Explicit forward-time centred-space scheme on the triangular grid.
//!
//! `U(x, t + dt) = U + alpha ((U(x - dx) - U) + (U(x + dx) - U)) + dt f(U)`,
//! i.e. `D_t^+ U = D D_x^2 U + f(U)` solved for the new level. The stencil is
//! written in increment form so that constants are preserved bitwise and the
//! neighbour sum is symmetric (even data gives palindromic rows).

use std::io::{self, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::initial::InitialData;
use crate::reactions::ReactionTerm;

/// Rows at least this wide are updated in parallel.
const PAR_MIN_WIDTH: usize = 1 << 14;

/// Problem data: diffusion, reaction and initial profile with its declared
/// bound `M >= sup |u0|` and Lipschitz constant `L`.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub diffusion: f64,
    pub reaction: ReactionTerm,
    pub initial: InitialData,
    pub init_bound: f64,
    pub init_lipschitz: f64,
}

impl ProblemSpec {
    /// Uses the closed-form `M` and `L` of a builtin initial datum.
    pub fn new(diffusion: f64, reaction: ReactionTerm, initial: InitialData) -> Result<Self> {
        let (m, l) = match (initial.sup_bound(), initial.lipschitz()) {
            (Some(m), Some(l)) => (m, l),
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "initial datum `{}` has no closed-form bounds; use with_bounds",
                    initial.name()
                )))
            }
        };
        Self::with_bounds(diffusion, reaction, initial, m, l)
    }

    pub fn with_bounds(
        diffusion: f64,
        reaction: ReactionTerm,
        initial: InitialData,
        init_bound: f64,
        init_lipschitz: f64,
    ) -> Result<Self> {
        if !(diffusion > 0.0 && diffusion.is_finite()) {
            return Err(Error::InvalidArgument(format!("diffusion must be positive, got {diffusion}")));
        }
        if !(init_bound >= 0.0) || !(init_lipschitz >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "M and L must be nonnegative, got M = {init_bound}, L = {init_lipschitz}"
            )));
        }
        Ok(ProblemSpec { diffusion, reaction, initial, init_bound, init_lipschitz })
    }

    /// Spot-check the declared `M` and `L` against `u0` sampled on level 0.
    pub fn check_declared_bounds(&self, spec: &GridSpec) -> Result<()> {
        let n = spec.big_n as i64;
        let mut prev = self.initial.sample(spec.x(-n));
        for m in -n..=n {
            let u = self.initial.sample(spec.x(m));
            if !u.is_finite() {
                return Err(Error::InvalidInput(format!("u0 is not finite at x = {}", spec.x(m))));
            }
            if u.abs() > self.init_bound * (1.0 + 1e-12) + 1e-300 {
                return Err(Error::InvalidInput(format!(
                    "|u0({})| = {} exceeds declared M = {}",
                    spec.x(m),
                    u.abs(),
                    self.init_bound
                )));
            }
            if m > -n {
                let q = (u - prev).abs() / spec.dx;
                if q > self.init_lipschitz * (1.0 + 1e-9) + 1e-12 {
                    return Err(Error::InvalidInput(format!(
                        "difference quotient {q} of u0 near x = {} exceeds declared L = {}",
                        spec.x(m),
                        self.init_lipschitz
                    )));
                }
            }
            prev = u;
        }
        Ok(())
    }
}

#[inline(always)]
fn update(left: f64, centre: f64, right: f64, alpha: f64, dt: f64, reaction: &ReactionTerm) -> f64 {
    centre + alpha * ((left - centre) + (right - centre)) + dt * reaction.evaluate(centre)
}

fn step_into(row: &[f64], out: &mut [f64], alpha: f64, dt: f64, reaction: &ReactionTerm) {
    debug_assert_eq!(out.len() + 2, row.len());
    if out.len() >= PAR_MIN_WIDTH {
        out.par_iter_mut()
            .enumerate()
            .for_each(|(i, o)| *o = update(row[i], row[i + 1], row[i + 2], alpha, dt, reaction));
    } else {
        for (o, w) in out.iter_mut().zip(row.windows(3)) {
            *o = update(w[0], w[1], w[2], alpha, dt, reaction);
        }
    }
}

/// Advance one level; the output is two entries shorter than `row`.
pub fn step_level(row: &[f64], spec: &GridSpec, reaction: &ReactionTerm) -> Result<Vec<f64>> {
    if row.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "row of length {} is too short to step",
            row.len()
        )));
    }
    let mut out = vec![0.0; row.len() - 2];
    step_into(row, &mut out, spec.alpha, spec.dt, reaction);
    Ok(out)
}

/// Part of the triangle to keep: `|m| <= half_width`, levels `0..=top_level`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldRegion {
    pub half_width: usize,
    pub top_level: usize,
}

/// Approximate solution `U` stored level by level. Row `n` holds
/// `m = -h(n) ..= h(n)` with `h(n) = min(N - n, kept half width)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    spec: GridSpec,
    rows: Vec<Vec<f64>>,
    level_max: Vec<f64>,
    truncated_at: Option<usize>,
}

impl Field {
    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn levels(&self) -> usize {
        self.rows.len()
    }

    pub fn top_level(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn top_time(&self) -> f64 {
        self.spec.t(self.top_level())
    }

    pub fn row(&self, n: usize) -> &[f64] {
        &self.rows[n]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Largest stored `|m|` at level `n`.
    pub fn half_width(&self, n: usize) -> usize {
        (self.rows[n].len() - 1) / 2
    }

    #[inline]
    pub fn get(&self, m: i64, n: usize) -> Option<f64> {
        let row = self.rows.get(n)?;
        let h = ((row.len() - 1) / 2) as i64;
        if m.abs() > h {
            None
        } else {
            Some(row[(m + h) as usize])
        }
    }

    pub fn contains(&self, m: i64, n: usize) -> bool {
        n < self.rows.len() && m.unsigned_abs() as usize <= self.half_width(n)
    }

    /// Per-level `max |U|` over the stored part.
    pub fn level_max(&self) -> &[f64] {
        &self.level_max
    }

    pub fn max_abs(&self) -> f64 {
        self.level_max.iter().copied().fold(0.0, f64::max)
    }

    /// First level that overflowed in an unstable run; the field stops below it.
    pub fn truncated_at(&self) -> Option<usize> {
        self.truncated_at
    }

    /// Build a field from explicit rows (symmetric about `m = 0`, odd lengths),
    /// e.g. to perturb a computed solution.
    pub fn from_rows(spec: GridSpec, rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidArgument("field needs at least one level".into()));
        }
        for (n, r) in rows.iter().enumerate() {
            if r.len() % 2 == 0 || n > spec.big_n || (r.len() - 1) / 2 > spec.big_n - n {
                return Err(Error::InvalidArgument(format!("row {n} has invalid length {}", r.len())));
            }
        }
        let level_max = rows.iter().map(|r| max_abs(r)).collect();
        Ok(Field { spec, rows, level_max, truncated_at: None })
    }

    pub fn with_value(&self, m: i64, n: usize, value: f64) -> Option<Field> {
        let h = self.half_width(n) as i64;
        if m.abs() > h {
            return None;
        }
        let mut rows = self.rows.clone();
        rows[n][(m + h) as usize] = value;
        Field::from_rows(self.spec, rows).ok()
    }

    /// Dump as CSV `m,n,x,t,u`, level ascending then `m` ascending, with every
    /// `level_stride`-th level and `column_stride`-th column (strides >= 1,
    /// anchored at `m = 0`).
    pub fn write_csv<W: Write>(&self, mut w: W, level_stride: usize, column_stride: usize) -> io::Result<()> {
        let ls = level_stride.max(1);
        let cs = column_stride.max(1) as i64;
        writeln!(w, "m,n,x,t,u")?;
        for n in (0..self.levels()).step_by(ls) {
            let h = self.half_width(n) as i64;
            let first = -(h - h.rem_euclid(cs));
            let t = self.spec.t(n);
            let mut m = first;
            while m <= h {
                let u = self.rows[n][(m + h) as usize];
                writeln!(w, "{},{},{:.16e},{:.16e},{:.16e}", m, n, self.spec.x(m), t, u)?;
                m += cs;
            }
        }
        Ok(())
    }
}

fn max_abs(row: &[f64]) -> f64 {
    row.iter().fold(0.0_f64, |a, v| a.max(v.abs()))
}

/// Solve on the whole triangle.
pub fn solve(spec: &GridSpec, problem: &ProblemSpec) -> Result<Field> {
    solve_region(
        spec,
        problem,
        FieldRegion { half_width: spec.big_n, top_level: spec.big_n },
    )
}

/// Solve, keeping only `|m| <= region.half_width` up to `region.top_level`.
/// Stored values coincide with those of [`solve`]; only the domain of
/// dependence of the kept region is computed.
pub fn solve_region(spec: &GridSpec, problem: &ProblemSpec, region: FieldRegion) -> Result<Field> {
    let rel = (spec.diffusion - problem.diffusion).abs() / problem.diffusion;
    if rel > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "grid diffusion {} does not match problem diffusion {}",
            spec.diffusion, problem.diffusion
        )));
    }
    if region.top_level > spec.big_n {
        return Err(Error::InvalidArgument(format!(
            "top level {} beyond grid depth {}",
            region.top_level, spec.big_n
        )));
    }
    let keep = region.half_width.min(spec.big_n);
    let depth = (keep + region.top_level).min(spec.big_n) as i64;
    let current: Vec<f64> = (-depth..=depth).map(|m| problem.initial.sample(spec.x(m))).collect();
    if let Some(i) = current.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "initial sample at x = {} is not finite",
            spec.x(i as i64 - depth)
        )));
    }
    evolve(*spec, current, depth as usize, keep, region.top_level, &problem.reaction)
}

/// Evolve an explicit level-0 row of half width `depth`.
pub(crate) fn evolve(
    spec: GridSpec,
    mut current: Vec<f64>,
    depth: usize,
    keep: usize,
    top_level: usize,
    reaction: &ReactionTerm,
) -> Result<Field> {
    debug_assert_eq!(current.len(), 2 * depth + 1);
    let crop = |row: &[f64], n: usize| -> Vec<f64> {
        let h = depth - n;
        let k = keep.min(spec.big_n - n).min(h);
        row[h - k..=h + k].to_vec()
    };
    let mut rows = Vec::with_capacity(top_level + 1);
    let mut level_max = Vec::with_capacity(top_level + 1);
    let first = crop(&current, 0);
    level_max.push(max_abs(&first));
    rows.push(first);
    let mut next = Vec::with_capacity(current.len());
    let mut truncated_at = None;
    for n in 0..top_level {
        next.clear();
        next.resize(current.len() - 2, 0.0);
        step_into(&current, &mut next, spec.alpha, spec.dt, reaction);
        if next.iter().any(|v| !v.is_finite()) {
            if spec.unstable {
                truncated_at = Some(n + 1);
                break;
            }
            return Err(Error::NonFinite { level: n + 1 });
        }
        std::mem::swap(&mut current, &mut next);
        let stored = crop(&current, n + 1);
        level_max.push(max_abs(&stored));
        rows.push(stored);
    }
    Ok(Field { spec, rows, level_max, truncated_at })
}

/// `max |D_t^+ U - D D_x^2 U - f(U)|` over all points where the stencil fits.
pub fn discrete_residual_max(field: &Field, reaction: &ReactionTerm) -> f64 {
    let spec = field.spec();
    let inv_dt = 1.0 / spec.dt;
    let diff_coef = spec.diffusion / (spec.dx * spec.dx);
    let mut worst = 0.0_f64;
    for n in 0..field.levels().saturating_sub(1) {
        let lo = field.row(n);
        let h0 = field.half_width(n) as i64;
        let h1 = field.half_width(n + 1) as i64;
        let reach = h1.min(h0 - 1);
        for m in -reach..=reach {
            let i = (m + h0) as usize;
            let (l, c, r) = (lo[i - 1], lo[i], lo[i + 1]);
            let up = field.row(n + 1)[(m + h1) as usize];
            let res = (up - c) * inv_dt - diff_coef * ((l - c) + (r - c)) - reaction.evaluate(c);
            worst = worst.max(res.abs());
        }
    }
    worst
}

/// `V = D_x^+ U`; row `n` starts at `m = -h(n)` and is one shorter than row `n` of `U`.
pub fn forward_diff_x(field: &Field) -> Vec<Vec<f64>> {
    let dx = field.spec().dx;
    field
        .rows()
        .iter()
        .map(|r| r.windows(2).map(|w| (w[1] - w[0]) / dx).collect())
        .collect()
}
