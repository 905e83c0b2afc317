//! Mesh-refinement studies and the `alpha > 1/2` instability demonstration.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{cells_to_cover, make_grid, required_depth, ALPHA_MAX};
use crate::oracle::OracleSolution;
use crate::reactions::ReactionTerm;
use crate::scheme::{evolve, solve_region, FieldRegion, ProblemSpec};

/// Errors are measured at `t = t_eval` on the points `x = j * stride * dx_0`,
/// `|x| <= x_half`, where `dx_0` is the coarsest mesh. These are grid points
/// of every mesh when `dx` halves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Window {
    pub x_half: f64,
    pub t_eval: f64,
    pub stride: usize,
}

#[derive(Debug, Clone)]
pub enum Reference {
    Oracle(OracleSolution),
    FinestMesh,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mesh {
    pub dx: f64,
    pub dt: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyResult {
    pub meshes: Vec<Mesh>,
    /// One per compared mesh (all meshes for an oracle reference, all but the
    /// finest otherwise).
    pub errors: Vec<f64>,
    /// `log2(e_k / e_{k+1})`.
    pub observed_orders: Vec<f64>,
    pub window: Window,
}

impl StudyResult {
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "dx,dt,error,order")?;
        for (k, e) in self.errors.iter().enumerate() {
            let mesh = self.meshes[k];
            let order = if k == 0 { String::new() } else { format!("{:.16e}", self.observed_orders[k - 1]) };
            writeln!(w, "{:.16e},{:.16e},{:.16e},{}", mesh.dx, mesh.dt, e, order)?;
        }
        Ok(())
    }
}

pub fn observed_orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|e| (e[0] / e[1]).log2()).collect()
}

fn sample_window(
    problem: &ProblemSpec,
    dx: f64,
    alpha: f64,
    window: &Window,
    refine: usize,
    reach: i64,
) -> Result<Vec<f64>> {
    let dt = alpha * dx * dx / problem.diffusion;
    let depth = required_depth(window.x_half, window.t_eval, dx, dt)?;
    let spec = make_grid(dx, dt, depth, problem.diffusion, false)?;
    let top = spec.level_of(window.t_eval).ok_or_else(|| {
        Error::InvalidArgument(format!("t_eval = {} is not a multiple of dt = {dt}", window.t_eval))
    })?;
    let keep = cells_to_cover(window.x_half, dx);
    let field = solve_region(&spec, problem, FieldRegion { half_width: keep, top_level: top })?;
    let step = (window.stride * refine) as i64;
    (-reach..=reach)
        .map(|j| {
            field
                .get(j * step, top)
                .ok_or_else(|| Error::InvalidArgument("window not covered".into()))
        })
        .collect()
}

pub fn refine_study(
    problem: &ProblemSpec,
    dx_list: &[f64],
    alpha: f64,
    window: Window,
    reference: &Reference,
) -> Result<StudyResult> {
    if dx_list.len() < 2 {
        return Err(Error::InvalidArgument("need at least two meshes".into()));
    }
    for pair in dx_list.windows(2) {
        let ratio = pair[0] / pair[1];
        if !(pair[1] > 0.0) || (ratio - 2.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "meshes must halve dx; got {} then {}",
                pair[0], pair[1]
            )));
        }
    }
    if !(alpha > 0.0 && alpha <= ALPHA_MAX) {
        return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1/2], got {alpha}")));
    }
    if window.stride == 0 || !(window.x_half >= 0.0) || !(window.t_eval >= 0.0) {
        return Err(Error::InvalidArgument("window needs stride >= 1 and nonnegative extents".into()));
    }
    let spacing = dx_list[0] * window.stride as f64;
    let reach = (window.x_half / spacing + 1e-9).floor() as i64;
    let samples: Vec<Vec<f64>> = dx_list
        .par_iter()
        .enumerate()
        .map(|(k, &dx)| sample_window(problem, dx, alpha, &window, 1 << k, reach))
        .collect::<Result<_>>()?;
    let meshes: Vec<Mesh> = dx_list
        .iter()
        .map(|&dx| Mesh { dx, dt: alpha * dx * dx / problem.diffusion })
        .collect();

    let sup_diff = |a: &[f64], b: &[f64]| a.iter().zip(b).fold(0.0_f64, |acc, (u, v)| acc.max((u - v).abs()));
    let errors = match reference {
        Reference::Oracle(oracle) => {
            let exact: Vec<f64> = (-reach..=reach)
                .map(|j| oracle.value(j as f64 * spacing, window.t_eval))
                .collect::<Result<_>>()?;
            samples.iter().map(|s| sup_diff(s, &exact)).collect::<Vec<_>>()
        }
        Reference::FinestMesh => {
            let finest = samples.last().expect("at least two meshes");
            samples[..samples.len() - 1].iter().map(|s| sup_diff(s, finest)).collect()
        }
    };
    Ok(StudyResult { observed_orders: observed_orders(&errors), meshes, errors, window })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstabilityDemo {
    pub alpha: f64,
    pub epsilon: f64,
    /// `|1 - 4 alpha|`, the amplification of the alternating mode.
    pub predicted_ratio: f64,
    /// `max |U|` per level.
    pub amplitudes: Vec<f64>,
    /// Ratios of consecutive amplitudes while the earlier one is nonzero.
    pub ratios: Vec<f64>,
    pub overflowed: bool,
}

impl InstabilityDemo {
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "n,amplitude")?;
        for (n, a) in self.amplitudes.iter().enumerate() {
            writeln!(w, "{n},{a:.16e}")?;
        }
        Ok(())
    }

    /// Largest relative deviation of the observed ratios from `|1 - 4 alpha|`.
    pub fn max_ratio_deviation(&self) -> f64 {
        self.ratios
            .iter()
            .map(|r| {
                if self.predicted_ratio == 0.0 {
                    r.abs()
                } else {
                    (r - self.predicted_ratio).abs() / self.predicted_ratio
                }
            })
            .fold(0.0, f64::max)
    }
}

/// Evolve `U(m, 0) = epsilon (-1)^m` with `dx = 1`, `dt = alpha` (`D = 1`).
pub fn instability_demo(alpha: f64, steps: usize, epsilon: f64) -> Result<InstabilityDemo> {
    if steps < 1 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    let spec = make_grid(1.0, alpha, steps, 1.0, true)?;
    let depth = steps as i64;
    let row: Vec<f64> = (-depth..=depth).map(|m| if m % 2 == 0 { epsilon } else { -epsilon }).collect();
    let field = evolve(spec, row, steps, steps, steps, &ReactionTerm::zero())?;
    let amplitudes = field.level_max().to_vec();
    let ratios = amplitudes
        .windows(2)
        .take_while(|a| a[0] > 0.0)
        .map(|a| a[1] / a[0])
        .collect();
    Ok(InstabilityDemo {
        alpha,
        epsilon,
        predicted_ratio: (1.0 - 4.0 * alpha).abs(),
        amplitudes,
        ratios,
        overflowed: field.truncated_at().is_some(),
    })
}
