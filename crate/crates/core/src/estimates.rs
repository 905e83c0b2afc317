//! A-priori estimates for the discrete solution, checked level by level:
//!
//! * sup bound `|U(x, t)| <= e^{K1 t} M + (K0 / K1)(e^{K1 t} - 1)`,
//! * spatial Lipschitz bound `|D_x^+ U| <= L e^{K1 t}`,
//! * time Hoelder bound `|U(x, t1) - U(x, t0)| <= C sqrt(t1 - t0)` for
//!   `t0 < t1 <= tbar`, with `C = (A + 1) sqrt(tbar) + 2 Lbar` obtained from
//!   the parabolic barrier comparison.
//!
//! `A0` uses the ratio `K0 / K1` of the sup bound (the barrier argument quotes
//! that bound); the `K1 -> 0` limit `M + K0 tbar` is taken continuously via
//! `expm1`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scheme::{forward_diff_x, Field, ProblemSpec};

/// Relative slack allowed on every bound.
pub const ESTIMATE_TOLERANCE: f64 = 1e-9;

/// Upper limit on the number of `(t0, t1)` pairs examined by the Hoelder check.
pub const MAX_HOLDER_PAIRS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelEstimate {
    pub t: f64,
    pub measured: f64,
    pub bound: f64,
}

impl LevelEstimate {
    pub fn margin(&self) -> f64 {
        self.bound - self.measured
    }

    fn holds(&self, tolerance: f64) -> bool {
        self.margin() >= -tolerance * (1.0 + self.bound.abs())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    pub estimate_name: String,
    pub tolerance: f64,
    pub worst_margin: f64,
    pub pass: bool,
    pub per_level: Vec<LevelEstimate>,
}

impl EstimateReport {
    fn from_levels(name: &str, per_level: Vec<LevelEstimate>) -> Self {
        let tolerance = ESTIMATE_TOLERANCE;
        let worst_margin = per_level
            .iter()
            .map(LevelEstimate::margin)
            .fold(f64::INFINITY, f64::min);
        let pass = per_level.iter().all(|l| l.holds(tolerance));
        EstimateReport {
            estimate_name: name.to_string(),
            tolerance,
            worst_margin: if per_level.is_empty() { 0.0 } else { worst_margin },
            pass,
            per_level,
        }
    }
}

fn check_nonneg(pairs: &[(&str, f64)]) -> Result<()> {
    for (name, v) in pairs {
        if !(*v >= 0.0) || !v.is_finite() {
            return Err(Error::InvalidArgument(format!("{name} must be finite and nonnegative, got {v}")));
        }
    }
    Ok(())
}

/// `e^{m t} w0`.
pub fn gronwall_envelope(w0: f64, m: f64, t: f64) -> Result<f64> {
    check_nonneg(&[("w0", w0), ("m", m), ("t", t)])?;
    Ok((m * t).exp() * w0)
}

/// `(e^{k1 t} - 1) / k1`, equal to `t` at `k1 = 0`.
fn growth_integral(k1: f64, t: f64) -> f64 {
    if k1 == 0.0 {
        t
    } else {
        (k1 * t).exp_m1() / k1
    }
}

/// Right-hand side of the sup bound at time `t`.
pub fn sup_bound(m: f64, k0: f64, k1: f64, t: f64) -> f64 {
    (k1 * t).exp() * m + k0 * growth_integral(k1, t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HolderConstants {
    pub tbar: f64,
    pub a0: f64,
    pub a_bound: f64,
    pub lbar: f64,
    pub c_holder: f64,
}

pub fn holder_constant(m: f64, k0: f64, k1: f64, l: f64, tbar: f64) -> Result<HolderConstants> {
    check_nonneg(&[("M", m), ("K0", k0), ("K1", k1), ("L", l), ("tbar", tbar)])?;
    if tbar <= 0.0 {
        return Err(Error::InvalidArgument("tbar must be positive".into()));
    }
    let a0 = sup_bound(m, k0, k1, tbar);
    let a_bound = k0 + k1 * a0;
    let lbar = (k1 * tbar).exp() * l;
    let c_holder = (a_bound + 1.0) * tbar.sqrt() + 2.0 * lbar;
    Ok(HolderConstants { tbar, a0, a_bound, lbar, c_holder })
}

pub fn sup_bound_report(field: &Field, problem: &ProblemSpec) -> EstimateReport {
    let spec = field.spec();
    let (k0, k1) = (problem.reaction.k0, problem.reaction.k1);
    let per_level = field
        .level_max()
        .iter()
        .enumerate()
        .map(|(n, &measured)| {
            let t = spec.t(n);
            LevelEstimate { t, measured, bound: sup_bound(problem.init_bound, k0, k1, t) }
        })
        .collect();
    EstimateReport::from_levels("sup_bound", per_level)
}

pub fn space_lipschitz_report(field: &Field, problem: &ProblemSpec) -> EstimateReport {
    let spec = field.spec();
    let k1 = problem.reaction.k1;
    let per_level = forward_diff_x(field)
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_empty())
        .map(|(n, v)| {
            let t = spec.t(n);
            let measured = v.iter().fold(0.0_f64, |a, d| a.max(d.abs()));
            LevelEstimate { t, measured, bound: problem.init_lipschitz * (k1 * t).exp() }
        })
        .collect();
    EstimateReport::from_levels("space_lipschitz", per_level)
}

/// Level and column strides so that at most [`MAX_HOLDER_PAIRS`] pairs are visited.
fn holder_strides(levels: usize, columns: usize) -> (usize, usize) {
    let estimate = |sn: usize, sm: usize| {
        let l = levels.div_ceil(sn);
        let c = columns.div_ceil(sm);
        c * l * l.saturating_sub(1) / 2
    };
    let (mut sn, mut sm) = (1, 1);
    let mut bump_levels = true;
    while estimate(sn, sm) > MAX_HOLDER_PAIRS {
        if bump_levels {
            sn *= 2;
        } else {
            sm *= 2;
        }
        bump_levels = !bump_levels;
    }
    (sn, sm)
}

pub fn time_holder_report(field: &Field, problem: &ProblemSpec, tbar: f64) -> Result<EstimateReport> {
    let spec = field.spec();
    if !(tbar > 0.0) || tbar > field.top_time() * (1.0 + 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "tbar = {tbar} outside (0, {}] covered by the field",
            field.top_time()
        )));
    }
    let n_bar = match spec.level_of(tbar) {
        Some(n) => n.min(field.top_level()),
        None => ((tbar / spec.dt).floor() as usize).min(field.top_level()),
    };
    let constants = holder_constant(
        problem.init_bound,
        problem.reaction.k0,
        problem.reaction.k1,
        problem.init_lipschitz,
        tbar,
    )?;
    let h0 = field.half_width(0) as i64;
    let (sn, sm) = holder_strides(n_bar + 1, (2 * h0 + 1) as usize);
    let sampled: Vec<usize> = (0..=n_bar).step_by(sn).collect();
    let mut worst = vec![f64::NEG_INFINITY; sampled.len()];
    let smi = sm as i64;
    let mut m = -(h0 - h0.rem_euclid(smi));
    let mut column = Vec::with_capacity(sampled.len());
    while m <= h0 {
        column.clear();
        column.extend(sampled.iter().map_while(|&n| field.get(m, n)));
        for (j1, &u1) in column.iter().enumerate().skip(1) {
            let mut best = worst[j1];
            for (j0, &u0) in column[..j1].iter().enumerate() {
                let gap = (sampled[j1] - sampled[j0]) as f64 * spec.dt;
                best = best.max((u1 - u0).abs() / gap.sqrt());
            }
            worst[j1] = best;
        }
        m += smi;
    }
    let per_level = sampled
        .iter()
        .zip(&worst)
        .filter(|(_, w)| w.is_finite())
        .map(|(&n, &measured)| LevelEstimate { t: spec.t(n), measured, bound: constants.c_holder })
        .collect();
    Ok(EstimateReport::from_levels("time_holder", per_level))
}
