//! Triangular space-time grid `{(m dx, n dt) : |m| + n <= N}`.
//!
//! Level `n` holds the `2 (N - n) + 1` points `m = -(N - n) ..= N - n`; every
//! level is computable from the one below it without boundary data.

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest stability ratio for which the explicit stencil has nonnegative weights.
pub const ALPHA_MAX: f64 = 0.5;

/// Geometry of the triangular grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub dx: f64,
    pub dt: f64,
    pub big_n: usize,
    pub diffusion: f64,
    /// `diffusion * dt / dx^2`.
    pub alpha: f64,
    /// Set when the grid was built with `allow_unstable` and `alpha > 1/2`.
    pub unstable: bool,
}

/// A point of the grid, `(m dx, n dt)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridPoint {
    pub m: i64,
    pub n: usize,
}

impl GridPoint {
    pub fn is_in(&self, spec: &GridSpec) -> bool {
        self.m.unsigned_abs() as usize + self.n <= spec.big_n
    }
}

/// Stability ratio `D dt / dx^2`.
pub fn stability_ratio(dx: f64, dt: f64, diffusion: f64) -> f64 {
    diffusion * dt / (dx * dx)
}

pub fn make_grid(
    dx: f64,
    dt: f64,
    big_n: usize,
    diffusion: f64,
    allow_unstable: bool,
) -> Result<GridSpec> {
    for (name, v) in [("dx", dx), ("dt", dt), ("diffusion", diffusion)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "{name} must be finite and positive, got {v}"
            )));
        }
    }
    if big_n < 1 {
        return Err(Error::InvalidArgument("grid depth N must be at least 1".into()));
    }
    let alpha = stability_ratio(dx, dt, diffusion);
    // a few ulps of slack so that `dt = dx^2 / (2 D)` counts as stable
    let unstable = alpha > ALPHA_MAX * (1.0 + 8.0 * f64::EPSILON);
    if unstable && !allow_unstable {
        return Err(Error::StabilityViolation { alpha });
    }
    Ok(GridSpec {
        dx,
        dt,
        big_n,
        diffusion,
        alpha,
        unstable,
    })
}

/// Number of mesh cells needed to cover `length`, tolerant of the rounding in
/// `length / step` (e.g. `10 / 0.1`).
pub fn cells_to_cover(length: f64, step: f64) -> usize {
    let ratio = length / step;
    let nearest = ratio.round();
    if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest as usize
    } else {
        ratio.ceil() as usize
    }
}

/// Smallest depth `N` for which the field is defined on `[-X, X] x [0, T]`.
pub fn required_depth(x_window: f64, t_final: f64, dx: f64, dt: f64) -> Result<usize> {
    if !(x_window >= 0.0 && t_final >= 0.0) || !x_window.is_finite() || !t_final.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "window must be finite and nonnegative, got X = {x_window}, T = {t_final}"
        )));
    }
    if !(dx > 0.0 && dt > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "mesh sizes must be positive, got dx = {dx}, dt = {dt}"
        )));
    }
    let depth = cells_to_cover(x_window, dx) + cells_to_cover(t_final, dt);
    Ok(depth.max(1))
}

impl GridSpec {
    pub fn level_width(&self, n: usize) -> Result<usize> {
        if n > self.big_n {
            return Err(Error::InvalidArgument(format!(
                "level {n} outside grid of depth {}",
                self.big_n
            )));
        }
        Ok(2 * (self.big_n - n) + 1)
    }

    /// Largest `|m|` present at level `n` (caller guarantees `n <= N`).
    pub fn half_width(&self, n: usize) -> usize {
        self.big_n - n
    }

    pub fn x(&self, m: i64) -> f64 {
        m as f64 * self.dx
    }

    pub fn t(&self, n: usize) -> f64 {
        n as f64 * self.dt
    }

    /// Level index of time `t`, if `t` is (to rounding) a multiple of `dt`.
    pub fn level_of(&self, t: f64) -> Option<usize> {
        let r = t / self.dt;
        let n = r.round();
        if n >= 0.0 && (r - n).abs() <= 1e-9 * n.max(1.0) {
            Some(n as usize)
        } else {
            None
        }
    }
}

pub fn level_width(spec: &GridSpec, n: usize) -> Result<usize> {
    spec.level_width(n)
}
