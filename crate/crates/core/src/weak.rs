//! Grid pairings `<U, phi> = sum U phi dx dt` and weak-solution residuals.
//!
//! Summation by parts on the grid, with `phi` vanishing near the flanks and
//! top of the summation box `S`:
//!
//! ```text
//! sum_S -U (D_t^+ phi + D D_x^2 phi) dx dt
//!   = sum_m U(x, 0) phi(x, 0) dx
//!   + sum_S { phi(x, t + dt) D_t^+ U - phi(x, t) D D_x^2 U } dx dt
//! ```
//!
//! The time term picks up `phi` one level *up* (Abel summation of a forward
//! difference); the space term does not shift. This is exact for any grid
//! function, so the two sides differ only by rounding.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{cells_to_cover, make_grid};
use crate::scheme::{solve_region, Field, FieldRegion, ProblemSpec};
use crate::sum::pairwise_sum;
use crate::testfn::{BumpTestFunction, IndexBox};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ResidualMode {
    #[serde(rename = "exact-derivatives")]
    ExactDerivatives,
    #[serde(rename = "finite-differences")]
    FiniteDifferences,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualReport {
    pub mode: ResidualMode,
    pub dx: f64,
    pub dt: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

fn check_cover(field: &Field, b: &IndexBox, margin_error: bool) -> Result<()> {
    let spec = field.spec();
    let corners = [(b.m_lo, b.n_hi), (b.m_hi, b.n_hi), (b.m_lo, b.n_lo), (b.m_hi, b.n_lo)];
    for (m, n) in corners {
        if !field.contains(m, n) {
            let (x, t) = (spec.x(m), spec.t(n));
            return Err(if margin_error { Error::Margin { x, t } } else { Error::Coverage { x, t } });
        }
    }
    Ok(())
}

/// Solve on a grid with steps `dx`, `dt`, keeping a field that reaches one
/// cell past the summation box of every bump, as [`sbp_terms`] requires.
pub fn field_for_bumps(
    problem: &ProblemSpec,
    dx: f64,
    dt: f64,
    bumps: &[BumpTestFunction],
    allow_unstable: bool,
) -> Result<Field> {
    let mut keep = 0;
    let mut top = 0;
    for phi in bumps {
        let s = phi.support();
        keep = keep.max(cells_to_cover(s.x_min.abs().max(s.x_max.abs()), dx) + 3);
        top = top.max(cells_to_cover(s.t_max.max(0.0), dt) + 3);
    }
    let spec = make_grid(dx, dt, keep + top, problem.diffusion, allow_unstable)?;
    problem.check_declared_bounds(&spec)?;
    solve_region(&spec, problem, FieldRegion { half_width: keep, top_level: top })
}

/// `sum U(x, t) phi(x, t) dx dt` over the grid points of the field.
pub fn pair(field: &Field, phi: &BumpTestFunction) -> Result<f64> {
    let spec = field.spec();
    let b = phi.index_box(spec, 0);
    check_cover(field, &b, false)?;
    let mut terms = Vec::with_capacity(((b.m_hi - b.m_lo + 1) as usize) * (b.n_hi - b.n_lo + 1));
    let cell = spec.dx * spec.dt;
    for n in b.n_lo..=b.n_hi {
        let t = spec.t(n);
        for m in b.m_lo..=b.m_hi {
            let u = field.get(m, n).expect("covered");
            terms.push(u * phi.value(spec.x(m), t) * cell);
        }
    }
    Ok(pairwise_sum(&terms))
}

/// `sum |phi| dx dt` over the same points as [`pair`].
pub fn abs_mass(field: &Field, phi: &BumpTestFunction) -> f64 {
    let spec = field.spec();
    let b = phi.index_box(spec, 0);
    let cell = spec.dx * spec.dt;
    let terms: Vec<f64> = (b.n_lo..=b.n_hi)
        .flat_map(|n| (b.m_lo..=b.m_hi).map(move |m| (m, n)))
        .map(|(m, n)| phi.value(spec.x(m), spec.t(n)).abs() * cell)
        .collect();
    pairwise_sum(&terms)
}

/// Residual of the weak formulation
/// `sum_{t >= 0} { U (-D phi_xx - phi_t) - f(U) phi } dx dt - sum u0 phi(x, 0) dx`,
/// with exact derivatives of `phi` or with `D_x^2 phi`, `D_t^+ phi`.
pub fn weak_residual(
    field: &Field,
    problem: &ProblemSpec,
    phi: &BumpTestFunction,
    mode: ResidualMode,
) -> Result<ResidualReport> {
    let spec = field.spec();
    let mut b = phi.index_box(spec, 1);
    b.n_lo = 0;
    check_cover(field, &b, false)?;
    let d = problem.diffusion;
    let cell = spec.dx * spec.dt;
    let mut terms = Vec::with_capacity(((b.m_hi - b.m_lo + 1) as usize) * (b.n_hi + 1));
    for n in 0..=b.n_hi {
        let t = spec.t(n);
        for m in b.m_lo..=b.m_hi {
            let x = spec.x(m);
            let u = field.get(m, n).expect("covered");
            let (value, phi_t, phi_xx) = match mode {
                ResidualMode::ExactDerivatives => {
                    let v = phi.evaluate(x, t);
                    (v.value, v.dt_derivative, v.dxx_derivative)
                }
                ResidualMode::FiniteDifferences => {
                    (phi.value(x, t), phi.fd_dt(x, t, spec.dt), phi.fd_dxx(x, t, spec.dx))
                }
            };
            let fu = problem.reaction.evaluate(u);
            terms.push((u * (-d * phi_xx - phi_t) - fu * value) * cell);
        }
    }
    let lhs = pairwise_sum(&terms);
    let rhs = initial_term(problem, phi, &b, spec.dx);
    Ok(ResidualReport { mode, dx: spec.dx, dt: spec.dt, lhs, rhs, residual: lhs - rhs })
}

fn initial_term(problem: &ProblemSpec, phi: &BumpTestFunction, b: &IndexBox, dx: f64) -> f64 {
    let terms: Vec<f64> = (b.m_lo..=b.m_hi)
        .map(|m| {
            let x = m as f64 * dx;
            problem.initial.sample(x) * phi.value(x, 0.0) * dx
        })
        .collect();
    pairwise_sum(&terms)
}

/// The three sums of the summation-by-parts identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SbpTerms {
    /// `sum -U (D_t^+ phi + D D_x^2 phi) dx dt`
    pub t_sum: f64,
    /// `sum U(x, 0) phi(x, 0) dx`
    pub initial: f64,
    /// `sum { phi(x, t + dt) D_t^+ U - phi D D_x^2 U } dx dt`
    pub interior: f64,
}

impl SbpTerms {
    pub fn gap(&self) -> f64 {
        (self.t_sum - (self.initial + self.interior)).abs()
    }
}

/// Both sides of the summation-by-parts identity over the box
/// `phi.index_box(spec, 1)` (from level 0). Needs the field one further cell
/// out on each flank and one level above the box.
pub fn sbp_terms(field: &Field, phi: &BumpTestFunction) -> Result<SbpTerms> {
    let spec = field.spec();
    let mut b = phi.index_box(spec, 1);
    b.n_lo = 0;
    let outer = IndexBox { m_lo: b.m_lo - 1, m_hi: b.m_hi + 1, n_lo: 0, n_hi: b.n_hi + 1 };
    check_cover(field, &outer, true)?;
    let d_coef = spec.diffusion / (spec.dx * spec.dx);
    let inv_dt = 1.0 / spec.dt;
    let cell = spec.dx * spec.dt;
    let u = |m: i64, n: usize| field.get(m, n).expect("covered");
    let p = |m: i64, n: usize| phi.value(spec.x(m), spec.t(n));

    let size = ((b.m_hi - b.m_lo + 1) as usize) * (b.n_hi + 1);
    let mut t_terms = Vec::with_capacity(size);
    let mut b_terms = Vec::with_capacity(size);
    for n in 0..=b.n_hi {
        for m in b.m_lo..=b.m_hi {
            let (pc, pu, pl, pr) = (p(m, n), p(m, n + 1), p(m - 1, n), p(m + 1, n));
            let (uc, uu, ul, ur) = (u(m, n), u(m, n + 1), u(m - 1, n), u(m + 1, n));
            let phi_dt = (pu - pc) * inv_dt;
            let phi_dxx = d_coef * ((pl - pc) + (pr - pc));
            t_terms.push(-uc * (phi_dt + phi_dxx) * cell);
            let u_dt = (uu - uc) * inv_dt;
            let u_dxx = d_coef * ((ul - uc) + (ur - uc));
            b_terms.push((pu * u_dt - pc * u_dxx) * cell);
        }
    }
    let init: Vec<f64> = (b.m_lo..=b.m_hi).map(|m| u(m, 0) * p(m, 0) * spec.dx).collect();
    Ok(SbpTerms {
        t_sum: pairwise_sum(&t_terms),
        initial: pairwise_sum(&init),
        interior: pairwise_sum(&b_terms),
    })
}

/// `|T - B|` of the summation-by-parts identity; zero up to rounding.
pub fn sbp_identity_gap(field: &Field, phi: &BumpTestFunction) -> Result<f64> {
    Ok(sbp_terms(field, phi)?.gap())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SbpReport {
    pub t_sum: f64,
    pub initial: f64,
    pub interior: f64,
    pub gap: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Relative tolerance on the summation-by-parts gap.
pub const SBP_TOLERANCE: f64 = 1e-12;

pub fn sbp_report(field: &Field, phi: &BumpTestFunction) -> Result<SbpReport> {
    let terms = sbp_terms(field, phi)?;
    let gap = terms.gap();
    let bound = SBP_TOLERANCE * (1.0 + terms.t_sum.abs());
    Ok(SbpReport {
        t_sum: terms.t_sum,
        initial: terms.initial,
        interior: terms.interior,
        gap,
        bound,
        pass: gap <= bound,
    })
}
