//! Separable mollifier test functions
//! `phi(x, t) = a psi((x - xc) / rx) psi((t - tc) / rt)`,
//! `psi(s) = exp(-1 / (1 - s^2))` on `|s| < 1` and zero elsewhere.

use serde::{Deserialize, Serialize};

use crate::grid::GridSpec;

/// Points this close to the edge of the support evaluate to exact zeros.
const EDGE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpTestFunction {
    pub x_center: f64,
    pub t_center: f64,
    pub x_radius: f64,
    pub t_radius: f64,
    pub amplitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpValue {
    pub value: f64,
    pub dt_derivative: f64,
    pub dxx_derivative: f64,
}

/// `(psi, psi', psi'')` at `s`.
fn mollifier(s: f64) -> (f64, f64, f64) {
    if s.abs() >= 1.0 - EDGE {
        return (0.0, 0.0, 0.0);
    }
    let q = 1.0 - s * s;
    let psi = (-1.0 / q).exp();
    let d1 = psi * (-2.0 * s / (q * q));
    let s2 = s * s;
    let d2 = psi * (6.0 * s2 * s2 - 2.0) / (q * q * q * q);
    (psi, d1, d2)
}

/// Axis-aligned rectangle in the `(x, t)` plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub x_min: f64,
    pub x_max: f64,
    pub t_min: f64,
    pub t_max: f64,
}

/// Inclusive grid index box `m_lo..=m_hi`, `n_lo..=n_hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexBox {
    pub m_lo: i64,
    pub m_hi: i64,
    pub n_lo: usize,
    pub n_hi: usize,
}

impl BumpTestFunction {
    pub fn new(x_center: f64, t_center: f64, x_radius: f64, t_radius: f64, amplitude: f64) -> Self {
        assert!(x_radius > 0.0 && t_radius > 0.0, "bump radii must be positive");
        BumpTestFunction { x_center, t_center, x_radius, t_radius, amplitude }
    }

    /// Unit bump on `(-1, 1)^2` shifted to `(xc, tc)`.
    pub fn standard(x_center: f64, t_center: f64) -> Self {
        Self::new(x_center, t_center, 1.0, 1.0, 1.0)
    }

    pub fn evaluate(&self, x: f64, t: f64) -> BumpValue {
        let (px, _, ddpx) = mollifier((x - self.x_center) / self.x_radius);
        if px == 0.0 {
            return BumpValue { value: 0.0, dt_derivative: 0.0, dxx_derivative: 0.0 };
        }
        let (pt, dpt, _) = mollifier((t - self.t_center) / self.t_radius);
        let a = self.amplitude;
        BumpValue {
            value: a * px * pt,
            dt_derivative: a * px * dpt / self.t_radius,
            dxx_derivative: a * ddpx * pt / (self.x_radius * self.x_radius),
        }
    }

    #[inline]
    pub fn value(&self, x: f64, t: f64) -> f64 {
        let (px, _, _) = mollifier((x - self.x_center) / self.x_radius);
        if px == 0.0 {
            return 0.0;
        }
        self.amplitude * px * mollifier((t - self.t_center) / self.t_radius).0
    }

    /// Closed support box.
    pub fn support(&self) -> Region {
        Region {
            x_min: self.x_center - self.x_radius,
            x_max: self.x_center + self.x_radius,
            t_min: self.t_center - self.t_radius,
            t_max: self.t_center + self.t_radius,
        }
    }

    /// Grid indices (with `n >= 0`) of the support box widened by `margin` cells.
    /// Every grid point where `phi != 0` lies strictly inside the box when
    /// `margin >= 1`.
    pub fn index_box(&self, spec: &GridSpec, margin: usize) -> IndexBox {
        let s = self.support();
        let k = margin as i64;
        let m_lo = (s.x_min / spec.dx).floor() as i64 - k;
        let m_hi = (s.x_max / spec.dx).ceil() as i64 + k;
        let n_lo = ((s.t_min / spec.dt).floor() as i64 - k).max(0) as usize;
        let n_hi = ((s.t_max / spec.dt).ceil() as i64 + k).max(0) as usize;
        IndexBox { m_lo, m_hi, n_lo, n_hi }
    }

    /// Support box widened by one mesh cell, the region where `phi`, `D_t^+ phi`
    /// or `D_x^2 phi` can be nonzero.
    pub fn default_region(&self, spec: &GridSpec) -> Region {
        let s = self.support();
        Region {
            x_min: s.x_min - spec.dx,
            x_max: s.x_max + spec.dx,
            t_min: s.t_min - spec.dt,
            t_max: s.t_max + spec.dt,
        }
    }

    pub fn fd_dt(&self, x: f64, t: f64, dt: f64) -> f64 {
        (self.value(x, t + dt) - self.value(x, t)) / dt
    }

    pub fn fd_dxx(&self, x: f64, t: f64, dx: f64) -> f64 {
        let c = self.value(x, t);
        ((self.value(x - dx, t) - c) + (self.value(x + dx, t) - c)) / (dx * dx)
    }
}

/// Largest consistency errors `|phi_t - D_t^+ phi|` and `|phi_xx - D_x^2 phi|`
/// over the grid points in `region`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FdConsistency {
    pub eps_t_max: f64,
    pub eps_xx_max: f64,
}

pub fn fd_consistency_report(phi: &BumpTestFunction, spec: &GridSpec, region: &Region) -> FdConsistency {
    let m_lo = (region.x_min / spec.dx).ceil() as i64;
    let m_hi = (region.x_max / spec.dx).floor() as i64;
    let n_lo = (region.t_min / spec.dt).ceil() as i64;
    let n_hi = (region.t_max / spec.dt).floor() as i64;
    let mut out = FdConsistency { eps_t_max: 0.0, eps_xx_max: 0.0 };
    for n in n_lo..=n_hi {
        let t = n as f64 * spec.dt;
        for m in m_lo..=m_hi {
            let x = spec.x(m);
            let exact = phi.evaluate(x, t);
            out.eps_t_max = out.eps_t_max.max((exact.dt_derivative - phi.fd_dt(x, t, spec.dt)).abs());
            out.eps_xx_max = out.eps_xx_max.max((exact.dxx_derivative - phi.fd_dxx(x, t, spec.dx)).abs());
        }
    }
    out
}
