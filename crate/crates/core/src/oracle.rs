//! Reference solutions independent of the finite-difference scheme.
//!
//! * Gaussian data `exp(-x^2)` under pure diffusion has the closed form
//!   `(1 + 4Dt)^{-1/2} exp(-x^2 / (1 + 4Dt))`.
//! * General bounded data: heat-kernel convolution by adaptive Gauss-Kronrod
//!   quadrature, truncated at twelve kernel standard deviations.
//! * `f(u) = lambda u`: `e^{lambda t}` times the heat solution.

use crate::error::{Error, Result};
use crate::initial::InitialData;
use crate::reactions::{ReactionKind, ReactionTerm};

pub mod quadrature {
    //! Adaptive 15-point Gauss-Kronrod quadrature.

    const XGK: [f64; 8] = [
        0.991455371120812639206854697526329,
        0.949107912342758524526189684047851,
        0.864864423359769072789712788640926,
        0.741531185599394439863864773280788,
        0.586087235467691130294144845693013,
        0.405845151377397166906606412076961,
        0.207784955007898467600689403773245,
        0.000000000000000000000000000000000,
    ];
    const WGK: [f64; 8] = [
        0.022935322010529224963732008058970,
        0.063092092629978553290700663189204,
        0.104790010322250183839876322541518,
        0.140653259715525918745189590510238,
        0.169004726639267902826583426598550,
        0.190350578064785409913256402421014,
        0.204432940075298892414161999234649,
        0.209482141084727828012999174891714,
    ];
    const WG: [f64; 4] = [
        0.129484966168869693270611432679082,
        0.279705391489276667901467771423780,
        0.381830050505118944950369775488975,
        0.417959183673469387755102040816327,
    ];

    const MAX_DEPTH: u32 = 48;

    /// `(Kronrod estimate, |Kronrod - Gauss|)` on `[a, b]`.
    fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let fc = f(c);
        let mut kron = fc * WGK[7];
        let mut gauss = fc * WG[3];
        for j in 0..7 {
            let dx = h * XGK[j];
            let pair = f(c - dx) + f(c + dx);
            kron += WGK[j] * pair;
            if j % 2 == 1 {
                gauss += WG[j / 2] * pair;
            }
        }
        (kron * h, ((kron - gauss) * h).abs())
    }

    fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (k, err) = gk15(f, a, b);
        if err <= tol || depth >= MAX_DEPTH {
            return k;
        }
        let mid = 0.5 * (a + b);
        adapt(f, a, mid, 0.5 * tol, depth + 1) + adapt(f, mid, b, 0.5 * tol, depth + 1)
    }

    /// `int_a^b f` to absolute tolerance `tol`, starting from `panels` equal pieces.
    pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64, panels: usize) -> f64 {
        if a == b {
            return 0.0;
        }
        let panels = panels.max(1);
        let h = (b - a) / panels as f64;
        let local = tol / panels as f64;
        (0..panels)
            .map(|i| {
                let lo = a + i as f64 * h;
                let hi = if i + 1 == panels { b } else { lo + h };
                adapt(&f, lo, hi, local, 0)
            })
            .sum()
    }

    /// Iterated 2-D integral `int_{t0}^{t1} int_{x0}^{x1} g(x, t) dx dt`.
    pub fn integrate_2d<G: Fn(f64, f64) -> f64>(
        g: G,
        (x0, x1): (f64, f64),
        (t0, t1): (f64, f64),
        tol: f64,
    ) -> f64 {
        let span = (t1 - t0).abs().max(1e-300);
        integrate(|t| integrate(|x| g(x, t), x0, x1, 0.1 * tol / span, 8), t0, t1, 0.5 * tol, 8)
    }
}

/// Absolute tolerance of the heat-kernel quadrature.
pub const QUADRATURE_TOL: f64 = 1e-10;

/// Truncation of the kernel integral, in standard deviations `sqrt(2Dt)`.
const KERNEL_SIGMAS: f64 = 12.0;

/// Heat solution for `u0 = exp(-x^2)`.
pub fn heat_exact_gaussian(x: f64, t: f64, diffusion: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("t must be nonnegative, got {t}")));
    }
    let s = 1.0 + 4.0 * diffusion * t;
    Ok((-x * x / s).exp() / s.sqrt())
}

/// `int (4 pi D t)^{-1/2} exp(-(x - y)^2 / (4 D t)) u0(y) dy`.
pub fn heat_quadrature<F: Fn(f64) -> f64>(u0: F, x: f64, t: f64, diffusion: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!("t must be positive, got {t}")));
    }
    let four_dt = 4.0 * diffusion * t;
    let norm = 1.0 / (std::f64::consts::PI * four_dt).sqrt();
    let sigma = (2.0 * diffusion * t).sqrt();
    let reach = KERNEL_SIGMAS * sigma;
    // integrate over z = y - x with one panel per standard deviation
    let kernel = |z: f64| norm * (-z * z / four_dt).exp() * u0(x + z);
    Ok(quadrature::integrate(kernel, -reach, reach, QUADRATURE_TOL, 2 * KERNEL_SIGMAS as usize))
}

/// Solution of `u_t = D u_xx + lambda u`.
pub fn linear_reaction_exact<F: Fn(f64) -> f64>(
    u0: F,
    lambda: f64,
    x: f64,
    t: f64,
    diffusion: f64,
) -> Result<f64> {
    Ok((lambda * t).exp() * heat_quadrature(u0, x, t, diffusion)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    GaussianExact,
    Quadrature,
    LinearReaction,
}

#[derive(Debug, Clone)]
pub struct OracleSolution {
    pub kind: OracleKind,
    pub initial: InitialData,
    pub diffusion: f64,
    pub lambda: f64,
}

impl OracleSolution {
    /// The oracle matching a problem, or `None` for nonlinear reactions.
    pub fn for_problem(initial: &InitialData, reaction: &ReactionTerm, diffusion: f64) -> Option<Self> {
        let (kind, lambda) = match reaction.kind {
            ReactionKind::Zero if initial.is_gaussian() => (OracleKind::GaussianExact, 0.0),
            ReactionKind::Zero => (OracleKind::Quadrature, 0.0),
            ReactionKind::Linear { lambda } => (OracleKind::LinearReaction, lambda),
            _ => return None,
        };
        Some(OracleSolution { kind, initial: initial.clone(), diffusion, lambda })
    }

    pub fn value(&self, x: f64, t: f64) -> Result<f64> {
        if self.kind == OracleKind::GaussianExact {
            return heat_exact_gaussian(x, t, self.diffusion);
        }
        if t == 0.0 {
            return Ok(self.initial.sample(x));
        }
        let u0 = |y: f64| self.initial.sample(y);
        match self.kind {
            OracleKind::Quadrature => heat_quadrature(u0, x, t, self.diffusion),
            _ => linear_reaction_exact(u0, self.lambda, x, t, self.diffusion),
        }
    }
}
