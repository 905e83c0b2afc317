//! Reaction terms `f(u)` together with their Lipschitz data.
//!
//! Every builtin is globally Lipschitz: `|f(u) - f(v)| <= k1 |u - v|`, and
//! therefore `|f(u)| <= k0 + k1 |u|` with `k0 = |f(0)|`.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReactionKind {
    Zero,
    Linear { lambda: f64 },
    Sine,
    /// `u - u^2` on `[-R, R]`, extended by the constant values `f(+-R)`.
    ClampedLogistic { radius: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReactionTerm {
    pub name: String,
    pub kind: ReactionKind,
    pub k0: f64,
    pub k1: f64,
}

impl ReactionKind {
    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        match *self {
            ReactionKind::Zero => 0.0,
            ReactionKind::Linear { lambda } => lambda * u,
            ReactionKind::Sine => u.sin(),
            ReactionKind::ClampedLogistic { radius } => {
                let v = u.clamp(-radius, radius);
                v - v * v
            }
        }
    }

    fn lipschitz(&self) -> f64 {
        match *self {
            ReactionKind::Zero => 0.0,
            ReactionKind::Linear { lambda } => lambda.abs(),
            ReactionKind::Sine => 1.0,
            // sup |1 - 2u| over [-R, R], attained at u = -R
            ReactionKind::ClampedLogistic { radius } => 1.0 + 2.0 * radius,
        }
    }
}

impl ReactionTerm {
    pub fn new(kind: ReactionKind) -> Self {
        let name = match kind {
            ReactionKind::Zero => "zero".to_string(),
            ReactionKind::Linear { lambda } => format!("linear({lambda})"),
            ReactionKind::Sine => "sine".to_string(),
            ReactionKind::ClampedLogistic { radius } => format!("clamped_logistic({radius})"),
        };
        ReactionTerm {
            name,
            k0: kind.eval(0.0).abs(),
            k1: kind.lipschitz(),
            kind,
        }
    }

    pub fn zero() -> Self {
        Self::new(ReactionKind::Zero)
    }

    #[inline]
    pub fn evaluate(&self, u: f64) -> f64 {
        self.kind.eval(u)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind, ReactionKind::Zero)
    }
}

/// Build a registry reaction by name: `zero`, `linear` (lambda), `sine`,
/// `clamped_logistic` (R > 0).
pub fn make_builtin(name: &str, params: &[f64]) -> Result<ReactionTerm> {
    let arity = |n: usize| -> Result<()> {
        if params.len() == n {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "reaction `{name}` takes {n} parameter(s), got {}",
                params.len()
            )))
        }
    };
    let kind = match name {
        "zero" => {
            arity(0)?;
            ReactionKind::Zero
        }
        "linear" => {
            arity(1)?;
            if !params[0].is_finite() {
                return Err(Error::InvalidArgument("linear rate must be finite".into()));
            }
            ReactionKind::Linear { lambda: params[0] }
        }
        "sine" => {
            arity(0)?;
            ReactionKind::Sine
        }
        "clamped_logistic" => {
            arity(1)?;
            let radius = params[0];
            if !(radius > 0.0 && radius.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "clamped_logistic radius must be positive, got {radius}"
                )));
            }
            ReactionKind::ClampedLogistic { radius }
        }
        other => {
            return Err(Error::InvalidArgument(format!("unknown reaction `{other}`")));
        }
    };
    Ok(ReactionTerm::new(kind))
}

/// Largest difference quotient of `term` over adjacent pairs of `samples`
/// equally spaced points in `[lo, hi]`.
pub fn empirical_lipschitz(term: &ReactionTerm, lo: f64, hi: f64, samples: usize) -> f64 {
    assert!(lo < hi && samples >= 2, "need lo < hi and at least two samples");
    let h = (hi - lo) / (samples - 1) as f64;
    let mut prev_u = lo;
    let mut prev_f = term.evaluate(lo);
    let mut worst = 0.0_f64;
    for i in 1..samples {
        let u = if i + 1 == samples { hi } else { lo + i as f64 * h };
        let fu = term.evaluate(u);
        worst = worst.max((fu - prev_f).abs() / (u - prev_u));
        prev_u = u;
        prev_f = fu;
    }
    worst
}
