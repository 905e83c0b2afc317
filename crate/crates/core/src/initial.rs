//! Initial profiles `u0(x)` with their sup-norm and Lipschitz constants.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

type Sampler = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum InitialData {
    /// `exp(-x^2)`
    Gaussian,
    Constant(f64),
    /// `slope * x`; unbounded, so only usable for Lipschitz checks.
    Linear(f64),
    /// `amplitude * sin(wavenumber * x)`
    Sine { amplitude: f64, wavenumber: f64 },
    /// `1 / (1 + x^2)`
    Lorentzian,
    /// `max(0, 1 - |x|)`
    Tent,
    Custom { name: String, sampler: Sampler },
}

impl fmt::Debug for InitialData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "InitialData({})", self.name())
    }
}

impl InitialData {
    pub fn custom(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        InitialData::Custom {
            name: name.into(),
            sampler: Arc::new(f),
        }
    }

    pub fn parse(name: &str, params: &[f64]) -> Result<Self> {
        let arity = |n: usize| -> Result<()> {
            if params.len() == n {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!(
                    "initial datum `{name}` takes {n} parameter(s), got {}",
                    params.len()
                )))
            }
        };
        let data = match name {
            "gaussian" => {
                arity(0)?;
                InitialData::Gaussian
            }
            "constant" => {
                arity(1)?;
                InitialData::Constant(params[0])
            }
            "linear" => {
                arity(1)?;
                InitialData::Linear(params[0])
            }
            "sine" => match params.len() {
                0 => InitialData::Sine { amplitude: 1.0, wavenumber: 1.0 },
                2 => InitialData::Sine { amplitude: params[0], wavenumber: params[1] },
                n => {
                    return Err(Error::InvalidArgument(format!(
                        "initial datum `sine` takes 0 or 2 parameters, got {n}"
                    )))
                }
            },
            "lorentzian" => {
                arity(0)?;
                InitialData::Lorentzian
            }
            "tent" => {
                arity(0)?;
                InitialData::Tent
            }
            other => {
                return Err(Error::InvalidArgument(format!("unknown initial datum `{other}`")))
            }
        };
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "initial datum `{name}` has a non-finite parameter"
            )));
        }
        Ok(data)
    }

    pub fn name(&self) -> String {
        match self {
            InitialData::Gaussian => "gaussian".into(),
            InitialData::Constant(c) => format!("constant({c})"),
            InitialData::Linear(s) => format!("linear({s})"),
            InitialData::Sine { amplitude, wavenumber } => format!("sine({amplitude}, {wavenumber})"),
            InitialData::Lorentzian => "lorentzian".into(),
            InitialData::Tent => "tent".into(),
            InitialData::Custom { name, .. } => name.clone(),
        }
    }

    #[inline]
    pub fn sample(&self, x: f64) -> f64 {
        match self {
            InitialData::Gaussian => (-x * x).exp(),
            InitialData::Constant(c) => *c,
            InitialData::Linear(s) => s * x,
            InitialData::Sine { amplitude, wavenumber } => amplitude * (wavenumber * x).sin(),
            InitialData::Lorentzian => 1.0 / (1.0 + x * x),
            InitialData::Tent => (1.0 - x.abs()).max(0.0),
            InitialData::Custom { sampler, .. } => sampler(x),
        }
    }

    /// `sup |u0|`, when known in closed form.
    pub fn sup_bound(&self) -> Option<f64> {
        match self {
            InitialData::Gaussian | InitialData::Lorentzian | InitialData::Tent => Some(1.0),
            InitialData::Constant(c) => Some(c.abs()),
            InitialData::Linear(s) if *s == 0.0 => Some(0.0),
            InitialData::Linear(_) => Some(f64::INFINITY),
            InitialData::Sine { amplitude, .. } => Some(amplitude.abs()),
            InitialData::Custom { .. } => None,
        }
    }

    /// Global Lipschitz constant of `u0`, when known in closed form.
    pub fn lipschitz(&self) -> Option<f64> {
        match self {
            // max |2x exp(-x^2)| at x = 1/sqrt(2)
            InitialData::Gaussian => Some(std::f64::consts::SQRT_2 * (-0.5f64).exp()),
            InitialData::Constant(_) => Some(0.0),
            InitialData::Linear(s) => Some(s.abs()),
            InitialData::Sine { amplitude, wavenumber } => Some((amplitude * wavenumber).abs()),
            // max |2x / (1 + x^2)^2| at x = 1/sqrt(3)
            InitialData::Lorentzian => Some(9.0 / (8.0 * 3f64.sqrt())),
            InitialData::Tent => Some(1.0),
            InitialData::Custom { .. } => None,
        }
    }

    pub fn is_gaussian(&self) -> bool {
        matches!(self, InitialData::Gaussian)
    }
}
