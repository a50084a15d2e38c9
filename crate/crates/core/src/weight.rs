//! Weights Ψ on [1, ∞) used by Besov–Orlicz norms and the embedding
//! conditions.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::young::{YoungFunction, YoungSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum WeightSpec {
    /// Ψ ≡ c.
    Constant { c: f64 },
    /// Ψ(t) = t^θ.
    Power { theta: f64 },
    /// Ψ(t) = scale · Φ⁻¹(t²) / t.
    InverseSquareOverT { phi: YoungSpec, scale: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WeightSpec", into = "WeightSpec")]
pub struct Weight {
    spec: WeightSpec,
    phi: Option<YoungFunction>,
}

impl TryFrom<WeightSpec> for Weight {
    type Error = crate::error::Error;
    fn try_from(spec: WeightSpec) -> Result<Self> {
        Self::from_spec(spec)
    }
}

impl From<Weight> for WeightSpec {
    fn from(w: Weight) -> Self {
        w.spec
    }
}

impl Weight {
    pub fn from_spec(spec: WeightSpec) -> Result<Self> {
        let phi = match &spec {
            WeightSpec::Constant { c } if !(*c >= 0.0 && c.is_finite()) => {
                return Err(invalid(format!("constant weight must be finite and nonnegative, got {c}")))
            }
            WeightSpec::Power { theta } if !theta.is_finite() => return Err(invalid("weight exponent must be finite")),
            WeightSpec::InverseSquareOverT { phi, scale } => {
                if !(*scale > 0.0 && scale.is_finite()) {
                    return Err(invalid(format!("weight scale must be positive, got {scale}")));
                }
                Some(YoungFunction::from_spec(phi)?)
            }
            _ => None,
        };
        Ok(Self { spec, phi })
    }

    pub fn constant(c: f64) -> Result<Self> {
        Self::from_spec(WeightSpec::Constant { c })
    }

    pub fn power(theta: f64) -> Result<Self> {
        Self::from_spec(WeightSpec::Power { theta })
    }

    /// Ψ(t) = scale · Φ⁻¹(t²)/t.
    pub fn inverse_square_over_t(phi: &YoungFunction, scale: f64) -> Result<Self> {
        Self::from_spec(WeightSpec::InverseSquareOverT { phi: phi.spec().clone(), scale })
    }

    pub fn spec(&self) -> &WeightSpec {
        &self.spec
    }

    pub fn eval(&self, t: f64) -> f64 {
        match (&self.spec, &self.phi) {
            (WeightSpec::Constant { c }, _) => *c,
            (WeightSpec::Power { theta }, _) => t.powf(*theta),
            (WeightSpec::InverseSquareOverT { scale, .. }, Some(phi)) => scale * phi.inverse(t * t) / t,
            _ => unreachable!("constructor stores Φ for this kind"),
        }
    }

    /// ln Ψ(e^{lt}).
    pub fn ln_eval(&self, lt: f64) -> f64 {
        match (&self.spec, &self.phi) {
            (WeightSpec::Constant { c }, _) => c.ln(),
            (WeightSpec::Power { theta }, _) => theta * lt,
            (WeightSpec::InverseSquareOverT { scale, .. }, Some(phi)) => scale.ln() + phi.ln_inverse(2.0 * lt) - lt,
            _ => unreachable!("constructor stores Φ for this kind"),
        }
    }
}
