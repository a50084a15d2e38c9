//! Run configuration: one TOML (or JSON) file per run, with one array of
//! cases per subcommand.

use std::path::Path;

use orlicz::conditions::TailOptions;
use orlicz::extrapolation::ProfileFn;
use orlicz::trig::TrigPolyJson;
use orlicz::{NormOptions, SymmdiffMethod, WeightSpec, YoungSpec};
use serde::{Deserialize, Serialize};

use crate::UsageError;

/// What a case is expected to produce. Negative controls set `fail` or
/// `divergent` so that they count as passing when the check behaves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expect {
    #[default]
    Pass,
    Fail,
    Divergent,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Worker threads; `ORLICZ_WORKERS` takes precedence.
    pub workers: Option<usize>,
    #[serde(default)]
    pub luxemburg: Vec<LuxemburgCase>,
    #[serde(default)]
    pub besov: Vec<BesovCase>,
    #[serde(default)]
    pub conditions: Vec<ConditionCase>,
    #[serde(default)]
    pub balls: Vec<BallCase>,
    #[serde(default)]
    pub transfer: Vec<TransferCase>,
    #[serde(default)]
    pub extrapolate: Vec<ExtrapolateCase>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LuxemburgCase {
    pub id: String,
    pub phi: YoungSpec,
    /// A finite sequence (ℓ_Φ norm) ...
    pub values: Option<Vec<f64>>,
    /// ... or a trigonometric polynomial (L_Φ norm on the torus).
    pub polynomial: Option<TrigPolyJson>,
    /// Reference value to compare against.
    pub expected: Option<f64>,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default)]
    pub norm: NormOptions,
    #[serde(default)]
    pub expect: Expect,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BesovCase {
    pub id: String,
    pub phi: YoungSpec,
    pub psi: WeightSpec,
    pub polynomial: TrigPolyJson,
    #[serde(default = "default_n_max")]
    pub n_max: u32,
    /// Also run the dyadic-sum/integral sandwich.
    #[serde(default)]
    pub sandwich: bool,
    #[serde(default)]
    pub expect: Expect,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionCase {
    pub id: String,
    pub phi: YoungSpec,
    /// Weight of the general condition; without it the direct Φ⁻¹(t²)/t²
    /// integral is evaluated.
    pub psi: Option<WeightSpec>,
    #[serde(default = "default_dim")]
    pub d: u32,
    /// Explicit s values; otherwise a log grid from 1 to `s_max`.
    pub s_grid: Option<Vec<f64>>,
    #[serde(default = "default_s_max")]
    pub s_max: f64,
    #[serde(default = "default_points_per_decade")]
    pub points_per_decade: usize,
    #[serde(default)]
    pub tail: TailOptions,
    #[serde(default)]
    pub expect: Expect,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallCase {
    pub id: String,
    pub d: u32,
    pub r: f64,
    pub alpha: f64,
    pub method: SymmdiffMethod,
    #[serde(default)]
    pub expect: Expect,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransferCase {
    pub id: String,
    pub phi: YoungSpec,
    /// Supermultiplicativity constant; defaults per Young function.
    pub c: Option<f64>,
    pub pairs: usize,
    pub seed: u64,
    #[serde(default)]
    pub expect: Expect,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub q: f64,
    pub eps: f64,
    pub f: ProfileFn,
    pub endpoint_exponent: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtrapolateCase {
    pub id: String,
    /// Sobolev embedding W^k_p(ℝ^d) given by (d, k, p) ...
    pub d: Option<u32>,
    pub k: Option<u32>,
    pub p: Option<f64>,
    /// ... or an explicit bound profile.
    pub profile: Option<ProfileConfig>,
    pub alpha: f64,
    #[serde(default)]
    pub expect: Expect,
}

fn default_rel_tol() -> f64 {
    1e-9
}

fn default_n_max() -> u32 {
    6
}

fn default_dim() -> u32 {
    2
}

fn default_s_max() -> f64 {
    1e6
}

fn default_points_per_decade() -> usize {
    4
}

fn parse_text<T: for<'de> Deserialize<'de>>(path: &Path, text: &str) -> Result<T, UsageError> {
    let json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if json {
        serde_json::from_str(text).map_err(|e| UsageError(format!("{}: {e}", path.display())))
    } else {
        toml::from_str(text).map_err(|e| UsageError(format!("{}: {e}", path.display())))
    }
}

fn read(path: &Path) -> Result<String, UsageError> {
    std::fs::read_to_string(path).map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))
}

pub fn load(path: &Path) -> Result<RunConfig, UsageError> {
    let text = read(path)?;
    if text.trim().is_empty() {
        return Err(UsageError(format!("{}: config is empty", path.display())));
    }
    let cfg: RunConfig = parse_text(path, &text)?;
    cfg.validate()?;
    Ok(cfg)
}

/// A single Young function, `{kind, params}`.
pub fn load_young(path: &Path) -> Result<YoungSpec, UsageError> {
    parse_text(path, &read(path)?)
}

fn positive(name: &str, id: &str, v: f64) -> Result<(), UsageError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(UsageError(format!("case {id}: {name} must be positive, got {v}")))
    }
}

impl RunConfig {
    fn validate(&self) -> Result<(), UsageError> {
        if self.workers == Some(0) {
            return Err(UsageError("workers must be at least 1".into()));
        }
        for c in &self.luxemburg {
            positive("rel_tol", &c.id, c.rel_tol)?;
            positive("norm.rel_tol", &c.id, c.norm.rel_tol)?;
            if c.values.is_some() == c.polynomial.is_some() {
                return Err(UsageError(format!("case {}: give exactly one of values, polynomial", c.id)));
            }
        }
        for c in &self.conditions {
            let t = &c.tail;
            for (name, v) in [("tail.chunk", t.chunk), ("tail.chunk_rel", t.chunk_rel), ("tail.tail_rel", t.tail_rel)] {
                positive(name, &c.id, v)?;
            }
            positive("tail.quad.rel_tol", &c.id, t.quad.rel_tol)?;
            positive("s_max", &c.id, c.s_max)?;
        }
        for c in &self.extrapolate {
            let sobolev = c.d.is_some() && c.k.is_some() && c.p.is_some();
            let partial = c.d.is_some() || c.k.is_some() || c.p.is_some();
            if sobolev == c.profile.is_some() || (partial && !sobolev) {
                return Err(UsageError(format!("case {}: give either all of d, k, p or a profile", c.id)));
            }
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.luxemburg.is_empty()
            && self.besov.is_empty()
            && self.conditions.is_empty()
            && self.balls.is_empty()
            && self.transfer.is_empty()
            && self.extrapolate.is_empty()
    }
}
