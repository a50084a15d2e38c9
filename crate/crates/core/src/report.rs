//! Structured outcomes of numerical checks.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Serde adapter for floats that may be infinite or NaN; JSON numbers cannot
/// carry those, so they are written as the strings "inf", "-inf", "nan".
pub mod float {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else if x.is_nan() {
            s.serialize_str("nan")
        } else if *x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(de::Error::custom(format!("not a float: {other}"))),
            },
        }
    }
}

pub mod float_map {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use std::collections::BTreeMap;

    #[derive(Serialize, Deserialize)]
    struct F(#[serde(with = "super::float")] f64);

    pub fn serialize<S: Serializer>(m: &BTreeMap<String, f64>, s: S) -> Result<S::Ok, S::Error> {
        let view: BTreeMap<&String, F> = m.iter().map(|(k, v)| (k, F(*v))).collect();
        view.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<String, f64>, D::Error> {
        let raw = BTreeMap::<String, F>::deserialize(d)?;
        Ok(raw.into_iter().map(|(k, v)| (k, v.0)).collect())
    }
}

/// Worst case of a condition tested over a finite set of points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition: String,
    /// Tested points; pairs and triples are stored as short vectors.
    pub tested: Vec<Vec<f64>>,
    /// Minimum margin over the tested points; negative means violated.
    #[serde(with = "float")]
    pub worst_margin: f64,
    pub witness: Vec<f64>,
    pub tolerance: f64,
    pub passed: bool,
}

impl ConditionReport {
    /// Builds a report from per-point margins. Points with NaN margins count
    /// as failures.
    pub fn from_margins(condition: &str, tested: Vec<Vec<f64>>, margins: &[f64], tolerance: f64) -> Self {
        assert_eq!(tested.len(), margins.len());
        let mut worst = f64::INFINITY;
        let mut at = 0;
        for (i, &m) in margins.iter().enumerate() {
            let m = if m.is_nan() { f64::NEG_INFINITY } else { m };
            if m < worst {
                worst = m;
                at = i;
            }
        }
        let witness = tested.get(at).cloned().unwrap_or_default();
        let passed = !tested.is_empty() && worst >= -tolerance;
        Self { condition: condition.to_string(), tested, worst_margin: worst, witness, tolerance, passed }
    }

    pub fn recompute_pass(&self) -> bool {
        !self.tested.is_empty() && self.worst_margin >= -self.tolerance
    }
}

/// One checked inequality `lhs <= rhs * (1 + rel_tol)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inequality {
    pub name: String,
    #[serde(with = "float")]
    pub lhs: f64,
    #[serde(with = "float")]
    pub rhs: f64,
    pub rel_tol: f64,
}

impl Inequality {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64, rel_tol: f64) -> Self {
        Self { name: name.into(), lhs, rhs, rel_tol }
    }

    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs + self.rel_tol * self.rhs.abs()
    }

    /// rhs - lhs, the absolute slack.
    pub fn margin(&self) -> f64 {
        self.rhs - self.lhs
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub inputs: serde_json::Value,
    pub inequalities: Vec<Inequality>,
    #[serde(with = "float_map")]
    pub quantities: BTreeMap<String, f64>,
    pub passed: bool,
    pub tolerance_source: String,
    /// Timing sidecar; excluded from byte comparisons by the CLI.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl VerificationReport {
    pub fn new(check: &str, inputs: serde_json::Value, tolerance_source: &str) -> Self {
        Self {
            check: check.to_string(),
            inputs,
            inequalities: Vec::new(),
            quantities: BTreeMap::new(),
            passed: true,
            tolerance_source: tolerance_source.to_string(),
            wall_time_ms: None,
        }
    }

    pub fn push(&mut self, ineq: Inequality) {
        self.inequalities.push(ineq);
        self.passed = self.recompute_pass();
    }

    pub fn quantity(&mut self, key: &str, value: f64) {
        self.quantities.insert(key.to_string(), value);
    }

    pub fn recompute_pass(&self) -> bool {
        self.inequalities.iter().all(Inequality::holds)
    }

    /// Minimum slack `rhs - lhs` over all inequalities.
    pub fn worst_margin(&self) -> f64 {
        self.inequalities.iter().map(Inequality::margin).fold(f64::INFINITY, f64::min)
    }
}
